// Command-line pipeline: generate -> embed -> train -> synthesize -> evaluate.
// Every command is a pure function of (config, input files, seed); reruns with
// identical seeds produce identical artifacts (recorded wall-clock timings in
// synthesize/evaluate outputs excepted).
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "nces/datagen.hpp"
#include "nces/decode.hpp"
#include "nces/embeddings.hpp"
#include "nces/kb.hpp"
#include "nces/reasoner.hpp"
#include "nces/synthesizers.hpp"
#include "nces/train.hpp"

namespace fs = std::filesystem;
using namespace nces;

namespace {

struct RunConfig {
    std::string kb_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    int d = 40;
    int seq_len = 32;       // L
    int n = 0;              // 0 -> min(|N_I|/2, 1000)
    int inducing = 32;      // m
    int heads = 4;
    int hidden = 256;
    int epochs = 500;
    int batch_size = 256;   // N
    double lr = 0.0003;
    double grad_clip = 5.0; // gc
    double split_ratio = 0.9;
    int max_len = 32;
    int budget = 200;
    int transe_epochs = 100;
    double transe_lr = 0.01;
    double transe_margin = 1.0;
    std::vector<std::string> archs = {"st"};
    std::string embeddings_path;
    std::vector<std::string> checkpoints;
    std::string problems_path;
    std::string predictions_path;
    std::string report_path;
};

void add_common(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--kb", cfg.kb_path, "KB text file")->required();
    cmd->add_option("--out-dir", cfg.out_dir, "output directory");
    cmd->add_option("--seed", cfg.seed, "RNG seed");
}

int cmd_generate(const RunConfig& cfg) {
    KnowledgeBase kb = load_kb(cfg.kb_path);
    Reasoner reasoner(kb);
    auto exprs = generate_expressions(reasoner, cfg.max_len, cfg.budget, cfg.seed);
    exprs = filter_redundant(reasoner, exprs);
    int n = cfg.n > 0 ? cfg.n : default_example_budget(kb);
    auto problems = make_learning_problems(reasoner, exprs, n, cfg.seed);
    auto split = split_train_test(problems, cfg.split_ratio, cfg.seed);
    fs::create_directories(cfg.out_dir);
    save_dataset((fs::path(cfg.out_dir) / "train.txt").string(), split.train, kb);
    save_dataset((fs::path(cfg.out_dir) / "test.txt").string(), split.test, kb);
    std::cout << "expressions: " << exprs.size() << "\nproblems: " << problems.size()
              << "\ntrain: " << split.train.size() << "\ntest: " << split.test.size()
              << "\nn: " << n << "\n";
    return 0;
}

int cmd_embed(const RunConfig& cfg) {
    KnowledgeBase kb = load_kb(cfg.kb_path);
    TripleStore store = kb_to_triples(kb);
    TransEConfig tc;
    tc.d = cfg.d;
    tc.epochs = cfg.transe_epochs;
    tc.margin = cfg.transe_margin;
    tc.lr = cfg.transe_lr;
    tc.seed = cfg.seed;
    EmbeddingTable table = train_transe(store, tc);
    fs::create_directories(cfg.out_dir);
    std::string out = cfg.embeddings_path.empty()
                          ? (fs::path(cfg.out_dir) / "embeddings.txt").string()
                          : cfg.embeddings_path;
    save_embeddings(out, table);
    std::cout << "triples: " << store.triples.size() << "\nentities: " << store.entities.size()
              << "\nmean positive distance: " << mean_positive_distance(store, table)
              << "\nmean corrupted distance: " << mean_corrupted_distance(store, table, cfg.seed)
              << "\nwrote " << out << "\n";
    return 0;
}

synth::ModelConfig model_config(const RunConfig& cfg, const Vocabulary& vocab, int d) {
    synth::ModelConfig mc;
    mc.d = d;
    mc.heads = cfg.heads;
    mc.inducing = cfg.inducing;
    mc.hidden = cfg.hidden;
    mc.num_classes = vocab.size() + 1;
    mc.seq_len = cfg.seq_len;
    return mc;
}

int cmd_train(const RunConfig& cfg) {
    KnowledgeBase kb = load_kb(cfg.kb_path);
    Vocabulary vocab = build_vocabulary(kb);
    EmbeddingTable table = load_embeddings(cfg.embeddings_path);
    auto problems = load_dataset(cfg.problems_path, kb);

    fs::create_directories(cfg.out_dir);
    for (const auto& arch : cfg.archs) {
        auto model = synth::make_synthesizer(arch, model_config(cfg, vocab, table.d), cfg.seed);
        auto samples =
            synth::build_training_samples(problems, table, kb, vocab, cfg.seq_len);
        synth::TrainConfig tc;
        tc.epochs = cfg.epochs;
        tc.batch_size = cfg.batch_size;
        tc.lr = cfg.lr;
        tc.grad_clip = cfg.grad_clip;
        tc.seed = cfg.seed;
        auto history = synth::train_synthesizer(*model, samples, tc,
                                                [&](int epoch, const synth::EpochMetrics& m) {
            if ((epoch + 1) % 10 == 0 || epoch == 0)
                std::cout << arch << " epoch " << epoch + 1 << " loss " << m.loss
                          << " soft " << m.soft_acc << " hard " << m.hard_acc << "\n";
            return true;
        });
        synth::save_checkpoint((fs::path(cfg.out_dir) / (arch + ".ckpt")).string(), *model,
                               vocab.fingerprint());
        synth::save_metrics_csv((fs::path(cfg.out_dir) / ("metrics_" + arch + ".csv")).string(),
                                history);
    }
    return 0;
}

int cmd_synthesize(const RunConfig& cfg) {
    KnowledgeBase kb = load_kb(cfg.kb_path);
    Vocabulary vocab = build_vocabulary(kb);
    EmbeddingTable table = load_embeddings(cfg.embeddings_path);
    auto problems = load_dataset(cfg.problems_path, kb);
    if (problems.empty()) throw DatagenError("problem file is empty: " + cfg.problems_path);
    if (cfg.checkpoints.empty()) throw DatagenError("no checkpoints given");

    std::vector<std::unique_ptr<synth::Synthesizer>> models;
    for (const auto& path : cfg.checkpoints)
        models.push_back(synth::load_checkpoint(path, vocab.fingerprint()));

    synth::Batch batch;
    for (const auto& p : problems) batch.push_back(lookup_examples(table, p, kb));

    const int num_classes = vocab.size() + 1;
    const int seq_len = models[0]->config().seq_len;

    auto t0 = std::chrono::steady_clock::now();
    std::vector<Tensor> outputs;
    for (auto& m : models) outputs.push_back(m->forward(batch, /*training=*/false)->value);
    std::vector<SynthesisResult> results;
    for (std::size_t i = 0; i < problems.size(); ++i) {
        std::vector<Tensor> slices;
        for (const auto& o : outputs)
            slices.push_back(score_slice(o, static_cast<int>(i), num_classes, seq_len));
        Tensor scores = slices.size() > 1 ? ensemble_scores(slices) : slices[0];
        results.push_back(decode_scores(scores, vocab, kb));
    }
    auto t1 = std::chrono::steady_clock::now();
    const double per_problem =
        std::chrono::duration<double>(t1 - t0).count() / static_cast<double>(problems.size());

    fs::create_directories(fs::path(cfg.predictions_path).parent_path().empty()
                               ? fs::path(".")
                               : fs::path(cfg.predictions_path).parent_path());
    std::ofstream out(cfg.predictions_path, std::ios::binary);
    if (!out) throw DatagenError("cannot write predictions: " + cfg.predictions_path);
    out << std::setprecision(17);
    for (std::size_t i = 0; i < problems.size(); ++i) {
        out << (problems[i].target ? render_expression(*problems[i].target) : "") << "\t"
            << results[i].text << "\t" << per_problem << "\n";
    }
    std::cout << "synthesized " << problems.size() << " expressions, "
              << per_problem << " s/problem\n";
    return 0;
}

int cmd_evaluate(const RunConfig& cfg) {
    KnowledgeBase kb = load_kb(cfg.kb_path);
    Vocabulary vocab = build_vocabulary(kb);
    Reasoner reasoner(kb);
    auto problems = load_dataset(cfg.problems_path, kb);

    std::ifstream preds(cfg.predictions_path, std::ios::binary);
    if (!preds) throw DatagenError("cannot open predictions: " + cfg.predictions_path);
    std::vector<EvalRecord> records;
    std::string line;
    std::size_t i = 0;
    while (std::getline(preds, line)) {
        if (line.empty()) continue;
        if (i >= problems.size())
            throw DatagenError("more predictions than problems");
        std::istringstream ss(line);
        std::string target, predicted, runtime;
        std::getline(ss, target, '\t');
        std::getline(ss, predicted, '\t');
        std::getline(ss, runtime, '\t');

        SynthesisResult res;
        res.text = predicted;
        try {
            res.expression = parse_expression(predicted, kb);
            res.parse_ok = true;
        } catch (const ParseError&) {
            res.parse_ok = false;
        }
        SemanticQuality q = semantic_quality(reasoner, problems[i], res);
        EvalRecord r;
        r.target = target;
        r.predicted = predicted;
        r.f1 = q.f1;
        r.accuracy = q.accuracy;
        r.runtime_seconds = runtime.empty() ? 0.0 : std::stod(runtime);
        records.push_back(std::move(r));
        ++i;
    }
    if (i != problems.size()) throw DatagenError("fewer predictions than problems");
    write_eval_report(cfg.report_path, records);

    std::vector<double> f1s, accs;
    for (const auto& r : records) {
        f1s.push_back(r.f1);
        accs.push_back(r.accuracy);
    }
    std::cout << "problems: " << records.size() << "\nF1: " << mean(f1s) * 100 << " +- "
              << stddev(f1s) * 100 << "\naccuracy: " << mean(accs) * 100 << " +- "
              << stddev(accs) * 100 << "\nwrote " << cfg.report_path << "\n";
    (void)vocab;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neural class expression synthesis pipeline"};
    app.set_config("--config", "", "key=value configuration file with CLI overrides");
    app.require_subcommand(1);
    RunConfig cfg;

    auto* gen = app.add_subcommand("generate", "Generate learning problems from a KB");
    add_common(gen, cfg);
    gen->add_option("--max-len", cfg.max_len, "max expression token length");
    gen->add_option("--budget", cfg.budget, "expression generation budget");
    gen->add_option("--n", cfg.n, "examples per problem (0: min(|N_I|/2, 1000))");
    gen->add_option("--ratio", cfg.split_ratio, "train fraction");

    auto* emb = app.add_subcommand("embed", "Train TransE embeddings");
    add_common(emb, cfg);
    emb->add_option("--d", cfg.d, "embedding dimension");
    emb->add_option("--epochs", cfg.transe_epochs, "TransE epochs");
    emb->add_option("--lr", cfg.transe_lr, "TransE learning rate");
    emb->add_option("--margin", cfg.transe_margin, "ranking margin");
    emb->add_option("--out", cfg.embeddings_path, "embedding file path");

    auto* trn = app.add_subcommand("train", "Train synthesizers");
    add_common(trn, cfg);
    trn->add_option("--embeddings", cfg.embeddings_path, "embedding file")->required();
    trn->add_option("--train-file", cfg.problems_path, "training dataset")->required();
    trn->add_option("--arch", cfg.archs, "architectures: lstm gru st");
    trn->add_option("--epochs", cfg.epochs, "training epochs");
    trn->add_option("--batch-size", cfg.batch_size, "minibatch size N");
    trn->add_option("--lr", cfg.lr, "learning rate");
    trn->add_option("--gc", cfg.grad_clip, "gradient clipping norm");
    trn->add_option("--L", cfg.seq_len, "max output sequence length");
    trn->add_option("--m", cfg.inducing, "inducing points");
    trn->add_option("--heads", cfg.heads, "attention heads");
    trn->add_option("--hidden", cfg.hidden, "recurrent hidden width");

    auto* syn = app.add_subcommand("synthesize", "Synthesize expressions for problems");
    add_common(syn, cfg);
    syn->add_option("--embeddings", cfg.embeddings_path, "embedding file")->required();
    syn->add_option("--checkpoint", cfg.checkpoints, "model checkpoint(s); >=2 ensembles")
        ->required();
    syn->add_option("--problems", cfg.problems_path, "problem file")->required();
    syn->add_option("--out", cfg.predictions_path, "predictions file")->required();

    auto* eva = app.add_subcommand("evaluate", "Score predictions against examples");
    add_common(eva, cfg);
    eva->add_option("--problems", cfg.problems_path, "problem file")->required();
    eva->add_option("--predictions", cfg.predictions_path, "predictions file")->required();
    eva->add_option("--report", cfg.report_path, "report CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) return cmd_generate(cfg);
        if (emb->parsed()) return cmd_embed(cfg);
        if (trn->parsed()) return cmd_train(cfg);
        if (syn->parsed()) return cmd_synthesize(cfg);
        if (eva->parsed()) return cmd_evaluate(cfg);
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
