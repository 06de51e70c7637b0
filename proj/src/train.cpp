#include "nces/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>

#include "nces/decode.hpp"

namespace nces::synth {

std::vector<TrainSample> build_training_samples(const std::vector<LearningProblem>& problems,
                                                const EmbeddingTable& table,
                                                const KnowledgeBase& kb,
                                                const Vocabulary& vocab, int seq_len) {
    std::vector<TrainSample> samples;
    samples.reserve(problems.size());
    for (const auto& p : problems) {
        if (!p.target)
            throw NumericError("training requires a target expression per problem");
        TrainSample s;
        s.examples = lookup_examples(table, p, kb);
        s.target_tokens = tokenize_expression(*p.target, vocab);
        if (static_cast<int>(s.target_tokens.size()) > seq_len)
            throw NumericError("target '" + render_expression(*p.target) + "' has " +
                               std::to_string(s.target_tokens.size()) +
                               " tokens, exceeding L=" + std::to_string(seq_len));
        s.target_tokens.resize(seq_len, vocab.pad_id);
        samples.push_back(std::move(s));
    }
    return samples;
}

std::vector<int> greedy_tokens(const Tensor& batch_scores, int row, int num_classes,
                               int seq_len, int pad_id) {
    std::vector<int> out;
    for (int j = 0; j < seq_len; ++j) {
        int best = 0;
        for (int c = 1; c < num_classes; ++c)
            if (batch_scores.at(row, c * seq_len + j) >
                batch_scores.at(row, best * seq_len + j))
                best = c;
        if (best == pad_id) break;
        out.push_back(best);
    }
    return out;
}

std::vector<EpochMetrics> train_synthesizer(
    Synthesizer& model, const std::vector<TrainSample>& samples, const TrainConfig& cfg,
    const std::function<bool(int, const EpochMetrics&)>& on_epoch) {
    if (samples.empty()) throw NumericError("training dataset is empty");
    const int num_classes = model.config().num_classes;
    const int seq_len = model.config().seq_len;
    const int pad_id = num_classes - 1;

    std::mt19937_64 rng(cfg.seed);
    ad::AdamState adam;
    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<EpochMetrics> history;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0.0, soft_sum = 0.0, hard_sum = 0.0;
        for (std::size_t start = 0, batch_idx = 0; start < order.size();
             start += cfg.batch_size, ++batch_idx) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            Batch batch;
            std::vector<std::vector<int>> targets;
            for (std::size_t k = start; k < end; ++k) {
                batch.push_back(samples[order[k]].examples);
                targets.push_back(samples[order[k]].target_tokens);
            }
            NodePtr scores = model.forward(batch, /*training=*/true);
            NodePtr loss = ad::cross_entropy_scores(scores, targets, num_classes, seq_len);
            const double loss_value = loss->value.data[0];
            if (!std::isfinite(loss_value))
                throw NumericError("non-finite training loss at epoch " +
                                   std::to_string(epoch) + ", batch " +
                                   std::to_string(batch_idx));
            ad::zero_grad(model.parameters());
            ad::backward(loss);
            ad::clip_gradients(model.parameters(), cfg.grad_clip);
            ad::adam_step(model.parameters(), cfg.lr, adam);

            loss_sum += loss_value * static_cast<double>(end - start);
            for (std::size_t k = start; k < end; ++k) {
                std::vector<int> pred = greedy_tokens(scores->value, static_cast<int>(k - start),
                                                      num_classes, seq_len, pad_id);
                std::vector<int> tgt = samples[order[k]].target_tokens;
                while (!tgt.empty() && tgt.back() == pad_id) tgt.pop_back();
                soft_sum += soft_accuracy_tokens(tgt, pred);
                hard_sum += hard_accuracy_tokens(tgt, pred);
            }
        }
        EpochMetrics m;
        const double n = static_cast<double>(samples.size());
        m.loss = loss_sum / n;
        m.soft_acc = soft_sum / n;
        m.hard_acc = hard_sum / n;
        history.push_back(m);
        if (on_epoch && !on_epoch(epoch, m)) break;
    }
    return history;
}

void save_metrics_csv(const std::string& path, const std::vector<EpochMetrics>& metrics) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NumericError("cannot write metrics file: " + path);
    out << std::setprecision(17);
    out << "epoch,loss,soft_acc,hard_acc\n";
    for (std::size_t i = 0; i < metrics.size(); ++i)
        out << i + 1 << "," << metrics[i].loss << "," << metrics[i].soft_acc << ","
            << metrics[i].hard_acc << "\n";
}

}  // namespace nces::synth
