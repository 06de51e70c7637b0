#include "nces/synthesizers.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <unordered_map>

namespace nces::synth {

using namespace nces::ad;

namespace {

Tensor to_tensor(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw NumericError("example matrix has no rows");
    const int r = static_cast<int>(rows.size());
    const int c = static_cast<int>(rows[0].size());
    Tensor t({r, c});
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(rows[i].size()) != c)
            throw NumericError("ragged example matrix");
        std::copy(rows[i].begin(), rows[i].end(), t.data.begin() + static_cast<std::size_t>(i) * c);
    }
    return t;
}

// Registers parameters in construction order and records a name per tensor so
// checkpoints are self-describing.
struct Builder {
    std::mt19937_64 rng;
    std::vector<Parameter>* params;
    std::vector<std::pair<std::string, Parameter>>* named;

    Parameter make(const std::string& name, std::vector<int> shape, double bound) {
        Tensor t(std::move(shape));
        if (bound > 0.0) {
            std::uniform_real_distribution<double> d(-bound, bound);
            for (double& x : t.data) x = d(rng);
        }
        Parameter p{leaf(std::move(t)), true};
        params->push_back(p);
        named->emplace_back(name, p);
        return p;
    }

    Linear linear(const std::string& name, int in, int out) {
        Linear l;
        l.weight = make(name + ".w", {in, out}, std::sqrt(6.0 / (in + out)));
        l.bias = make(name + ".b", {1, out}, 0.0);
        return l;
    }

    MultiheadAttention mha(const std::string& name, int d, int heads) {
        MultiheadAttention m;
        m.heads = heads;
        m.proj_q = linear(name + ".q", d, d);
        m.proj_k = linear(name + ".k", d, d);
        m.proj_v = linear(name + ".v", d, d);
        m.proj_out = linear(name + ".o", d, d);
        return m;
    }

    Mab mab(const std::string& name, int d, int heads) {
        Mab b;
        b.mh = mha(name + ".mh", d, heads);
        b.rff = linear(name + ".rff", d, d);
        return b;
    }

    Isab isab(const std::string& name, int d, int heads, int m) {
        Isab b;
        b.inducing = make(name + ".ind", {m, d}, std::sqrt(6.0 / (m + d)));
        b.mab_induce = mab(name + ".mab0", d, heads);
        b.mab_expand = mab(name + ".mab1", d, heads);
        return b;
    }
};

}  // namespace

NodePtr Linear::forward(const NodePtr& x) const {
    return add_rowvec(matmul(x, weight.node), bias.node);
}

NodePtr attention(const NodePtr& q, const NodePtr& k, const NodePtr& v) {
    NodePtr weights = softmax_rows(matmul(q, transpose(k)));
    return matmul_setsum(weights, v);
}

NodePtr MultiheadAttention::forward(const NodePtr& q, const NodePtr& k,
                                    const NodePtr& v) const {
    const int d = q->value.cols();
    if (d % heads != 0)
        throw NumericError("multihead: width " + std::to_string(d) +
                           " not divisible by " + std::to_string(heads) + " heads");
    NodePtr pq = proj_q.forward(q);
    NodePtr pk = proj_k.forward(k);
    NodePtr pv = proj_v.forward(v);
    const int hd = d / heads;
    NodePtr cat;
    for (int j = 0; j < heads; ++j) {
        NodePtr oj = attention(slice_cols(pq, j * hd, hd), slice_cols(pk, j * hd, hd),
                               slice_cols(pv, j * hd, hd));
        cat = cat ? concat_cols(cat, oj) : oj;
    }
    return proj_out.forward(cat);
}

NodePtr Mab::forward(const NodePtr& x, const NodePtr& y) const {
    NodePtr h = add(x, mh.forward(x, y, y));
    return add(h, relu(rff.forward(h)));
}

NodePtr sab(const Mab& mab, const NodePtr& x) { return mab.forward(x, x); }

NodePtr Isab::forward(const NodePtr& x) const {
    NodePtr h = mab_induce.forward(inducing.node, x);
    return mab_expand.forward(x, h);
}

NodePtr Pma::forward(const NodePtr& x) const { return mab.forward(seed.node, x); }

NodePtr BatchNorm::forward(const NodePtr& x, bool training) {
    if (!training) return batchnorm_infer(x, gamma.node, beta.node, eps, running_mean, running_var);
    std::vector<double> mu, var;
    NodePtr out = batchnorm_train(x, gamma.node, beta.node, eps, &mu, &var);
    for (std::size_t j = 0; j < running_mean.size(); ++j) {
        running_mean[j] = (1.0 - momentum) * running_mean[j] + momentum * mu[j];
        running_var[j] = (1.0 - momentum) * running_var[j] + momentum * var[j];
    }
    return out;
}

// --- Set Transformer ---------------------------------------------------------

SetTransformer::SetTransformer(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
    if (cfg.num_classes < 2 || cfg.seq_len < 1 || cfg.d < 1)
        throw NumericError("set transformer: bad model configuration");
    named_.clear();
    Builder b{std::mt19937_64(seed), &params_, &named_};
    enc1_pos_ = b.isab("enc1_pos", cfg.d, cfg.heads, cfg.inducing);
    enc2_pos_ = b.isab("enc2_pos", cfg.d, cfg.heads, cfg.inducing);
    enc1_neg_ = b.isab("enc1_neg", cfg.d, cfg.heads, cfg.inducing);
    enc2_neg_ = b.isab("enc2_neg", cfg.d, cfg.heads, cfg.inducing);
    pma_.seed = b.make("pma.seed", {1, cfg.d}, std::sqrt(6.0 / (1 + cfg.d)));
    pma_.mab = b.mab("pma.mab", cfg.d, cfg.heads);
    out_ = b.linear("out", cfg.d, cfg.num_classes * cfg.seq_len);
}

NodePtr SetTransformer::forward(const Batch& batch, bool /*training*/) {
    if (batch.empty()) throw NumericError("forward: empty batch");
    std::vector<NodePtr> pooled;
    pooled.reserve(batch.size());
    for (const auto& ex : batch) {
        Tensor pos = to_tensor(ex.pos);
        Tensor neg = to_tensor(ex.neg);
        if (pos.cols() != cfg_.d || neg.cols() != cfg_.d)
            throw NumericError("embedding width " + std::to_string(pos.cols()) +
                               " does not match model d=" + std::to_string(cfg_.d));
        NodePtr enc_pos = enc2_pos_.forward(enc1_pos_.forward(constant(std::move(pos))));
        NodePtr enc_neg = enc2_neg_.forward(enc1_neg_.forward(constant(std::move(neg))));
        pooled.push_back(pma_.forward(concat_rows(enc_pos, enc_neg)));
    }
    return out_.forward(stack_rows(pooled));
}

std::vector<std::pair<std::string, Tensor*>> SetTransformer::named_tensors() {
    std::vector<std::pair<std::string, Tensor*>> out;
    for (auto& [name, p] : named_) out.emplace_back(name, &p.node->value);
    return out;
}

// --- Recurrent ----------------------------------------------------------------

Recurrent::Recurrent(CellKind kind, const ModelConfig& cfg, std::uint64_t seed)
    : kind_(kind), cfg_(cfg) {
    if (cfg.num_classes < 2 || cfg.seq_len < 1 || cfg.hidden < 1)
        throw NumericError("recurrent: bad model configuration");
    named_.clear();
    Builder b{std::mt19937_64(seed), &params_, &named_};
    const int gates = kind == CellKind::Lstm ? 4 : 3;
    auto make_layer = [&](const std::string& name, int in) {
        Layer l;
        l.wx = b.make(name + ".wx", {in, gates * cfg.hidden}, std::sqrt(6.0 / (in + cfg.hidden)));
        l.wh = b.make(name + ".wh", {cfg.hidden, gates * cfg.hidden},
                      std::sqrt(6.0 / (2 * cfg.hidden)));
        l.bias = b.make(name + ".b", {1, gates * cfg.hidden}, 0.0);
        return l;
    };
    l1_ = make_layer("rnn1", cfg.d);
    l2_ = make_layer("rnn2", cfg.hidden);
    head1_ = b.linear("head1", 2 * cfg.hidden, cfg.hidden);
    head2_ = b.linear("head2", cfg.hidden, cfg.hidden);
    bn_.gamma = b.make("bn.gamma", {1, cfg.hidden}, 0.0);
    for (double& x : bn_.gamma.node->value.data) x = 1.0;
    bn_.beta = b.make("bn.beta", {1, cfg.hidden}, 0.0);
    bn_.running_mean.assign(cfg.hidden, 0.0);
    bn_.running_var.assign(cfg.hidden, 1.0);
    head3_ = b.linear("head3", cfg.hidden, cfg.num_classes * cfg.seq_len);
}

NodePtr Recurrent::encode_sequence(const std::vector<std::vector<double>>& rows) const {
    const int h = cfg_.hidden;
    NodePtr h1 = constant(Tensor({1, h})), c1 = constant(Tensor({1, h}));
    NodePtr h2 = constant(Tensor({1, h})), c2 = constant(Tensor({1, h}));
    NodePtr summed;

    auto step = [&](const Layer& l, const NodePtr& x, NodePtr& hs, NodePtr& cs) {
        if (kind_ == CellKind::Lstm) {
            NodePtr z = add(add(matmul(x, l.wx.node), matmul(hs, l.wh.node)), l.bias.node);
            NodePtr in_g = sigmoid(slice_cols(z, 0, h));
            NodePtr forget = sigmoid(slice_cols(z, h, h));
            NodePtr cand = tanh_op(slice_cols(z, 2 * h, h));
            NodePtr out_g = sigmoid(slice_cols(z, 3 * h, h));
            cs = add(mul(forget, cs), mul(in_g, cand));
            hs = mul(out_g, tanh_op(cs));
        } else {
            NodePtr gi = add(matmul(x, l.wx.node), l.bias.node);
            NodePtr gh = matmul(hs, l.wh.node);
            NodePtr reset = sigmoid(add(slice_cols(gi, 0, h), slice_cols(gh, 0, h)));
            NodePtr update = sigmoid(add(slice_cols(gi, h, h), slice_cols(gh, h, h)));
            NodePtr cand =
                tanh_op(add(slice_cols(gi, 2 * h, h), mul(reset, slice_cols(gh, 2 * h, h))));
            // h' = cand + update * (h - cand)
            hs = add(cand, mul(update, add(hs, scale(cand, -1.0))));
        }
    };

    for (const auto& row : rows) {
        Tensor x({1, static_cast<int>(row.size())});
        x.data.assign(row.begin(), row.end());
        if (x.cols() != cfg_.d)
            throw NumericError("embedding width " + std::to_string(x.cols()) +
                               " does not match model d=" + std::to_string(cfg_.d));
        NodePtr xn = constant(std::move(x));
        step(l1_, xn, h1, c1);
        step(l2_, h1, h2, c2);
        summed = summed ? add(summed, h2) : h2;
    }
    return summed;
}

NodePtr Recurrent::forward(const Batch& batch, bool training) {
    if (batch.empty()) throw NumericError("forward: empty batch");
    std::vector<NodePtr> rows;
    rows.reserve(batch.size());
    for (const auto& ex : batch) {
        if (ex.pos.empty() || ex.neg.empty())
            throw NumericError("forward: empty example sequence");
        rows.push_back(concat_cols(encode_sequence(ex.pos), encode_sequence(ex.neg)));
    }
    NodePtr h = stack_rows(rows);
    NodePtr t = relu(head1_.forward(h));
    t = head2_.forward(t);
    t = bn_.forward(t, training);
    return head3_.forward(t);
}

std::vector<std::pair<std::string, Tensor*>> Recurrent::named_tensors() {
    std::vector<std::pair<std::string, Tensor*>> out;
    for (auto& [name, p] : named_) out.emplace_back(name, &p.node->value);
    return out;
}

std::vector<std::pair<std::string, std::vector<double>*>> Recurrent::named_buffers() {
    return {{"bn.running_mean", &bn_.running_mean}, {"bn.running_var", &bn_.running_var}};
}

std::unique_ptr<Synthesizer> make_synthesizer(const std::string& arch, const ModelConfig& cfg,
                                              std::uint64_t seed) {
    if (arch == "st") return std::make_unique<SetTransformer>(cfg, seed);
    if (arch == "lstm") return std::make_unique<Recurrent>(CellKind::Lstm, cfg, seed);
    if (arch == "gru") return std::make_unique<Recurrent>(CellKind::Gru, cfg, seed);
    throw NumericError("unknown architecture '" + arch + "' (expected lstm|gru|st)");
}

// --- checkpoints ---------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'N', 'C', 'E', 'S', 'C', 'K', 'P', '1'};

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void read_pod(std::ifstream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
}
void write_string(std::ofstream& out, const std::string& s) {
    write_pod(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}
std::string read_string(std::ifstream& in) {
    std::uint32_t len = 0;
    read_pod(in, len);
    std::string s(len, '\0');
    in.read(s.data(), len);
    return s;
}

}  // namespace

void save_checkpoint(const std::string& path, Synthesizer& model,
                     std::uint64_t vocab_fingerprint) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NumericError("cannot write checkpoint: " + path);
    out.write(kMagic, sizeof(kMagic));
    write_string(out, model.arch());
    write_pod(out, vocab_fingerprint);
    const ModelConfig& c = model.config();
    for (int v : {c.d, c.heads, c.inducing, c.hidden, c.num_classes, c.seq_len})
        write_pod(out, static_cast<std::int32_t>(v));
    auto tensors = model.named_tensors();
    write_pod(out, static_cast<std::uint32_t>(tensors.size()));
    for (auto& [name, t] : tensors) {
        write_string(out, name);
        write_pod(out, static_cast<std::uint32_t>(t->shape.size()));
        for (int d : t->shape) write_pod(out, static_cast<std::int32_t>(d));
        out.write(reinterpret_cast<const char*>(t->data.data()),
                  static_cast<std::streamsize>(t->data.size() * sizeof(double)));
    }
    auto buffers = model.named_buffers();
    write_pod(out, static_cast<std::uint32_t>(buffers.size()));
    for (auto& [name, buf] : buffers) {
        write_string(out, name);
        write_pod(out, static_cast<std::uint32_t>(buf->size()));
        out.write(reinterpret_cast<const char*>(buf->data()),
                  static_cast<std::streamsize>(buf->size() * sizeof(double)));
    }
}

std::unique_ptr<Synthesizer> load_checkpoint(const std::string& path,
                                             std::uint64_t expected_fingerprint) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NumericError("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw NumericError("not a checkpoint file: " + path);
    std::string arch = read_string(in);
    std::uint64_t fp = 0;
    read_pod(in, fp);
    if (fp != expected_fingerprint)
        throw NumericError("checkpoint " + path +
                           " was trained with a different vocabulary (fingerprint mismatch)");
    ModelConfig cfg;
    std::int32_t v;
    read_pod(in, v); cfg.d = v;
    read_pod(in, v); cfg.heads = v;
    read_pod(in, v); cfg.inducing = v;
    read_pod(in, v); cfg.hidden = v;
    read_pod(in, v); cfg.num_classes = v;
    read_pod(in, v); cfg.seq_len = v;
    auto model = make_synthesizer(arch, cfg, 0);

    std::uint32_t ntensors = 0;
    read_pod(in, ntensors);
    auto tensors = model->named_tensors();
    std::unordered_map<std::string, Tensor*> by_name;
    for (auto& [name, t] : tensors) by_name.emplace(name, t);
    for (std::uint32_t i = 0; i < ntensors; ++i) {
        std::string name = read_string(in);
        std::uint32_t ndims = 0;
        read_pod(in, ndims);
        std::vector<int> shape(ndims);
        for (auto& d : shape) {
            std::int32_t x;
            read_pod(in, x);
            d = x;
        }
        auto it = by_name.find(name);
        if (it == by_name.end())
            throw NumericError("checkpoint tensor '" + name + "' unknown to arch " + arch);
        if (it->second->shape != shape)
            throw NumericError("checkpoint tensor '" + name + "' shape mismatch");
        in.read(reinterpret_cast<char*>(it->second->data.data()),
                static_cast<std::streamsize>(it->second->data.size() * sizeof(double)));
    }
    std::uint32_t nbuffers = 0;
    read_pod(in, nbuffers);
    auto buffers = model->named_buffers();
    std::unordered_map<std::string, std::vector<double>*> buf_by_name;
    for (auto& [name, b] : buffers) buf_by_name.emplace(name, b);
    for (std::uint32_t i = 0; i < nbuffers; ++i) {
        std::string name = read_string(in);
        std::uint32_t len = 0;
        read_pod(in, len);
        auto it = buf_by_name.find(name);
        if (it == buf_by_name.end() || it->second->size() != len)
            throw NumericError("checkpoint buffer '" + name + "' mismatch");
        in.read(reinterpret_cast<char*>(it->second->data()),
                static_cast<std::streamsize>(len * sizeof(double)));
    }
    if (!in) throw NumericError("truncated checkpoint: " + path);
    return model;
}

}  // namespace nces::synth
