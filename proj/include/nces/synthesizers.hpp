// The three synthesizer architectures.
//
// Attention stack: Att(Q,K,V) = softmax(QK^T)V, Multihead via per-head column
// splits of linear projections, MAB(X,Y) = H + rFF(H) with H = X + MH(X,Y,Y)
// and no layer normalization, SAB(X) = MAB(X,X), ISAB routed through m learned
// inducing rows, PMA(X) = MAB(S,X) with a single learned seed row.
//
// Set Transformer: Enc = 2 ISAB layers applied separately to positive and
// negative example embeddings; Dec = PMA over the row-concatenation followed
// by a linear map to C*L scores.  Recurrent models: 2 stacked LSTM or GRU
// layers whose per-step hidden states are summed per example set, concatenated
// and passed through linear -> relu -> linear -> batchnorm -> linear.
//
// Every forward emits one row of C*L scores per problem (entry (c,j) at
// offset c*L+j).

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "nces/autodiff.hpp"
#include "nces/embeddings.hpp"

namespace nces::synth {

using ad::Node;
using ad::NodePtr;
using ad::Parameter;

struct Linear {
    Parameter weight;  // in x out
    Parameter bias;    // 1 x out
    NodePtr forward(const NodePtr& x) const;
};

NodePtr attention(const NodePtr& q, const NodePtr& k, const NodePtr& v);

struct MultiheadAttention {
    int heads = 1;
    Linear proj_q, proj_k, proj_v;
    Linear proj_out;  // W^O, d_v x d_v
    NodePtr forward(const NodePtr& q, const NodePtr& k, const NodePtr& v) const;
};

struct Mab {
    MultiheadAttention mh;
    Linear rff;  // single d -> d layer, relu-activated
    NodePtr forward(const NodePtr& x, const NodePtr& y) const;
};

NodePtr sab(const Mab& mab, const NodePtr& x);

struct Isab {
    Parameter inducing;  // m x d
    Mab mab_induce, mab_expand;
    NodePtr forward(const NodePtr& x) const;
};

struct Pma {
    Parameter seed;  // k x d (k = 1)
    Mab mab;
    NodePtr forward(const NodePtr& x) const;
};

struct BatchNorm {
    Parameter gamma, beta;  // 1 x f
    std::vector<double> running_mean, running_var;
    double momentum = 0.1;
    double eps = 1e-5;
    NodePtr forward(const NodePtr& x, bool training);
};

struct ModelConfig {
    int d = 40;          // embedding width
    int heads = 4;
    int inducing = 32;   // m
    int hidden = 256;    // recurrent hidden width
    int num_classes = 0; // C = 1 + |Vocab|
    int seq_len = 32;    // L
};

/// One forward input: the example embedding matrices of a single problem.
using Batch = std::vector<ExampleMatrices>;

class Synthesizer {
public:
    virtual ~Synthesizer() = default;
    virtual std::string arch() const = 0;
    virtual const ModelConfig& config() const = 0;
    /// Returns batch x (C*L) scores.
    virtual NodePtr forward(const Batch& batch, bool training) = 0;
    virtual std::vector<Parameter>& parameters() = 0;
    /// Parameter values plus non-trainable buffers, for checkpointing.
    virtual std::vector<std::pair<std::string, Tensor*>> named_tensors() = 0;
    virtual std::vector<std::pair<std::string, std::vector<double>*>> named_buffers() {
        return {};
    }
};

class SetTransformer final : public Synthesizer {
public:
    SetTransformer(const ModelConfig& cfg, std::uint64_t seed);
    std::string arch() const override { return "st"; }
    const ModelConfig& config() const override { return cfg_; }
    NodePtr forward(const Batch& batch, bool training) override;
    std::vector<Parameter>& parameters() override { return params_; }
    std::vector<std::pair<std::string, Tensor*>> named_tensors() override;

private:
    ModelConfig cfg_;
    // separate encoder weights per example polarity, so the positive and
    // negative sets are not interchangeable under the permutation-invariant
    // PMA decoder
    Isab enc1_pos_, enc2_pos_, enc1_neg_, enc2_neg_;
    Pma pma_;
    Linear out_;
    std::vector<Parameter> params_;
    std::vector<std::pair<std::string, Parameter>> named_;
};

enum class CellKind { Lstm, Gru };

class Recurrent final : public Synthesizer {
public:
    Recurrent(CellKind kind, const ModelConfig& cfg, std::uint64_t seed);
    std::string arch() const override { return kind_ == CellKind::Lstm ? "lstm" : "gru"; }
    const ModelConfig& config() const override { return cfg_; }
    NodePtr forward(const Batch& batch, bool training) override;
    std::vector<Parameter>& parameters() override { return params_; }
    std::vector<std::pair<std::string, Tensor*>> named_tensors() override;
    std::vector<std::pair<std::string, std::vector<double>*>> named_buffers() override;

private:
    struct Layer {
        Parameter wx, wh, bias;  // gate widths: 4H (lstm) or 3H (gru)
    };
    /// Sum over time of top-layer hidden states for one example sequence.
    NodePtr encode_sequence(const std::vector<std::vector<double>>& rows) const;

    CellKind kind_;
    ModelConfig cfg_;
    Layer l1_, l2_;
    Linear head1_, head2_, head3_;
    BatchNorm bn_;
    std::vector<Parameter> params_;
    std::vector<std::pair<std::string, Parameter>> named_;
};

std::unique_ptr<Synthesizer> make_synthesizer(const std::string& arch, const ModelConfig& cfg,
                                              std::uint64_t seed);

/// Binary checkpoint: named float64 tensors, model config, and the vocabulary
/// fingerprint (decode refuses a mismatched vocabulary).
void save_checkpoint(const std::string& path, Synthesizer& model, std::uint64_t vocab_fingerprint);
std::unique_ptr<Synthesizer> load_checkpoint(const std::string& path,
                                             std::uint64_t expected_fingerprint);

}  // namespace nces::synth
