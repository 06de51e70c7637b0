// Reverse-mode automatic differentiation over dense float64 tensors.
//
// A forward pass builds a graph of shared Node objects; backward() runs a
// reverse topological traversal from a scalar output, summing gradients over
// multiple uses.  Parameter leaves persist across steps and accumulate
// gradients until zero_grad().
//
// attention-facing ops (softmax_rows, matmul_setsum) perform their reductions
// with invariant_sum so forward values are independent of set-element order.

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "nces/tensor.hpp"

namespace nces::ad {

struct Node;
using NodePtr = std::shared_ptr<Node>;

struct Node {
    Tensor value;
    Tensor grad;  // same shape, zero-initialized
    bool requires_grad = false;
    std::vector<NodePtr> inputs;
    std::function<void(Node&)> backprop;  // accumulates node.grad into inputs
};

NodePtr constant(Tensor v);
NodePtr leaf(Tensor v);  // trainable

// Elementwise / shape ops (2-D unless noted).
NodePtr add(const NodePtr& a, const NodePtr& b);
NodePtr add_rowvec(const NodePtr& a, const NodePtr& row);  // row: 1 x c
NodePtr mul(const NodePtr& a, const NodePtr& b);
NodePtr scale(const NodePtr& a, double c);
NodePtr relu(const NodePtr& a);
NodePtr sigmoid(const NodePtr& a);
NodePtr tanh_op(const NodePtr& a);

NodePtr matmul(const NodePtr& a, const NodePtr& b);
/// matmul whose inner reduction is permutation-invariant; use when the
/// contracted axis indexes set elements.
NodePtr matmul_setsum(const NodePtr& a, const NodePtr& b);
NodePtr transpose(const NodePtr& a);
NodePtr concat_rows(const NodePtr& a, const NodePtr& b);
NodePtr stack_rows(const std::vector<NodePtr>& parts);
NodePtr concat_cols(const NodePtr& a, const NodePtr& b);
NodePtr slice_cols(const NodePtr& a, int start, int len);
NodePtr sum_rows(const NodePtr& a);  // n x c -> 1 x c, left-to-right

/// Row-wise softmax with max-shift; denominator uses invariant_sum.
NodePtr softmax_rows(const NodePtr& a);

/// Batch normalization over the row (batch) axis of an n x f input using batch
/// statistics; `batch_mean`/`batch_var` receive the statistics for running
/// updates.  Variance is the biased (1/n) estimator.
NodePtr batchnorm_train(const NodePtr& x, const NodePtr& gamma, const NodePtr& beta,
                        double eps, std::vector<double>* batch_mean,
                        std::vector<double>* batch_var);
/// Inference-mode normalization with fixed statistics.
NodePtr batchnorm_infer(const NodePtr& x, const NodePtr& gamma, const NodePtr& beta,
                        double eps, const std::vector<double>& mean,
                        const std::vector<double>& var);

/// Mean over all N*L positions of -log softmax(target) for scores laid out as
/// rows of C*L (entry (c,j) at offset c*L+j).  Targets include PAD positions.
NodePtr cross_entropy_scores(const NodePtr& scores, const std::vector<std::vector<int>>& targets,
                             int num_classes, int seq_len);

/// Scalar graph output only.
void backward(const NodePtr& output);

// --- parameters & optimization ----------------------------------------------

struct Parameter {
    NodePtr node;
    bool trainable = true;
};

void zero_grad(std::vector<Parameter>& params);

/// Scales all gradients by max_norm/g when the global L2 norm g exceeds
/// max_norm; returns the applied factor.
double clip_gradients(std::vector<Parameter>& params, double max_norm);

struct AdamState {
    std::vector<Tensor> m, v;
    std::int64_t t = 0;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};

void adam_step(std::vector<Parameter>& params, double lr, AdamState& state);

}  // namespace nces::ad
