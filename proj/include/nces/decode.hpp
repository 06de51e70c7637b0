// Score decoding, ensembling, and quality metrics.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nces/datagen.hpp"
#include "nces/kb.hpp"
#include "nces/reasoner.hpp"
#include "nces/tensor.hpp"

namespace nces {

struct SynthesisResult {
    std::vector<int> token_ids;  // truncated at the first PAD
    std::string text;
    bool parse_ok = false;
    ExprPtr expression;  // set when parse_ok
};

/// Per position: argmax over the C classes (ties to the smallest index),
/// truncate at the first PAD, join atoms, attempt a parse.  `scores` is C x L
/// with C = 1 + |vocab|.
SynthesisResult decode_scores(const Tensor& scores, const Vocabulary& vocab,
                              const KnowledgeBase& kb);

/// Extracts one problem's C x L score slice from a batched rows-of-C*L tensor.
Tensor score_slice(const Tensor& batch_scores, int row, int num_classes, int seq_len);

/// Element-wise mean of >= 2 identically shaped score tensors.
Tensor ensemble_scores(const std::vector<Tensor>& scores_list);

// Eq.-15 style syntactic metrics over canonical atom lists/sets.
double soft_accuracy(const ConceptExpr& target, const ConceptExpr& predicted);
double hard_accuracy(const ConceptExpr& target, const ConceptExpr& predicted);
double soft_accuracy_tokens(const std::vector<int>& target, const std::vector<int>& predicted);
double hard_accuracy_tokens(const std::vector<int>& target, const std::vector<int>& predicted);

struct SemanticQuality {
    double f1 = 0.0;
    double accuracy = 0.0;
    bool parsed = true;  // false when the prediction was unparsable (scores 0)
};

SemanticQuality semantic_quality(const Reasoner& reasoner, const LearningProblem& problem,
                                 const SynthesisResult& predicted);

struct EvalRecord {
    std::string target;
    std::string predicted;
    double f1 = 0.0;
    double accuracy = 0.0;
    double runtime_seconds = 0.0;
};

/// CSV report: one row per problem plus a mean/std aggregate footer.
void write_eval_report(const std::string& path, const std::vector<EvalRecord>& records);

double mean(const std::vector<double>& xs);
double stddev(const std::vector<double>& xs);

}  // namespace nces
