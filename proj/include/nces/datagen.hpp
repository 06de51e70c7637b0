// Learning-problem generation: candidate class expressions, redundancy
// filtering, example sampling, and the line-delimited dataset format
//   target<TAB>pos:id1,id2,...<TAB>neg:id1,...
// where ids are individual names.  All randomness is seed-deterministic.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nces/expr.hpp"
#include "nces/kb.hpp"
#include "nces/reasoner.hpp"

namespace nces {

struct LearningProblem {
    ExprPtr target;               // null for user-supplied queries
    std::vector<int> positives;   // individual ids, sampling order preserved
    std::vector<int> negatives;
};

class DatagenError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Length-bounded stochastic expression construction.  Starts from atomic
/// classes and their negations, then combines with ⊓/⊔ and wraps with ∃R./∀R.
/// Expressions with empty or full instance sets are discarded, as are
/// duplicates (by canonical string).  Returns at most `budget` expressions.
std::vector<ExprPtr> generate_expressions(const Reasoner& reasoner, int max_len,
                                          int budget, std::uint64_t seed);

/// Keeps, per distinct instance set, one expression of minimal token length
/// (ties: lexicographically smallest canonical string).  Output order is the
/// first-appearance order of each instance set.
std::vector<ExprPtr> filter_redundant(const Reasoner& reasoner,
                                      const std::vector<ExprPtr>& exprs);

/// Samples n1 positives and n2 negatives per expression without replacement,
/// n1 = n2 = n/2 with overflow reassigned when one pool is scarce.
/// Expressions with an empty instance set or empty complement are skipped.
std::vector<LearningProblem> make_learning_problems(const Reasoner& reasoner,
                                                    const std::vector<ExprPtr>& exprs,
                                                    int n, std::uint64_t seed);

/// Per-KB example budget n = min(|N_I|/2, 1000).
int default_example_budget(const KnowledgeBase& kb);

struct TrainTestSplit {
    std::vector<LearningProblem> train;
    std::vector<LearningProblem> test;
};

/// Disjoint exhaustive split; |test| = round((1-ratio)*|problems|).
TrainTestSplit split_train_test(const std::vector<LearningProblem>& problems,
                                double ratio, std::uint64_t seed);

std::string dataset_record(const LearningProblem& p, const KnowledgeBase& kb);
void save_dataset(const std::string& path, const std::vector<LearningProblem>& problems,
                  const KnowledgeBase& kb);
/// Records with an empty target field are allowed (user queries).
std::vector<LearningProblem> load_dataset(const std::string& path, const KnowledgeBase& kb);

}  // namespace nces
