// Closed-world instance retrieval over a fixed knowledge base.
//
// Atomic concepts are materialized as the ABox members of the class plus the
// members of any class reachable through a chain of atomic-to-atomic TBox
// axioms (A ⊑ ... ⊑ class).  Axioms with a complex side are stored in the KB
// but do not participate in retrieval.  The interpretation domain is the KB's
// individual set; complement is domain minus members.  ∀R.C holds vacuously
// for individuals without R-successors.
//
// All indices and atomic extensions are precomputed in the constructor, so a
// constructed Reasoner is safe for concurrent read-only queries.

#pragma once

#include <vector>

#include "nces/expr.hpp"
#include "nces/kb.hpp"

namespace nces {

struct InstanceSet {
    std::vector<bool> bits;  // indexed by individual id

    int count() const;
    std::vector<int> members() const;
    bool operator==(const InstanceSet&) const = default;
};

class Reasoner {
public:
    explicit Reasoner(const KnowledgeBase& kb);

    InstanceSet retrieve_instances(const ConceptExpr& expr) const;
    InstanceSet retrieve_instances(const ExprPtr& e) const { return retrieve_instances(*e); }

    /// Materialized extension of an atomic class, closed under declared
    /// atomic subclass axioms.
    const InstanceSet& atomic_extension(const std::string& class_name) const;

    const KnowledgeBase& kb() const { return kb_; }

private:
    const KnowledgeBase& kb_;
    std::vector<InstanceSet> atomic_ext_;                 // per class id
    std::vector<std::vector<std::vector<int>>> succ_;     // succ_[role][ind]
};

}  // namespace nces
