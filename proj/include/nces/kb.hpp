// Knowledge base representation and the line-based KB text format.
//
// File format, UTF-8, one statement per line:
//   class <Name>                  declare atomic class
//   role <Name>                   declare role
//   type <ind> <Class>            ABox class assertion C(a)
//   role_assert <ind> <role> <ind>  ABox role assertion R(a,b)
//   role <ind> <role> <ind>       accepted alias for role_assert
//   sub <expr> <expr>             TBox axiom C ⊑ D, canonical expression syntax
//   # ...                         comment
// Names match [A-Za-z0-9_-]+.  `type` and role assertions implicitly declare
// the individuals/classes/roles they mention; `sub` requires every name to be
// declared already.  Index order is order of first appearance in the file.

#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nces/expr.hpp"

namespace nces {

class KbError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct KnowledgeBase {
    std::vector<std::string> individuals;
    std::vector<std::string> classes;
    std::vector<std::string> roles;

    std::unordered_map<std::string, int> individual_index;
    std::unordered_map<std::string, int> class_index;
    std::unordered_map<std::string, int> role_index;

    std::vector<std::pair<ExprPtr, ExprPtr>> tbox;

    // abox_types[c] = individual ids asserted to be in class c.
    std::vector<std::vector<int>> abox_types;
    // abox_roles[r] = (subject, object) individual id pairs.
    std::vector<std::vector<std::pair<int, int>>> abox_roles;

    int add_individual(const std::string& name);
    int add_class(const std::string& name);
    int add_role(const std::string& name);

    bool has_class(const std::string& name) const { return class_index.count(name) > 0; }
    bool has_role(const std::string& name) const { return role_index.count(name) > 0; }
};

KnowledgeBase load_kb(const std::string& path);

/// Parses KB statements from an already-read buffer; `origin` names the
/// source in error messages.
KnowledgeBase parse_kb(const std::string& text, const std::string& origin = "<string>");

// --- Vocabulary -----------------------------------------------------------

/// The 11 special atoms, in vocabulary order after classes and roles.
extern const std::vector<std::string> kSpecialAtoms;

struct Vocabulary {
    std::vector<std::string> atoms;
    std::unordered_map<std::string, int> index;
    int pad_id = 0;  // |atoms|; not itself an atom

    int id_of(const std::string& atom) const;
    int size() const { return static_cast<int>(atoms.size()); }
    /// FNV-1a over the atom list; embedded in checkpoints to catch decode-time
    /// vocabulary mismatches.
    std::uint64_t fingerprint() const;
};

Vocabulary build_vocabulary(const KnowledgeBase& kb);

std::vector<int> tokenize_expression(const ConceptExpr& expr, const Vocabulary& vocab);
inline std::vector<int> tokenize_expression(const ExprPtr& e, const Vocabulary& v) {
    return tokenize_expression(*e, v);
}

/// Joins atoms for the given ids; ids must be < |vocab| (no PAD).
std::string detokenize(const std::vector<int>& ids, const Vocabulary& vocab);

}  // namespace nces
