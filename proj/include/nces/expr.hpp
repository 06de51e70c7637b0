// ALC class expression AST: construction, structural equality, canonical
// rendering and parsing.
//
// Grammar (canonical syntax):
//   expr    := conj ('⊔' conj)*           left-associative
//   conj    := unary ('⊓' unary)*         left-associative
//   unary   := '¬' unary
//            | '∃' ROLE '.' unary
//            | '∀' ROLE '.' unary
//            | primary
//   primary := '⊤' | '⊥' | NAME | '(' expr ')'
//
// Canonical spacing: a single space around ⊓ and ⊔, a single space between a
// quantifier and its role, no space around '.', none after '¬', none inside
// parentheses.  atom_list() yields the canonical string pre-split into atoms
// (spaces are explicit atoms); render() is its concatenation.

#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace nces {

enum class ExprKind { Top, Bottom, Atomic, Not, And, Or, Exists, Forall };

struct ConceptExpr;
using ExprPtr = std::shared_ptr<const ConceptExpr>;

struct ConceptExpr {
    ExprKind kind;
    std::string name;  // Atomic: class name; Exists/Forall: role name
    ExprPtr left;      // unary child or left operand
    ExprPtr right;     // right operand of And/Or
};

ExprPtr make_top();
ExprPtr make_bottom();
ExprPtr make_atomic(std::string name);
ExprPtr make_not(ExprPtr child);
ExprPtr make_and(ExprPtr lhs, ExprPtr rhs);
ExprPtr make_or(ExprPtr lhs, ExprPtr rhs);
ExprPtr make_exists(std::string role, ExprPtr child);
ExprPtr make_forall(std::string role, ExprPtr child);

bool structurally_equal(const ConceptExpr& a, const ConceptExpr& b);
inline bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
    return structurally_equal(*a, *b);
}

/// Canonical rendering split into atoms; concatenating the entries gives the
/// canonical string exactly.
std::vector<std::string> atom_list(const ConceptExpr& expr);
std::string render_expression(const ConceptExpr& expr);
inline std::string render_expression(const ExprPtr& e) { return render_expression(*e); }

/// Token length of the canonical form (|atom_list|).
int expression_length(const ConceptExpr& expr);

struct KnowledgeBase;  // kb.hpp

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses canonical (or redundantly parenthesized) syntax.  Class and role
/// names must be declared in `kb`.
ExprPtr parse_expression(const std::string& text, const KnowledgeBase& kb);

}  // namespace nces
