// Shared test utilities: a naive per-individual truth-evaluation oracle for
// instance retrieval, random KB / expression generators, and a central
// finite-difference gradient checker.  The oracle deliberately avoids the
// library's set-based evaluation: it decides membership one individual at a
// time by recursive truth evaluation, so agreement between the two is
// meaningful evidence rather than a tautology.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nces/autodiff.hpp"
#include "nces/expr.hpp"
#include "nces/kb.hpp"
#include "nces/reasoner.hpp"

namespace testutil {

// --- naive retrieval oracle -------------------------------------------------

// a ∈ A iff a is asserted in some class B with a declared atomic chain
// B ⊑ ... ⊑ A.  Reachability is recomputed per query by DFS (no caching).
inline bool oracle_in_atomic(const nces::KnowledgeBase& kb, int ind, const std::string& cls) {
    std::vector<std::string> stack{cls};
    std::set<std::string> visited;
    while (!stack.empty()) {
        std::string cur = stack.back();
        stack.pop_back();
        if (!visited.insert(cur).second) continue;
        int cid = kb.class_index.at(cur);
        const auto& members = kb.abox_types[cid];
        if (std::find(members.begin(), members.end(), ind) != members.end()) return true;
        // follow declared atomic axioms sub ⊑ cur backwards
        for (const auto& [sub, sup] : kb.tbox)
            if (sub->kind == nces::ExprKind::Atomic && sup->kind == nces::ExprKind::Atomic &&
                sup->name == cur)
                stack.push_back(sub->name);
    }
    return false;
}

inline bool oracle_holds(const nces::KnowledgeBase& kb, int ind, const nces::ConceptExpr& e) {
    using nces::ExprKind;
    switch (e.kind) {
        case ExprKind::Top: return true;
        case ExprKind::Bottom: return false;
        case ExprKind::Atomic: return oracle_in_atomic(kb, ind, e.name);
        case ExprKind::Not: return !oracle_holds(kb, ind, *e.left);
        case ExprKind::And:
            return oracle_holds(kb, ind, *e.left) && oracle_holds(kb, ind, *e.right);
        case ExprKind::Or:
            return oracle_holds(kb, ind, *e.left) || oracle_holds(kb, ind, *e.right);
        case ExprKind::Exists: {
            for (const auto& [s, o] : kb.abox_roles[kb.role_index.at(e.name)])
                if (s == ind && oracle_holds(kb, o, *e.left)) return true;
            return false;
        }
        case ExprKind::Forall: {
            for (const auto& [s, o] : kb.abox_roles[kb.role_index.at(e.name)])
                if (s == ind && !oracle_holds(kb, o, *e.left)) return false;
            return true;  // vacuous truth without successors
        }
    }
    return false;
}

inline nces::InstanceSet oracle_retrieve(const nces::KnowledgeBase& kb,
                                         const nces::ConceptExpr& e) {
    nces::InstanceSet s;
    s.bits.resize(kb.individuals.size());
    for (std::size_t i = 0; i < kb.individuals.size(); ++i)
        s.bits[i] = oracle_holds(kb, static_cast<int>(i), e);
    return s;
}

// --- random fixtures ---------------------------------------------------------

inline nces::KnowledgeBase random_kb(std::mt19937_64& rng, int max_ind = 12, int max_cls = 4,
                                     int max_role = 2) {
    auto ri = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const int ni = ri(1, max_ind), nc = ri(1, max_cls), nr = ri(0, max_role);
    std::ostringstream kb;
    for (int c = 0; c < nc; ++c) kb << "class C" << c << "\n";
    for (int r = 0; r < nr; ++r) kb << "role r" << r << "\n";
    for (int i = 0; i < ni; ++i) {
        kb << "type i" << i << " C" << ri(0, nc - 1) << "\n";
        if (ri(0, 1)) kb << "type i" << i << " C" << ri(0, nc - 1) << "\n";
    }
    if (nr > 0) {
        const int edges = ri(0, 2 * ni);
        for (int k = 0; k < edges; ++k)
            kb << "role_assert i" << ri(0, ni - 1) << " r" << ri(0, nr - 1) << " i"
               << ri(0, ni - 1) << "\n";
    }
    const int axioms = ri(0, nc);
    for (int k = 0; k < axioms; ++k) kb << "sub C" << ri(0, nc - 1) << " C" << ri(0, nc - 1) << "\n";
    return nces::parse_kb(kb.str(), "<random>");
}

inline nces::ExprPtr random_expr(std::mt19937_64& rng, const nces::KnowledgeBase& kb,
                                 int max_len, int depth = 0) {
    auto ri = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    for (;;) {
        nces::ExprPtr e;
        const int leafy = depth >= 3 ? 1 : ri(0, 3);  // bias toward leaves when deep
        if (leafy <= 1) {
            switch (ri(0, 3)) {
                case 0: e = nces::make_top(); break;
                case 1: e = nces::make_bottom(); break;
                default: e = nces::make_atomic(kb.classes[ri(0, (int)kb.classes.size() - 1)]);
            }
        } else {
            switch (ri(0, kb.roles.empty() ? 2 : 4)) {
                case 0:
                    e = nces::make_not(random_expr(rng, kb, max_len, depth + 1));
                    break;
                case 1:
                    e = nces::make_and(random_expr(rng, kb, max_len, depth + 1),
                                       random_expr(rng, kb, max_len, depth + 1));
                    break;
                case 2:
                    e = nces::make_or(random_expr(rng, kb, max_len, depth + 1),
                                      random_expr(rng, kb, max_len, depth + 1));
                    break;
                case 3:
                    e = nces::make_exists(kb.roles[ri(0, (int)kb.roles.size() - 1)],
                                          random_expr(rng, kb, max_len, depth + 1));
                    break;
                default:
                    e = nces::make_forall(kb.roles[ri(0, (int)kb.roles.size() - 1)],
                                          random_expr(rng, kb, max_len, depth + 1));
            }
        }
        if (nces::expression_length(*e) <= max_len) return e;
    }
}

// --- gradient checking --------------------------------------------------------

inline double rel_err(double a, double b) {
    const double denom = std::max(1e-8, std::abs(a) + std::abs(b));
    return std::abs(a - b) / denom;
}

// Central finite differences against the analytic gradients of `loss_fn`,
// which must rebuild a fresh scalar graph over the same parameter leaves on
// every call.  Returns the worst relative error over all parameter entries.
inline double max_gradient_error(std::vector<nces::ad::Parameter>& params,
                                 const std::function<nces::ad::NodePtr()>& loss_fn,
                                 double eps = 1e-4) {
    nces::ad::zero_grad(params);
    nces::ad::backward(loss_fn());
    double worst = 0.0;
    for (auto& p : params) {
        if (!p.trainable) continue;
        for (std::size_t i = 0; i < p.node->value.data.size(); ++i) {
            double& x = p.node->value.data[i];
            const double saved = x;
            x = saved + eps;
            const double fp = loss_fn()->value.data[0];
            x = saved - eps;
            const double fm = loss_fn()->value.data[0];
            x = saved;
            const double fd = (fp - fm) / (2.0 * eps);
            const double analytic = p.node->grad.data[i];
            if (std::abs(fd) < 1e-10 && std::abs(analytic) < 1e-10) continue;
            worst = std::max(worst, rel_err(analytic, fd));
        }
    }
    return worst;
}

inline nces::Tensor random_tensor(std::mt19937_64& rng, int r, int c, double scale = 1.0) {
    nces::Tensor t({r, c});
    std::uniform_real_distribution<double> u(-scale, scale);
    for (double& x : t.data) x = u(rng);
    return t;
}

}  // namespace testutil
