#include "nces/reasoner.hpp"

#include <algorithm>

namespace nces {

int InstanceSet::count() const {
    return static_cast<int>(std::count(bits.begin(), bits.end(), true));
}

std::vector<int> InstanceSet::members() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(bits.size()); ++i)
        if (bits[i]) out.push_back(i);
    return out;
}

Reasoner::Reasoner(const KnowledgeBase& kb) : kb_(kb) {
    const int n = static_cast<int>(kb.individuals.size());
    const int nc = static_cast<int>(kb.classes.size());

    // Atomic subclass graph: edge sub -> sup for atomic-to-atomic axioms.
    std::vector<std::vector<int>> subs_of(nc);  // subs_of[sup] = direct atomic subs
    for (const auto& [sub, sup] : kb.tbox) {
        if (sub->kind == ExprKind::Atomic && sup->kind == ExprKind::Atomic) {
            int s = kb.class_index.at(sub->name);
            int p = kb.class_index.at(sup->name);
            subs_of[p].push_back(s);
        }
    }

    atomic_ext_.resize(nc);
    for (int c = 0; c < nc; ++c) {
        InstanceSet ext;
        ext.bits.assign(n, false);
        // DFS over the reverse subclass graph; members of every reachable
        // subclass belong to c.
        std::vector<bool> seen(nc, false);
        std::vector<int> stack = {c};
        seen[c] = true;
        while (!stack.empty()) {
            int cur = stack.back();
            stack.pop_back();
            for (int ind : kb.abox_types[cur]) ext.bits[ind] = true;
            for (int s : subs_of[cur]) {
                if (!seen[s]) {
                    seen[s] = true;
                    stack.push_back(s);
                }
            }
        }
        atomic_ext_[c] = std::move(ext);
    }

    succ_.resize(kb.roles.size());
    for (std::size_t r = 0; r < kb.roles.size(); ++r) {
        succ_[r].resize(n);
        for (const auto& [a, b] : kb.abox_roles[r]) succ_[r][a].push_back(b);
    }
}

const InstanceSet& Reasoner::atomic_extension(const std::string& class_name) const {
    auto it = kb_.class_index.find(class_name);
    if (it == kb_.class_index.end())
        throw KbError("undeclared class: '" + class_name + "'");
    return atomic_ext_[it->second];
}

InstanceSet Reasoner::retrieve_instances(const ConceptExpr& expr) const {
    const int n = static_cast<int>(kb_.individuals.size());
    InstanceSet out;
    switch (expr.kind) {
        case ExprKind::Top:
            out.bits.assign(n, true);
            return out;
        case ExprKind::Bottom:
            out.bits.assign(n, false);
            return out;
        case ExprKind::Atomic:
            return atomic_extension(expr.name);
        case ExprKind::Not: {
            out = retrieve_instances(*expr.left);
            out.bits.flip();
            return out;
        }
        case ExprKind::And: {
            out = retrieve_instances(*expr.left);
            InstanceSet rhs = retrieve_instances(*expr.right);
            for (int i = 0; i < n; ++i) out.bits[i] = out.bits[i] && rhs.bits[i];
            return out;
        }
        case ExprKind::Or: {
            out = retrieve_instances(*expr.left);
            InstanceSet rhs = retrieve_instances(*expr.right);
            for (int i = 0; i < n; ++i) out.bits[i] = out.bits[i] || rhs.bits[i];
            return out;
        }
        case ExprKind::Exists:
        case ExprKind::Forall: {
            auto it = kb_.role_index.find(expr.name);
            if (it == kb_.role_index.end())
                throw KbError("undeclared role: '" + expr.name + "'");
            InstanceSet child = retrieve_instances(*expr.left);
            out.bits.assign(n, expr.kind == ExprKind::Forall);
            const auto& succ = succ_[it->second];
            for (int a = 0; a < n; ++a) {
                if (expr.kind == ExprKind::Exists) {
                    for (int b : succ[a]) {
                        if (child.bits[b]) {
                            out.bits[a] = true;
                            break;
                        }
                    }
                } else {
                    for (int b : succ[a]) {
                        if (!child.bits[b]) {
                            out.bits[a] = false;
                            break;
                        }
                    }
                }
            }
            return out;
        }
    }
    throw KbError("unreachable expression kind");
}

}  // namespace nces
