#include "nces/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <unordered_set>

namespace nces {

namespace {

int intern(std::vector<std::string>& names, std::unordered_map<std::string, int>& index,
           const std::string& name) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(names.size());
    names.push_back(name);
    index.emplace(name, id);
    return id;
}

std::uint64_t triple_key(int s, int p, int o) {
    return (static_cast<std::uint64_t>(s) << 42) | (static_cast<std::uint64_t>(p) << 21) |
           static_cast<std::uint64_t>(o);
}

double distance(const std::vector<double>& s, const std::vector<double>& p,
                const std::vector<double>& o) {
    double acc = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        double r = s[k] + p[k] - o[k];
        acc += r * r;
    }
    return std::sqrt(acc);
}

void normalize(std::vector<double>& v) {
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    if (n > 0.0)
        for (double& x : v) x /= n;
}

}  // namespace

TripleStore kb_to_triples(const KnowledgeBase& kb) {
    TripleStore st;
    for (const auto& ind : kb.individuals) intern(st.entities, st.entity_index, ind);
    for (const auto& cls : kb.classes) {
        if (st.entity_index.count(cls))
            throw EmbeddingError("name used as both individual and class: '" + cls + "'");
        intern(st.entities, st.entity_index, cls);
    }
    for (const auto& r : kb.roles) intern(st.predicates, st.predicate_index, r);
    int p_type = intern(st.predicates, st.predicate_index, "type");
    int p_sub = intern(st.predicates, st.predicate_index, "subclassof");

    for (std::size_t r = 0; r < kb.roles.size(); ++r)
        for (const auto& [a, b] : kb.abox_roles[r])
            st.triples.push_back({a, static_cast<int>(r), b});
    const int class_base = static_cast<int>(kb.individuals.size());
    for (std::size_t c = 0; c < kb.classes.size(); ++c)
        for (int a : kb.abox_types[c])
            st.triples.push_back({a, p_type, class_base + static_cast<int>(c)});
    for (const auto& [sub, sup] : kb.tbox) {
        if (sub->kind == ExprKind::Atomic && sup->kind == ExprKind::Atomic) {
            st.triples.push_back({class_base + kb.class_index.at(sub->name), p_sub,
                                  class_base + kb.class_index.at(sup->name)});
        }
    }
    return st;
}

const std::vector<double>& EmbeddingTable::entity(const std::string& name) const {
    auto it = entity_index.find(name);
    if (it == entity_index.end())
        throw EmbeddingError("no embedding for entity '" + name + "'");
    return entity_vectors[it->second];
}

EmbeddingTable train_transe(const TripleStore& store, const TransEConfig& cfg) {
    if (store.triples.empty()) throw EmbeddingError("triple store is empty");
    if (cfg.d < 1) throw EmbeddingError("embedding dimension must be >= 1");

    EmbeddingTable t;
    t.d = cfg.d;
    t.entity_names = store.entities;
    t.relation_names = store.predicates;
    t.entity_index = store.entity_index;

    std::mt19937_64 rng(cfg.seed);
    const double bound = 6.0 / std::sqrt(static_cast<double>(cfg.d));
    std::uniform_real_distribution<double> init(-bound, bound);
    auto random_vec = [&] {
        std::vector<double> v(cfg.d);
        for (double& x : v) x = init(rng);
        return v;
    };
    t.entity_vectors.reserve(store.entities.size());
    for (std::size_t i = 0; i < store.entities.size(); ++i)
        t.entity_vectors.push_back(random_vec());
    t.relation_vectors.reserve(store.predicates.size());
    for (std::size_t i = 0; i < store.predicates.size(); ++i) {
        t.relation_vectors.push_back(random_vec());
        normalize(t.relation_vectors.back());
    }

    std::unordered_set<std::uint64_t> truth;
    for (const auto& tr : store.triples) truth.insert(triple_key(tr[0], tr[1], tr[2]));

    const int n_ent = static_cast<int>(store.entities.size());
    std::uniform_int_distribution<int> pick_entity(0, n_ent - 1);
    std::bernoulli_distribution corrupt_head(0.5);

    std::vector<std::size_t> order(store.triples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t idx : order) {
            const auto& tr = store.triples[idx];
            int s = tr[0], p = tr[1], o = tr[2];
            int cs = s, co = o;
            for (int tries = 0; tries < 64; ++tries) {
                cs = s;
                co = o;
                if (corrupt_head(rng))
                    cs = pick_entity(rng);
                else
                    co = pick_entity(rng);
                if (!truth.count(triple_key(cs, p, co))) break;
            }
            auto& vs = t.entity_vectors[s];
            auto& vo = t.entity_vectors[o];
            auto& vp = t.relation_vectors[p];
            auto& vcs = t.entity_vectors[cs];
            auto& vco = t.entity_vectors[co];

            double dp = distance(vs, vp, vo);
            double dn = distance(vcs, vp, vco);
            if (cfg.margin + dp - dn <= 0.0) continue;
            if (!std::isfinite(dp) || !std::isfinite(dn))
                throw EmbeddingError("non-finite distance during TransE training");

            for (int k = 0; k < cfg.d; ++k) {
                double gp = dp > 0.0 ? (vs[k] + vp[k] - vo[k]) / dp : 0.0;
                double gn = dn > 0.0 ? (vcs[k] + vp[k] - vco[k]) / dn : 0.0;
                vs[k] -= cfg.lr * gp;
                vo[k] += cfg.lr * gp;
                vcs[k] += cfg.lr * gn;
                vco[k] -= cfg.lr * gn;
                vp[k] -= cfg.lr * (gp - gn);
            }
        }
        for (auto& v : t.entity_vectors) normalize(v);
    }
    return t;
}

double mean_positive_distance(const TripleStore& store, const EmbeddingTable& table) {
    double acc = 0.0;
    for (const auto& tr : store.triples)
        acc += distance(table.entity_vectors[tr[0]], table.relation_vectors[tr[1]],
                        table.entity_vectors[tr[2]]);
    return acc / static_cast<double>(store.triples.size());
}

double mean_corrupted_distance(const TripleStore& store, const EmbeddingTable& table,
                               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(store.entities.size()) - 1);
    std::bernoulli_distribution head(0.5);
    double acc = 0.0;
    for (const auto& tr : store.triples) {
        int s = tr[0], o = tr[2];
        if (head(rng))
            s = pick(rng);
        else
            o = pick(rng);
        acc += distance(table.entity_vectors[s], table.relation_vectors[tr[1]],
                        table.entity_vectors[o]);
    }
    return acc / static_cast<double>(store.triples.size());
}

ExampleMatrices lookup_examples(const EmbeddingTable& table, const LearningProblem& problem,
                                const KnowledgeBase& kb) {
    if (problem.positives.empty() || problem.negatives.empty())
        throw EmbeddingError("learning problem has an empty example set");
    ExampleMatrices m;
    for (int id : problem.positives) m.pos.push_back(table.entity(kb.individuals[id]));
    for (int id : problem.negatives) m.neg.push_back(table.entity(kb.individuals[id]));
    return m;
}

void save_embeddings(const std::string& path, const EmbeddingTable& table) {
    std::unordered_set<std::string> seen(table.entity_names.begin(), table.entity_names.end());
    for (const auto& r : table.relation_names)
        if (seen.count(r))
            throw EmbeddingError("entity/relation name collision: '" + r + "'");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw EmbeddingError("cannot write embedding file: " + path);
    out << "d " << table.d << "\n";
    out << std::setprecision(17);
    auto write = [&](const std::vector<std::string>& names,
                     const std::vector<std::vector<double>>& vecs) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            out << names[i];
            for (double x : vecs[i]) out << " " << x;
            out << "\n";
        }
    };
    write(table.entity_names, table.entity_vectors);
    write(table.relation_names, table.relation_vectors);
}

EmbeddingTable load_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw EmbeddingError("cannot open embedding file: " + path);
    std::string header, line;
    if (!std::getline(in, header))
        throw EmbeddingError("empty embedding file: " + path);
    std::istringstream hs(header);
    std::string tag;
    EmbeddingTable t;
    if (!(hs >> tag >> t.d) || tag != "d" || t.d < 1)
        throw EmbeddingError("bad embedding header in " + path);
    // Relation rows are indistinguishable from entity rows by format; both are
    // loaded into the entity table, which is all lookup needs post-training.
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string name;
        ls >> name;
        std::vector<double> v(t.d);
        for (int k = 0; k < t.d; ++k) {
            if (!(ls >> v[k]))
                throw EmbeddingError("short embedding row for '" + name + "' in " + path);
        }
        t.entity_index.emplace(name, static_cast<int>(t.entity_names.size()));
        t.entity_names.push_back(name);
        t.entity_vectors.push_back(std::move(v));
    }
    return t;
}

}  // namespace nces
