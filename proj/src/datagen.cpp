#include "nces/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace nces {

namespace {

std::string bits_key(const InstanceSet& s) {
    std::string k(s.bits.size(), '0');
    for (std::size_t i = 0; i < s.bits.size(); ++i)
        if (s.bits[i]) k[i] = '1';
    return k;
}

}  // namespace

std::vector<ExprPtr> generate_expressions(const Reasoner& reasoner, int max_len,
                                          int budget, std::uint64_t seed) {
    const KnowledgeBase& kb = reasoner.kb();
    if (max_len < 1 || budget < 1)
        throw DatagenError("max_len and budget must be >= 1");
    if (kb.classes.empty())
        throw DatagenError("KB declares no classes; nothing to generate");

    const int domain = static_cast<int>(kb.individuals.size());
    std::vector<ExprPtr> out;
    std::unordered_set<std::string> seen;

    auto accept = [&](const ExprPtr& e) {
        if (expression_length(*e) > max_len) return;
        std::string canon = render_expression(*e);
        if (seen.count(canon)) return;
        int c = reasoner.retrieve_instances(*e).count();
        if (c == 0 || c == domain) return;  // degenerate example sets
        seen.insert(canon);
        out.push_back(e);
    };

    for (const auto& name : kb.classes) {
        ExprPtr a = make_atomic(name);
        accept(a);
        accept(make_not(a));
    }

    std::mt19937_64 rng(seed);
    const long attempts = static_cast<long>(budget) * 50;
    for (long it = 0; it < attempts && static_cast<int>(out.size()) < budget; ++it) {
        if (out.empty()) break;
        auto pick = [&]() -> const ExprPtr& {
            std::uniform_int_distribution<std::size_t> d(0, out.size() - 1);
            return out[d(rng)];
        };
        int op = std::uniform_int_distribution<int>(0, kb.roles.empty() ? 1 : 3)(rng);
        ExprPtr e;
        switch (op) {
            case 0: e = make_and(pick(), pick()); break;
            case 1: e = make_or(pick(), pick()); break;
            default: {
                std::uniform_int_distribution<std::size_t> d(0, kb.roles.size() - 1);
                const std::string& role = kb.roles[d(rng)];
                e = op == 2 ? make_exists(role, pick()) : make_forall(role, pick());
                break;
            }
        }
        accept(e);
    }
    if (static_cast<int>(out.size()) > budget) out.resize(budget);
    return out;
}

std::vector<ExprPtr> filter_redundant(const Reasoner& reasoner,
                                      const std::vector<ExprPtr>& exprs) {
    std::vector<ExprPtr> kept;
    std::vector<int> kept_len;
    std::vector<std::string> kept_canon;
    std::unordered_map<std::string, std::size_t> by_instances;
    for (const auto& e : exprs) {
        std::string key = bits_key(reasoner.retrieve_instances(*e));
        int len = expression_length(*e);
        std::string canon = render_expression(*e);
        auto it = by_instances.find(key);
        if (it == by_instances.end()) {
            by_instances.emplace(key, kept.size());
            kept.push_back(e);
            kept_len.push_back(len);
            kept_canon.push_back(std::move(canon));
            continue;
        }
        std::size_t k = it->second;
        if (len < kept_len[k] || (len == kept_len[k] && canon < kept_canon[k])) {
            kept[k] = e;
            kept_len[k] = len;
            kept_canon[k] = std::move(canon);
        }
    }
    return kept;
}

std::vector<LearningProblem> make_learning_problems(const Reasoner& reasoner,
                                                    const std::vector<ExprPtr>& exprs,
                                                    int n, std::uint64_t seed) {
    if (n < 2) throw DatagenError("example budget n must be >= 2");
    const int domain = static_cast<int>(reasoner.kb().individuals.size());
    std::mt19937_64 rng(seed);
    std::vector<LearningProblem> problems;
    for (const auto& e : exprs) {
        InstanceSet inst = reasoner.retrieve_instances(*e);
        std::vector<int> pos_pool = inst.members();
        std::vector<int> neg_pool;
        for (int i = 0; i < domain; ++i)
            if (!inst.bits[i]) neg_pool.push_back(i);
        if (pos_pool.empty() || neg_pool.empty()) {
            std::cerr << "warning: skipping '" << render_expression(*e)
                      << "' (empty instance set or empty complement)\n";
            continue;
        }
        int n1 = std::min(n / 2, static_cast<int>(pos_pool.size()));
        int n2 = std::min(n - n1, static_cast<int>(neg_pool.size()));
        n1 = std::min(n - n2, static_cast<int>(pos_pool.size()));

        std::shuffle(pos_pool.begin(), pos_pool.end(), rng);
        std::shuffle(neg_pool.begin(), neg_pool.end(), rng);
        LearningProblem p;
        p.target = e;
        p.positives.assign(pos_pool.begin(), pos_pool.begin() + n1);
        p.negatives.assign(neg_pool.begin(), neg_pool.begin() + n2);
        problems.push_back(std::move(p));
    }
    return problems;
}

int default_example_budget(const KnowledgeBase& kb) {
    return std::min(static_cast<int>(kb.individuals.size()) / 2, 1000);
}

TrainTestSplit split_train_test(const std::vector<LearningProblem>& problems,
                                double ratio, std::uint64_t seed) {
    if (problems.size() < 2) throw DatagenError("need at least 2 problems to split");
    if (!(ratio > 0.0 && ratio < 1.0)) throw DatagenError("split ratio must be in (0,1)");
    const std::size_t total = problems.size();
    const std::size_t test_count =
        static_cast<std::size_t>(std::llround((1.0 - ratio) * static_cast<double>(total)));
    std::vector<std::size_t> idx(total);
    for (std::size_t i = 0; i < total; ++i) idx[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<bool> is_test(total, false);
    for (std::size_t i = 0; i < test_count; ++i) is_test[idx[i]] = true;
    TrainTestSplit split;
    for (std::size_t i = 0; i < total; ++i)
        (is_test[i] ? split.test : split.train).push_back(problems[i]);
    return split;
}

std::string dataset_record(const LearningProblem& p, const KnowledgeBase& kb) {
    std::ostringstream os;
    if (p.target) os << render_expression(*p.target);
    os << "\tpos:";
    for (std::size_t i = 0; i < p.positives.size(); ++i)
        os << (i ? "," : "") << kb.individuals[p.positives[i]];
    os << "\tneg:";
    for (std::size_t i = 0; i < p.negatives.size(); ++i)
        os << (i ? "," : "") << kb.individuals[p.negatives[i]];
    return os.str();
}

void save_dataset(const std::string& path, const std::vector<LearningProblem>& problems,
                  const KnowledgeBase& kb) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DatagenError("cannot write dataset file: " + path);
    for (const auto& p : problems) out << dataset_record(p, kb) << "\n";
}

namespace {

std::vector<int> parse_id_list(const std::string& field, const std::string& prefix,
                               const KnowledgeBase& kb, const std::string& path, int line_no) {
    if (field.compare(0, prefix.size(), prefix) != 0)
        throw DatagenError(path + ":" + std::to_string(line_no) + ": expected '" + prefix +
                           "' field");
    std::vector<int> ids;
    std::string rest = field.substr(prefix.size());
    std::istringstream ss(rest);
    std::string name;
    while (std::getline(ss, name, ',')) {
        auto it = kb.individual_index.find(name);
        if (it == kb.individual_index.end())
            throw DatagenError(path + ":" + std::to_string(line_no) +
                               ": unknown individual '" + name + "'");
        ids.push_back(it->second);
    }
    return ids;
}

}  // namespace

std::vector<LearningProblem> load_dataset(const std::string& path, const KnowledgeBase& kb) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatagenError("cannot open dataset file: " + path);
    std::vector<LearningProblem> problems;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::istringstream ss(line);
        std::string f;
        while (std::getline(ss, f, '\t')) fields.push_back(f);
        if (fields.size() != 3)
            throw DatagenError(path + ":" + std::to_string(line_no) +
                               ": expected 3 tab-separated fields");
        LearningProblem p;
        if (!fields[0].empty()) p.target = parse_expression(fields[0], kb);
        p.positives = parse_id_list(fields[1], "pos:", kb, path, line_no);
        p.negatives = parse_id_list(fields[2], "neg:", kb, path, line_no);
        problems.push_back(std::move(p));
    }
    return problems;
}

}  // namespace nces
