#include "nces/decode.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>

namespace nces {

SynthesisResult decode_scores(const Tensor& scores, const Vocabulary& vocab,
                              const KnowledgeBase& kb) {
    if (scores.shape.size() != 2 || scores.rows() != vocab.size() + 1)
        throw NumericError("decode: scores must be (1+|vocab|) x L, got " + scores.shape_str());
    const int num_classes = scores.rows();
    const int seq_len = scores.cols();
    const int pad = vocab.pad_id;

    SynthesisResult res;
    for (int j = 0; j < seq_len; ++j) {
        int best = 0;
        for (int c = 1; c < num_classes; ++c)
            if (scores.at(c, j) > scores.at(best, j)) best = c;
        if (best == pad) break;
        res.token_ids.push_back(best);
    }
    res.text = detokenize(res.token_ids, vocab);
    try {
        res.expression = parse_expression(res.text, kb);
        res.parse_ok = true;
    } catch (const ParseError&) {
        res.parse_ok = false;
    }
    return res;
}

Tensor score_slice(const Tensor& batch_scores, int row, int num_classes, int seq_len) {
    if (batch_scores.shape.size() != 2 || batch_scores.cols() != num_classes * seq_len)
        throw NumericError("score_slice: row width mismatch " + batch_scores.shape_str());
    Tensor out({num_classes, seq_len});
    for (int i = 0; i < num_classes * seq_len; ++i)
        out.data[i] = batch_scores.at(row, i);
    return out;
}

Tensor ensemble_scores(const std::vector<Tensor>& scores_list) {
    if (scores_list.size() < 2)
        throw NumericError("ensemble requires at least 2 score tensors");
    Tensor out = scores_list[0];
    for (std::size_t i = 1; i < scores_list.size(); ++i) {
        if (!scores_list[i].same_shape(out))
            throw NumericError("ensemble: shape mismatch " + out.shape_str() + " vs " +
                               scores_list[i].shape_str());
        for (std::size_t k = 0; k < out.data.size(); ++k)
            out.data[k] += scores_list[i].data[k];
    }
    const double inv = 1.0 / static_cast<double>(scores_list.size());
    for (double& x : out.data) x *= inv;
    return out;
}

namespace {

template <typename T>
double soft_acc_impl(const std::vector<T>& t, const std::vector<T>& p) {
    std::set<T> ts(t.begin(), t.end()), ps(p.begin(), p.end());
    std::vector<T> inter, uni;
    std::set_intersection(ts.begin(), ts.end(), ps.begin(), ps.end(), std::back_inserter(inter));
    std::set_union(ts.begin(), ts.end(), ps.begin(), ps.end(), std::back_inserter(uni));
    if (uni.empty()) return 1.0;
    return static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

template <typename T>
double hard_acc_impl(const std::vector<T>& t, const std::vector<T>& p) {
    const std::size_t lo = std::min(t.size(), p.size());
    const std::size_t hi = std::max(t.size(), p.size());
    if (hi == 0) return 1.0;
    std::size_t match = 0;
    for (std::size_t i = 0; i < lo; ++i)
        if (t[i] == p[i]) ++match;
    return static_cast<double>(match) / static_cast<double>(hi);
}

}  // namespace

double soft_accuracy(const ConceptExpr& target, const ConceptExpr& predicted) {
    return soft_acc_impl(atom_list(target), atom_list(predicted));
}
double hard_accuracy(const ConceptExpr& target, const ConceptExpr& predicted) {
    return hard_acc_impl(atom_list(target), atom_list(predicted));
}
double soft_accuracy_tokens(const std::vector<int>& t, const std::vector<int>& p) {
    return soft_acc_impl(t, p);
}
double hard_accuracy_tokens(const std::vector<int>& t, const std::vector<int>& p) {
    return hard_acc_impl(t, p);
}

SemanticQuality semantic_quality(const Reasoner& reasoner, const LearningProblem& problem,
                                 const SynthesisResult& predicted) {
    SemanticQuality q;
    if (!predicted.parse_ok) {
        q.parsed = false;
        return q;  // unparsable output scores 0 rather than erroring
    }
    InstanceSet inst = reasoner.retrieve_instances(*predicted.expression);
    double tp = 0, fp = 0, fn = 0, tn = 0;
    for (int id : problem.positives) (inst.bits[id] ? tp : fn) += 1;
    for (int id : problem.negatives) (inst.bits[id] ? fp : tn) += 1;
    q.f1 = (2 * tp + fp + fn) > 0 ? 2 * tp / (2 * tp + fp + fn) : 0.0;
    const double total = tp + fp + fn + tn;
    q.accuracy = total > 0 ? (tp + tn) / total : 0.0;
    return q;
}

double mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc / static_cast<double>(xs.size());
}

double stddev(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double mu = mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - mu) * (x - mu);
    return std::sqrt(acc / static_cast<double>(xs.size()));
}

void write_eval_report(const std::string& path, const std::vector<EvalRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NumericError("cannot write report: " + path);
    out << std::setprecision(17);
    out << "target,predicted,f1,accuracy,runtime_seconds\n";
    std::vector<double> f1s, accs;
    auto quote = [](const std::string& s) { return "\"" + s + "\""; };
    for (const auto& r : records) {
        out << quote(r.target) << "," << quote(r.predicted) << "," << r.f1 << "," << r.accuracy
            << "," << r.runtime_seconds << "\n";
        f1s.push_back(r.f1);
        accs.push_back(r.accuracy);
    }
    out << "# aggregate,f1_mean=" << mean(f1s) << ",f1_std=" << stddev(f1s)
        << ",accuracy_mean=" << mean(accs) << ",accuracy_std=" << stddev(accs) << "\n";
}

}  // namespace nces
