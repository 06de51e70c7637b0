#include "nces/autodiff.hpp"

#include <cmath>
#include <unordered_set>

namespace nces::ad {

namespace {

NodePtr make_node(Tensor v, std::vector<NodePtr> inputs, std::function<void(Node&)> bp) {
    auto n = std::make_shared<Node>();
    n->value = std::move(v);
    n->grad = Tensor(n->value.shape);
    for (const auto& in : inputs)
        if (in->requires_grad) n->requires_grad = true;
    if (n->requires_grad) {
        n->inputs = std::move(inputs);
        n->backprop = std::move(bp);
    }
    return n;
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
    throw NumericError(std::string(op) + ": incompatible shapes " + a.shape_str() + " and " +
                       b.shape_str());
}

void check_2d(const char* op, const Tensor& t) {
    if (t.shape.size() != 2)
        throw NumericError(std::string(op) + ": expected 2-D tensor, got " + t.shape_str());
}

NodePtr elementwise(const NodePtr& a, double (*f)(double), double (*df)(double, double)) {
    // df receives (input, output) so saturating functions can reuse the output.
    Tensor out = a->value;
    for (double& x : out.data) x = f(x);
    NodePtr in = a;
    return make_node(out, {a}, [in, df](Node& n) {
        for (std::size_t i = 0; i < n.grad.data.size(); ++i)
            in->grad.data[i] += n.grad.data[i] * df(in->value.data[i], n.value.data[i]);
    });
}

}  // namespace

NodePtr constant(Tensor v) {
    auto n = std::make_shared<Node>();
    n->value = std::move(v);
    n->grad = Tensor(n->value.shape);
    return n;
}

NodePtr leaf(Tensor v) {
    auto n = constant(std::move(v));
    n->requires_grad = true;
    return n;
}

NodePtr add(const NodePtr& a, const NodePtr& b) {
    if (!a->value.same_shape(b->value)) shape_error("add", a->value, b->value);
    Tensor out = a->value;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b->value.data[i];
    NodePtr x = a, y = b;
    return make_node(std::move(out), {a, b}, [x, y](Node& n) {
        for (std::size_t i = 0; i < n.grad.data.size(); ++i) {
            if (x->requires_grad) x->grad.data[i] += n.grad.data[i];
            if (y->requires_grad) y->grad.data[i] += n.grad.data[i];
        }
    });
}

NodePtr add_rowvec(const NodePtr& a, const NodePtr& row) {
    check_2d("add_rowvec", a->value);
    check_2d("add_rowvec", row->value);
    if (row->value.rows() != 1 || row->value.cols() != a->value.cols())
        shape_error("add_rowvec", a->value, row->value);
    Tensor out = a->value;
    const int c = out.cols();
    for (int i = 0; i < out.rows(); ++i)
        for (int j = 0; j < c; ++j) out.at(i, j) += row->value.at(0, j);
    NodePtr x = a, r = row;
    return make_node(std::move(out), {a, row}, [x, r, c](Node& n) {
        for (int i = 0; i < n.grad.rows(); ++i)
            for (int j = 0; j < c; ++j) {
                if (x->requires_grad) x->grad.at(i, j) += n.grad.at(i, j);
                if (r->requires_grad) r->grad.at(0, j) += n.grad.at(i, j);
            }
    });
}

NodePtr mul(const NodePtr& a, const NodePtr& b) {
    if (!a->value.same_shape(b->value)) shape_error("mul", a->value, b->value);
    Tensor out = a->value;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= b->value.data[i];
    NodePtr x = a, y = b;
    return make_node(std::move(out), {a, b}, [x, y](Node& n) {
        for (std::size_t i = 0; i < n.grad.data.size(); ++i) {
            if (x->requires_grad) x->grad.data[i] += n.grad.data[i] * y->value.data[i];
            if (y->requires_grad) y->grad.data[i] += n.grad.data[i] * x->value.data[i];
        }
    });
}

NodePtr scale(const NodePtr& a, double c) {
    Tensor out = a->value;
    for (double& x : out.data) x *= c;
    NodePtr in = a;
    return make_node(std::move(out), {a}, [in, c](Node& n) {
        for (std::size_t i = 0; i < n.grad.data.size(); ++i)
            in->grad.data[i] += n.grad.data[i] * c;
    });
}

NodePtr relu(const NodePtr& a) {
    return elementwise(
        a, [](double x) { return x > 0.0 ? x : 0.0; },
        [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

NodePtr sigmoid(const NodePtr& a) {
    return elementwise(
        a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
        [](double, double y) { return y * (1.0 - y); });
}

NodePtr tanh_op(const NodePtr& a) {
    return elementwise(
        a, [](double x) { return std::tanh(x); },
        [](double, double y) { return 1.0 - y * y; });
}

NodePtr matmul(const NodePtr& a, const NodePtr& b) {
    check_2d("matmul", a->value);
    check_2d("matmul", b->value);
    if (a->value.cols() != b->value.rows()) shape_error("matmul", a->value, b->value);
    const int p = a->value.rows(), q = a->value.cols(), r = b->value.cols();
    Tensor out({p, r});
    for (int i = 0; i < p; ++i)
        for (int k = 0; k < q; ++k) {
            double aik = a->value.at(i, k);
            for (int j = 0; j < r; ++j) out.at(i, j) += aik * b->value.at(k, j);
        }
    NodePtr x = a, y = b;
    return make_node(std::move(out), {a, b}, [x, y, p, q, r](Node& n) {
        if (x->requires_grad) {
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < r; ++j) {
                    double g = n.grad.at(i, j);
                    for (int k = 0; k < q; ++k) x->grad.at(i, k) += g * y->value.at(k, j);
                }
        }
        if (y->requires_grad) {
            for (int i = 0; i < p; ++i)
                for (int k = 0; k < q; ++k) {
                    double a_ik = x->value.at(i, k);
                    for (int j = 0; j < r; ++j)
                        y->grad.at(k, j) += a_ik * n.grad.at(i, j);
                }
        }
    });
}

NodePtr matmul_setsum(const NodePtr& a, const NodePtr& b) {
    check_2d("matmul_setsum", a->value);
    check_2d("matmul_setsum", b->value);
    if (a->value.cols() != b->value.rows()) shape_error("matmul_setsum", a->value, b->value);
    const int p = a->value.rows(), q = a->value.cols(), r = b->value.cols();
    Tensor out({p, r});
    std::vector<double> terms(static_cast<std::size_t>(q));
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < r; ++j) {
            for (int k = 0; k < q; ++k) terms[k] = a->value.at(i, k) * b->value.at(k, j);
            out.at(i, j) = invariant_sum(terms);
        }
    NodePtr x = a, y = b;
    return make_node(std::move(out), {a, b}, [x, y, p, q, r](Node& n) {
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < r; ++j) {
                double g = n.grad.at(i, j);
                for (int k = 0; k < q; ++k) {
                    if (x->requires_grad) x->grad.at(i, k) += g * y->value.at(k, j);
                    if (y->requires_grad) y->grad.at(k, j) += g * x->value.at(i, k);
                }
            }
    });
}

NodePtr transpose(const NodePtr& a) {
    check_2d("transpose", a->value);
    const int p = a->value.rows(), q = a->value.cols();
    Tensor out({q, p});
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < q; ++j) out.at(j, i) = a->value.at(i, j);
    NodePtr in = a;
    return make_node(std::move(out), {a}, [in, p, q](Node& n) {
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < q; ++j) in->grad.at(i, j) += n.grad.at(j, i);
    });
}

NodePtr concat_rows(const NodePtr& a, const NodePtr& b) {
    check_2d("concat_rows", a->value);
    check_2d("concat_rows", b->value);
    if (a->value.cols() != b->value.cols()) shape_error("concat_rows", a->value, b->value);
    const int ra = a->value.rows(), rb = b->value.rows(), c = a->value.cols();
    Tensor out({ra + rb, c});
    std::copy(a->value.data.begin(), a->value.data.end(), out.data.begin());
    std::copy(b->value.data.begin(), b->value.data.end(),
              out.data.begin() + static_cast<std::ptrdiff_t>(ra) * c);
    NodePtr x = a, y = b;
    return make_node(std::move(out), {a, b}, [x, y, ra, c](Node& n) {
        const std::size_t split = static_cast<std::size_t>(ra) * c;
        if (x->requires_grad)
            for (std::size_t i = 0; i < split; ++i) x->grad.data[i] += n.grad.data[i];
        if (y->requires_grad)
            for (std::size_t i = split; i < n.grad.data.size(); ++i)
                y->grad.data[i - split] += n.grad.data[i];
    });
}

NodePtr stack_rows(const std::vector<NodePtr>& parts) {
    if (parts.empty()) throw NumericError("stack_rows: empty input list");
    const int c = parts[0]->value.cols();
    int rows = 0;
    for (const auto& p : parts) {
        check_2d("stack_rows", p->value);
        if (p->value.cols() != c) shape_error("stack_rows", parts[0]->value, p->value);
        rows += p->value.rows();
    }
    Tensor out({rows, c});
    std::size_t off = 0;
    for (const auto& p : parts) {
        std::copy(p->value.data.begin(), p->value.data.end(), out.data.begin() + off);
        off += p->value.data.size();
    }
    auto inputs = parts;
    return make_node(std::move(out), parts, [inputs](Node& n) {
        std::size_t off = 0;
        for (const auto& p : inputs) {
            if (p->requires_grad)
                for (std::size_t i = 0; i < p->grad.data.size(); ++i)
                    p->grad.data[i] += n.grad.data[off + i];
            off += p->grad.data.size();
        }
    });
}

NodePtr concat_cols(const NodePtr& a, const NodePtr& b) {
    check_2d("concat_cols", a->value);
    check_2d("concat_cols", b->value);
    if (a->value.rows() != b->value.rows()) shape_error("concat_cols", a->value, b->value);
    const int r = a->value.rows(), ca = a->value.cols(), cb = b->value.cols();
    Tensor out({r, ca + cb});
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < ca; ++j) out.at(i, j) = a->value.at(i, j);
        for (int j = 0; j < cb; ++j) out.at(i, ca + j) = b->value.at(i, j);
    }
    NodePtr x = a, y = b;
    return make_node(std::move(out), {a, b}, [x, y, r, ca, cb](Node& n) {
        for (int i = 0; i < r; ++i) {
            if (x->requires_grad)
                for (int j = 0; j < ca; ++j) x->grad.at(i, j) += n.grad.at(i, j);
            if (y->requires_grad)
                for (int j = 0; j < cb; ++j) y->grad.at(i, j) += n.grad.at(i, ca + j);
        }
    });
}

NodePtr slice_cols(const NodePtr& a, int start, int len) {
    check_2d("slice_cols", a->value);
    if (start < 0 || len < 1 || start + len > a->value.cols())
        throw NumericError("slice_cols: range [" + std::to_string(start) + "," +
                           std::to_string(start + len) + ") out of " + a->value.shape_str());
    const int r = a->value.rows();
    Tensor out({r, len});
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < len; ++j) out.at(i, j) = a->value.at(i, start + j);
    NodePtr in = a;
    return make_node(std::move(out), {a}, [in, r, start, len](Node& n) {
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < len; ++j) in->grad.at(i, start + j) += n.grad.at(i, j);
    });
}

NodePtr sum_rows(const NodePtr& a) {
    check_2d("sum_rows", a->value);
    const int r = a->value.rows(), c = a->value.cols();
    Tensor out({1, c});
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) out.at(0, j) += a->value.at(i, j);
    NodePtr in = a;
    return make_node(std::move(out), {a}, [in, r, c](Node& n) {
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) in->grad.at(i, j) += n.grad.at(0, j);
    });
}

NodePtr softmax_rows(const NodePtr& a) {
    check_2d("softmax_rows", a->value);
    const int r = a->value.rows(), c = a->value.cols();
    Tensor out({r, c});
    std::vector<double> terms(static_cast<std::size_t>(c));
    for (int i = 0; i < r; ++i) {
        double m = a->value.at(i, 0);
        for (int j = 1; j < c; ++j) m = std::max(m, a->value.at(i, j));
        for (int j = 0; j < c; ++j) {
            out.at(i, j) = std::exp(a->value.at(i, j) - m);
            terms[j] = out.at(i, j);
        }
        double den = invariant_sum(terms);
        for (int j = 0; j < c; ++j) out.at(i, j) /= den;
    }
    NodePtr in = a;
    return make_node(std::move(out), {a}, [in, r, c](Node& n) {
        for (int i = 0; i < r; ++i) {
            double dot = 0.0;
            for (int j = 0; j < c; ++j) dot += n.grad.at(i, j) * n.value.at(i, j);
            for (int j = 0; j < c; ++j)
                in->grad.at(i, j) += n.value.at(i, j) * (n.grad.at(i, j) - dot);
        }
    });
}

NodePtr batchnorm_train(const NodePtr& x, const NodePtr& gamma, const NodePtr& beta,
                        double eps, std::vector<double>* batch_mean,
                        std::vector<double>* batch_var) {
    check_2d("batchnorm", x->value);
    const int n = x->value.rows(), f = x->value.cols();
    if (gamma->value.cols() != f || beta->value.cols() != f)
        shape_error("batchnorm", x->value, gamma->value);
    auto mean = std::make_shared<std::vector<double>>(f, 0.0);
    auto inv_std = std::make_shared<std::vector<double>>(f, 0.0);
    auto xhat = std::make_shared<Tensor>(std::vector<int>{n, f});
    std::vector<double> var(f, 0.0);
    for (int j = 0; j < f; ++j) {
        double mu = 0.0;
        for (int i = 0; i < n; ++i) mu += x->value.at(i, j);
        mu /= n;
        double v = 0.0;
        for (int i = 0; i < n; ++i) {
            double d = x->value.at(i, j) - mu;
            v += d * d;
        }
        v /= n;
        (*mean)[j] = mu;
        var[j] = v;
        (*inv_std)[j] = 1.0 / std::sqrt(v + eps);
    }
    Tensor out({n, f});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < f; ++j) {
            xhat->at(i, j) = (x->value.at(i, j) - (*mean)[j]) * (*inv_std)[j];
            out.at(i, j) = gamma->value.at(0, j) * xhat->at(i, j) + beta->value.at(0, j);
        }
    if (batch_mean) *batch_mean = *mean;
    if (batch_var) *batch_var = var;
    NodePtr xn = x, g = gamma, b = beta;
    return make_node(std::move(out), {x, gamma, beta},
                     [xn, g, b, xhat, inv_std, n, f](Node& node) {
        for (int j = 0; j < f; ++j) {
            double sum_g = 0.0, sum_gx = 0.0;
            for (int i = 0; i < n; ++i) {
                sum_g += node.grad.at(i, j);
                sum_gx += node.grad.at(i, j) * xhat->at(i, j);
            }
            if (g->requires_grad) g->grad.at(0, j) += sum_gx;
            if (b->requires_grad) b->grad.at(0, j) += sum_g;
            if (xn->requires_grad) {
                double gam = g->value.at(0, j);
                for (int i = 0; i < n; ++i) {
                    double dxhat = node.grad.at(i, j) * gam;
                    xn->grad.at(i, j) += (*inv_std)[j] *
                        (dxhat - gam * sum_g / n - xhat->at(i, j) * gam * sum_gx / n);
                }
            }
        }
    });
}

NodePtr batchnorm_infer(const NodePtr& x, const NodePtr& gamma, const NodePtr& beta,
                        double eps, const std::vector<double>& mean,
                        const std::vector<double>& var) {
    check_2d("batchnorm", x->value);
    const int n = x->value.rows(), f = x->value.cols();
    if (static_cast<int>(mean.size()) != f || static_cast<int>(var.size()) != f)
        throw NumericError("batchnorm: running statistics width mismatch");
    std::vector<double> inv_std(f);
    for (int j = 0; j < f; ++j) inv_std[j] = 1.0 / std::sqrt(var[j] + eps);
    Tensor out({n, f});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < f; ++j)
            out.at(i, j) = gamma->value.at(0, j) * (x->value.at(i, j) - mean[j]) * inv_std[j] +
                           beta->value.at(0, j);
    NodePtr xn = x, g = gamma, b = beta;
    auto istd = std::make_shared<std::vector<double>>(std::move(inv_std));
    auto mu = std::make_shared<std::vector<double>>(mean);
    return make_node(std::move(out), {x, gamma, beta}, [xn, g, b, istd, mu, n, f](Node& node) {
        for (int j = 0; j < f; ++j) {
            for (int i = 0; i < n; ++i) {
                double gr = node.grad.at(i, j);
                if (xn->requires_grad)
                    xn->grad.at(i, j) += gr * g->value.at(0, j) * (*istd)[j];
                if (g->requires_grad)
                    g->grad.at(0, j) += gr * (xn->value.at(i, j) - (*mu)[j]) * (*istd)[j];
                if (b->requires_grad) b->grad.at(0, j) += gr;
            }
        }
    });
}

NodePtr cross_entropy_scores(const NodePtr& scores, const std::vector<std::vector<int>>& targets,
                             int num_classes, int seq_len) {
    check_2d("cross_entropy", scores->value);
    const int batch = scores->value.rows();
    if (scores->value.cols() != num_classes * seq_len)
        throw NumericError("cross_entropy: scores " + scores->value.shape_str() +
                           " do not hold " + std::to_string(num_classes) + "x" +
                           std::to_string(seq_len) + " entries per row");
    if (static_cast<int>(targets.size()) != batch)
        throw NumericError("cross_entropy: target batch size mismatch");

    auto probs = std::make_shared<Tensor>(scores->value.shape);
    double total = 0.0;
    for (int i = 0; i < batch; ++i) {
        if (static_cast<int>(targets[i].size()) != seq_len)
            throw NumericError("cross_entropy: target length mismatch");
        for (int j = 0; j < seq_len; ++j) {
            int t = targets[i][j];
            if (t < 0 || t >= num_classes)
                throw NumericError("cross_entropy: target id " + std::to_string(t) +
                                   " out of [0," + std::to_string(num_classes) + ")");
            double m = scores->value.at(i, j);
            for (int c = 1; c < num_classes; ++c)
                m = std::max(m, scores->value.at(i, c * seq_len + j));
            double den = 0.0;
            for (int c = 0; c < num_classes; ++c)
                den += std::exp(scores->value.at(i, c * seq_len + j) - m);
            for (int c = 0; c < num_classes; ++c)
                probs->at(i, c * seq_len + j) =
                    std::exp(scores->value.at(i, c * seq_len + j) - m) / den;
            total -= scores->value.at(i, t * seq_len + j) - m - std::log(den);
        }
    }
    const double inv = 1.0 / (static_cast<double>(batch) * seq_len);
    Tensor out({1, 1});
    out.data[0] = total * inv;
    NodePtr sc = scores;
    auto tgt = std::make_shared<std::vector<std::vector<int>>>(targets);
    return make_node(std::move(out), {scores},
                     [sc, probs, tgt, batch, num_classes, seq_len, inv](Node& n) {
        double g = n.grad.data[0] * inv;
        for (int i = 0; i < batch; ++i)
            for (int j = 0; j < seq_len; ++j) {
                int t = (*tgt)[i][j];
                for (int c = 0; c < num_classes; ++c) {
                    double p = probs->at(i, c * seq_len + j);
                    sc->grad.at(i, c * seq_len + j) += g * (p - (c == t ? 1.0 : 0.0));
                }
            }
    });
}

void backward(const NodePtr& output) {
    if (output->value.size() != 1)
        throw NumericError("backward requires a scalar output, got " +
                           output->value.shape_str());
    std::vector<Node*> topo;
    std::unordered_set<Node*> seen;
    std::vector<std::pair<Node*, std::size_t>> stack{{output.get(), 0}};
    seen.insert(output.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->inputs.size()) {
            Node* child = node->inputs[next++].get();
            if (child->requires_grad && seen.insert(child).second)
                stack.emplace_back(child, 0);
        } else {
            topo.push_back(node);
            stack.pop_back();
        }
    }
    output->grad.data[0] += 1.0;
    for (auto it = topo.rbegin(); it != topo.rend(); ++it)
        if ((*it)->backprop) (*it)->backprop(**it);
}

void zero_grad(std::vector<Parameter>& params) {
    for (auto& p : params)
        std::fill(p.node->grad.data.begin(), p.node->grad.data.end(), 0.0);
}

double clip_gradients(std::vector<Parameter>& params, double max_norm) {
    double sq = 0.0;
    for (const auto& p : params)
        for (double g : p.node->grad.data) sq += g * g;
    double norm = std::sqrt(sq);
    if (norm <= max_norm || norm == 0.0) return 1.0;
    double factor = max_norm / norm;
    for (auto& p : params)
        for (double& g : p.node->grad.data) g *= factor;
    return factor;
}

void adam_step(std::vector<Parameter>& params, double lr, AdamState& state) {
    if (state.m.empty()) {
        for (const auto& p : params) {
            state.m.emplace_back(p.node->value.shape);
            state.v.emplace_back(p.node->value.shape);
        }
    }
    if (state.m.size() != params.size())
        throw NumericError("adam_step: optimizer state does not match parameter set");
    ++state.t;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto& p = params[k];
        if (!p.trainable) continue;
        for (std::size_t i = 0; i < p.node->value.data.size(); ++i) {
            double g = p.node->grad.data[i];
            if (!std::isfinite(g))
                throw NumericError("adam_step: non-finite gradient encountered");
            double& m = state.m[k].data[i];
            double& v = state.v[k].data[i];
            m = state.beta1 * m + (1.0 - state.beta1) * g;
            v = state.beta2 * v + (1.0 - state.beta2) * g * g;
            double mhat = m / bc1;
            double vhat = v / bc2;
            p.node->value.data[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
}

}  // namespace nces::ad
