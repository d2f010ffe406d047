#include "deduce/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "deduce/errors.hpp"

namespace deduce {

std::size_t ParamStore::add(const std::string& name, Matrix init) {
    if (index_.count(name)) throw Error("ParamStore: duplicate parameter '" + name + "'");
    Matrix grad(init.rows(), init.cols());
    params_.push_back(Param{name, std::move(init), std::move(grad)});
    index_[name] = params_.size() - 1;
    return params_.size() - 1;
}

Param& ParamStore::at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error("ParamStore: unknown parameter '" + name + "'");
    return params_[it->second];
}

const Param& ParamStore::at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error("ParamStore: unknown parameter '" + name + "'");
    return params_[it->second];
}

void ParamStore::zero_grads() {
    for (auto& p : params_) p.grad.fill(0.0);
}

bool ParamStore::all_finite() const {
    for (const auto& p : params_) {
        if (!p.value.all_finite()) return false;
    }
    return true;
}

std::size_t ParamStore::coord_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.value.size();
    return n;
}

AdamState::AdamState(const ParamStore& params, AdamConfig cfg) : cfg_(cfg) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_.emplace_back(params[i].value.rows(), params[i].value.cols());
        v_.emplace_back(params[i].value.rows(), params[i].value.cols());
    }
}

void AdamState::step(ParamStore& params, double lr, double weight_decay) {
    if (m_.size() != params.size()) throw Error("AdamState: store size changed");
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Param& p = params[i];
        double* theta = p.value.data();
        double* g = p.grad.data();
        double* m = m_[i].data();
        double* v = v_[i].data();
        const std::size_t n = p.value.size();
        for (std::size_t j = 0; j < n; ++j) {
            if (weight_decay != 0.0) theta[j] -= lr * weight_decay * theta[j];
            m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g[j];
            v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g[j] * g[j];
            const double mhat = m[j] / bc1;
            const double vhat = v[j] / bc2;
            theta[j] -= lr * mhat / (std::sqrt(vhat) + cfg_.eps);
            g[j] = 0.0;
        }
    }
}

}  // namespace deduce

namespace deduce::nn {

Matrix linear(const Matrix& x, const Matrix& weight, const Matrix* bias) {
    if (x.cols() != weight.rows()) throw Error("linear: input/weight shape mismatch");
    Matrix y = matmul(x, weight);
    if (bias != nullptr) {
        check_shape(*bias, 1, weight.cols(), "linear bias");
        for (std::size_t i = 0; i < y.rows(); ++i) {
            double* row = y.row(i);
            const double* b = bias->row(0);
            for (std::size_t j = 0; j < y.cols(); ++j) row[j] += b[j];
        }
    }
    return y;
}

Matrix linear_backward(const Matrix& dy, const Matrix& x, const Matrix& weight, Matrix& dweight,
                       Matrix* dbias) {
    if (dy.rows() != x.rows() || dy.cols() != weight.cols())
        throw Error("linear_backward: shape mismatch");
    dweight.add(matmul_tn(x, dy));
    if (dbias != nullptr) {
        std::vector<double> sums = col_sums(dy);
        for (std::size_t j = 0; j < dy.cols(); ++j) (*dbias)(0, j) += sums[j];
    }
    return matmul_nt(dy, weight);
}

Matrix softmax_rows(const Matrix& x) {
    Matrix y(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double* in = x.row(i);
        double* out = y.row(i);
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < x.cols(); ++j) mx = std::max(mx, in[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) {
            out[j] = std::exp(in[j] - mx);
            sum += out[j];
        }
        for (std::size_t j = 0; j < x.cols(); ++j) out[j] /= sum;
    }
    return y;
}

Matrix softmax_rows_backward(const Matrix& dy, const Matrix& y) {
    if (!dy.same_shape(y)) throw Error("softmax_rows_backward: shape mismatch");
    Matrix dx(y.rows(), y.cols());
    for (std::size_t i = 0; i < y.rows(); ++i) {
        const double* yi = y.row(i);
        const double* di = dy.row(i);
        double* out = dx.row(i);
        double dot = 0.0;
        for (std::size_t j = 0; j < y.cols(); ++j) dot += yi[j] * di[j];
        for (std::size_t j = 0; j < y.cols(); ++j) out[j] = yi[j] * (di[j] - dot);
    }
    return dx;
}

Matrix relu(const Matrix& x) {
    Matrix y(x.rows(), x.cols());
    const double* in = x.data();
    double* out = y.data();
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
    return y;
}

Matrix relu_backward(const Matrix& dy, const Matrix& x) {
    if (!dy.same_shape(x)) throw Error("relu_backward: shape mismatch");
    Matrix dx(x.rows(), x.cols());
    const double* in = x.data();
    const double* d = dy.data();
    double* out = dx.data();
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = in[i] > 0.0 ? d[i] : 0.0;
    return dx;
}

DropoutResult dropout(const Matrix& x, double rate, bool training, Rng& rng) {
    if (rate < 0.0 || rate >= 1.0) throw Error("dropout: rate must be in [0, 1)");
    DropoutResult res;
    if (!training || rate == 0.0) {
        res.value = x;
        return res;
    }
    res.value = Matrix(x.rows(), x.cols());
    res.kept.resize(x.size());
    const double scale = 1.0 / (1.0 - rate);
    const double* in = x.data();
    double* out = res.value.data();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const bool keep = rng.uniform01() >= rate;
        res.kept[i] = keep ? 1 : 0;
        out[i] = keep ? in[i] * scale : 0.0;
    }
    return res;
}

Matrix dropout_backward(const Matrix& dy, const DropoutResult& fwd, double rate) {
    if (fwd.kept.empty()) return dy;  // eval mode or rate 0
    if (dy.size() != fwd.kept.size()) throw Error("dropout_backward: shape mismatch");
    Matrix dx(dy.rows(), dy.cols());
    const double scale = 1.0 / (1.0 - rate);
    const double* d = dy.data();
    double* out = dx.data();
    for (std::size_t i = 0; i < dy.size(); ++i) out[i] = fwd.kept[i] ? d[i] * scale : 0.0;
    return dx;
}

Matrix dropout_seeded(const Matrix& x, double rate, bool training, std::uint64_t seed) {
    Rng rng(seed);
    return dropout(x, rate, training, rng).value;
}

GradCheckResult grad_check(ParamStore& params, const std::function<double()>& loss_fn, double h,
                           std::size_t max_coords_per_param, std::uint64_t seed) {
    params.zero_grads();
    const double base = loss_fn();
    if (!std::isfinite(base)) throw NumericError("grad_check: non-finite loss");

    std::vector<Matrix> analytic;
    analytic.reserve(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) analytic.push_back(params[i].grad);

    GradCheckResult result;
    Rng rng(derive_seed(seed, 0x9c));
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Param& p = params[pi];
        const std::size_t n = p.value.size();
        if (n == 0) continue;
        std::vector<std::size_t> coords;
        if (n <= max_coords_per_param) {
            coords.resize(n);
            for (std::size_t i = 0; i < n; ++i) coords[i] = i;
        } else {
            for (std::size_t i = 0; i < max_coords_per_param; ++i)
                coords.push_back(rng.uniform_index(n));
        }
        for (std::size_t c : coords) {
            double* slot = p.value.data() + c;
            const double saved = *slot;
            *slot = saved + h;
            const double fplus = loss_fn();
            *slot = saved - h;
            const double fminus = loss_fn();
            *slot = saved;
            if (!std::isfinite(fplus) || !std::isfinite(fminus))
                throw NumericError("grad_check: non-finite loss during perturbation");
            const double fd = (fplus - fminus) / (2.0 * h);
            const double g = analytic[pi].data()[c];
            const double rel = std::fabs(g - fd) / std::max(1e-8, std::fabs(fd));
            if (rel > result.max_rel_err) {
                result.max_rel_err = rel;
                result.worst_param = p.name;
                result.worst_coord = c;
            }
        }
    }
    return result;
}

}  // namespace deduce::nn
