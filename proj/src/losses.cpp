#include "deduce/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "deduce/errors.hpp"

namespace deduce {

void LossConfig::validate() const {
    if (tau_instance <= 0.0) throw ConfigError("loss.tau_instance must be positive");
    if (tau_cluster <= 0.0) throw ConfigError("loss.tau_cluster must be positive");
    if (entropy_weight < 0.0) throw ConfigError("loss.entropy_weight must be >= 0");
}

Matrix cosine_sim_matrix(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw Error("cosine_sim_matrix: dimension mismatch");
    std::vector<double> na = row_norms(a);
    std::vector<double> nb = row_norms(b);
    for (std::size_t i = 0; i < na.size(); ++i) {
        if (na[i] == 0.0) throw NumericError("cosine_sim_matrix: zero-norm row in first input");
    }
    for (std::size_t j = 0; j < nb.size(); ++j) {
        if (nb[j] == 0.0) throw NumericError("cosine_sim_matrix: zero-norm row in second input");
    }
    Matrix sims = matmul_nt(a, b);
    for (std::size_t i = 0; i < sims.rows(); ++i) {
        double* row = sims.row(i);
        for (std::size_t j = 0; j < sims.cols(); ++j) row[j] /= na[i] * nb[j];
    }
    return sims;
}

void cosine_sim_backward(const Matrix& a, const Matrix& b, const Matrix& sims,
                         const Matrix& d_sims, Matrix& d_a, Matrix& d_b) {
    std::vector<double> na = row_norms(a);
    std::vector<double> nb = row_norms(b);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double g = d_sims(i, j);
            if (g == 0.0) continue;
            const double inv = 1.0 / (na[i] * nb[j]);
            const double cij = sims(i, j);
            const double* ai = a.row(i);
            const double* bj = b.row(j);
            double* dai = d_a.row(i);
            double* dbj = d_b.row(j);
            const double ascale = cij / (na[i] * na[i]);
            const double bscale = cij / (nb[j] * nb[j]);
            for (std::size_t p = 0; p < a.cols(); ++p) {
                dai[p] += g * (bj[p] * inv - ascale * ai[p]);
                dbj[p] += g * (ai[p] * inv - bscale * bj[p]);
            }
        }
    }
}

namespace {

// One anchor row: -pos/tau + logsumexp(denominator terms). The denominator
// walks the anchor's intra-view and cross-view similarities; `skip_self`
// drops the j == i terms (both the intra self-similarity and the positive).
struct AnchorGrad {
    double loss;
    std::vector<double> w_intra;  // d lse / d (intra sim / tau), softmax weights
    std::vector<double> w_cross;
};

AnchorGrad anchor_loss(const double* intra, const double* cross, std::size_t n, std::size_t i,
                       double tau, bool skip_self) {
    AnchorGrad out;
    out.w_intra.assign(n, 0.0);
    out.w_cross.assign(n, 0.0);

    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        if (skip_self && j == i) continue;
        mx = std::max(mx, std::max(intra[j], cross[j]) / tau);
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (skip_self && j == i) continue;
        out.w_intra[j] = std::exp(intra[j] / tau - mx);
        out.w_cross[j] = std::exp(cross[j] / tau - mx);
        sum += out.w_intra[j] + out.w_cross[j];
    }
    const double lse = mx + std::log(sum);
    out.loss = -cross[i] / tau + lse;
    const double inv = 1.0 / sum;
    for (std::size_t j = 0; j < n; ++j) {
        out.w_intra[j] *= inv;
        out.w_cross[j] *= inv;
    }
    return out;
}

}  // namespace

ContrastResult two_view_contrast(const Matrix& a, const Matrix& b, double tau, bool decoupled,
                                 bool anchors_both_views) {
    if (!a.same_shape(b)) throw Error("two_view_contrast: view shapes differ");
    const std::size_t n = a.rows();
    if (n < 2) throw Error("two_view_contrast: need at least 2 rows");

    Matrix saa = cosine_sim_matrix(a, a);
    Matrix sab = cosine_sim_matrix(a, b);
    Matrix sbb, sba;
    if (anchors_both_views) {
        sbb = cosine_sim_matrix(b, b);
        sba = transpose(sab);
    }

    const std::size_t n_anchors = anchors_both_views ? 2 * n : n;
    const double anchor_scale = 1.0 / static_cast<double>(n_anchors);

    Matrix d_saa(n, n), d_sab(n, n), d_sbb(n, n);
    ContrastResult res;
    res.anchor_losses.reserve(n_anchors);

    const double tau_scale = anchor_scale / tau;
    for (std::size_t i = 0; i < n; ++i) {
        AnchorGrad g = anchor_loss(saa.row(i), sab.row(i), n, i, tau, decoupled);
        res.anchor_losses.push_back(g.loss);
        d_sab(i, i) -= tau_scale;
        for (std::size_t j = 0; j < n; ++j) {
            d_saa(i, j) += g.w_intra[j] * tau_scale;
            d_sab(i, j) += g.w_cross[j] * tau_scale;
        }
    }
    if (anchors_both_views) {
        for (std::size_t i = 0; i < n; ++i) {
            AnchorGrad g = anchor_loss(sbb.row(i), sba.row(i), n, i, tau, decoupled);
            res.anchor_losses.push_back(g.loss);
            d_sab(i, i) -= tau_scale;
            for (std::size_t j = 0; j < n; ++j) {
                d_sbb(i, j) += g.w_intra[j] * tau_scale;
                d_sab(j, i) += g.w_cross[j] * tau_scale;  // sba(i, j) == sab(j, i)
            }
        }
    }

    double total = 0.0;
    for (double l : res.anchor_losses) total += l;
    res.value = total * anchor_scale;

    res.d_a = Matrix(n, a.cols());
    res.d_b = Matrix(n, b.cols());
    cosine_sim_backward(a, a, saa, d_saa, res.d_a, res.d_a);
    cosine_sim_backward(a, b, sab, d_sab, res.d_a, res.d_b);
    if (anchors_both_views) cosine_sim_backward(b, b, sbb, d_sbb, res.d_b, res.d_b);
    return res;
}

LossGrads instance_loss(const Matrix& emb1, const Matrix& emb2, const LossConfig& cfg) {
    cfg.validate();
    if (emb1.rows() < 2) throw Error("instance_loss: need at least 2 samples");
    ContrastResult res = two_view_contrast(emb1, emb2, cfg.tau_instance,
                                           cfg.instance_kind == InstanceKind::DCL,
                                           cfg.anchor_views == AnchorViews::Both);
    return {res.value, std::move(res.d_a), std::move(res.d_b)};
}

std::vector<double> instance_anchor_losses(const Matrix& emb1, const Matrix& emb2,
                                           const LossConfig& cfg) {
    cfg.validate();
    ContrastResult res = two_view_contrast(emb1, emb2, cfg.tau_instance,
                                           cfg.instance_kind == InstanceKind::DCL,
                                           cfg.anchor_views == AnchorViews::Both);
    return std::move(res.anchor_losses);
}

ClusterLossResult cluster_loss(const Matrix& probs1, const Matrix& probs2, const LossConfig& cfg) {
    cfg.validate();
    if (probs1.cols() < 2) throw Error("cluster_loss: need at least 2 clusters");
    if (!probs1.same_shape(probs2)) throw Error("cluster_loss: view shapes differ");
    const std::size_t n = probs1.rows();
    const std::size_t k = probs1.cols();

    // columns as cluster representations
    Matrix cols1 = transpose(probs1);
    Matrix cols2 = transpose(probs2);
    ContrastResult contrast = two_view_contrast(cols1, cols2, cfg.tau_cluster,
                                                cfg.instance_kind == InstanceKind::DCL,
                                                /*anchors_both_views=*/true);

    ClusterLossResult res;
    res.contrast = contrast.value;
    res.d_view1 = transpose(contrast.d_a);
    res.d_view2 = transpose(contrast.d_b);

    // entropy of the cluster-mass marginal, per selected view
    const bool both = cfg.entropy_views == EntropyViews::Both;
    const double view_scale = both ? 0.5 : 1.0;
    const Matrix* views[2] = {&probs1, both ? &probs2 : nullptr};
    Matrix* grads[2] = {&res.d_view1, both ? &res.d_view2 : nullptr};
    double entropy = 0.0;
    for (int v = 0; v < 2; ++v) {
        if (views[v] == nullptr) continue;
        std::vector<double> marginal = col_means(*views[v]);
        double e = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (marginal[c] > 0.0) e += marginal[c] * std::log(marginal[c]);
        }
        entropy += cfg.entropy_weight * view_scale * e;
        const double gscale = cfg.entropy_weight * view_scale / static_cast<double>(n);
        for (std::size_t c = 0; c < k; ++c) {
            if (marginal[c] <= 0.0) continue;
            const double g = gscale * (std::log(marginal[c]) + 1.0);
            for (std::size_t r = 0; r < n; ++r) (*grads[v])(r, c) += g;
        }
    }
    res.entropy = entropy;
    res.value = res.contrast + res.entropy;
    return res;
}

TotalLossResult total_loss(const ViewPair& pair, const LossConfig& cfg) {
    LossGrads inst = instance_loss(pair.instance1, pair.instance2, cfg);
    ClusterLossResult clus = cluster_loss(pair.cluster1, pair.cluster2, cfg);

    TotalLossResult res;
    res.breakdown.instance = inst.value;
    res.breakdown.cluster = clus.value;
    res.breakdown.entropy = clus.entropy;
    res.breakdown.total = inst.value + clus.value;
    res.d_instance1 = std::move(inst.d_view1);
    res.d_instance2 = std::move(inst.d_view2);
    res.d_cluster1 = std::move(clus.d_view1);
    res.d_cluster2 = std::move(clus.d_view2);
    return res;
}

}  // namespace deduce
