#pragma once

#include <vector>

#include "deduce/matrix.hpp"
#include "deduce/smae.hpp"

namespace deduce {

enum class InstanceKind { DCL, InfoNCE };
enum class EntropyViews { ViewOne, Both };
enum class AnchorViews { One, Both };

struct LossConfig {
    double tau_instance = 0.5;
    double tau_cluster = 1.0;
    double entropy_weight = 2.0;
    InstanceKind instance_kind = InstanceKind::DCL;
    EntropyViews entropy_views = EntropyViews::Both;
    // Anchoring side of the instance loss; the cluster contrast always
    // anchors from both views (the 1/(2K) average).
    AnchorViews anchor_views = AnchorViews::Both;
    void validate() const;
};

struct LossBreakdown {
    double instance = 0.0;  // L_D
    double cluster = 0.0;   // L_C, entropy term included
    double entropy = 0.0;
    double total = 0.0;     // L_D + L_C
};

// (i, j) -> <a_i, b_j> / (|a_i| |b_j|)
Matrix cosine_sim_matrix(const Matrix& a, const Matrix& b);

// Accumulates into d_a / d_b given upstream d_sims. Safe when a and b (and
// d_a / d_b) alias, as in a within-view similarity matrix.
void cosine_sim_backward(const Matrix& a, const Matrix& b, const Matrix& sims,
                         const Matrix& d_sims, Matrix& d_a, Matrix& d_b);

// Shared core of both contrastive terms: rows of `a` and `b` at equal index
// are the positive pair; negatives are all other rows of either view, with
// the self and positive terms kept in the denominator only when `decoupled`
// is false.
struct ContrastResult {
    double value = 0.0;
    std::vector<double> anchor_losses;
    Matrix d_a, d_b;
};
ContrastResult two_view_contrast(const Matrix& a, const Matrix& b, double tau, bool decoupled,
                                 bool anchors_both_views);

struct LossGrads {
    double value = 0.0;
    Matrix d_view1, d_view2;
};

LossGrads instance_loss(const Matrix& emb1, const Matrix& emb2, const LossConfig& cfg);

// Per-anchor instance losses, exposed for the DCL-vs-InfoNCE identities.
std::vector<double> instance_anchor_losses(const Matrix& emb1, const Matrix& emb2,
                                           const LossConfig& cfg);

struct ClusterLossResult {
    double value = 0.0;     // contrast + entropy
    double contrast = 0.0;
    double entropy = 0.0;
    Matrix d_view1, d_view2;
};

// Labels-as-features contrast over the K assignment columns plus the
// entropy regularizer on the cluster-mass marginal.
ClusterLossResult cluster_loss(const Matrix& probs1, const Matrix& probs2, const LossConfig& cfg);

struct TotalLossResult {
    LossBreakdown breakdown;
    Matrix d_instance1, d_instance2;
    Matrix d_cluster1, d_cluster2;
};

TotalLossResult total_loss(const ViewPair& pair, const LossConfig& cfg);

}  // namespace deduce
