#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deduce/matrix.hpp"
#include "deduce/nn.hpp"
#include "deduce/param_store.hpp"
#include "deduce/rng.hpp"

namespace deduce {

struct SmaeConfig {
    std::vector<std::size_t> block_dims;
    std::size_t d_model = 256;
    std::size_t heads = 8;
    double dropout_rate = 0.1;
    std::size_t embed_dim = 10;   // instance head output width
    std::size_t n_clusters = 2;   // cluster head output width
    std::size_t mlp_hidden = 256;

    std::size_t d_k() const { return d_model / heads; }
    std::size_t n_blocks() const { return block_dims.size(); }
    void validate() const;
};

// Both augmented views of a batch after the shared encoder and both heads.
struct ViewPair {
    Matrix features1, features2;  // N x d_model
    Matrix instance1, instance2;  // N x embed_dim, rows L2-normalized
    Matrix cluster1, cluster2;    // N x n_clusters, rows on the simplex
};

// Shared-weight multi-head attention encoder over per-block tokens, plus the
// instance and cluster projection heads. One ParamStore backs every forward,
// so both views of a pair always read and update the same weights.
class Smae {
public:
    Smae(SmaeConfig cfg, std::uint64_t init_seed);

    const SmaeConfig& config() const { return cfg_; }
    ParamStore& params() { return params_; }
    const ParamStore& params() const { return params_; }

    // ---- training path: forwards keep what backward needs -----------------

    struct EncoderCache {
        std::size_t n_samples = 0;
        Matrix view;                 // N x D
        Matrix tokens;               // (N*M) x d_model, sample-major rows
        Matrix q, k, v;              // (N*M) x d_model
        Matrix attn;                 // (N*heads*M) x M softmax blocks
        Matrix head_concat;          // (N*M) x d_model
        nn::DropoutResult drop_attn;
        Matrix resid1;               // tokens + dropout(head_concat * Wo)
        Matrix ffn_pre;              // resid1 * W1 + b1
        Matrix ffn_hidden;           // relu(ffn_pre)
        nn::DropoutResult drop_ffn;
        Matrix features;             // N x d_model, mean over the M tokens
    };

    struct MlpCache {
        Matrix input;
        Matrix pre1, act1;
        Matrix pre2, act2;
        Matrix out;
    };

    struct InstanceCache {
        MlpCache mlp;
        std::vector<double> norms;
        std::vector<std::uint8_t> guarded;  // rows replaced by the unit basis vector
        Matrix embedding;                   // N x embed_dim
    };

    struct ClusterCache {
        MlpCache mlp;
        Matrix probs;  // N x n_clusters
    };

    EncoderCache encode_forward(const Matrix& view, bool training = false,
                                Rng* rng = nullptr) const;
    void encode_backward(const EncoderCache& cache, const Matrix& d_features);

    InstanceCache instance_forward(const Matrix& features) const;
    Matrix instance_backward(const InstanceCache& cache, const Matrix& d_embedding);

    ClusterCache cluster_forward(const Matrix& features) const;
    Matrix cluster_backward(const ClusterCache& cache, const Matrix& d_probs);

    // Head backwards return feature gradients; this routes them into the
    // encoder and parameter gradients in one call.
    void backward(const EncoderCache& enc, const InstanceCache& inst, const ClusterCache& clus,
                  const Matrix& d_embedding, const Matrix& d_probs);

    // ---- eval-mode operations ---------------------------------------------

    // Per-block learned linear maps; returns the (N*M) x d_model token stack.
    Matrix position_encode(const Matrix& x) const;
    // Attention + residual + feed-forward over a token stack.
    Matrix multi_head_attention(const Matrix& tokens) const;
    // position_encode -> attention -> mean pool.
    Matrix encode(const Matrix& view) const;
    Matrix instance_project(const Matrix& features) const;
    Matrix cluster_project(const Matrix& features) const;

    ViewPair forward_pair(const Matrix& view1, const Matrix& view2, bool training = false,
                          Rng* rng = nullptr) const;

    void save_checkpoint(const std::string& path) const;
    static Smae load_checkpoint(const std::string& path);

private:
    struct MlpNames {
        std::string w1, b1, w2, b2, w3, b3;
    };

    MlpCache mlp_forward(const Matrix& input, const MlpNames& names) const;
    Matrix mlp_backward(const MlpCache& cache, const MlpNames& names, const Matrix& d_out);

    SmaeConfig cfg_;
    ParamStore params_;
    MlpNames instance_names_;
    MlpNames cluster_names_;
};

}  // namespace deduce
