#include "deduce/smae.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "deduce/errors.hpp"

namespace deduce {

void SmaeConfig::validate() const {
    if (block_dims.empty()) throw ConfigError("smae.block_dims must be nonempty");
    for (std::size_t d : block_dims) {
        if (d == 0) throw ConfigError("smae.block_dims entries must be positive");
    }
    if (d_model == 0) throw ConfigError("smae.d_model must be positive");
    if (heads == 0 || d_model % heads != 0)
        throw ConfigError("smae.heads must be positive and divide d_model");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0)
        throw ConfigError("smae.dropout_rate must be in [0, 1)");
    if (embed_dim == 0) throw ConfigError("smae.embed_dim must be >= 1");
    if (n_clusters < 2) throw ConfigError("smae.n_clusters must be >= 2");
    if (mlp_hidden == 0) throw ConfigError("smae.mlp_hidden must be positive");
}

namespace {

Matrix glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    Matrix w(fan_in, fan_out);
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    double* data = w.data();
    for (std::size_t i = 0; i < w.size(); ++i) data[i] = rng.uniform(-limit, limit);
    return w;
}

// rows {s*M + m : s} of a sample-major token stack, as an N x d matrix
Matrix gather_token(const Matrix& flat, std::size_t n, std::size_t m_tokens, std::size_t token) {
    Matrix out(n, flat.cols());
    for (std::size_t s = 0; s < n; ++s) {
        const double* src = flat.row(s * m_tokens + token);
        double* dst = out.row(s);
        for (std::size_t j = 0; j < flat.cols(); ++j) dst[j] = src[j];
    }
    return out;
}

}  // namespace

Smae::Smae(SmaeConfig cfg, std::uint64_t init_seed) : cfg_(std::move(cfg)) {
    cfg_.validate();
    Rng rng(derive_seed(init_seed, 0x1417));
    const std::size_t d = cfg_.d_model;
    const std::size_t hidden = cfg_.mlp_hidden;

    for (std::size_t m = 0; m < cfg_.n_blocks(); ++m) {
        const std::string prefix = "pe." + std::to_string(m);
        params_.add(prefix + ".weight", glorot_uniform(cfg_.block_dims[m], d, rng));
        params_.add(prefix + ".bias", Matrix(1, d));
    }
    params_.add("attn.wq", glorot_uniform(d, d, rng));
    params_.add("attn.wk", glorot_uniform(d, d, rng));
    params_.add("attn.wv", glorot_uniform(d, d, rng));
    params_.add("attn.wo", glorot_uniform(d, d, rng));
    params_.add("ffn.w1", glorot_uniform(d, hidden, rng));
    params_.add("ffn.b1", Matrix(1, hidden));
    params_.add("ffn.w2", glorot_uniform(hidden, d, rng));
    params_.add("ffn.b2", Matrix(1, d));

    instance_names_ = {"instance.w1", "instance.b1", "instance.w2",
                       "instance.b2", "instance.w3", "instance.b3"};
    params_.add(instance_names_.w1, glorot_uniform(d, hidden, rng));
    params_.add(instance_names_.b1, Matrix(1, hidden));
    params_.add(instance_names_.w2, glorot_uniform(hidden, hidden, rng));
    params_.add(instance_names_.b2, Matrix(1, hidden));
    params_.add(instance_names_.w3, glorot_uniform(hidden, cfg_.embed_dim, rng));
    params_.add(instance_names_.b3, Matrix(1, cfg_.embed_dim));

    cluster_names_ = {"cluster.w1", "cluster.b1", "cluster.w2",
                      "cluster.b2", "cluster.w3", "cluster.b3"};
    params_.add(cluster_names_.w1, glorot_uniform(d, hidden, rng));
    params_.add(cluster_names_.b1, Matrix(1, hidden));
    params_.add(cluster_names_.w2, glorot_uniform(hidden, hidden, rng));
    params_.add(cluster_names_.b2, Matrix(1, hidden));
    params_.add(cluster_names_.w3, glorot_uniform(hidden, cfg_.n_clusters, rng));
    params_.add(cluster_names_.b3, Matrix(1, cfg_.n_clusters));
}

Smae::EncoderCache Smae::encode_forward(const Matrix& view, bool training, Rng* rng) const {
    const std::size_t m_tokens = cfg_.n_blocks();
    const std::size_t d = cfg_.d_model;
    const std::size_t n = view.rows();
    std::size_t total_width = 0;
    for (std::size_t w : cfg_.block_dims) total_width += w;
    if (view.cols() != total_width)
        throw Error("encode: view width " + std::to_string(view.cols()) +
                    " does not match block dims total " + std::to_string(total_width));
    if (training && cfg_.dropout_rate > 0.0 && rng == nullptr)
        throw Error("encode: training mode with dropout needs an rng");

    EncoderCache c;
    c.n_samples = n;
    c.view = view;

    // per-block linear position encoding
    c.tokens = Matrix(n * m_tokens, d);
    std::size_t offset = 0;
    for (std::size_t m = 0; m < m_tokens; ++m) {
        const std::string prefix = "pe." + std::to_string(m);
        const Matrix& w = params_.at(prefix + ".weight").value;
        const Matrix& b = params_.at(prefix + ".bias").value;
        Matrix block = take_cols(view, offset, cfg_.block_dims[m]);
        Matrix tok = nn::linear(block, w, &b);
        for (std::size_t s = 0; s < n; ++s)
            std::memcpy(c.tokens.row(s * m_tokens + m), tok.row(s), d * sizeof(double));
        offset += cfg_.block_dims[m];
    }

    // fused projections, heads as contiguous column slices
    const Matrix& wq = params_.at("attn.wq").value;
    const Matrix& wk = params_.at("attn.wk").value;
    const Matrix& wv = params_.at("attn.wv").value;
    const Matrix& wo = params_.at("attn.wo").value;
    c.q = matmul(c.tokens, wq);
    c.k = matmul(c.tokens, wk);
    c.v = matmul(c.tokens, wv);

    const std::size_t dk = cfg_.d_k();
    const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
    c.attn = Matrix(n * cfg_.heads * m_tokens, m_tokens);
    c.head_concat = Matrix(n * m_tokens, d);
    Matrix scores(m_tokens, m_tokens);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t hh = 0; hh < cfg_.heads; ++hh) {
            const std::size_t col0 = hh * dk;
            for (std::size_t i = 0; i < m_tokens; ++i) {
                const double* qi = c.q.row(s * m_tokens + i) + col0;
                for (std::size_t j = 0; j < m_tokens; ++j) {
                    const double* kj = c.k.row(s * m_tokens + j) + col0;
                    double dot = 0.0;
                    for (std::size_t p = 0; p < dk; ++p) dot += qi[p] * kj[p];
                    scores(i, j) = dot * scale;
                }
            }
            Matrix probs = nn::softmax_rows(scores);
            const std::size_t arow = (s * cfg_.heads + hh) * m_tokens;
            for (std::size_t i = 0; i < m_tokens; ++i) {
                std::memcpy(c.attn.row(arow + i), probs.row(i), m_tokens * sizeof(double));
                double* out = c.head_concat.row(s * m_tokens + i) + col0;
                for (std::size_t j = 0; j < m_tokens; ++j) {
                    const double a = probs(i, j);
                    const double* vj = c.v.row(s * m_tokens + j) + col0;
                    for (std::size_t p = 0; p < dk; ++p) out[p] += a * vj[p];
                }
            }
        }
    }

    Matrix attn_out = matmul(c.head_concat, wo);
    Rng fallback(0);
    Rng& stream = rng != nullptr ? *rng : fallback;
    c.drop_attn = nn::dropout(attn_out, cfg_.dropout_rate, training, stream);
    c.resid1 = c.tokens;
    c.resid1.add(c.drop_attn.value);

    const Matrix& w1 = params_.at("ffn.w1").value;
    const Matrix& b1 = params_.at("ffn.b1").value;
    const Matrix& w2 = params_.at("ffn.w2").value;
    const Matrix& b2 = params_.at("ffn.b2").value;
    c.ffn_pre = nn::linear(c.resid1, w1, &b1);
    c.ffn_hidden = nn::relu(c.ffn_pre);
    Matrix ffn_out = nn::linear(c.ffn_hidden, w2, &b2);
    c.drop_ffn = nn::dropout(ffn_out, cfg_.dropout_rate, training, stream);

    // second residual, then mean pool over the M tokens
    c.features = Matrix(n, d);
    for (std::size_t s = 0; s < n; ++s) {
        double* dst = c.features.row(s);
        for (std::size_t t = 0; t < m_tokens; ++t) {
            const double* r1 = c.resid1.row(s * m_tokens + t);
            const double* f2 = c.drop_ffn.value.row(s * m_tokens + t);
            for (std::size_t j = 0; j < d; ++j) dst[j] += r1[j] + f2[j];
        }
        const double inv = 1.0 / static_cast<double>(m_tokens);
        for (std::size_t j = 0; j < d; ++j) dst[j] *= inv;
    }
    return c;
}

void Smae::encode_backward(const EncoderCache& c, const Matrix& d_features) {
    const std::size_t m_tokens = cfg_.n_blocks();
    const std::size_t d = cfg_.d_model;
    const std::size_t n = c.n_samples;
    check_shape(d_features, n, d, "encode_backward d_features");

    // un-pool: every token of a sample shares d_features/M
    Matrix d_encoded(n * m_tokens, d);
    const double inv = 1.0 / static_cast<double>(m_tokens);
    for (std::size_t s = 0; s < n; ++s) {
        const double* src = d_features.row(s);
        for (std::size_t t = 0; t < m_tokens; ++t) {
            double* dst = d_encoded.row(s * m_tokens + t);
            for (std::size_t j = 0; j < d; ++j) dst[j] = src[j] * inv;
        }
    }

    Param& w1 = params_.at("ffn.w1");
    Param& b1 = params_.at("ffn.b1");
    Param& w2 = params_.at("ffn.w2");
    Param& b2 = params_.at("ffn.b2");

    Matrix d_resid1 = d_encoded;
    Matrix d_ffn_out = nn::dropout_backward(d_encoded, c.drop_ffn, cfg_.dropout_rate);
    Matrix d_hidden = nn::linear_backward(d_ffn_out, c.ffn_hidden, w2.value, w2.grad, &b2.grad);
    Matrix d_pre = nn::relu_backward(d_hidden, c.ffn_pre);
    d_resid1.add(nn::linear_backward(d_pre, c.resid1, w1.value, w1.grad, &b1.grad));

    Matrix d_tokens = d_resid1;
    Matrix d_attn_out = nn::dropout_backward(d_resid1, c.drop_attn, cfg_.dropout_rate);

    Param& wq = params_.at("attn.wq");
    Param& wk = params_.at("attn.wk");
    Param& wv = params_.at("attn.wv");
    Param& wo = params_.at("attn.wo");

    wo.grad.add(matmul_tn(c.head_concat, d_attn_out));
    Matrix d_heads = matmul_nt(d_attn_out, wo.value);

    const std::size_t dk = cfg_.d_k();
    const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
    Matrix d_q(n * m_tokens, d), d_k_mat(n * m_tokens, d), d_v(n * m_tokens, d);
    Matrix d_attn(m_tokens, m_tokens);
    Matrix probs(m_tokens, m_tokens);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t hh = 0; hh < cfg_.heads; ++hh) {
            const std::size_t col0 = hh * dk;
            const std::size_t arow = (s * cfg_.heads + hh) * m_tokens;
            for (std::size_t i = 0; i < m_tokens; ++i)
                std::memcpy(probs.row(i), c.attn.row(arow + i), m_tokens * sizeof(double));

            // dA = dH V^T ; dV += A^T dH
            for (std::size_t i = 0; i < m_tokens; ++i) {
                const double* dh = d_heads.row(s * m_tokens + i) + col0;
                for (std::size_t j = 0; j < m_tokens; ++j) {
                    const double* vj = c.v.row(s * m_tokens + j) + col0;
                    double dot = 0.0;
                    for (std::size_t p = 0; p < dk; ++p) dot += dh[p] * vj[p];
                    d_attn(i, j) = dot;
                    double* dv = d_v.row(s * m_tokens + j) + col0;
                    const double a = probs(i, j);
                    for (std::size_t p = 0; p < dk; ++p) dv[p] += a * dh[p];
                }
            }
            Matrix d_scores = nn::softmax_rows_backward(d_attn, probs);
            for (std::size_t i = 0; i < m_tokens; ++i) {
                double* dq = d_q.row(s * m_tokens + i) + col0;
                for (std::size_t j = 0; j < m_tokens; ++j) {
                    const double g = d_scores(i, j) * scale;
                    const double* kj = c.k.row(s * m_tokens + j) + col0;
                    double* dkj = d_k_mat.row(s * m_tokens + j) + col0;
                    const double* qi = c.q.row(s * m_tokens + i) + col0;
                    for (std::size_t p = 0; p < dk; ++p) {
                        dq[p] += g * kj[p];
                        dkj[p] += g * qi[p];
                    }
                }
            }
        }
    }

    wq.grad.add(matmul_tn(c.tokens, d_q));
    wk.grad.add(matmul_tn(c.tokens, d_k_mat));
    wv.grad.add(matmul_tn(c.tokens, d_v));
    d_tokens.add(matmul_nt(d_q, wq.value));
    d_tokens.add(matmul_nt(d_k_mat, wk.value));
    d_tokens.add(matmul_nt(d_v, wv.value));

    std::size_t offset = 0;
    for (std::size_t m = 0; m < m_tokens; ++m) {
        const std::string prefix = "pe." + std::to_string(m);
        Param& w = params_.at(prefix + ".weight");
        Param& b = params_.at(prefix + ".bias");
        Matrix block = take_cols(c.view, offset, cfg_.block_dims[m]);
        Matrix d_tok = gather_token(d_tokens, n, m_tokens, m);
        w.grad.add(matmul_tn(block, d_tok));
        std::vector<double> sums = col_sums(d_tok);
        for (std::size_t j = 0; j < d; ++j) b.grad(0, j) += sums[j];
        offset += cfg_.block_dims[m];
    }
}

Smae::MlpCache Smae::mlp_forward(const Matrix& input, const MlpNames& names) const {
    MlpCache c;
    c.input = input;
    c.pre1 = nn::linear(input, params_.at(names.w1).value, &params_.at(names.b1).value);
    c.act1 = nn::relu(c.pre1);
    c.pre2 = nn::linear(c.act1, params_.at(names.w2).value, &params_.at(names.b2).value);
    c.act2 = nn::relu(c.pre2);
    c.out = nn::linear(c.act2, params_.at(names.w3).value, &params_.at(names.b3).value);
    return c;
}

Matrix Smae::mlp_backward(const MlpCache& c, const MlpNames& names, const Matrix& d_out) {
    Param& w3 = params_.at(names.w3);
    Param& b3 = params_.at(names.b3);
    Matrix d_act2 = nn::linear_backward(d_out, c.act2, w3.value, w3.grad, &b3.grad);
    Matrix d_pre2 = nn::relu_backward(d_act2, c.pre2);
    Param& w2 = params_.at(names.w2);
    Param& b2 = params_.at(names.b2);
    Matrix d_act1 = nn::linear_backward(d_pre2, c.act1, w2.value, w2.grad, &b2.grad);
    Matrix d_pre1 = nn::relu_backward(d_act1, c.pre1);
    Param& w1 = params_.at(names.w1);
    Param& b1 = params_.at(names.b1);
    return nn::linear_backward(d_pre1, c.input, w1.value, w1.grad, &b1.grad);
}

Smae::InstanceCache Smae::instance_forward(const Matrix& features) const {
    InstanceCache c;
    c.mlp = mlp_forward(features, instance_names_);
    const std::size_t n = c.mlp.out.rows();
    const std::size_t d = c.mlp.out.cols();
    c.norms.resize(n);
    c.guarded.assign(n, 0);
    c.embedding = Matrix(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        const double* z = c.mlp.out.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += z[j] * z[j];
        const double norm = std::sqrt(s);
        c.norms[i] = norm;
        double* e = c.embedding.row(i);
        if (norm < 1e-12) {
            // degenerate row: pin to the first basis vector
            c.guarded[i] = 1;
            e[0] = 1.0;
        } else {
            for (std::size_t j = 0; j < d; ++j) e[j] = z[j] / norm;
        }
    }
    return c;
}

Matrix Smae::instance_backward(const InstanceCache& c, const Matrix& d_embedding) {
    const std::size_t n = c.embedding.rows();
    const std::size_t d = c.embedding.cols();
    check_shape(d_embedding, n, d, "instance_backward d_embedding");
    Matrix d_out(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        if (c.guarded[i]) continue;  // constant output, no gradient
        const double* e = c.embedding.row(i);
        const double* g = d_embedding.row(i);
        double dot = 0.0;
        for (std::size_t j = 0; j < d; ++j) dot += e[j] * g[j];
        double* out = d_out.row(i);
        for (std::size_t j = 0; j < d; ++j) out[j] = (g[j] - e[j] * dot) / c.norms[i];
    }
    return mlp_backward(c.mlp, instance_names_, d_out);
}

Smae::ClusterCache Smae::cluster_forward(const Matrix& features) const {
    ClusterCache c;
    c.mlp = mlp_forward(features, cluster_names_);
    c.probs = nn::softmax_rows(c.mlp.out);
    return c;
}

Matrix Smae::cluster_backward(const ClusterCache& c, const Matrix& d_probs) {
    Matrix d_logits = nn::softmax_rows_backward(d_probs, c.probs);
    return mlp_backward(c.mlp, cluster_names_, d_logits);
}

void Smae::backward(const EncoderCache& enc, const InstanceCache& inst, const ClusterCache& clus,
                    const Matrix& d_embedding, const Matrix& d_probs) {
    Matrix d_features = instance_backward(inst, d_embedding);
    d_features.add(cluster_backward(clus, d_probs));
    encode_backward(enc, d_features);
}

Matrix Smae::position_encode(const Matrix& x) const {
    const std::size_t m_tokens = cfg_.n_blocks();
    const std::size_t n = x.rows();
    std::size_t total_width = 0;
    for (std::size_t w : cfg_.block_dims) total_width += w;
    if (x.cols() != total_width) throw Error("position_encode: width mismatch");
    Matrix tokens(n * m_tokens, cfg_.d_model);
    std::size_t offset = 0;
    for (std::size_t m = 0; m < m_tokens; ++m) {
        const std::string prefix = "pe." + std::to_string(m);
        Matrix tok = nn::linear(take_cols(x, offset, cfg_.block_dims[m]),
                                params_.at(prefix + ".weight").value,
                                &params_.at(prefix + ".bias").value);
        for (std::size_t s = 0; s < n; ++s)
            std::memcpy(tokens.row(s * m_tokens + m), tok.row(s), cfg_.d_model * sizeof(double));
        offset += cfg_.block_dims[m];
    }
    return tokens;
}

Matrix Smae::multi_head_attention(const Matrix& tokens) const {
    const std::size_t m_tokens = cfg_.n_blocks();
    if (tokens.rows() % m_tokens != 0 || tokens.cols() != cfg_.d_model)
        throw Error("multi_head_attention: token stack shape mismatch");
    // eval-mode remainder of encode_forward without pooling
    const std::size_t n = tokens.rows() / m_tokens;
    const std::size_t d = cfg_.d_model;
    const Matrix& wq = params_.at("attn.wq").value;
    const Matrix& wk = params_.at("attn.wk").value;
    const Matrix& wv = params_.at("attn.wv").value;
    const Matrix& wo = params_.at("attn.wo").value;
    Matrix q = matmul(tokens, wq), k = matmul(tokens, wk), v = matmul(tokens, wv);

    const std::size_t dk = cfg_.d_k();
    const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
    Matrix head_concat(n * m_tokens, d);
    Matrix scores(m_tokens, m_tokens);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t hh = 0; hh < cfg_.heads; ++hh) {
            const std::size_t col0 = hh * dk;
            for (std::size_t i = 0; i < m_tokens; ++i) {
                const double* qi = q.row(s * m_tokens + i) + col0;
                for (std::size_t j = 0; j < m_tokens; ++j) {
                    const double* kj = k.row(s * m_tokens + j) + col0;
                    double dot = 0.0;
                    for (std::size_t p = 0; p < dk; ++p) dot += qi[p] * kj[p];
                    scores(i, j) = dot * scale;
                }
            }
            Matrix probs = nn::softmax_rows(scores);
            for (std::size_t i = 0; i < m_tokens; ++i) {
                double* out = head_concat.row(s * m_tokens + i) + col0;
                for (std::size_t j = 0; j < m_tokens; ++j) {
                    const double a = probs(i, j);
                    const double* vj = v.row(s * m_tokens + j) + col0;
                    for (std::size_t p = 0; p < dk; ++p) out[p] += a * vj[p];
                }
            }
        }
    }
    Matrix resid1 = tokens;
    resid1.add(matmul(head_concat, wo));
    Matrix hidden = nn::relu(nn::linear(resid1, params_.at("ffn.w1").value, &params_.at("ffn.b1").value));
    Matrix ffn_out = nn::linear(hidden, params_.at("ffn.w2").value, &params_.at("ffn.b2").value);
    ffn_out.add(resid1);
    return ffn_out;
}

Matrix Smae::encode(const Matrix& view) const {
    EncoderCache c = encode_forward(view, false, nullptr);
    return c.features;
}

Matrix Smae::instance_project(const Matrix& features) const {
    return instance_forward(features).embedding;
}

Matrix Smae::cluster_project(const Matrix& features) const {
    return cluster_forward(features).probs;
}

ViewPair Smae::forward_pair(const Matrix& view1, const Matrix& view2, bool training,
                            Rng* rng) const {
    ViewPair pair;
    EncoderCache e1 = encode_forward(view1, training, rng);
    EncoderCache e2 = encode_forward(view2, training, rng);
    pair.features1 = e1.features;
    pair.features2 = e2.features;
    pair.instance1 = instance_forward(e1.features).embedding;
    pair.instance2 = instance_forward(e2.features).embedding;
    pair.cluster1 = cluster_forward(e1.features).probs;
    pair.cluster2 = cluster_forward(e2.features).probs;
    return pair;
}

// ---- checkpoint -------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'D', 'E', 'D', 'U', 'C', 'E', 'C', 'P'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), 4);
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
    return v;
}

void write_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), 8);
}

double read_f64(std::istream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

void write_string(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
    const std::uint32_t len = read_u32(in);
    std::string s(len, '\0');
    in.read(s.data(), len);
    return s;
}

}  // namespace

void Smae::save_checkpoint(const std::string& path) const {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw DataError("cannot write checkpoint '" + path + "'");
        out.write(kMagic, 8);
        write_u32(out, kVersion);
        write_u32(out, static_cast<std::uint32_t>(cfg_.block_dims.size()));
        for (std::size_t dim : cfg_.block_dims) write_u32(out, static_cast<std::uint32_t>(dim));
        write_u32(out, static_cast<std::uint32_t>(cfg_.d_model));
        write_u32(out, static_cast<std::uint32_t>(cfg_.heads));
        write_f64(out, cfg_.dropout_rate);
        write_u32(out, static_cast<std::uint32_t>(cfg_.embed_dim));
        write_u32(out, static_cast<std::uint32_t>(cfg_.n_clusters));
        write_u32(out, static_cast<std::uint32_t>(cfg_.mlp_hidden));
        write_u32(out, static_cast<std::uint32_t>(params_.size()));
        for (std::size_t i = 0; i < params_.size(); ++i) {
            const Param& p = params_[i];
            write_string(out, p.name);
            write_u32(out, static_cast<std::uint32_t>(p.value.rows()));
            write_u32(out, static_cast<std::uint32_t>(p.value.cols()));
            for (std::size_t j = 0; j < p.value.size(); ++j) write_f64(out, p.value.data()[j]);
        }
        if (!out) throw DataError("failed writing checkpoint '" + path + "'");
    }
    fs::rename(tmp, target);
}

Smae Smae::load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint '" + path + "'");
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw DataError("'" + path + "' is not a checkpoint file");
    if (read_u32(in) != kVersion) throw DataError("unsupported checkpoint version in '" + path + "'");

    SmaeConfig cfg;
    cfg.block_dims.resize(read_u32(in));
    for (auto& dim : cfg.block_dims) dim = read_u32(in);
    cfg.d_model = read_u32(in);
    cfg.heads = read_u32(in);
    cfg.dropout_rate = read_f64(in);
    cfg.embed_dim = read_u32(in);
    cfg.n_clusters = read_u32(in);
    cfg.mlp_hidden = read_u32(in);

    Smae model(cfg, 0);
    const std::uint32_t count = read_u32(in);
    if (count != model.params_.size())
        throw DataError("checkpoint '" + path + "' has unexpected parameter count");
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::string name = read_string(in);
        const std::uint32_t rows = read_u32(in);
        const std::uint32_t cols = read_u32(in);
        Param& p = model.params_.at(name);
        if (p.value.rows() != rows || p.value.cols() != cols)
            throw DataError("checkpoint '" + path + "' parameter '" + name + "' shape mismatch");
        for (std::size_t j = 0; j < p.value.size(); ++j) p.value.data()[j] = read_f64(in);
    }
    if (!in) throw DataError("truncated checkpoint '" + path + "'");
    return model;
}

}  // namespace deduce
