#include "deduce/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "deduce/errors.hpp"
#include "deduce/rng.hpp"

namespace deduce {

void KmeansConfig::validate(std::size_t n_samples) const {
    if (k < 1) throw ConfigError("kmeans.k must be >= 1");
    if (k > n_samples) throw ConfigError("kmeans.k exceeds the sample count");
    if (restarts < 1) throw ConfigError("kmeans.restarts must be >= 1");
    if (max_iters < 1) throw ConfigError("kmeans.max_iters must be >= 1");
    if (tol <= 0.0) throw ConfigError("kmeans.tol must be positive");
}

namespace {

double sq_dist(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double diff = a[j] - b[j];
        s += diff * diff;
    }
    return s;
}

Matrix init_centroids(const Matrix& x, std::size_t k, KmeansInit init, Rng& rng) {
    const std::size_t n = x.rows(), d = x.cols();
    Matrix centroids(k, d);
    if (init == KmeansInit::RandomPoints) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t c = 0; c < k; ++c) {
            const std::size_t pick = c + rng.uniform_index(n - c);
            std::swap(idx[c], idx[pick]);
            std::copy_n(x.row(idx[c]), d, centroids.row(c));
        }
        return centroids;
    }
    // k-means++: next center drawn proportionally to squared distance
    std::size_t first = rng.uniform_index(n);
    std::copy_n(x.row(first), d, centroids.row(0));
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(x.row(i), centroids.row(0), d);
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (double v : d2) total += v;
        std::size_t pick;
        if (total > 0.0) {
            const double r = rng.uniform01() * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc > r) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.uniform_index(n);
        }
        std::copy_n(x.row(pick), d, centroids.row(c));
        for (std::size_t i = 0; i < n; ++i)
            d2[i] = std::min(d2[i], sq_dist(x.row(i), centroids.row(c), d));
    }
    return centroids;
}

struct LloydRun {
    std::vector<int> labels;
    Matrix centroids;
    double inertia = 0.0;
    std::vector<double> trace;
};

void assign_labels(const Matrix& x, const Matrix& centroids, std::vector<int>& labels,
                   std::vector<std::size_t>& counts, double& inertia) {
    const std::size_t n = x.rows(), d = x.cols(), k = centroids.rows();
    std::fill(counts.begin(), counts.end(), 0);
    inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = x.row(i);
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (std::size_t c = 0; c < k; ++c) {
            const double dist = sq_dist(xi, centroids.row(c), d);
            if (dist < best) {
                best = dist;
                arg = static_cast<int>(c);
            }
        }
        labels[i] = arg;
        ++counts[static_cast<std::size_t>(arg)];
        inertia += best;
    }
}

LloydRun lloyd(const Matrix& x, std::size_t k, const KmeansConfig& cfg, Rng& rng) {
    const std::size_t n = x.rows(), d = x.cols();
    LloydRun run;
    run.centroids = init_centroids(x, k, cfg.init, rng);
    run.labels.assign(n, 0);
    std::vector<std::size_t> counts(k, 0);

    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
        assign_labels(x, run.centroids, run.labels, counts, run.inertia);

        // a cluster left empty is reseeded with the point farthest from it
        for (std::size_t guard = 0; guard < k; ++guard) {
            std::size_t empty = k;
            for (std::size_t c = 0; c < k; ++c) {
                if (counts[c] == 0) {
                    empty = c;
                    break;
                }
            }
            if (empty == k) break;
            double far_dist = -1.0;
            std::size_t far_idx = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double dist = sq_dist(x.row(i), run.centroids.row(empty), d);
                if (dist > far_dist) {
                    far_dist = dist;
                    far_idx = i;
                }
            }
            std::copy_n(x.row(far_idx), d, run.centroids.row(empty));
            assign_labels(x, run.centroids, run.labels, counts, run.inertia);
        }

        run.trace.push_back(run.inertia);
        if (iter > 0) {
            const double rel = std::fabs(prev - run.inertia) / std::max(prev, 1e-300);
            if (rel < cfg.tol) break;
        }
        prev = run.inertia;
        // stop on the assignment step so labels, centroids and inertia agree
        if (iter + 1 == cfg.max_iters) break;

        // update step
        run.centroids.fill(0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double* cr = run.centroids.row(static_cast<std::size_t>(run.labels[i]));
            const double* xi = x.row(i);
            for (std::size_t j = 0; j < d; ++j) cr[j] += xi[j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            double* cr = run.centroids.row(c);
            const double inv = 1.0 / static_cast<double>(counts[c]);
            for (std::size_t j = 0; j < d; ++j) cr[j] *= inv;
        }
    }
    return run;
}

}  // namespace

ClusterResult kmeans(const Matrix& x, const KmeansConfig& cfg) {
    cfg.validate(x.rows());
    if (!x.all_finite()) throw NumericError("kmeans: input contains non-finite values");

    ClusterResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    best.restart_inertias.reserve(cfg.restarts);
    for (std::size_t r = 0; r < cfg.restarts; ++r) {
        Rng rng(derive_seed(cfg.seed, 0x6B, r));
        LloydRun run = lloyd(x, cfg.k, cfg, rng);
        best.restart_inertias.push_back(run.inertia);
        if (run.inertia < best.inertia) {
            best.labels = std::move(run.labels);
            best.centroids = std::move(run.centroids);
            best.inertia = run.inertia;
            best.restart_index = r;
            best.inertia_trace = std::move(run.trace);
        }
    }
    return best;
}

std::vector<ClusterResult> sweep_k(const Matrix& x, std::size_t k_min, std::size_t k_max,
                                   const KmeansConfig& cfg) {
    if (k_min > k_max) throw ConfigError("sweep_k: empty k range");
    std::vector<ClusterResult> results;
    for (std::size_t k = k_min; k <= k_max; ++k) {
        KmeansConfig ck = cfg;
        ck.k = k;
        ck.seed = derive_seed(cfg.seed, 0x5E, k);
        results.push_back(kmeans(x, ck));
    }
    return results;
}

}  // namespace deduce
