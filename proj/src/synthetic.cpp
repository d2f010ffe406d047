#include "deduce/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "deduce/errors.hpp"
#include "deduce/rng.hpp"

namespace deduce {

void SyntheticSpec::validate() const {
    if (n_samples == 0) throw ConfigError("synthetic.n_samples must be positive");
    if (n_clusters == 0) throw ConfigError("synthetic.n_clusters must be positive");
    if (n_clusters > n_samples) throw ConfigError("synthetic.n_clusters must be <= n_samples");
    if (block_dims.empty()) throw ConfigError("synthetic.block_dims must be nonempty");
    for (std::size_t d : block_dims) {
        if (d == 0) throw ConfigError("synthetic.block_dims entries must be positive");
    }
    if (separation <= 0.0) throw ConfigError("synthetic.separation must be positive");
    if (noise_std <= 0.0) throw ConfigError("synthetic.noise_std must be positive");
}

namespace {

std::vector<std::size_t> equal_sizes(std::size_t n, std::size_t k) {
    std::vector<std::size_t> sizes(k, n / k);
    for (std::size_t i = 0; i < n % k; ++i) ++sizes[i];
    return sizes;
}

// flat Dirichlet via normalized exponentials, largest-remainder rounding to n
std::vector<std::size_t> dirichlet_sizes(std::size_t n, std::size_t k, Rng& rng) {
    while (true) {
        std::vector<double> w(k);
        double total = 0.0;
        for (double& x : w) {
            x = -std::log(1.0 - rng.uniform01());
            total += x;
        }
        std::vector<double> share(k);
        std::vector<std::size_t> sizes(k);
        std::size_t assigned = 0;
        for (std::size_t i = 0; i < k; ++i) {
            share[i] = w[i] / total * static_cast<double>(n);
            sizes[i] = static_cast<std::size_t>(std::floor(share[i]));
            assigned += sizes[i];
        }
        std::vector<std::size_t> order(k);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return share[a] - std::floor(share[a]) > share[b] - std::floor(share[b]);
        });
        for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++sizes[order[i % k]];
        if (std::all_of(sizes.begin(), sizes.end(), [](std::size_t s) { return s >= 1; }))
            return sizes;
    }
}

std::string padded_index(std::size_t value, std::size_t width) {
    std::string s = std::to_string(value);
    while (s.size() < width) s.insert(s.begin(), '0');
    return s;
}

}  // namespace

LabeledDataset generate(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n_samples;
    const std::size_t k = spec.n_clusters;

    Rng size_rng(derive_seed(spec.seed, 0x51));
    std::vector<std::size_t> sizes = spec.size_mode == SizeMode::Equal
                                         ? equal_sizes(n, k)
                                         : dirichlet_sizes(n, k, size_rng);

    std::vector<int> labels;
    labels.reserve(n);
    for (std::size_t c = 0; c < k; ++c)
        labels.insert(labels.end(), sizes[c], static_cast<int>(c));
    Rng perm_rng(derive_seed(spec.seed, 0x52));
    perm_rng.shuffle(labels);

    LabeledDataset out;
    out.labels = labels;

    std::vector<std::string> sample_ids(n);
    const std::size_t width = std::to_string(n).size();
    for (std::size_t i = 0; i < n; ++i) sample_ids[i] = "s" + padded_index(i + 1, width);

    for (std::size_t b = 0; b < spec.block_dims.size(); ++b) {
        const std::size_t d = spec.block_dims[b];
        Rng rng(derive_seed(spec.seed, 0x53, b));

        Matrix centers(k, d);
        for (std::size_t c = 0; c < k; ++c)
            for (std::size_t j = 0; j < d; ++j) centers(c, j) = spec.separation * rng.normal();

        OmicsBlock block;
        block.name = "block" + std::to_string(b + 1);
        block.sample_ids = sample_ids;
        block.feature_names.reserve(d);
        for (std::size_t j = 0; j < d; ++j)
            block.feature_names.push_back(block.name + "_f" + std::to_string(j + 1));
        block.values = Matrix(n, d);
        for (std::size_t i = 0; i < n; ++i) {
            const double* center = centers.row(static_cast<std::size_t>(labels[i]));
            double* row = block.values.row(i);
            for (std::size_t j = 0; j < d; ++j) row[j] = center[j] + spec.noise_std * rng.normal();
        }
        out.blocks.push_back(std::move(block));
    }
    return out;
}

}  // namespace deduce
