#include "deduce/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#include "deduce/errors.hpp"
#include "deduce/rng.hpp"

namespace deduce {

void TrainConfig::validate() const {
    if (batch_size < 2) throw ConfigError("train.batch_size must be >= 2");
    if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
    if (lr < 0.0) throw ConfigError("train.lr must be >= 0");
    if (weight_decay < 0.0) throw ConfigError("train.weight_decay must be >= 0");
    if (early_stop_window < 1) throw ConfigError("train.early_stop_window must be >= 1");
    if (early_stop_delta <= 0.0) throw ConfigError("train.early_stop_delta must be positive");
    augment.validate();
    loss.validate();
}

namespace {

double window_mean(const std::vector<double>& xs, std::size_t window) {
    const std::size_t take = std::min(window, xs.size());
    double s = 0.0;
    for (std::size_t i = xs.size() - take; i < xs.size(); ++i) s += xs[i];
    return s / static_cast<double>(take);
}

double relative_step(const std::vector<double>& xs, std::size_t window) {
    const double delta = std::fabs(xs.back() - xs[xs.size() - 2]);
    const double scale = std::max(std::fabs(window_mean(xs, window)), 1e-12);
    return delta / scale;
}

}  // namespace

TrainReport train(Smae& model, const FusedDataset& data, const TrainConfig& cfg,
                  std::ostream* progress) {
    cfg.validate();
    const std::size_t n = data.values.rows();
    if (n == 0) throw DataError("train: dataset is empty");
    const std::size_t batch = std::min<std::size_t>(cfg.batch_size, n);
    if (batch < 2) throw DataError("train: need at least 2 samples");

    const auto t0 = std::chrono::steady_clock::now();
    AdamState opt(model.params());
    TrainReport report;
    std::vector<double> hist_instance, hist_cluster;
    std::size_t plateau = 0;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(cfg.seed, 0xE0, epoch));
        shuffle_rng.shuffle(order);

        EpochStats stats;
        std::size_t batches = 0;
        for (std::size_t b0 = 0; b0 < n; b0 += batch) {
            const std::size_t size = std::min(batch, n - b0);
            if (size < 2) break;  // a stray final sample has no negatives
            std::vector<std::size_t> slice(order.begin() + static_cast<std::ptrdiff_t>(b0),
                                           order.begin() + static_cast<std::ptrdiff_t>(b0 + size));
            Matrix batch_values = take_rows(data.values, slice);

            AugmentConfig acfg = cfg.augment;
            acfg.seed = derive_seed(cfg.augment.seed, 0xA6, epoch, batches);
            auto [view1, view2] = make_views(batch_values, acfg);

            Rng drop_rng(derive_seed(cfg.seed, 0xD0, epoch, batches));
            auto enc1 = model.encode_forward(view1, true, &drop_rng);
            auto enc2 = model.encode_forward(view2, true, &drop_rng);
            auto inst1 = model.instance_forward(enc1.features);
            auto inst2 = model.instance_forward(enc2.features);
            auto clus1 = model.cluster_forward(enc1.features);
            auto clus2 = model.cluster_forward(enc2.features);

            ViewPair pair;
            pair.features1 = enc1.features;
            pair.features2 = enc2.features;
            pair.instance1 = inst1.embedding;
            pair.instance2 = inst2.embedding;
            pair.cluster1 = clus1.probs;
            pair.cluster2 = clus2.probs;

            TotalLossResult loss = total_loss(pair, cfg.loss);
            if (!std::isfinite(loss.breakdown.total)) {
                throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(batches));
            }

            model.backward(enc1, inst1, clus1, loss.d_instance1, loss.d_cluster1);
            model.backward(enc2, inst2, clus2, loss.d_instance2, loss.d_cluster2);
            opt.step(model.params(), cfg.lr, cfg.weight_decay);

            stats.instance += loss.breakdown.instance;
            stats.cluster += loss.breakdown.cluster;
            stats.entropy += loss.breakdown.entropy;
            stats.total += loss.breakdown.total;
            ++batches;
        }
        if (batches == 0) throw DataError("train: no usable batches");
        const double inv = 1.0 / static_cast<double>(batches);
        stats.instance *= inv;
        stats.cluster *= inv;
        stats.entropy *= inv;
        stats.total *= inv;
        report.history.push_back(stats);
        hist_instance.push_back(stats.instance);
        hist_cluster.push_back(stats.cluster);

        if (!model.params().all_finite()) {
            throw NumericError("train: non-finite parameter after epoch " + std::to_string(epoch));
        }
        if (progress != nullptr) {
            *progress << "epoch " << epoch << "/" << cfg.epochs << " L_D=" << stats.instance
                      << " L_C=" << stats.cluster << " L=" << stats.total << "\n";
        }

        if (hist_instance.size() >= 2) {
            const bool flat =
                relative_step(hist_instance, cfg.early_stop_window) < cfg.early_stop_delta &&
                relative_step(hist_cluster, cfg.early_stop_window) < cfg.early_stop_delta;
            plateau = flat ? plateau + 1 : 0;
            if (plateau >= cfg.early_stop_window) {
                report.early_stopped = true;
                report.stopped_epoch = epoch;
                break;
            }
        }
        report.stopped_epoch = epoch;
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

}  // namespace deduce
