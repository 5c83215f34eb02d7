#include "condnet/training.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <thread>

namespace condnet {

namespace {

// Rng sub-streams of the run seed. The split uses the seed directly.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kShuffleStream = 2;

}  // namespace

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("epochs must be positive");
    if (batch_size < 1) throw ConfigError("batch size must be positive");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning rate must be positive");
    if (!(target_lo < target_hi)) throw ConfigError("normalization range requires lo < hi");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("train fraction must lie strictly between 0 and 1");
    }
    if (const auto check = check_min_width(static_cast<int>(kNumInputs), hidden_width); !check.ok) {
        throw ConfigError("hidden width " + std::to_string(hidden_width) + " is below the minimum width " +
                          std::to_string(check.minimum) + " for " + std::to_string(kNumInputs) + " inputs");
    }
}

PreparedData prepare(const Dataset& d, const TrainConfig& cfg) {
    auto outliers = remove_outliers(d);
    PreparedData p;
    p.removed_outliers = outliers.removed;
    p.retained = std::move(outliers.retained);
    p.split = split(p.retained, cfg.train_fraction, cfg.seed);
    if (p.split.train.empty() || p.split.test.empty()) {
        throw DataError("train/test split left an empty partition");
    }
    p.scaler = fit_scaler(subset(p.retained, p.split.train), cfg.target_lo, cfg.target_hi);
    return p;
}

TrainResult train(const PreparedData& data, const TrainConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();

    const Dataset train_set = subset(data.retained, data.split.train);
    const Dataset test_set = subset(data.retained, data.split.test);
    const NormalizedBatch normalized = normalize_samples(data.scaler, train_set.samples);
    const auto n_train = static_cast<Eigen::Index>(train_set.size());

    Rng init_rng = Rng::stream(cfg.seed, kInitStream);
    Rng shuffle_rng = Rng::stream(cfg.seed, kShuffleStream);
    Network net = glorot_uniform_init(static_cast<int>(kNumInputs), cfg.hidden_width, 1, init_rng);

    AdamHyperparameters hp;
    hp.alpha = cfg.learning_rate;
    auto adam = AdamState<double>::zeros_like(net, hp);

    TrainResult result;
    result.report.config = cfg;
    result.report.loss_per_epoch.reserve(static_cast<std::size_t>(cfg.epochs));

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n_train));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Eigen::MatrixXd x_batch;
    Eigen::RowVectorXd y_batch;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(std::span(order));
        for (Eigen::Index begin = 0; begin < n_train; begin += cfg.batch_size) {
            const Eigen::Index size = std::min<Eigen::Index>(cfg.batch_size, n_train - begin);
            const std::span<const Eigen::Index> idx(order.data() + begin, static_cast<std::size_t>(size));
            x_batch = normalized.inputs(Eigen::all, idx);
            y_batch = normalized.targets(idx);
            const auto lg = backward(net, x_batch, y_batch);
            adam_step(adam, net, lg.grads);
        }
        const double loss = rmse(normalized.targets, forward_batch(net, normalized.inputs).y);
        if (!std::isfinite(loss)) {
            throw NumericError("training loss became non-finite at epoch " + std::to_string(epoch));
        }
        result.report.loss_per_epoch.push_back({epoch, loss});
    }

    result.report.test = evaluate(net, data.scaler, test_set.samples);
    result.report.removed_outliers = data.removed_outliers;
    result.report.n_train = train_set.size();
    result.report.n_test = test_set.size();
    result.report.adam_steps = adam.t;
    result.net = std::move(net);
    result.scaler = data.scaler;
    result.split = data.split;
    result.retained = data.retained;
    result.report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

TrainResult train(const Dataset& d, const TrainConfig& cfg) {
    cfg.validate();
    return train(prepare(d, cfg), cfg);
}

std::size_t best_row(std::span<const SweepRow> rows) {
    if (rows.empty()) throw ConfigError("empty sweep table");
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const auto& b = rows[best];
        if (r.test_aae < b.test_aae || (r.test_aae == b.test_aae && r.width < b.width)) best = i;
    }
    return best;
}

SweepResult sweep(const Dataset& d, std::vector<int> widths, const TrainConfig& base_cfg, unsigned max_threads) {
    if (widths.empty()) throw ConfigError("sweep needs at least one hidden width");
    SweepResult out;
    std::set<int> distinct;
    for (const int w : widths) {
        if (const auto check = check_min_width(static_cast<int>(kNumInputs), w); !check.ok) {
            throw ConfigError("hidden width " + std::to_string(w) + " is below the minimum width " +
                              std::to_string(check.minimum) + " for " + std::to_string(kNumInputs) + " inputs");
        }
        if (!distinct.insert(w).second) out.warnings.push_back("duplicate width " + std::to_string(w) + " ignored");
    }
    widths.assign(distinct.begin(), distinct.end());

    TrainConfig cfg = base_cfg;
    cfg.hidden_width = widths.front();
    cfg.validate();
    const PreparedData data = prepare(d, cfg);

    std::vector<std::optional<TrainResult>> results(widths.size());
    std::vector<std::exception_ptr> errors(widths.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < widths.size(); i = next++) {
            try {
                TrainConfig run_cfg = base_cfg;
                run_cfg.hidden_width = widths[i];
                results[i] = train(data, run_cfg);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned threads = std::clamp<unsigned>(max_threads, 1, static_cast<unsigned>(widths.size()));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    for (std::size_t i = 0; i < widths.size(); ++i) out.table.push_back({widths[i], results[i]->report.test.aae});
    out.best = std::move(*results[best_row(out.table)]);
    return out;
}

}  // namespace condnet
