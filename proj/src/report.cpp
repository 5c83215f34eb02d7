#include "condnet/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "condnet/errors.hpp"

namespace condnet {

namespace {

std::ofstream open_csv(const std::filesystem::path& path, std::string_view header) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write " + path.string());
    out << header << '\n';
    return out;
}

}  // namespace

double Histogram::bin_lo(std::size_t i) const {
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(counts.size());
}

double Histogram::bin_hi(std::size_t i) const {
    return i + 1 == counts.size() ? hi : bin_lo(i + 1);
}

Histogram histogram(std::span<const double> values, int bins) {
    if (bins < 1) throw ConfigError("histogram needs at least one bin");
    if (values.empty()) throw DataError("histogram of an empty sample");
    Histogram h;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    h.lo = *lo;
    h.hi = *hi;
    for (const double v : values) {
        std::size_t bin = 0;
        if (h.hi > h.lo) {
            const double pos = (v - h.lo) / (h.hi - h.lo) * bins;
            bin = std::min(static_cast<std::size_t>(pos), h.counts.size() - 1);
        }
        ++h.counts[bin];
    }
    return h;
}

void write_histogram_csv(const Histogram& h, const std::filesystem::path& path) {
    auto out = open_csv(path, "bin_lo,bin_hi,count");
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        out << format_double(h.bin_lo(i)) << ',' << format_double(h.bin_hi(i)) << ',' << h.counts[i] << '\n';
    }
}

void write_loss_curve_csv(std::span<const EpochLoss> curve, const std::filesystem::path& path) {
    auto out = open_csv(path, "epoch,rmse");
    for (const auto& e : curve) out << e.epoch << ',' << format_double(e.rmse) << '\n';
}

void write_parity_csv(std::span<const ParityPair> pairs, const std::filesystem::path& path) {
    auto out = open_csv(path, "conductivity_true,conductivity_pred");
    for (const auto& p : pairs) out << format_double(p.truth) << ',' << format_double(p.predicted) << '\n';
}

void write_importance_csv(const SensitivityReport& r, const std::filesystem::path& path) {
    auto out = open_csv(path, "input,contribution,importance_pct");
    for (std::size_t i = 0; i < r.labels.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        out << r.labels[i] << ',' << format_double(r.contribution[k]) << ','
            << (r.degenerate ? std::string("nan") : format_double(r.importance_pct[k])) << '\n';
    }
}

void write_sweep_csv(std::span<const SweepRow> rows, const std::filesystem::path& path) {
    auto out = open_csv(path, "width,test_aae");
    for (const auto& r : rows) out << r.width << ',' << format_double(r.test_aae) << '\n';
}

void write_predictions_csv(std::span<const Sample> samples, std::span<const double> predicted,
                           const std::filesystem::path& path) {
    if (samples.size() != predicted.size()) throw ConfigError("prediction count does not match the samples");
    std::string header;
    for (const auto name : kInputNames) header += std::string(name) + ",";
    auto out = open_csv(path, header + "conductivity_pred");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto x = samples[i].inputs();
        for (Eigen::Index f = 0; f < kNumInputs; ++f) out << format_double(x[f]) << ',';
        out << format_double(predicted[i]) << '\n';
    }
}

std::string train_report_json(const TrainReport& r) {
    nlohmann::ordered_json j;
    const auto& c = r.config;
    j["config"] = {{"epochs", c.epochs},
                   {"batch_size", c.batch_size},
                   {"learning_rate", c.learning_rate},
                   {"seed", c.seed},
                   {"hidden_width", c.hidden_width},
                   {"norm_range", {c.target_lo, c.target_hi}},
                   {"train_fraction", c.train_fraction}};
    j["removed_outliers"] = r.removed_outliers;
    j["n_train"] = r.n_train;
    j["n_test"] = r.n_test;
    j["adam_steps"] = r.adam_steps;
    j["test_metrics_S_per_m"] = {{"aae", r.test.aae},
                                 {"stdev_of_deviation", r.test.stdev_of_deviation},
                                 {"rmse", r.test.rmse},
                                 {"n", r.test.n}};
    auto& curve = j["loss_per_epoch"] = nlohmann::ordered_json::array();
    for (const auto& e : r.loss_per_epoch) curve.push_back({{"epoch", e.epoch}, {"rmse", e.rmse}});
    j["wall_clock_seconds"] = r.wall_clock_seconds;
    return j.dump(2) + "\n";
}

void save_train_report(const TrainReport& r, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write " + path.string());
    out << train_report_json(r);
}

std::vector<EpochLoss> load_loss_curve(const std::filesystem::path& report_path) {
    std::ifstream in(report_path);
    if (!in) throw SchemaError("cannot open training report " + report_path.string());
    std::vector<EpochLoss> curve;
    try {
        const auto j = nlohmann::json::parse(in);
        for (const auto& e : j.at("loss_per_epoch")) {
            curve.push_back({e.at("epoch").get<int>(), e.at("rmse").get<double>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("malformed training report " + report_path.string() + ": " + e.what());
    }
    return curve;
}

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 14];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << h;
    return s.str();
}

}  // namespace condnet
