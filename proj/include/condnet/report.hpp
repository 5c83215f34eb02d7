#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "condnet/evaluation.hpp"
#include "condnet/sensitivity.hpp"
#include "condnet/training.hpp"

namespace condnet {

/// Equal-width bins over [lo, hi]; the maximum falls in the last bin.
struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::size_t> counts;

    double bin_lo(std::size_t i) const;
    double bin_hi(std::size_t i) const;
};

/// When every value is equal all of them land in bin 0.
Histogram histogram(std::span<const double> values, int bins);

// Plot-ready CSV emitters. Headers are fixed:
//   histogram.csv   bin_lo,bin_hi,count
//   loss_curve.csv  epoch,rmse
//   parity.csv      conductivity_true,conductivity_pred
//   importance.csv  input,contribution,importance_pct
//   sweep.csv       width,test_aae
void write_histogram_csv(const Histogram& h, const std::filesystem::path& path);
void write_loss_curve_csv(std::span<const EpochLoss> curve, const std::filesystem::path& path);
void write_parity_csv(std::span<const ParityPair> pairs, const std::filesystem::path& path);
void write_importance_csv(const SensitivityReport& r, const std::filesystem::path& path);
void write_sweep_csv(std::span<const SweepRow> rows, const std::filesystem::path& path);
/// The six predictor columns followed by conductivity_pred.
void write_predictions_csv(std::span<const Sample> samples, std::span<const double> predicted,
                           const std::filesystem::path& path);

/// JSON form of a TrainReport (config echo, per-epoch loss, test metrics).
std::string train_report_json(const TrainReport& r);
void save_train_report(const TrainReport& r, const std::filesystem::path& path);
/// Reads back the per-epoch loss curve of a saved report.
std::vector<EpochLoss> load_loss_curve(const std::filesystem::path& report_path);

/// 64-bit FNV-1a of the file bytes as 16 hex digits.
std::string file_digest(const std::filesystem::path& path);

}  // namespace condnet
