#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace condnet {

inline constexpr Eigen::Index kNumInputs = 6;

/// CSV column names, predictors first in the fixed model input order.
inline constexpr std::array<std::string_view, kNumInputs> kInputNames = {
    "temperature_K", "SiO2", "CaO", "MgO", "Al2O3", "FeO"};
inline constexpr std::string_view kTargetName = "conductivity_S_per_m";

/// Tolerance on |sum of molar fractions - 1|.
inline constexpr double kFractionSumTolerance = 1e-6;

/// One melt measurement.
struct Sample {
    double temperature = 0.0;  // K
    double x_sio2 = 0.0;
    double x_cao = 0.0;
    double x_mgo = 0.0;
    double x_al2o3 = 0.0;
    double x_feo = 0.0;
    double conductivity = 0.0;  // S/m

    /// Predictors in kInputNames order.
    Eigen::Matrix<double, kNumInputs, 1> inputs() const {
        Eigen::Matrix<double, kNumInputs, 1> x;
        x << temperature, x_sio2, x_cao, x_mgo, x_al2o3, x_feo;
        return x;
    }

    bool operator==(const Sample&) const = default;
};

struct Dataset {
    std::vector<Sample> samples;
    std::string source_path;
    std::string provenance_notes;

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }
};

struct LoadOptions {
    /// Divide the five fractions by their sum instead of rejecting rows whose
    /// fractions do not sum to 1.
    bool renormalize_fractions = false;
    /// When false the conductivity column may be absent (prediction input);
    /// missing values load as 0.
    bool require_conductivity = true;
};

/// Reads the CSV schema `temperature_K,SiO2,CaO,MgO,Al2O3,FeO,conductivity_S_per_m`.
/// Columns are located by name. Blank lines and lines starting with '#' are skipped.
/// Throws SchemaError / RowError on malformed input and DataError when no rows remain.
Dataset load_csv(const std::filesystem::path& path, const LoadOptions& options = {});
Dataset parse_csv(std::istream& in, std::string source_name, const LoadOptions& options = {});

/// Writes the canonical header and every sample using shortest round-trip decimal
/// formatting, so load_csv(write_csv(d)) reproduces d exactly.
void write_csv(const Dataset& d, std::ostream& out);
void write_csv(const Dataset& d, const std::filesystem::path& path);

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);
/// Decimal string with 17 significant digits.
std::string format_double17(double v);
/// Strict, locale-independent parse. Throws std::invalid_argument on trailing junk.
double parse_double(std::string_view text);

struct OutlierResult {
    Dataset retained;
    std::size_t removed = 0;
    double mean = 0.0;
    double stddev = 0.0;  // population
};

/// Single pass 3-sigma filter on conductivity: keeps samples with
/// |c - mean| <= 3 * stddev, both statistics taken over all input samples.
OutlierResult remove_outliers(const Dataset& d);

/// Per-feature affine min-max map onto [target_lo, target_hi].
struct Scaler {
    Eigen::VectorXd min;
    Eigen::VectorXd max;
    double target_lo = 0.0;
    double target_hi = 1.0;

    Eigen::Index size() const noexcept { return min.size(); }
};

/// Fits on the rows of `rows` (one observation per row, one feature per column).
Scaler fit_scaler(const Eigen::Ref<const Eigen::MatrixXd>& rows, double target_lo, double target_hi);
/// Fits the 6 predictors and the conductivity (column 6) of `d`.
Scaler fit_scaler(const Dataset& d, double target_lo, double target_hi);

/// x' = lo + (x - min) (hi - lo) / (max - min); constant features map to (lo + hi) / 2.
double normalize_value(const Scaler& s, Eigen::Index feature, double x);
double denormalize_value(const Scaler& s, Eigen::Index feature, double y);

/// Applies the map to the leading x.size() features of `s`.
Eigen::VectorXd normalize(const Scaler& s, const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::VectorXd denormalize(const Scaler& s, const Eigen::Ref<const Eigen::VectorXd>& y);

/// Index of the conductivity column in a dataset scaler.
inline constexpr Eigen::Index kTargetColumn = kNumInputs;

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    std::uint64_t seed = 0;
};

/// Seeded shuffle of 0..n-1; the first floor(train_fraction * n) go to train.
SplitIndices split(std::size_t n, double train_fraction, std::uint64_t seed);
SplitIndices split(const Dataset& d, double train_fraction, std::uint64_t seed);

Dataset subset(const Dataset& d, std::span<const std::size_t> indices);

/// Raw predictors, one sample per column (6 x N).
Eigen::MatrixXd input_matrix(std::span<const Sample> samples);
/// Raw conductivities as a row vector (1 x N).
Eigen::RowVectorXd target_row(std::span<const Sample> samples);

/// Normalized predictors (6 x N) and targets (1 x N) for training.
struct NormalizedBatch {
    Eigen::MatrixXd inputs;
    Eigen::RowVectorXd targets;
};
NormalizedBatch normalize_samples(const Scaler& s, std::span<const Sample> samples);

}  // namespace condnet
