#include "condnet/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "condnet/errors.hpp"
#include "condnet/rng.hpp"

namespace condnet {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

bool skippable(std::string_view line) {
    const auto t = trim(line);
    return t.empty() || t.front() == '#';
}

constexpr std::size_t kNumColumns = kNumInputs + 1;

std::string_view column_name(std::size_t c) {
    return c < static_cast<std::size_t>(kNumInputs) ? kInputNames[c] : kTargetName;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

std::string format_double17(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, end);
}

double parse_double(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ptr != text.data() + text.size()) {
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    }
    if (ec == std::errc::result_out_of_range) {
        throw std::invalid_argument("out of range: '" + std::string(text) + "'");
    }
    return value;
}

Dataset parse_csv(std::istream& in, std::string source_name, const LoadOptions& options) {
    std::string line;
    std::size_t line_no = 0;

    // Header: first line that is neither blank nor a comment.
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!skippable(line)) {
            have_header = true;
            break;
        }
    }
    if (!have_header) throw DataError("empty dataset: " + source_name + " has no header");

    const auto header = split_fields(line);
    std::array<std::optional<std::size_t>, kNumColumns> position{};
    for (std::size_t i = 0; i < header.size(); ++i) {
        bool known = false;
        for (std::size_t c = 0; c < kNumColumns; ++c) {
            if (header[i] == column_name(c)) {
                if (position[c]) {
                    throw SchemaError("duplicate column '" + std::string(header[i]) + "' in " + source_name);
                }
                position[c] = i;
                known = true;
            }
        }
        if (!known) {
            throw SchemaError("unexpected column '" + std::string(header[i]) + "' in " + source_name);
        }
    }
    for (std::size_t c = 0; c < kNumColumns; ++c) {
        const bool optional = c == kNumColumns - 1 && !options.require_conductivity;
        if (!position[c] && !optional) {
            throw SchemaError("missing column '" + std::string(column_name(c)) + "' in " + source_name);
        }
    }

    Dataset d;
    d.source_path = std::move(source_name);
    while (std::getline(in, line)) {
        ++line_no;
        if (skippable(line)) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw RowError(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                                        std::to_string(fields.size()));
        }
        std::array<double, kNumColumns> v{};
        for (std::size_t c = 0; c < kNumColumns; ++c) {
            if (!position[c]) continue;
            const auto field = fields[*position[c]];
            try {
                v[c] = parse_double(field);
            } catch (const std::invalid_argument& e) {
                throw RowError(line_no, std::string(column_name(c)) + ": " + e.what());
            }
            if (!std::isfinite(v[c])) {
                throw RowError(line_no, std::string(column_name(c)) + " is not finite");
            }
        }

        Sample s{v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
        if (s.temperature <= 0.0) throw RowError(line_no, "temperature_K must be positive");
        if (s.conductivity < 0.0) throw RowError(line_no, "conductivity_S_per_m must be non-negative");

        std::array<double*, 5> fractions = {&s.x_sio2, &s.x_cao, &s.x_mgo, &s.x_al2o3, &s.x_feo};
        double sum = 0.0;
        for (std::size_t k = 0; k < fractions.size(); ++k) {
            const double f = *fractions[k];
            if (f < 0.0 || f > 1.0) {
                throw RowError(line_no, std::string(kInputNames[k + 1]) + " = " + format_double(f) +
                                            " is outside [0, 1]");
            }
            sum += f;
        }
        if (options.renormalize_fractions) {
            if (sum <= 0.0) throw RowError(line_no, "molar fractions sum to zero");
            for (double* f : fractions) *f /= sum;
        } else if (std::abs(sum - 1.0) > kFractionSumTolerance) {
            throw RowError(line_no, "molar fractions sum to " + format_double(sum) + ", expected 1");
        }
        d.samples.push_back(s);
    }

    if (d.samples.empty()) throw DataError("empty dataset: " + d.source_path + " has no data rows");
    if (options.renormalize_fractions) d.provenance_notes = "molar fractions renormalized to sum 1";
    return d;
}

Dataset load_csv(const std::filesystem::path& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open data file " + path.string());
    return parse_csv(in, path.string(), options);
}

void write_csv(const Dataset& d, std::ostream& out) {
    for (std::size_t c = 0; c < kNumColumns; ++c) {
        out << (c ? "," : "") << column_name(c);
    }
    out << '\n';
    for (const auto& s : d.samples) {
        out << format_double(s.temperature) << ',' << format_double(s.x_sio2) << ','
            << format_double(s.x_cao) << ',' << format_double(s.x_mgo) << ','
            << format_double(s.x_al2o3) << ',' << format_double(s.x_feo) << ','
            << format_double(s.conductivity) << '\n';
    }
}

void write_csv(const Dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write " + path.string());
    write_csv(d, out);
}

OutlierResult remove_outliers(const Dataset& d) {
    const std::size_t n = d.size();
    if (n < 2) throw DataError("degenerate dataset: outlier removal needs at least 2 samples");

    double mean = 0.0;
    for (const auto& s : d.samples) mean += s.conductivity;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const auto& s : d.samples) ss += (s.conductivity - mean) * (s.conductivity - mean);
    const double stddev = std::sqrt(ss / static_cast<double>(n));

    OutlierResult r;
    r.mean = mean;
    r.stddev = stddev;
    r.retained.source_path = d.source_path;
    r.retained.provenance_notes = d.provenance_notes;
    for (const auto& s : d.samples) {
        if (std::abs(s.conductivity - mean) <= 3.0 * stddev) {
            r.retained.samples.push_back(s);
        } else {
            ++r.removed;
        }
    }
    if (r.retained.empty()) throw DataError("degenerate dataset: every sample was an outlier");
    return r;
}

Scaler fit_scaler(const Eigen::Ref<const Eigen::MatrixXd>& rows, double target_lo, double target_hi) {
    if (rows.rows() == 0 || rows.cols() == 0) throw DataError("cannot fit a scaler on an empty dataset");
    if (!(target_lo < target_hi)) throw ConfigError("normalization range requires lo < hi");
    return Scaler{rows.colwise().minCoeff().transpose(), rows.colwise().maxCoeff().transpose(), target_lo,
                  target_hi};
}

Scaler fit_scaler(const Dataset& d, double target_lo, double target_hi) {
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(d.size()), kNumInputs + 1);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        rows.row(r).head(kNumInputs) = d.samples[i].inputs().transpose();
        rows(r, kTargetColumn) = d.samples[i].conductivity;
    }
    return fit_scaler(rows, target_lo, target_hi);
}

double normalize_value(const Scaler& s, Eigen::Index feature, double x) {
    const double lo = s.min[feature];
    const double hi = s.max[feature];
    if (hi == lo) return 0.5 * (s.target_lo + s.target_hi);
    // Extended precision so each direction rounds once.
    using L = long double;
    return static_cast<double>(L(s.target_lo) + (L(x) - lo) * (L(s.target_hi) - s.target_lo) / (L(hi) - lo));
}

double denormalize_value(const Scaler& s, Eigen::Index feature, double y) {
    const double lo = s.min[feature];
    const double hi = s.max[feature];
    if (hi == lo) return lo;
    using L = long double;
    return static_cast<double>(L(lo) + (L(y) - s.target_lo) * (L(hi) - lo) / (L(s.target_hi) - s.target_lo));
}

Eigen::VectorXd normalize(const Scaler& s, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (x.size() > s.size()) throw ConfigError("vector has more features than the scaler");
    Eigen::VectorXd out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = normalize_value(s, i, x[i]);
    return out;
}

Eigen::VectorXd denormalize(const Scaler& s, const Eigen::Ref<const Eigen::VectorXd>& y) {
    if (y.size() > s.size()) throw ConfigError("vector has more features than the scaler");
    Eigen::VectorXd out(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) out[i] = denormalize_value(s, i, y[i]);
    return out;
}

SplitIndices split(std::size_t n, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("train fraction must lie strictly between 0 and 1");
    }
    if (n < 2) throw DataError("cannot split fewer than 2 samples");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(std::span(order));

    const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
    SplitIndices s;
    s.seed = seed;
    s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    return s;
}

SplitIndices split(const Dataset& d, double train_fraction, std::uint64_t seed) {
    return split(d.size(), train_fraction, seed);
}

Dataset subset(const Dataset& d, std::span<const std::size_t> indices) {
    Dataset out;
    out.source_path = d.source_path;
    out.provenance_notes = d.provenance_notes;
    out.samples.reserve(indices.size());
    for (const auto i : indices) out.samples.push_back(d.samples.at(i));
    return out;
}

Eigen::MatrixXd input_matrix(std::span<const Sample> samples) {
    Eigen::MatrixXd x(kNumInputs, static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) x.col(static_cast<Eigen::Index>(i)) = samples[i].inputs();
    return x;
}

Eigen::RowVectorXd target_row(std::span<const Sample> samples) {
    Eigen::RowVectorXd y(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) y[static_cast<Eigen::Index>(i)] = samples[i].conductivity;
    return y;
}

NormalizedBatch normalize_samples(const Scaler& s, std::span<const Sample> samples) {
    NormalizedBatch b{input_matrix(samples), target_row(samples)};
    for (Eigen::Index j = 0; j < b.inputs.cols(); ++j) {
        for (Eigen::Index f = 0; f < kNumInputs; ++f) b.inputs(f, j) = normalize_value(s, f, b.inputs(f, j));
        b.targets[j] = normalize_value(s, kTargetColumn, b.targets[j]);
    }
    return b;
}

}  // namespace condnet
