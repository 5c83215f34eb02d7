#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "condnet/data.hpp"
#include "condnet/network.hpp"

namespace condnet {

inline constexpr int kModelFormatVersion = 1;

/// A trained network with everything needed to reproduce its predictions and
/// its train/test partition.
struct Model {
    Network net;
    Scaler scaler;
    std::uint64_t seed = 0;
    double train_fraction = 0.8;
};

/// Line-oriented text format, one `key = value` per line, '#' comments.
///
///     format_version = 1
///     input_dim = 6
///     hidden_width = 100
///     output_dim = 1
///     hidden_activation = relu
///     output_activation = identity
///     seed = 7
///     train_fraction = 0.80000000000000004
///     scaler.target_lo = 0
///     scaler.target_hi = 1
///     scaler.min[7] = v0 v1 ... v6
///     scaler.max[7] = ...
///     w1[100,6] = row-major values
///     b1[100] = ...
///     w2[1,100] = ...
///     b2[1] = ...
///
/// Reals are written with 17 significant digits, so save(load(save(m))) is
/// byte-identical to save(m) and predictions survive a round trip bit-exactly.
/// The scaler covers input_dim predictors followed by the target.
void save_model(const Model& m, std::ostream& out);
void save_model(const Model& m, const std::filesystem::path& path);
std::string model_to_string(const Model& m);

/// Throws ModelFormatError on a missing key, bad shape, or unsupported version.
Model load_model(std::istream& in);
Model load_model(const std::filesystem::path& path);

}  // namespace condnet
