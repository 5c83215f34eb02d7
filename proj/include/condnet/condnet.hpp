#pragma once

#include "condnet/data.hpp"
#include "condnet/errors.hpp"
#include "condnet/evaluation.hpp"
#include "condnet/model_io.hpp"
#include "condnet/network.hpp"
#include "condnet/report.hpp"
#include "condnet/rng.hpp"
#include "condnet/sensitivity.hpp"
#include "condnet/training.hpp"

namespace condnet {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace condnet
