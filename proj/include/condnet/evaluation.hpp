#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "condnet/data.hpp"
#include "condnet/errors.hpp"
#include "condnet/network.hpp"

namespace condnet {

namespace detail {

template <typename A, typename B>
void check_pair(const Eigen::DenseBase<A>& y_true, const Eigen::DenseBase<B>& y_pred, Eigen::Index min_size) {
    if (y_true.size() != y_pred.size()) throw ConfigError("metric inputs differ in length");
    if (y_true.size() < min_size) {
        throw DataError("metric needs at least " + std::to_string(min_size) + " values");
    }
}

}  // namespace detail

/// sqrt(mean((y_true - y_pred)^2))
template <typename A, typename B>
typename A::Scalar rmse(const Eigen::DenseBase<A>& y_true, const Eigen::DenseBase<B>& y_pred) {
    detail::check_pair(y_true, y_pred, 1);
    using std::sqrt;
    return sqrt((y_true.derived().array() - y_pred.derived().array()).square().mean());
}

/// Average absolute error, mean(|y_true - y_pred|).
template <typename A, typename B>
typename A::Scalar aae(const Eigen::DenseBase<A>& y_true, const Eigen::DenseBase<B>& y_pred) {
    detail::check_pair(y_true, y_pred, 1);
    return (y_true.derived().array() - y_pred.derived().array()).abs().mean();
}

/// Population standard deviation (1/N) of the signed deviations y_true - y_pred.
template <typename A, typename B>
typename A::Scalar stdev_of_deviation(const Eigen::DenseBase<A>& y_true, const Eigen::DenseBase<B>& y_pred) {
    detail::check_pair(y_true, y_pred, 2);
    using std::sqrt;
    const auto dev = (y_true.derived().array() - y_pred.derived().array()).eval();
    return sqrt((dev - dev.mean()).square().mean());
}

struct ParityPair {
    double truth = 0.0;
    double predicted = 0.0;
};

struct EvalReport {
    double aae = 0.0;
    double stdev_of_deviation = 0.0;
    double rmse = 0.0;
    std::size_t n = 0;
    std::vector<ParityPair> parity;
};

/// Conductivity prediction in S/m for one sample.
double predict(const Network& net, const Scaler& scaler, const Sample& sample);

/// Predicts every sample (one forward call per sample, so a row gives the same
/// bit pattern whichever batch it is evaluated in).
std::vector<double> predict(const Network& net, const Scaler& scaler, std::span<const Sample> samples);

/// Metrics in S/m on denormalized predictions; parity pairs in input order.
EvalReport evaluate(const Network& net, const Scaler& scaler, std::span<const Sample> samples);

}  // namespace condnet
