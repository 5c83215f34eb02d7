#pragma once

// Brute-force reference implementations used only by tests. They deliberately
// avoid the library's Eigen code paths: plain loops over long double.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "condnet/network.hpp"

namespace condnet::oracle {

using Real = long double;

/// keep[i] == (|c_i - mean| <= 3 sigma), population sigma over all values.
inline std::vector<bool> outlier_keep(const std::vector<double>& c) {
    Real mean = 0;
    for (const double v : c) mean += v;
    mean /= static_cast<Real>(c.size());
    Real ss = 0;
    for (const double v : c) ss += (v - mean) * (v - mean);
    const Real sigma = std::sqrt(ss / static_cast<Real>(c.size()));
    std::vector<bool> keep;
    for (const double v : c) keep.push_back(std::fabs(static_cast<Real>(v) - mean) <= 3 * sigma);
    return keep;
}

inline Real aae(const std::vector<double>& t, const std::vector<double>& p) {
    Real s = 0;
    for (std::size_t i = 0; i < t.size(); ++i) s += std::fabs(static_cast<Real>(t[i]) - p[i]);
    return s / static_cast<Real>(t.size());
}

inline Real rmse(const std::vector<double>& t, const std::vector<double>& p) {
    Real s = 0;
    for (std::size_t i = 0; i < t.size(); ++i) s += (static_cast<Real>(t[i]) - p[i]) * (static_cast<Real>(t[i]) - p[i]);
    return std::sqrt(s / static_cast<Real>(t.size()));
}

inline Real stdev_of_deviation(const std::vector<double>& t, const std::vector<double>& p) {
    std::vector<Real> dev;
    for (std::size_t i = 0; i < t.size(); ++i) dev.push_back(static_cast<Real>(t[i]) - p[i]);
    Real mean = 0;
    for (const Real d : dev) mean += d;
    mean /= static_cast<Real>(dev.size());
    Real ss = 0;
    for (const Real d : dev) ss += (d - mean) * (d - mean);
    return std::sqrt(ss / static_cast<Real>(dev.size()));
}

/// Flattened parameter view: w1 (row-major), b1, w2, b2.
struct FlatNet {
    int in = 0;
    int hidden = 0;
    std::vector<Real> p;

    explicit FlatNet(const Network& net)
        : in(static_cast<int>(net.input_dim())), hidden(static_cast<int>(net.hidden_width())) {
        for (int j = 0; j < hidden; ++j)
            for (int i = 0; i < in; ++i) p.push_back(net.w1(j, i));
        for (int j = 0; j < hidden; ++j) p.push_back(net.b1[j]);
        for (int j = 0; j < hidden; ++j) p.push_back(net.w2(0, j));
        p.push_back(net.b2[0]);
    }

    Real w1(int j, int i) const { return p[static_cast<std::size_t>(j * in + i)]; }
    Real b1(int j) const { return p[static_cast<std::size_t>(hidden * in + j)]; }
    Real w2(int j) const { return p[static_cast<std::size_t>(hidden * in + hidden + j)]; }
    Real b2() const { return p.back(); }

    Real pre(int j, const std::vector<double>& x) const {
        Real z = b1(j);
        for (int i = 0; i < in; ++i) z += w1(j, i) * x[static_cast<std::size_t>(i)];
        return z;
    }

    Real output(const std::vector<double>& x) const {
        Real y = b2();
        for (int j = 0; j < hidden; ++j) y += w2(j) * std::max<Real>(0, pre(j, x));
        return y;
    }

    Real batch_rmse(const std::vector<std::vector<double>>& xs, const std::vector<double>& ys) const {
        Real s = 0;
        for (std::size_t n = 0; n < xs.size(); ++n) {
            const Real e = output(xs[n]) - ys[n];
            s += e * e;
        }
        return std::sqrt(s / static_cast<Real>(xs.size()));
    }

    /// ReLU sign pattern over a batch, to detect kink crossings.
    std::vector<bool> pattern(const std::vector<std::vector<double>>& xs) const {
        std::vector<bool> on;
        for (const auto& x : xs)
            for (int j = 0; j < hidden; ++j) on.push_back(pre(j, x) > 0);
        return on;
    }
};

struct FiniteDifference {
    std::vector<Real> grad;          // same layout as FlatNet::p
    std::vector<bool> crosses_kink;  // perturbation flipped a ReLU gate
};

/// Central differences of batch RMSE with respect to every parameter.
inline FiniteDifference central_difference(const Network& net, const std::vector<std::vector<double>>& xs,
                                           const std::vector<double>& ys, Real step) {
    FlatNet f(net);
    const auto base_pattern = f.pattern(xs);
    FiniteDifference out;
    for (std::size_t k = 0; k < f.p.size(); ++k) {
        const Real saved = f.p[k];
        f.p[k] = saved + step;
        const Real plus = f.batch_rmse(xs, ys);
        const bool flip_plus = f.pattern(xs) != base_pattern;
        f.p[k] = saved - step;
        const Real minus = f.batch_rmse(xs, ys);
        const bool flip_minus = f.pattern(xs) != base_pattern;
        f.p[k] = saved;
        out.grad.push_back((plus - minus) / (2 * step));
        out.crosses_kink.push_back(flip_plus || flip_minus);
    }
    return out;
}

/// Scalar Adam, written out from the update equations.
struct ScalarAdam {
    Real m = 0, v = 0, theta = 0;
    long t = 0;

    void step(Real g, Real alpha = 0.001L, Real beta1 = 0.9L, Real beta2 = 0.999L, Real eps = 1e-8L) {
        ++t;
        m = beta1 * m + (1 - beta1) * g;
        v = beta2 * v + (1 - beta2) * g * g;
        const Real m_hat = m / (1 - std::pow(beta1, static_cast<Real>(t)));
        const Real v_hat = v / (1 - std::pow(beta2, static_cast<Real>(t)));
        theta -= alpha * m_hat / (std::sqrt(v_hat) + eps);
    }
};

/// c_i = sum_j w1[j][i] w2[j] by explicit double loop.
inline std::vector<Real> contributions(const Network& net) {
    std::vector<Real> c(static_cast<std::size_t>(net.input_dim()), 0);
    for (Eigen::Index i = 0; i < net.input_dim(); ++i)
        for (Eigen::Index j = 0; j < net.hidden_width(); ++j)
            c[static_cast<std::size_t>(i)] += static_cast<Real>(net.w1(j, i)) * net.w2(0, j);
    return c;
}

}  // namespace condnet::oracle
