#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "condnet/errors.hpp"
#include "condnet/rng.hpp"

namespace condnet {

enum class Activation { relu, identity };

inline std::string_view to_string(Activation a) { return a == Activation::relu ? "relu" : "identity"; }

inline Activation activation_from_string(std::string_view s) {
    if (s == "relu") return Activation::relu;
    if (s == "identity") return Activation::identity;
    throw ModelFormatError("unknown activation '" + std::string(s) + "'");
}

/// Single-hidden-layer perceptron: y = w2 * relu(w1 * x + b1) + b2.
///
/// w1 is hidden x input, w2 is 1 x hidden. Dimensions are read off the
/// matrices; the minimum-width rule is enforced by construction helpers and the
/// training pipeline, not by the type, so hand-built networks of any shape can
/// be represented.
template <typename Scalar>
struct BasicNetwork {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Matrix w1;
    Vector b1;
    Matrix w2;
    Vector b2;
    Activation hidden_activation = Activation::relu;
    Activation output_activation = Activation::identity;

    Eigen::Index input_dim() const noexcept { return w1.cols(); }
    Eigen::Index hidden_width() const noexcept { return w1.rows(); }
    Eigen::Index output_dim() const noexcept { return w2.rows(); }

    static BasicNetwork zeros(Eigen::Index input_dim, Eigen::Index hidden_width, Eigen::Index output_dim = 1) {
        return {Matrix::Zero(hidden_width, input_dim), Vector::Zero(hidden_width),
                Matrix::Zero(output_dim, hidden_width), Vector::Zero(output_dim)};
    }

    template <typename Other>
    BasicNetwork<Other> cast() const {
        return {w1.template cast<Other>(), b1.template cast<Other>(), w2.template cast<Other>(),
                b2.template cast<Other>(), hidden_activation, output_activation};
    }

    bool operator==(const BasicNetwork&) const = default;
};

using Network = BasicNetwork<double>;

/// Throws ModelFormatError if shapes are inconsistent or a parameter is non-finite.
template <typename Scalar>
void validate(const BasicNetwork<Scalar>& net) {
    if (net.input_dim() < 1 || net.hidden_width() < 1) throw ModelFormatError("network dimensions must be positive");
    if (net.output_dim() != 1) throw ModelFormatError("network must have exactly one output");
    if (net.b1.size() != net.hidden_width() || net.b2.size() != net.output_dim() ||
        net.w2.cols() != net.hidden_width()) {
        throw ModelFormatError("network parameter shapes are inconsistent");
    }
    if (net.hidden_activation != Activation::relu || net.output_activation != Activation::identity) {
        throw ModelFormatError("only relu hidden / identity output activations are supported");
    }
    if (!net.w1.allFinite() || !net.b1.allFinite() || !net.w2.allFinite() || !net.b2.allFinite()) {
        throw ModelFormatError("network parameters must be finite");
    }
}

struct WidthCheck {
    bool ok = false;
    int minimum = 0;
};

/// A hidden layer needs at least input_dim + 1 neurons to be a universal approximator.
constexpr WidthCheck check_min_width(int input_dim, int hidden_width) {
    const int minimum = input_dim + 1;
    return {hidden_width >= minimum, minimum};
}

inline double glorot_limit(Eigen::Index fan_in, Eigen::Index fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

/// Fills `m` with i.i.d. draws from U[-L, L], L = sqrt(6 / (fan_in + fan_out)),
/// column-major order.
template <typename Derived>
void fill_glorot_uniform(Eigen::MatrixBase<Derived>& m, Rng& rng) {
    using Scalar = typename Derived::Scalar;
    const double limit = glorot_limit(m.cols(), m.rows());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = static_cast<Scalar>(rng.uniform(-limit, limit));
    }
}

/// Glorot-uniform weights (w1 first, then w2) and zero biases.
template <typename Scalar = double>
BasicNetwork<Scalar> glorot_uniform_init(int input_dim, int hidden_width, int output_dim, Rng& rng) {
    if (input_dim < 1 || output_dim < 1) throw ConfigError("network dimensions must be positive");
    if (const auto check = check_min_width(input_dim, hidden_width); !check.ok) {
        throw ConfigError("hidden width " + std::to_string(hidden_width) + " is below the minimum width " +
                          std::to_string(check.minimum) + " for " + std::to_string(input_dim) + " inputs");
    }
    auto net = BasicNetwork<Scalar>::zeros(input_dim, hidden_width, output_dim);
    fill_glorot_uniform(net.w1, rng);
    fill_glorot_uniform(net.w2, rng);
    return net;
}

template <typename Scalar>
struct ForwardResult {
    Scalar y{};
    typename BasicNetwork<Scalar>::Vector hidden_pre;
    typename BasicNetwork<Scalar>::Vector hidden_post;
};

/// Single-sample evaluation returning the intermediates used by backprop.
template <typename Scalar, typename Derived>
ForwardResult<Scalar> forward(const BasicNetwork<Scalar>& net, const Eigen::MatrixBase<Derived>& x) {
    if (x.size() != net.input_dim()) throw ConfigError("input vector has the wrong dimension");
    ForwardResult<Scalar> r;
    r.hidden_pre = net.w1 * x + net.b1;
    r.hidden_post = r.hidden_pre.cwiseMax(Scalar(0));
    r.y = net.w2.row(0).dot(r.hidden_post) + net.b2[0];
    if (!r.hidden_pre.allFinite() || !std::isfinite(static_cast<double>(r.y))) {
        throw NumericError("numeric overflow in forward pass");
    }
    return r;
}

template <typename Scalar>
struct BatchForwardResult {
    using Matrix = typename BasicNetwork<Scalar>::Matrix;
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> y;
    Matrix hidden_pre;   // hidden x N
    Matrix hidden_post;  // hidden x N
};

/// Column-per-sample evaluation of a batch X (input_dim x N).
template <typename Scalar, typename Derived>
BatchForwardResult<Scalar> forward_batch(const BasicNetwork<Scalar>& net, const Eigen::MatrixBase<Derived>& x) {
    if (x.rows() != net.input_dim()) throw ConfigError("input batch has the wrong dimension");
    BatchForwardResult<Scalar> r;
    r.hidden_pre = (net.w1 * x).colwise() + net.b1;
    r.hidden_post = r.hidden_pre.cwiseMax(Scalar(0));
    r.y = (net.w2.row(0) * r.hidden_post).array() + net.b2[0];
    if (!r.hidden_pre.allFinite() || !r.y.allFinite()) throw NumericError("numeric overflow in forward pass");
    return r;
}

}  // namespace condnet
