#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "condnet/data.hpp"
#include "condnet/evaluation.hpp"
#include "condnet/network.hpp"

namespace condnet {

/// Lower bound on the RMSE used in the denominator of its derivative.
inline constexpr double kRmseGradientFloor = 1e-12;

/// Parameter-shaped tensors: gradients, or Adam moments.
template <typename Scalar>
struct ParamTensors {
    typename BasicNetwork<Scalar>::Matrix w1;
    typename BasicNetwork<Scalar>::Vector b1;
    typename BasicNetwork<Scalar>::Matrix w2;
    typename BasicNetwork<Scalar>::Vector b2;

    static ParamTensors zeros_like(const BasicNetwork<Scalar>& net) {
        return {BasicNetwork<Scalar>::Matrix::Zero(net.w1.rows(), net.w1.cols()),
                BasicNetwork<Scalar>::Vector::Zero(net.b1.size()),
                BasicNetwork<Scalar>::Matrix::Zero(net.w2.rows(), net.w2.cols()),
                BasicNetwork<Scalar>::Vector::Zero(net.b2.size())};
    }

    bool all_finite() const { return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite(); }
};

template <typename Scalar>
using Gradients = ParamTensors<Scalar>;

template <typename Scalar>
struct LossAndGradients {
    Scalar loss{};
    Gradients<Scalar> grads;
};

/// Batch RMSE and its exact gradient with respect to every parameter.
///
/// x is input_dim x N (one sample per column), y is 1 x N. The loss derivative
/// is (y_pred - y_true) / (N * max(rmse, 1e-12)); ReLU passes gradient only
/// where the pre-activation is strictly positive.
template <typename Scalar, typename XDerived, typename YDerived>
LossAndGradients<Scalar> backward(const BasicNetwork<Scalar>& net, const Eigen::MatrixBase<XDerived>& x,
                                  const Eigen::MatrixBase<YDerived>& y) {
    const Eigen::Index n = x.cols();
    if (n == 0) throw DataError("backward needs a non-empty batch");
    if (y.size() != n) throw ConfigError("batch inputs and targets differ in length");

    const auto fwd = forward_batch(net, x);
    const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> err = fwd.y - y.derived().reshaped().transpose();
    using std::max;
    using std::sqrt;
    const Scalar loss = sqrt(err.squaredNorm() / Scalar(n));
    const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> d_y =
        err / (Scalar(n) * max(loss, Scalar(kRmseGradientFloor)));

    LossAndGradients<Scalar> out;
    out.loss = loss;
    out.grads.w2 = d_y * fwd.hidden_post.transpose();
    out.grads.b2 = Eigen::Matrix<Scalar, 1, 1>::Constant(d_y.sum());
    const typename BasicNetwork<Scalar>::Matrix d_pre =
        ((net.w2.row(0).transpose() * d_y).array() * (fwd.hidden_pre.array() > Scalar(0)).template cast<Scalar>())
            .matrix();
    out.grads.w1 = d_pre * x.transpose();
    out.grads.b1 = d_pre.rowwise().sum();
    if (!out.grads.all_finite()) throw NumericError("non-finite gradient");
    return out;
}

struct AdamHyperparameters {
    double alpha = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// One Adam update of `param` in place, `t` being the already-incremented step.
template <typename P, typename G, typename M>
void adam_update(Eigen::DenseBase<P>& param, const Eigen::DenseBase<G>& grad, Eigen::DenseBase<M>& m,
                 Eigen::DenseBase<M>& v, std::int64_t t, const AdamHyperparameters& hp) {
    using Scalar = typename P::Scalar;
    const auto g = grad.derived().array();
    m.derived().array() = Scalar(hp.beta1) * m.derived().array() + Scalar(1 - hp.beta1) * g;
    v.derived().array() = Scalar(hp.beta2) * v.derived().array() + Scalar(1 - hp.beta2) * g.square();
    const Scalar m_corr = Scalar(1) - Scalar(std::pow(hp.beta1, static_cast<double>(t)));
    const Scalar v_corr = Scalar(1) - Scalar(std::pow(hp.beta2, static_cast<double>(t)));
    param.derived().array() -= Scalar(hp.alpha) * (m.derived().array() / m_corr) /
                               ((v.derived().array() / v_corr).sqrt() + Scalar(hp.epsilon));
}

template <typename Scalar>
struct AdamState {
    AdamHyperparameters hp;
    ParamTensors<Scalar> m;
    ParamTensors<Scalar> v;
    std::int64_t t = 0;

    static AdamState zeros_like(const BasicNetwork<Scalar>& net, const AdamHyperparameters& hp = {}) {
        if (!(hp.beta1 >= 0 && hp.beta1 < 1 && hp.beta2 >= 0 && hp.beta2 < 1)) {
            throw ConfigError("Adam decay rates must lie in [0, 1)");
        }
        return {hp, ParamTensors<Scalar>::zeros_like(net), ParamTensors<Scalar>::zeros_like(net), 0};
    }
};

template <typename Scalar>
void adam_step(AdamState<Scalar>& state, BasicNetwork<Scalar>& net, const Gradients<Scalar>& g) {
    if (g.w1.rows() != net.w1.rows() || g.w1.cols() != net.w1.cols() || g.w2.cols() != net.w2.cols()) {
        throw ConfigError("gradient shapes do not match the network");
    }
    ++state.t;
    adam_update(net.w1, g.w1, state.m.w1, state.v.w1, state.t, state.hp);
    adam_update(net.b1, g.b1, state.m.b1, state.v.b1, state.t, state.hp);
    adam_update(net.w2, g.w2, state.m.w2, state.v.w2, state.t, state.hp);
    adam_update(net.b2, g.b2, state.m.b2, state.v.b2, state.t, state.hp);
}

struct TrainConfig {
    int epochs = 2000;
    int batch_size = 32;
    double learning_rate = 0.001;
    std::uint64_t seed = 0;
    int hidden_width = 100;
    double target_lo = 0.0;
    double target_hi = 1.0;
    double train_fraction = 0.8;

    /// Throws ConfigError on non-positive sizes or a width below the minimum.
    void validate() const;
};

struct EpochLoss {
    int epoch = 0;
    double rmse = 0.0;  // full training set, normalized units
};

struct TrainReport {
    std::vector<EpochLoss> loss_per_epoch;
    EvalReport test;  // S/m
    double wall_clock_seconds = 0.0;
    TrainConfig config;
    std::size_t removed_outliers = 0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::int64_t adam_steps = 0;
};

struct TrainResult {
    Network net;
    Scaler scaler;
    TrainReport report;
    SplitIndices split;
    Dataset retained;  // after outlier removal, indexed by `split`
};

/// Everything the epoch loop needs, already preprocessed.
struct PreparedData {
    Dataset retained;
    std::size_t removed_outliers = 0;
    SplitIndices split;
    Scaler scaler;
};

/// remove_outliers -> split -> fit_scaler(train partition).
PreparedData prepare(const Dataset& d, const TrainConfig& cfg);

/// Initializes a network and runs the epoch loop on prepared data, then
/// evaluates the held-out partition in S/m.
TrainResult train(const PreparedData& data, const TrainConfig& cfg);

/// Full pipeline; a pure function of (d, cfg).
TrainResult train(const Dataset& d, const TrainConfig& cfg);

struct SweepRow {
    int width = 0;
    double test_aae = 0.0;
};

struct SweepResult {
    TrainResult best;
    std::vector<SweepRow> table;        // ascending width
    std::vector<std::string> warnings;  // e.g. dropped duplicate widths
};

/// Index of the row with the lowest test AAE; ties go to the smaller width.
std::size_t best_row(std::span<const SweepRow> rows);

/// Trains one network per distinct width on identical partitions and selects the
/// lowest test AAE, ties going to the smaller width. Runs the widths on up to
/// `max_threads` threads; results do not depend on the thread count.
SweepResult sweep(const Dataset& d, std::vector<int> widths, const TrainConfig& base_cfg,
                  unsigned max_threads = 1);

}  // namespace condnet
