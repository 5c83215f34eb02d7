#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "condnet/data.hpp"
#include "condnet/network.hpp"

namespace condnet {

/// Connection-weights importances of each network input.
struct SensitivityReport {
    std::vector<std::string> labels;
    Eigen::VectorXd contribution;   // signed, c_i = sum_j w1(j, i) * w2(0, j)
    Eigen::VectorXd importance_pct; // |c_i| / sum_k |c_k| * 100, NaN when degenerate
    bool degenerate = false;        // every c_i is exactly zero
};

/// Input labels: the CSV column names for 6-input networks, x1..xn otherwise.
inline std::vector<std::string> input_labels(Eigen::Index input_dim) {
    std::vector<std::string> labels;
    for (Eigen::Index i = 0; i < input_dim; ++i) {
        labels.push_back(input_dim == kNumInputs ? std::string(kInputNames[static_cast<std::size_t>(i)])
                                                 : "x" + std::to_string(i + 1));
    }
    return labels;
}

/// Sums input-hidden times hidden-output weight products per input (biases
/// excluded). Works on the stored weights, so importances are relative to the
/// normalized input ranges.
template <typename Scalar>
SensitivityReport connection_weights(const BasicNetwork<Scalar>& net) {
    if (net.output_dim() != 1 || net.w2.cols() != net.hidden_width()) {
        throw ConfigError("connection weights need one hidden layer and a single output");
    }
    SensitivityReport r;
    r.labels = input_labels(net.input_dim());
    r.contribution = Eigen::VectorXd::Zero(net.input_dim());
    for (Eigen::Index i = 0; i < net.input_dim(); ++i) {
        Scalar c(0);
        for (Eigen::Index j = 0; j < net.hidden_width(); ++j) c += net.w1(j, i) * net.w2(0, j);
        r.contribution[i] = static_cast<double>(c);
    }
    const double total = r.contribution.cwiseAbs().sum();
    r.degenerate = total == 0.0;
    r.importance_pct = r.degenerate ? Eigen::VectorXd::Constant(net.input_dim(), std::nan(""))
                                    : Eigen::VectorXd(r.contribution.cwiseAbs() / total * 100.0);
    return r;
}

}  // namespace condnet
