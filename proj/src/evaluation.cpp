#include "condnet/evaluation.hpp"

namespace condnet {

double predict(const Network& net, const Scaler& scaler, const Sample& sample) {
    if (net.input_dim() != kNumInputs || scaler.size() != kNumInputs + 1) {
        throw ModelFormatError("model does not have the 6 melt inputs");
    }
    Eigen::Matrix<double, kNumInputs, 1> x = sample.inputs();
    for (Eigen::Index f = 0; f < kNumInputs; ++f) x[f] = normalize_value(scaler, f, x[f]);
    return denormalize_value(scaler, kTargetColumn, forward(net, x).y);
}

std::vector<double> predict(const Network& net, const Scaler& scaler, std::span<const Sample> samples) {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(predict(net, scaler, s));
    return out;
}

EvalReport evaluate(const Network& net, const Scaler& scaler, std::span<const Sample> samples) {
    if (samples.empty()) throw DataError("cannot evaluate on an empty sample set");
    const auto predicted = predict(net, scaler, samples);
    const auto n = static_cast<Eigen::Index>(samples.size());
    const Eigen::Map<const Eigen::VectorXd> y_pred(predicted.data(), n);
    const Eigen::VectorXd y_true = target_row(samples).transpose();

    EvalReport r;
    r.n = samples.size();
    r.aae = aae(y_true, y_pred);
    r.stdev_of_deviation = stdev_of_deviation(y_true, y_pred);
    r.rmse = rmse(y_true, y_pred);
    r.parity.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) r.parity.push_back({samples[i].conductivity, predicted[i]});
    return r;
}

}  // namespace condnet
