#include "muzero/batch_loss.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>

namespace muzero {

namespace {

void check(const Network& network, std::span<const TrainingTarget> targets, std::span<double> grad) {
    if (targets.empty()) throw std::invalid_argument("batch loss over an empty batch");
    if (grad.size() != network.param_count()) throw std::invalid_argument("gradient buffer has wrong size");
}

}  // namespace

BatchResult batch_loss_serial(const Network& network, std::span<const double> theta,
                              std::span<const TrainingTarget> targets, const LossWeights& weights,
                              const LossOptions& options, std::span<double> grad,
                              LossWorkspace& workspace) {
    check(network, targets, grad);
    const auto p = grad.size();
    workspace.per_sample.assign(p, 0.0);
    std::fill(grad.begin(), grad.end(), 0.0);

    BatchResult result;
    result.initial_values.resize(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        std::fill(workspace.per_sample.begin(), workspace.per_sample.end(), 0.0);
        const auto sample = compute_losses(network, theta, targets[i], weights,
                                           workspace.per_sample, options);
        result.mean_loss += sample.loss;
        result.initial_values[i] = sample.initial_value;
        for (std::size_t j = 0; j < p; ++j) grad[j] += workspace.per_sample[j];
    }
    const double inv = 1.0 / static_cast<double>(targets.size());
    result.mean_loss *= inv;
    for (auto& g : grad) g *= inv;
    return result;
}

BatchResult batch_loss_parallel(const Network& network, std::span<const double> theta,
                                std::span<const TrainingTarget> targets, const LossWeights& weights,
                                const LossOptions& options, std::span<double> grad,
                                LossWorkspace& workspace) {
    check(network, targets, grad);
    const auto p = grad.size();
    const auto n = static_cast<std::int64_t>(targets.size());
    workspace.per_sample.assign(targets.size() * p, 0.0);
    std::vector<SampleLoss> samples(targets.size());

    #pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
        auto row = std::span(workspace.per_sample).subspan(static_cast<std::size_t>(i) * p, p);
        samples[i] = compute_losses(network, theta, targets[i], weights, row, options);
    }

    const double inv = 1.0 / static_cast<double>(targets.size());
    const auto np = static_cast<std::int64_t>(p);
    const double* rows = workspace.per_sample.data();
    #pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < np; ++j) {
        double acc = 0.0;
        for (std::int64_t i = 0; i < n; ++i) acc += rows[i * np + j];
        grad[j] = acc * inv;
    }

    BatchResult result;
    result.initial_values.resize(targets.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        result.mean_loss += samples[i].loss;
        result.initial_values[i] = samples[i].initial_value;
    }
    result.mean_loss *= inv;
    return result;
}

}  // namespace muzero
