#pragma once

#include <span>
#include <vector>

#include "muzero/losses.hpp"

namespace muzero {

struct BatchResult {
    LossBreakdown mean_loss;
    std::vector<double> initial_values;
};

/// Scratch space reused across calls: one gradient row per sample.
struct LossWorkspace {
    std::vector<double> per_sample;
};

/// Batch-mean loss and gradient, one sample after another. Reference for the
/// parallel kernel; writes (not adds) the mean gradient into `grad`.
BatchResult batch_loss_serial(const Network& network, std::span<const double> theta,
                              std::span<const TrainingTarget> targets, const LossWeights& weights,
                              const LossOptions& options, std::span<double> grad,
                              LossWorkspace& workspace);

/// Same result as batch_loss_serial, bit for bit, for any thread count:
/// samples are processed in parallel into private gradient rows which are
/// then reduced in sample order.
BatchResult batch_loss_parallel(const Network& network, std::span<const double> theta,
                                std::span<const TrainingTarget> targets, const LossWeights& weights,
                                const LossOptions& options, std::span<double> grad,
                                LossWorkspace& workspace);

}  // namespace muzero
