#pragma once

#include <span>
#include <vector>

#include "muzero/model.hpp"
#include "muzero/replay.hpp"

namespace muzero {

/// Per-term weights. reconstruction = consistency = 0 is plain MuZero.
struct LossWeights {
    double reward = 1.0;
    double value = 1.0;
    double policy = 1.0;
    double reconstruction = 0.0;
    double consistency = 0.0;

    friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

/// Loss terms summed over the unrolled steps. `total` is the weighted sum;
/// the L2 penalty is applied by the optimizer and is not included.
struct LossBreakdown {
    double reward = 0.0;
    double value = 0.0;
    double policy = 0.0;
    double reconstruction = 0.0;
    double consistency = 0.0;
    double total = 0.0;

    LossBreakdown& operator+=(const LossBreakdown& o);
    LossBreakdown& operator*=(double s);

    friend bool operator==(const LossBreakdown&, const LossBreakdown&) = default;
};

struct LossOptions {
    /// When false the reconstruction network is never evaluated and no
    /// consistency targets are built; both terms read 0.
    bool auxiliary_paths = true;
};

struct SampleLoss {
    LossBreakdown loss;
    double initial_value = 0.0;  // v^0, used for the priority update
};

/// Encodings h(o_{t+k}) of the real future observations, one per valid
/// step. They enter the consistency term as constants.
std::vector<LatentState> consistency_targets(const Network& network, std::span<const double> theta,
                                             const TrainingTarget& target);

/// Unrolls the model along the target's actions and adds
/// d(weighted total)/d(theta) into `grad`. `latent_targets` supplies the
/// (frozen) consistency targets; it may be null when auxiliary paths are off
/// or the consistency weight is zero.
SampleLoss unroll_loss(const Network& network, std::span<const double> theta,
                       const TrainingTarget& target, const LossWeights& weights,
                       const std::vector<LatentState>* latent_targets, std::span<double> grad,
                       const LossOptions& options = {});

/// consistency_targets followed by unroll_loss.
SampleLoss compute_losses(const Network& network, std::span<const double> theta,
                          const TrainingTarget& target, const LossWeights& weights,
                          std::span<double> grad, const LossOptions& options = {});

}  // namespace muzero
