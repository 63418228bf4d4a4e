#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "muzero/batch_loss.hpp"
#include "muzero/envs.hpp"
#include "muzero/mcts.hpp"
#include "muzero/nn.hpp"
#include "muzero/replay.hpp"

namespace muzero {

/// lr(t) = initial * decay_rate^(t / decay_steps)
struct LearningRateSchedule {
    double initial = 0.02;
    double decay_rate = 0.9;
    double decay_steps = 1000.0;

    double operator()(std::uint64_t step) const;
};

/// Piecewise-constant temperature: the value of the last threshold <= t.
struct TemperatureSchedule {
    std::vector<std::pair<std::uint64_t, double>> thresholds = {{0, 1.0}, {5000, 0.5}, {7500, 0.25}};

    double operator()(std::uint64_t step) const;
};

struct TrainSettings {
    std::size_t batch_size = 128;
    std::size_t unroll_steps = 10;
    LossWeights weights;
    double l2_weight = 1e-4;
    LearningRateSchedule learning_rate;
    LossOptions loss_options;
    bool parallel = true;
};

/// One learner update: sample, batch-mean loss and gradient, Adam at lr(step),
/// then priorities |v^0 - z_t| for the sampled positions.
LossBreakdown train_step(const Network& network, nn::ParamStore& params, nn::AdamState& opt,
                         ReplayBuffer& buffer, const TrainSettings& settings, std::uint64_t step,
                         LossWorkspace& workspace);

/// Plays one episode choosing actions from the search policy (with root
/// noise and the temperature in `search`). The environment seed is drawn
/// from `rng`.
GameHistory self_play_episode(const InferenceModel& model, envs::Environment& env,
                              const mcts::SearchConfig& search, std::mt19937_64& rng);

/// Uniform-random actions, uniform policies and zero search values; used to
/// collect goal-free data for pretraining.
GameHistory random_episode(envs::Environment& env, std::mt19937_64& rng);

/// Settings with reward, value and policy weights zeroed and both auxiliary
/// weights set to 1.
TrainSettings pretraining_settings(TrainSettings settings);

/// `steps` learner updates on auxiliary losses only. `on_step` receives the
/// 1-based pretraining step and its loss breakdown.
void pretrain(const Network& network, nn::ParamStore& params, nn::AdamState& opt,
              ReplayBuffer& buffer, const TrainSettings& settings, std::uint64_t steps,
              LossWorkspace& workspace,
              const std::function<void(std::uint64_t, const LossBreakdown&, double lr)>& on_step = {});

struct EvaluationResult {
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<double> totals;
};

/// Greedy play (most visited action, no root noise). Population standard
/// deviation, so a single episode reports 0.
EvaluationResult evaluate(const InferenceModel& model, envs::Environment& env, std::size_t episodes,
                          mcts::SearchConfig search, std::uint64_t seed);

}  // namespace muzero
