#include "muzero/trainer.hpp"

#include <cmath>
#include <stdexcept>

namespace muzero {

double LearningRateSchedule::operator()(std::uint64_t step) const {
    return initial * std::pow(decay_rate, static_cast<double>(step) / decay_steps);
}

double TemperatureSchedule::operator()(std::uint64_t step) const {
    if (thresholds.empty()) return 1.0;
    double t = thresholds.front().second;
    for (const auto& [start, value] : thresholds)
        if (step >= start) t = value;
    return t;
}

LossBreakdown train_step(const Network& network, nn::ParamStore& params, nn::AdamState& opt,
                         ReplayBuffer& buffer, const TrainSettings& settings, std::uint64_t step,
                         LossWorkspace& workspace) {
    const auto batch = buffer.sample_batch(settings.batch_size, settings.unroll_steps);
    const auto kernel = settings.parallel ? batch_loss_parallel : batch_loss_serial;
    const auto result = kernel(network, params.values(), batch.targets, settings.weights,
                               settings.loss_options, params.grads(), workspace);
    nn::adam_step(params, opt, settings.learning_rate(step), settings.l2_weight);

    std::vector<double> errors(batch.targets.size());
    for (std::size_t i = 0; i < errors.size(); ++i)
        errors[i] = result.initial_values[i] - batch.targets[i].values[0];
    buffer.update_priorities(batch.indices, errors);
    return result.mean_loss;
}

GameHistory self_play_episode(const InferenceModel& model, envs::Environment& env,
                              const mcts::SearchConfig& search, std::mt19937_64& rng) {
    GameHistory game;
    game.observations.push_back(env.reset(rng()));
    while (!env.terminal()) {
        const auto result = mcts::run_mcts(model, game.observations.back(), search, rng);
        const auto step = env.step(result.action);
        game.actions.push_back(result.action);
        game.rewards.push_back(step.reward);
        game.policies.push_back(result.policy);
        game.search_values.push_back(result.value);
        game.observations.push_back(step.observation);
    }
    return game;
}

GameHistory random_episode(envs::Environment& env, std::mt19937_64& rng) {
    const auto actions = env.spec().action_count;
    const std::vector<double> uniform(actions, 1.0 / static_cast<double>(actions));
    std::uniform_int_distribution<std::size_t> pick(0, actions - 1);
    GameHistory game;
    game.observations.push_back(env.reset(rng()));
    while (!env.terminal()) {
        const Action a = pick(rng);
        const auto step = env.step(a);
        game.actions.push_back(a);
        game.rewards.push_back(step.reward);
        game.policies.push_back(uniform);
        game.search_values.push_back(0.0);
        game.observations.push_back(step.observation);
    }
    return game;
}

TrainSettings pretraining_settings(TrainSettings settings) {
    settings.weights = {0.0, 0.0, 0.0, 1.0, 1.0};
    settings.loss_options.auxiliary_paths = true;
    return settings;
}

void pretrain(const Network& network, nn::ParamStore& params, nn::AdamState& opt,
              ReplayBuffer& buffer, const TrainSettings& settings, std::uint64_t steps,
              LossWorkspace& workspace,
              const std::function<void(std::uint64_t, const LossBreakdown&, double)>& on_step) {
    const auto pre = pretraining_settings(settings);
    for (std::uint64_t t = 0; t < steps; ++t) {
        const auto loss = train_step(network, params, opt, buffer, pre, t, workspace);
        if (on_step) on_step(t + 1, loss, pre.learning_rate(t));
    }
}

EvaluationResult evaluate(const InferenceModel& model, envs::Environment& env, std::size_t episodes,
                          mcts::SearchConfig search, std::uint64_t seed) {
    if (episodes == 0) throw std::invalid_argument("evaluate needs at least one episode");
    search.root_noise = false;
    search.temperature = 0.0;
    std::mt19937_64 rng(seed);
    EvaluationResult result;
    for (std::size_t e = 0; e < episodes; ++e) {
        double total = 0.0;
        auto obs = env.reset(rng());
        while (!env.terminal()) {
            const auto action = mcts::run_mcts(model, obs, search, rng).action;
            const auto step = env.step(action);
            total += step.reward;
            obs = step.observation;
        }
        result.totals.push_back(total);
        result.mean += total;
    }
    result.mean /= static_cast<double>(episodes);
    double var = 0.0;
    for (double t : result.totals) var += (t - result.mean) * (t - result.mean);
    result.stddev = std::sqrt(var / static_cast<double>(episodes));
    return result;
}

}  // namespace muzero
