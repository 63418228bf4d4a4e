#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "muzero/mcts.hpp"
#include "muzero/model.hpp"
#include "muzero/trainer.hpp"

namespace muzero {

/// Everything a training run needs. The file form is flat `key = value`
/// lines; `#` starts a comment. Unknown keys and out-of-range values are
/// rejected with a ConfigError naming the key.
struct RunConfig {
    std::string env = "cartpole";

    // Hyperparameters of the published runs, one key per table row.
    std::uint64_t training_steps = 10000;
    double discount = 0.997;
    std::size_t td_steps = 50;
    std::size_t unroll_steps = 10;
    std::size_t state_dim = 8;
    LearningRateSchedule learning_rate{0.02, 0.9, 1000.0};
    double value_loss_weight = 1.0;
    double l2_weight = 1e-4;
    std::size_t buffer_size = 500;
    double priority_exponent = 0.5;
    std::size_t batch_size = 128;
    std::size_t simulations = 50;
    double dirichlet_alpha = 0.25;
    double exploration_fraction = 0.25;
    double puct_c1 = 1.25;
    double puct_c2 = 19652.0;
    TemperatureSchedule temperature;

    // Auxiliary loss weights.
    double reconstruction_weight = 0.0;
    double consistency_weight = 0.0;

    // Run plumbing.
    std::uint64_t seed = 0;
    std::uint64_t pretrain_steps = 0;
    std::uint64_t pretrain_episodes = 200;
    std::vector<std::size_t> hidden_layers = {16};
    LatentScaling latent_scaling = LatentScaling::MinMax;
    double train_ratio = 0.5;  // learner steps per collected environment step
    std::uint64_t eval_interval = 100;
    std::uint64_t eval_episodes = 1;
    std::uint64_t checkpoint_interval = 1000;
    std::uint64_t final_window = 500;
    std::size_t max_episode_steps = 0;  // 0: environment default
    bool parallel = true;
    std::string output_dir = "runs/default";

    friend bool operator==(const RunConfig&, const RunConfig&);
};

/// Keys that correspond one-to-one to rows of the published hyperparameter table.
const std::vector<std::string>& table_keys();
/// Every key accepted in a config file.
const std::vector<std::string>& all_keys();

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
/// Canonical text form; parse_config(format_config(c)) == c.
std::string format_config(const RunConfig& config);
/// Assigns one key from its textual value (used by parse_config and CLI overrides).
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);
void validate(const RunConfig& config);

std::string format_double(double v);

ModelConfig model_config(const RunConfig& config);
mcts::SearchConfig search_config(const RunConfig& config);
TrainSettings train_settings(const RunConfig& config);
ReplayConfig replay_config(const RunConfig& config);

}  // namespace muzero
