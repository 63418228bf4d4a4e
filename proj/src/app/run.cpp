#include "muzero/run.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "muzero/checkpoint.hpp"
#include "muzero/envs.hpp"
#include "muzero/errors.hpp"

namespace muzero {

namespace fs = std::filesystem;

std::string loss_row(std::uint64_t step, const LossBreakdown& l, double lr) {
    return std::to_string(step) + "," + format_double(l.total) + "," + format_double(l.reward) + "," +
           format_double(l.value) + "," + format_double(l.policy) + "," +
           format_double(l.reconstruction) + "," + format_double(l.consistency) + "," +
           format_double(lr);
}

std::string eval_row(const EvalRecord& r) {
    return std::to_string(r.step) + "," + format_double(r.mean) + "," + format_double(r.stddev);
}

std::vector<EvalRecord> read_eval_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kEvalHeader)
        throw std::runtime_error(path.string() + " does not start with header '" + std::string(kEvalHeader) + "'");
    std::vector<EvalRecord> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        EvalRecord r;
        char c1 = 0, c2 = 0;
        if (!(ss >> r.step >> c1 >> r.mean >> c2 >> r.stddev) || c1 != ',' || c2 != ',')
            throw std::runtime_error("malformed row in " + path.string() + ": " + line);
        rows.push_back(r);
    }
    return rows;
}

CsvLog::CsvLog(fs::path path, std::string_view header, std::optional<std::uint64_t> keep_through)
    : path_(std::move(path)) {
    std::vector<std::string> kept;
    if (keep_through && fs::exists(path_)) {
        std::ifstream in(path_);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (std::stoull(line.substr(0, line.find(','))) <= *keep_through) kept.push_back(line);
        }
    }
    std::ofstream out(path_, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path_.string());
    out << header << '\n';
    for (const auto& l : kept) out << l << '\n';
}

void CsvLog::append(const std::string& row) {
    std::ofstream out(path_, std::ios::app);
    out << row << '\n';
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over (seed, stream)
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

namespace {

enum Stream : std::uint64_t { kInit = 1, kReplay = 2, kSelfPlay = 3, kEval = 4, kPretrain = 5 };

fs::path step_checkpoint(const fs::path& dir, std::uint64_t step) {
    char name[32];
    std::snprintf(name, sizeof name, "step_%08llu.bin", static_cast<unsigned long long>(step));
    return dir / "checkpoints" / name;
}

}  // namespace

std::pair<double, double> final_window_stats(const std::vector<EvalRecord>& evals,
                                             std::uint64_t last_step, std::uint64_t window,
                                             std::size_t* count) {
    const std::uint64_t start = last_step > window ? last_step - window : 0;
    std::vector<double> values;
    for (const auto& e : evals)
        if (e.step > start && e.step <= last_step) values.push_back(e.mean);
    if (count) *count = values.size();
    if (values.empty()) return {0.0, 0.0};
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    return {mean, std::sqrt(var / static_cast<double>(values.size()))};
}

RunSummary run_training(RunConfig config, const RunOptions& options) {
    TrainingState state;
    const auto out_dir_override = config.output_dir;
    if (options.resume) {
        state = load_checkpoint(*options.resume);
        state.config.output_dir = out_dir_override;
        config = state.config;
    }
    validate(config);

    const fs::path dir = config.output_dir;
    fs::create_directories(dir);
    {
        std::ofstream(dir / "config.cfg") << format_config(config);
    }

    const Network network(model_config(config));
    auto env = envs::make_environment(config.env, config.max_episode_steps);
    auto eval_env = envs::make_environment(config.env, config.max_episode_steps);
    const auto settings = train_settings(config);
    auto search = search_config(config);

    nn::ParamStore params = network.zero_params();
    nn::AdamState opt(network.param_count());
    ReplayBuffer buffer(replay_config(config), derive_seed(config.seed, kReplay));
    std::mt19937_64 self_play_rng(derive_seed(config.seed, kSelfPlay));
    LossWorkspace workspace;

    std::optional<std::uint64_t> keep;
    if (options.resume) {
        if (state.params.size() != network.param_count())
            throw CheckpointError("checkpoint parameter count does not match its config");
        std::copy(state.params.begin(), state.params.end(), params.values().begin());
        opt = state.optimizer;
        self_play_rng = state.self_play_rng;
        buffer.restore(state.replay);
        keep = state.step;
        spdlog::info("resumed from {} at step {}", options.resume->string(), state.step);
    } else {
        params = network.init_params(derive_seed(config.seed, kInit));
        state = TrainingState{};
        state.config = config;
    }

    CsvLog losses(dir / "losses.csv", kLossHeader, keep);
    CsvLog evals(dir / "eval.csv", kEvalHeader, keep);

    auto capture = [&] {
        state.config = config;
        state.params.assign(params.values().begin(), params.values().end());
        state.optimizer = opt;
        state.self_play_rng = self_play_rng;
        state.replay = buffer.snapshot();
        return state;
    };
    auto checkpoint = [&] {
        const auto snap = capture();
        save_checkpoint(dir / "checkpoint.bin", snap);
        save_checkpoint(step_checkpoint(dir, snap.step), snap);
    };

    if (!options.resume) {
        if (config.pretrain_steps > 0) {
            CsvLog pre_log(dir / "pretrain_losses.csv", kLossHeader);
            std::mt19937_64 pre_rng(derive_seed(config.seed, kPretrain));
            for (std::uint64_t e = 0; e < config.pretrain_episodes; ++e)
                buffer.store_game(random_episode(*env, pre_rng));
            spdlog::info("pretraining {} steps on {} random episodes", config.pretrain_steps,
                         config.pretrain_episodes);
            pretrain(network, params, opt, buffer, settings, config.pretrain_steps, workspace,
                     [&](std::uint64_t t, const LossBreakdown& l, double lr) {
                         pre_log.append(loss_row(t, l, lr));
                     });
            buffer.clear();
        }
        checkpoint();
    }

    RunSummary summary;
    while (state.step < config.training_steps) {
        const auto target = static_cast<std::uint64_t>(
            std::floor(static_cast<double>(state.env_steps) * config.train_ratio));
        if (state.step >= target) {
            const std::vector<double> snapshot(params.values().begin(), params.values().end());
            const NetworkModel model(network, snapshot);
            search.temperature = config.temperature(state.step);
            auto game = self_play_episode(model, *env, search, self_play_rng);
            state.env_steps += game.length();
            state.episodes += 1;
            spdlog::debug("episode {} length {} at step {}", state.episodes, game.length(), state.step);
            buffer.store_game(std::move(game));
            continue;
        }

        const auto loss = train_step(network, params, opt, buffer, settings, state.step, workspace);
        losses.append(loss_row(state.step + 1, loss, settings.learning_rate(state.step)));
        state.step += 1;

        if (state.step % config.eval_interval == 0) {
            const NetworkModel model(network, params.values());
            const auto result = evaluate(model, *eval_env, config.eval_episodes, search_config(config),
                                         derive_seed(config.seed ^ state.step, kEval));
            const EvalRecord record{state.step, result.mean, result.stddev};
            evals.append(eval_row(record));
            spdlog::info("step {} reward {:.1f} loss {:.4f} (episodes {})", state.step, result.mean,
                         loss.total, state.episodes);
            summary.evaluations.push_back(record);
            if (options.on_eval && !options.on_eval(record)) {
                summary.stopped_early = true;
                checkpoint();
                break;
            }
        }
        if (state.step % config.checkpoint_interval == 0) checkpoint();
    }
    if (!summary.stopped_early && state.step % config.checkpoint_interval != 0) checkpoint();

    summary.steps_completed = state.step;
    const auto all = read_eval_csv(dir / "eval.csv");
    std::tie(summary.final_mean, summary.final_std) =
        final_window_stats(all, state.step, config.final_window, &summary.final_count);
    std::ofstream(dir / "summary.csv") << "final_window,evaluations,reward_mean,reward_std\n"
                                       << config.final_window << "," << summary.final_count << ","
                                       << format_double(summary.final_mean) << ","
                                       << format_double(summary.final_std) << "\n";
    return summary;
}

EvalReport run_evaluation(const fs::path& checkpoint, std::size_t episodes, std::uint64_t seed) {
    const auto state = load_checkpoint(checkpoint);
    const Network network(model_config(state.config));
    if (state.params.size() != network.param_count())
        throw CheckpointError("checkpoint parameter count does not match its config");
    auto env = envs::make_environment(state.config.env, state.config.max_episode_steps);
    const NetworkModel model(network, state.params);
    return {state.step, evaluate(model, *env, episodes, search_config(state.config), seed)};
}

}  // namespace muzero
