#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "muzero/config.hpp"
#include "muzero/losses.hpp"
#include "muzero/trainer.hpp"

namespace muzero {

inline constexpr std::string_view kLossHeader = "step,total_loss,l_r,l_v,l_p,l_g,l_c,lr";
inline constexpr std::string_view kEvalHeader = "step,reward_mean,reward_std";

struct EvalRecord {
    std::uint64_t step = 0;
    double mean = 0.0;
    double stddev = 0.0;
};

std::string loss_row(std::uint64_t step, const LossBreakdown& loss, double lr);
std::string eval_row(const EvalRecord& record);
std::vector<EvalRecord> read_eval_csv(const std::filesystem::path& path);

/// Append-only CSV writer. Opening an existing file keeps its header and the
/// rows whose step is <= keep_through, dropping anything written after that
/// point by an interrupted run.
class CsvLog {
public:
    CsvLog(std::filesystem::path path, std::string_view header,
           std::optional<std::uint64_t> keep_through = std::nullopt);
    void append(const std::string& row);

private:
    std::filesystem::path path_;
};

/// Mixes a stream label into the run seed so every consumer gets an
/// independent generator.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct RunOptions {
    std::optional<std::filesystem::path> resume;
    /// Called after each evaluation; returning false ends the run early.
    std::function<bool(const EvalRecord&)> on_eval;
};

struct RunSummary {
    std::vector<EvalRecord> evaluations;
    double final_mean = 0.0;
    double final_std = 0.0;
    std::size_t final_count = 0;
    std::uint64_t steps_completed = 0;
    bool stopped_early = false;
};

/// Optional pretraining, then alternating self-play episodes and learner
/// steps (train_ratio learner steps per environment step). Writes into
/// config.output_dir: config.cfg, losses.csv, eval.csv, pretrain_losses.csv,
/// checkpoint.bin, checkpoints/step_*.bin and summary.csv.
RunSummary run_training(RunConfig config, const RunOptions& options = {});

/// Mean and standard deviation over the evaluations with
/// step > last_step - window.
std::pair<double, double> final_window_stats(const std::vector<EvalRecord>& evals,
                                             std::uint64_t last_step, std::uint64_t window,
                                             std::size_t* count = nullptr);

struct EvalReport {
    std::uint64_t step = 0;
    EvaluationResult result;
};

EvalReport run_evaluation(const std::filesystem::path& checkpoint, std::size_t episodes,
                          std::uint64_t seed);

struct PlotSeries {
    std::string label;
    std::vector<EvalRecord> points;
};

/// Reward-versus-step line chart as a standalone SVG document.
std::string render_reward_plot(const std::vector<PlotSeries>& series, const std::string& title);

}  // namespace muzero
