// Command-line front end: train, eval and plot.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "muzero/checkpoint.hpp"
#include "muzero/errors.hpp"
#include "muzero/run.hpp"

namespace fs = std::filesystem;
using namespace muzero;

namespace {

void configure_logging() {
    if (const char* level = std::getenv("MUZERO_LOG_LEVEL"))
        spdlog::set_level(spdlog::level::from_str(level));
}

std::string series_label(const std::string& arg, fs::path& path) {
    if (const auto eq = arg.find('='); eq != std::string::npos) {
        path = arg.substr(eq + 1);
        return arg.substr(0, eq);
    }
    path = arg;
    if (path.filename() == "eval.csv" && path.has_parent_path() && !path.parent_path().filename().empty())
        return path.parent_path().filename().string();
    return path.stem().string();
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();
    CLI::App app{"MuZero with reconstruction and consistency losses"};
    app.require_subcommand(1);

    auto* train = app.add_subcommand("train", "Run pretraining (optional) and the training loop");
    std::string config_path;
    std::optional<std::uint64_t> pretrain_steps, seed;
    std::optional<std::string> out_dir, resume;
    std::vector<std::string> overrides;
    train->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    train->add_option("--pretrain-steps", pretrain_steps, "Self-supervised pretraining steps");
    train->add_option("--seed", seed, "Run seed");
    train->add_option("--out", out_dir, "Output directory");
    train->add_option("--resume", resume, "Continue from a checkpoint")->check(CLI::ExistingFile);
    train->add_option("--set", overrides, "Override a config key (key=value), repeatable");

    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint greedily");
    std::string checkpoint;
    std::size_t episodes = 10;
    std::uint64_t eval_seed = 0;
    std::optional<std::string> report;
    eval->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
    eval->add_option("--episodes", episodes, "Number of episodes")->check(CLI::PositiveNumber);
    eval->add_option("--seed", eval_seed, "Evaluation seed");
    eval->add_option("--report", report, "Write the report to this CSV file");

    auto* plot = app.add_subcommand("plot", "Render reward curves from evaluation CSV files");
    std::string plot_out, title = "Total episode reward";
    std::vector<std::string> inputs;
    plot->add_option("--out", plot_out, "Output SVG file")->required();
    plot->add_option("--title", title, "Chart title");
    plot->add_option("csv", inputs, "Evaluation CSV files, optionally label=path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) {
            RunConfig config = load_config(config_path);
            for (const auto& kv : overrides) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
                set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
            }
            if (pretrain_steps) config.pretrain_steps = *pretrain_steps;
            if (seed) config.seed = *seed;
            if (out_dir) config.output_dir = *out_dir;
            validate(config);
            RunOptions options;
            if (resume) options.resume = fs::path(*resume);
            const auto summary = run_training(config, options);
            std::cout << "steps " << summary.steps_completed << "; final " << config.final_window
                      << "-step reward " << format_double(summary.final_mean) << " +/- "
                      << format_double(summary.final_std) << " over " << summary.final_count
                      << " evaluations\n";
        } else if (*eval) {
            const auto r = run_evaluation(checkpoint, episodes, eval_seed);
            std::cout << "checkpoint step " << r.step << ": reward " << format_double(r.result.mean)
                      << " +/- " << format_double(r.result.stddev) << " over " << episodes << " episodes\n";
            if (report) {
                std::ofstream out(*report);
                out << "step,episodes,seed,reward_mean,reward_std\n"
                    << r.step << ',' << episodes << ',' << eval_seed << ',' << format_double(r.result.mean)
                    << ',' << format_double(r.result.stddev) << '\n';
                if (!out) throw std::runtime_error("cannot write " + *report);
            }
        } else if (*plot) {
            std::vector<PlotSeries> series;
            for (const auto& arg : inputs) {
                fs::path path;
                PlotSeries s;
                s.label = series_label(arg, path);
                s.points = read_eval_csv(path);
                if (s.points.empty()) throw std::runtime_error(path.string() + " has no data rows");
                series.push_back(std::move(s));
            }
            std::ofstream out(plot_out);
            out << render_reward_plot(series, title);
            if (!out) throw std::runtime_error("cannot write " + plot_out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const CheckpointError& e) {
        std::cerr << "checkpoint error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
