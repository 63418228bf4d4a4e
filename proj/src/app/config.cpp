#include "muzero/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <regex>
#include <set>
#include <sstream>

#include "muzero/envs.hpp"
#include "muzero/errors.hpp"

namespace muzero {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
    throw ConfigError("config key '" + key + "': " + why);
}

double parse_double(const std::string& key, const std::string& text) {
    const auto t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
        bad(key, "'" + text + "' is not a number");
    return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
    const auto t = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
        bad(key, "'" + text + "' is not a non-negative integer");
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    const auto t = trim(text);
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
    bad(key, "'" + text + "' is not true/false");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(trim(item));
    return parts;
}

LearningRateSchedule parse_lr(const std::string& key, const std::string& text) {
    // "0.005" or "0.02 * 0.9^(t * 0.001)" or "0.02 * 0.9^(t / 1000)"
    static const std::regex decayed(
        R"(^\s*([^\s*]+)\s*\*\s*([^\s^]+)\s*\^\s*\(\s*t\s*([*/])\s*([^\s)]+)\s*\)\s*$)");
    std::smatch m;
    LearningRateSchedule lr;
    if (std::regex_match(text, m, decayed)) {
        lr.initial = parse_double(key, m[1]);
        lr.decay_rate = parse_double(key, m[2]);
        const double k = parse_double(key, m[4]);
        if (!(k > 0.0)) bad(key, "decay scale must be positive");
        lr.decay_steps = m[3] == "*" ? 1.0 / k : k;
    } else {
        lr.initial = parse_double(key, text);
        lr.decay_rate = 1.0;
        lr.decay_steps = 1.0;
    }
    return lr;
}

std::string format_lr(const LearningRateSchedule& lr) {
    if (lr.decay_rate == 1.0) return format_double(lr.initial);
    return format_double(lr.initial) + " * " + format_double(lr.decay_rate) + "^(t / " +
           format_double(lr.decay_steps) + ")";
}

TemperatureSchedule parse_temperature(const std::string& key, const std::string& text) {
    // "0.35" or "1.0, 0.5@5000, 0.25@7500"
    TemperatureSchedule s;
    s.thresholds.clear();
    for (const auto& part : split(text, ',')) {
        const auto at = part.find('@');
        if (at == std::string::npos) {
            if (!s.thresholds.empty()) bad(key, "only the first entry may omit '@step'");
            s.thresholds.emplace_back(0, parse_double(key, part));
        } else {
            s.thresholds.emplace_back(parse_uint(key, part.substr(at + 1)),
                                      parse_double(key, part.substr(0, at)));
        }
    }
    if (s.thresholds.empty()) bad(key, "empty schedule");
    return s;
}

std::string format_temperature(const TemperatureSchedule& s) {
    std::string out;
    for (std::size_t i = 0; i < s.thresholds.size(); ++i) {
        if (i > 0) out += ", ";
        out += format_double(s.thresholds[i].second);
        if (i > 0) out += "@" + std::to_string(s.thresholds[i].first);
    }
    return out;
}

std::vector<std::size_t> parse_layers(const std::string& key, const std::string& text) {
    std::vector<std::size_t> layers;
    for (const auto& p : split(text, ',')) layers.push_back(parse_uint(key, p));
    return layers;
}

std::string format_layers(const std::vector<std::size_t>& layers) {
    std::string out;
    for (auto l : layers) out += (out.empty() ? "" : ",") + std::to_string(l);
    return out;
}

LatentScaling parse_scaling(const std::string& key, const std::string& text) {
    const auto t = trim(text);
    if (t == "none") return LatentScaling::None;
    if (t == "tanh") return LatentScaling::Tanh;
    if (t == "minmax") return LatentScaling::MinMax;
    bad(key, "'" + text + "' is not one of none, tanh, minmax");
}

std::string format_scaling(LatentScaling s) {
    switch (s) {
    case LatentScaling::None: return "none";
    case LatentScaling::Tanh: return "tanh";
    case LatentScaling::MinMax: return "minmax";
    }
    return "minmax";
}

struct Field {
    std::string key;
    bool table_row;
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define MZ_UINT(name, member, row)                                                        \
    Field {                                                                               \
        name, row,                                                                        \
            [](RunConfig& c, const std::string& k, const std::string& v) {                \
                c.member = static_cast<decltype(c.member)>(parse_uint(k, v));             \
            },                                                                            \
            [](const RunConfig& c) { return std::to_string(c.member); }                   \
    }
#define MZ_REAL(name, member, row)                                                                 \
    Field {                                                                                        \
        name, row,                                                                                 \
            [](RunConfig& c, const std::string& k, const std::string& v) { c.member = parse_double(k, v); }, \
            [](const RunConfig& c) { return format_double(c.member); }                             \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> f = {
        {"env", false, [](RunConfig& c, const std::string&, const std::string& v) { c.env = trim(v); },
         [](const RunConfig& c) { return c.env; }},
        MZ_UINT("training_steps", training_steps, true),
        MZ_REAL("discount", discount, true),
        MZ_UINT("td_steps", td_steps, true),
        MZ_UINT("unroll_steps", unroll_steps, true),
        MZ_UINT("state_dim", state_dim, true),
        {"learning_rate", true,
         [](RunConfig& c, const std::string& k, const std::string& v) { c.learning_rate = parse_lr(k, v); },
         [](const RunConfig& c) { return format_lr(c.learning_rate); }},
        MZ_REAL("value_loss_weight", value_loss_weight, true),
        MZ_REAL("l2_weight", l2_weight, true),
        MZ_UINT("buffer_size", buffer_size, true),
        MZ_REAL("priority_exponent", priority_exponent, true),
        MZ_UINT("batch_size", batch_size, true),
        MZ_UINT("simulations", simulations, true),
        MZ_REAL("dirichlet_alpha", dirichlet_alpha, true),
        MZ_REAL("exploration_fraction", exploration_fraction, true),
        MZ_REAL("puct_c1", puct_c1, true),
        MZ_REAL("puct_c2", puct_c2, true),
        {"temperature", true,
         [](RunConfig& c, const std::string& k, const std::string& v) { c.temperature = parse_temperature(k, v); },
         [](const RunConfig& c) { return format_temperature(c.temperature); }},
        MZ_REAL("reconstruction_weight", reconstruction_weight, false),
        MZ_REAL("consistency_weight", consistency_weight, false),
        MZ_UINT("seed", seed, false),
        MZ_UINT("pretrain_steps", pretrain_steps, false),
        MZ_UINT("pretrain_episodes", pretrain_episodes, false),
        {"hidden_layers", false,
         [](RunConfig& c, const std::string& k, const std::string& v) { c.hidden_layers = parse_layers(k, v); },
         [](const RunConfig& c) { return format_layers(c.hidden_layers); }},
        {"latent_scaling", false,
         [](RunConfig& c, const std::string& k, const std::string& v) { c.latent_scaling = parse_scaling(k, v); },
         [](const RunConfig& c) { return format_scaling(c.latent_scaling); }},
        MZ_REAL("train_ratio", train_ratio, false),
        MZ_UINT("eval_interval", eval_interval, false),
        MZ_UINT("eval_episodes", eval_episodes, false),
        MZ_UINT("checkpoint_interval", checkpoint_interval, false),
        MZ_UINT("final_window", final_window, false),
        MZ_UINT("max_episode_steps", max_episode_steps, false),
        {"parallel", false,
         [](RunConfig& c, const std::string& k, const std::string& v) { c.parallel = parse_bool(k, v); },
         [](const RunConfig& c) { return std::string(c.parallel ? "true" : "false"); }},
        {"output_dir", false,
         [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = trim(v); },
         [](const RunConfig& c) { return c.output_dir; }},
    };
    return f;
}

#undef MZ_UINT
#undef MZ_REAL

void require(bool ok, const std::string& key, const std::string& why) {
    if (!ok) bad(key, why);
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

bool operator==(const RunConfig& a, const RunConfig& b) { return format_config(a) == format_config(b); }

const std::vector<std::string>& table_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& f : fields())
            if (f.table_row) k.push_back(f.key);
        return k;
    }();
    return keys;
}

const std::vector<std::string>& all_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& f : fields()) k.push_back(f.key);
        return k;
    }();
    return keys;
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
    for (const auto& f : fields())
        if (f.key == key) return f.set(config, key, value);
    throw ConfigError("unknown config key '" + key + "'");
}

RunConfig parse_config(std::string_view text) {
    RunConfig config;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        if (!seen.insert(key).second) bad(key, "given more than once");
        set_config_value(config, key, line.substr(eq + 1));
    }
    validate(config);
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string format_config(const RunConfig& config) {
    std::string out;
    for (const auto& f : fields()) out += f.key + " = " + f.get(config) + "\n";
    return out;
}

void validate(const RunConfig& c) {
    require(c.env == "cartpole" || c.env == "landerlite", "env", "must be cartpole or landerlite");
    require(c.discount >= 0.0 && c.discount <= 1.0, "discount", "must lie in [0, 1]");
    require(c.td_steps >= 1, "td_steps", "must be at least 1");
    require(c.unroll_steps >= 1, "unroll_steps", "must be at least 1");
    require(c.state_dim >= 1, "state_dim", "must be at least 1");
    require(c.learning_rate.initial > 0.0, "learning_rate", "initial rate must be positive");
    require(c.learning_rate.decay_rate > 0.0 && c.learning_rate.decay_rate <= 1.0, "learning_rate",
            "decay rate must lie in (0, 1]");
    require(c.learning_rate.decay_steps > 0.0, "learning_rate", "decay interval must be positive");
    require(c.value_loss_weight >= 0.0, "value_loss_weight", "must be non-negative");
    require(c.l2_weight >= 0.0, "l2_weight", "must be non-negative");
    require(c.buffer_size >= 1, "buffer_size", "must be at least 1");
    require(c.priority_exponent >= 0.0, "priority_exponent", "must be non-negative");
    require(c.batch_size >= 1, "batch_size", "must be at least 1");
    require(c.simulations >= 1, "simulations", "must be at least 1");
    require(c.dirichlet_alpha > 0.0, "dirichlet_alpha", "must be positive");
    require(c.exploration_fraction >= 0.0 && c.exploration_fraction <= 1.0, "exploration_fraction",
            "must lie in [0, 1]");
    require(c.puct_c1 >= 0.0, "puct_c1", "must be non-negative");
    require(c.puct_c2 > 0.0, "puct_c2", "must be positive");
    require(!c.temperature.thresholds.empty() && c.temperature.thresholds.front().first == 0,
            "temperature", "schedule must start at step 0");
    for (std::size_t i = 0; i < c.temperature.thresholds.size(); ++i) {
        require(c.temperature.thresholds[i].second > 0.0, "temperature", "values must be positive");
        if (i > 0)
            require(c.temperature.thresholds[i].first > c.temperature.thresholds[i - 1].first,
                    "temperature", "steps must increase");
    }
    require(c.reconstruction_weight >= 0.0, "reconstruction_weight", "must be non-negative");
    require(c.consistency_weight >= 0.0, "consistency_weight", "must be non-negative");
    require(c.pretrain_steps == 0 || c.pretrain_episodes >= 1, "pretrain_episodes",
            "must be at least 1 when pretraining");
    require(!c.hidden_layers.empty(), "hidden_layers", "needs at least one layer");
    for (auto h : c.hidden_layers) require(h >= 1, "hidden_layers", "widths must be positive");
    require(c.train_ratio > 0.0, "train_ratio", "must be positive");
    require(c.eval_interval >= 1, "eval_interval", "must be at least 1");
    require(c.eval_episodes >= 1, "eval_episodes", "must be at least 1");
    require(c.checkpoint_interval >= 1, "checkpoint_interval", "must be at least 1");
    require(!c.output_dir.empty(), "output_dir", "must not be empty");
}

ModelConfig model_config(const RunConfig& config) {
    const auto env = envs::make_environment(config.env, config.max_episode_steps);
    const auto spec = env->spec();
    return {spec.observation_dim, spec.action_count, config.state_dim, config.hidden_layers,
            config.latent_scaling};
}

mcts::SearchConfig search_config(const RunConfig& config) {
    mcts::SearchConfig s;
    s.num_simulations = config.simulations;
    s.discount = config.discount;
    s.c1 = config.puct_c1;
    s.c2 = config.puct_c2;
    s.root_noise = true;
    s.dirichlet_alpha = config.dirichlet_alpha;
    s.exploration_fraction = config.exploration_fraction;
    s.temperature = config.temperature(0);
    return s;
}

TrainSettings train_settings(const RunConfig& config) {
    TrainSettings s;
    s.batch_size = config.batch_size;
    s.unroll_steps = config.unroll_steps;
    s.weights = {1.0, config.value_loss_weight, 1.0, config.reconstruction_weight,
                 config.consistency_weight};
    s.l2_weight = config.l2_weight;
    s.learning_rate = config.learning_rate;
    s.loss_options.auxiliary_paths = config.reconstruction_weight > 0.0 || config.consistency_weight > 0.0;
    s.parallel = config.parallel;
    return s;
}

ReplayConfig replay_config(const RunConfig& config) {
    const auto model = model_config(config);
    return {config.buffer_size, config.priority_exponent, config.td_steps, config.discount,
            model.action_count};
}

}  // namespace muzero
