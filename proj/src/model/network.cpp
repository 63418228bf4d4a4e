#include "muzero/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "muzero/errors.hpp"

namespace muzero {

namespace {

std::vector<std::size_t> chain(std::size_t in, const std::vector<std::size_t>& hidden,
                               std::size_t out) {
    std::vector<std::size_t> sizes{in};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(out);
    return sizes;
}

}  // namespace

Network::Network(ModelConfig config) : config_(std::move(config)) {
    if (config_.observation_dim == 0 || config_.action_count == 0 || config_.latent_dim == 0)
        throw ConfigError("model dimensions must be positive");
    const auto d = config_.latent_dim;
    const auto a = config_.action_count;
    representation_ = nn::Mlp(layout_, "representation", chain(config_.observation_dim, config_.hidden, d));
    dynamics_ = nn::Mlp(layout_, "dynamics", chain(d + a, config_.hidden, d + 1));
    prediction_ = nn::Mlp(layout_, "prediction", chain(d, config_.hidden, a + 1));
    reconstruction_ =
        nn::Mlp(layout_, "reconstruction", chain(d, config_.hidden, config_.observation_dim));
}

nn::ParamStore Network::init_params(std::uint64_t seed) const {
    nn::ParamStore store = layout_;
    std::mt19937_64 rng(seed);
    auto values = store.values();
    for (const auto& layer : store.layout()) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.cols));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (std::size_t i = 0; i < layer.weight_count(); ++i)
            values[layer.weight_offset + i] = dist(rng);
    }
    // Zero the scalar heads: policy logits, value and reward all start at 0.
    const auto& pred = prediction_.layers().back();
    std::fill_n(values.begin() + static_cast<std::ptrdiff_t>(pred.weight_offset), pred.weight_count(), 0.0);
    const auto& dyn = dynamics_.layers().back();
    std::fill_n(values.begin() + static_cast<std::ptrdiff_t>(dyn.weight_offset + (dyn.rows - 1) * dyn.cols),
                dyn.cols, 0.0);
    return store;
}

void Network::check_theta(std::span<const double> theta) const {
    if (theta.size() != layout_.size())
        throw ConfigError("parameter vector has " + std::to_string(theta.size()) +
                          " entries, network expects " + std::to_string(layout_.size()));
}

void Network::check_latent(std::span<const double> latent) const {
    if (latent.size() != config_.latent_dim)
        throw ConfigError("latent state has length " + std::to_string(latent.size()) +
                          ", expected " + std::to_string(config_.latent_dim));
}

std::vector<double> Network::dynamics_input(std::span<const double> latent, Action action) const {
    check_latent(latent);
    if (action >= config_.action_count)
        throw std::invalid_argument("action " + std::to_string(action) + " out of range");
    std::vector<double> x(latent.begin(), latent.end());
    x.resize(config_.latent_dim + config_.action_count, 0.0);
    x[config_.latent_dim + action] = 1.0;
    return x;
}

namespace {

// Ranges below this are widened by it, so a constant vector maps to zeros
// instead of dividing by zero.
constexpr double kMinRange = 1e-5;

struct Extent {
    std::size_t lo = 0, hi = 0;
    double range = 0.0;
};

Extent extent(std::span<const double> x) {
    Extent e;
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (x[i] < x[e.lo]) e.lo = i;
        if (x[i] > x[e.hi]) e.hi = i;
    }
    e.range = x[e.hi] - x[e.lo];
    if (e.range < kMinRange) e.range += kMinRange;
    return e;
}

}  // namespace

void Network::squash(std::span<double> raw_latent) const {
    switch (config_.latent_scaling) {
    case LatentScaling::None:
        return;
    case LatentScaling::Tanh:
        for (auto& x : raw_latent) x = std::tanh(x);
        return;
    case LatentScaling::MinMax: {
        if (raw_latent.empty()) return;
        const auto e = extent(raw_latent);
        const double lo = raw_latent[e.lo];
        for (auto& x : raw_latent) x = (x - lo) / e.range;
        return;
    }
    }
}

void Network::squash_backward(std::span<const double> raw_latent, std::span<double> grad) const {
    switch (config_.latent_scaling) {
    case LatentScaling::None:
        return;
    case LatentScaling::Tanh:
        for (std::size_t i = 0; i < grad.size(); ++i) {
            const double s = std::tanh(raw_latent[i]);
            grad[i] *= 1.0 - s * s;
        }
        return;
    case LatentScaling::MinMax: {
        if (grad.empty()) return;
        // s_i = (x_i - x_lo) / r with r = x_hi - x_lo, so
        // dL/dx_j = g_j / r - [j = lo] (sum g) / r - ([j = hi] - [j = lo]) (sum g s) / r.
        const auto e = extent(raw_latent);
        const double lo = raw_latent[e.lo];
        double sum_g = 0.0, sum_gs = 0.0;
        for (std::size_t i = 0; i < grad.size(); ++i) {
            sum_g += grad[i];
            sum_gs += grad[i] * (raw_latent[i] - lo) / e.range;
        }
        for (auto& g : grad) g /= e.range;
        grad[e.lo] -= (sum_g - sum_gs) / e.range;
        // Below the minimum range the widening constant does not depend on x_hi.
        if (raw_latent[e.hi] - lo >= kMinRange) grad[e.hi] -= sum_gs / e.range;
        return;
    }
    }
}

void Network::split_prediction(std::span<const double> raw, ModelOutput& out) const {
    const auto a = config_.action_count;
    out.policy_logits.assign(raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>(a));
    out.value = raw[a];
}

ModelOutput Network::initial_inference(std::span<const double> theta,
                                       std::span<const double> observation) const {
    check_theta(theta);
    ModelOutput out;
    out.latent = representation_.evaluate(theta, observation);
    squash(out.latent);
    split_prediction(prediction_.evaluate(theta, out.latent), out);
    out.reward = 0.0;
    return out;
}

ModelOutput Network::recurrent_inference(std::span<const double> theta,
                                         std::span<const double> latent, Action action) const {
    check_theta(theta);
    auto raw = dynamics_.evaluate(theta, dynamics_input(latent, action));
    ModelOutput out;
    out.reward = raw.back();
    raw.pop_back();
    squash(raw);
    out.latent = std::move(raw);
    split_prediction(prediction_.evaluate(theta, out.latent), out);
    return out;
}

Observation Network::reconstruct(std::span<const double> theta,
                                 std::span<const double> latent) const {
    check_theta(theta);
    check_latent(latent);
    return reconstruction_.evaluate(theta, latent);
}

}  // namespace muzero
