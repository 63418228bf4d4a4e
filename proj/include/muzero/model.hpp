#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "muzero/nn.hpp"

namespace muzero {

using Observation = std::vector<double>;
using LatentState = std::vector<double>;
using Action = std::size_t;

/// How the latent outputs of representation and dynamics are bounded.
///   None    raw linear outputs
///   Tanh    elementwise tanh, inside (-1, 1)
///   MinMax  per-vector (x - min) / (max - min), inside [0, 1]
enum class LatentScaling { None, Tanh, MinMax };

struct ModelConfig {
    std::size_t observation_dim = 4;
    std::size_t action_count = 2;
    std::size_t latent_dim = 8;
    std::vector<std::size_t> hidden = {16};
    LatentScaling latent_scaling = LatentScaling::MinMax;

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct ModelOutput {
    LatentState latent;
    double reward = 0.0;
    double value = 0.0;
    std::vector<double> policy_logits;
};

/// What the planner needs from a model. Search only ever talks to this
/// interface; it has no access to the environment.
class InferenceModel {
public:
    virtual ~InferenceModel() = default;
    virtual std::size_t action_count() const = 0;
    virtual ModelOutput initial_inference(std::span<const double> observation) const = 0;
    virtual ModelOutput recurrent_inference(std::span<const double> latent, Action action) const = 0;
};

/// The four learned functions and their layout in one parameter store:
///   representation  observation            -> latent
///   dynamics        latent ++ one_hot(a)   -> latent ++ [reward]
///   prediction      latent                 -> policy logits ++ [value]
///   reconstruction  latent                 -> observation estimate
/// The latent parts of the representation and dynamics outputs are bounded
/// according to latent_scaling; the reward output stays linear.
class Network {
public:
    explicit Network(ModelConfig config);

    const ModelConfig& config() const { return config_; }
    std::size_t param_count() const { return layout_.size(); }

    /// Store with this network's layout, weights drawn uniformly from
    /// [-1/sqrt(fan_in), 1/sqrt(fan_in)] and zero biases. The output layer of
    /// the prediction network and the reward row of the dynamics output are
    /// zero, so an untrained model predicts uniform priors and zero values.
    nn::ParamStore init_params(std::uint64_t seed) const;
    /// Store with this layout and all parameters zero.
    nn::ParamStore zero_params() const { return layout_; }

    const nn::Mlp& representation() const { return representation_; }
    const nn::Mlp& dynamics() const { return dynamics_; }
    const nn::Mlp& prediction() const { return prediction_; }
    const nn::Mlp& reconstruction() const { return reconstruction_; }

    ModelOutput initial_inference(std::span<const double> theta,
                                  std::span<const double> observation) const;
    ModelOutput recurrent_inference(std::span<const double> theta, std::span<const double> latent,
                                    Action action) const;
    Observation reconstruct(std::span<const double> theta, std::span<const double> latent) const;

    std::vector<double> dynamics_input(std::span<const double> latent, Action action) const;

    /// Maps raw latent network outputs to latent states (in place).
    void squash(std::span<double> raw_latent) const;
    /// Turns dL/d(latent) into dL/d(raw output) in place, given the raw
    /// outputs the latent was computed from.
    void squash_backward(std::span<const double> raw_latent, std::span<double> grad) const;

    /// Splits a prediction output into (logits, value) parts of `out`.
    void split_prediction(std::span<const double> raw, ModelOutput& out) const;

private:
    void check_theta(std::span<const double> theta) const;
    void check_latent(std::span<const double> latent) const;

    ModelConfig config_;
    nn::ParamStore layout_;
    nn::Mlp representation_;
    nn::Mlp dynamics_;
    nn::Mlp prediction_;
    nn::Mlp reconstruction_;
};

/// A Network bound to one parameter snapshot.
class NetworkModel final : public InferenceModel {
public:
    NetworkModel(const Network& network, std::span<const double> theta)
        : network_(network), theta_(theta) {}

    std::size_t action_count() const override { return network_.config().action_count; }
    ModelOutput initial_inference(std::span<const double> observation) const override {
        return network_.initial_inference(theta_, observation);
    }
    ModelOutput recurrent_inference(std::span<const double> latent, Action action) const override {
        return network_.recurrent_inference(theta_, latent, action);
    }

private:
    const Network& network_;
    std::span<const double> theta_;
};

}  // namespace muzero
