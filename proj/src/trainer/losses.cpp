#include "muzero/losses.hpp"

#include <stdexcept>

namespace muzero {

LossBreakdown& LossBreakdown::operator+=(const LossBreakdown& o) {
    reward += o.reward;
    value += o.value;
    policy += o.policy;
    reconstruction += o.reconstruction;
    consistency += o.consistency;
    total += o.total;
    return *this;
}

LossBreakdown& LossBreakdown::operator*=(double s) {
    reward *= s;
    value *= s;
    policy *= s;
    reconstruction *= s;
    consistency *= s;
    total *= s;
    return *this;
}

namespace {

std::size_t valid_steps(const TrainingTarget& target) {
    std::size_t n = 0;
    while (n < target.mask.size() && target.mask[n]) ++n;
    return n;
}

}  // namespace

std::vector<LatentState> consistency_targets(const Network& network, std::span<const double> theta,
                                             const TrainingTarget& target) {
    const auto steps = valid_steps(target);
    std::vector<LatentState> out;
    out.reserve(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        out.push_back(network.representation().evaluate(theta, target.observations[k]));
        network.squash(out.back());
    }
    return out;
}

SampleLoss unroll_loss(const Network& network, std::span<const double> theta,
                       const TrainingTarget& target, const LossWeights& weights,
                       const std::vector<LatentState>* latent_targets, std::span<double> grad,
                       const LossOptions& options) {
    const auto& cfg = network.config();
    const auto d = cfg.latent_dim;
    const auto a = cfg.action_count;
    const auto steps = valid_steps(target);
    if (steps == 0) return {};
    if (target.observations.size() != target.mask.size() ||
        target.actions.size() + 1 != target.mask.size())
        throw std::invalid_argument("training target has inconsistent step counts");

    const bool use_reconstruction = options.auxiliary_paths;
    const bool use_consistency = options.auxiliary_paths && latent_targets != nullptr;
    if (options.auxiliary_paths && weights.consistency > 0.0 && latent_targets == nullptr)
        throw std::logic_error("consistency weight set but no latent targets supplied");
    if (use_consistency && latent_targets->size() < steps)
        throw std::invalid_argument("too few consistency targets for the unroll");

    const bool train_prediction = weights.value > 0.0 || weights.policy > 0.0;
    const bool train_reconstruction = use_reconstruction && weights.reconstruction > 0.0;
    const bool train_consistency = use_consistency && weights.consistency > 0.0;

    const auto& h = network.representation();
    const auto& g = network.dynamics();
    const auto& f = network.prediction();
    const auto& recon = network.reconstruction();

    std::vector<nn::Tape> g_tapes(steps);
    std::vector<nn::Tape> f_tapes(steps);
    std::vector<nn::Tape> recon_tapes(steps);
    std::vector<LatentState> raw_latents(steps);
    std::vector<LatentState> latents(steps);
    std::vector<double> rewards(steps, 0.0);

    SampleLoss result;
    auto& loss = result.loss;

    nn::Tape h_tape = h.record(theta, target.observations[0]);
    for (std::size_t k = 0; k < steps; ++k) {
        if (k == 0) {
            latents[0].assign(h_tape.output().begin(), h_tape.output().end());
        } else {
            g_tapes[k] = g.record(theta, network.dynamics_input(latents[k - 1], target.actions[k - 1]));
            latents[k].assign(g_tapes[k].output().begin(), g_tapes[k].output().begin() + static_cast<std::ptrdiff_t>(d));
            rewards[k] = g_tapes[k].output()[d];
            const double err = rewards[k] - target.rewards[k];
            loss.reward += err * err;
        }
        raw_latents[k] = latents[k];
        network.squash(latents[k]);
        const auto& latent = latents[k];

        f_tapes[k] = f.record(theta, latent);
        const auto out = f_tapes[k].output();
        const double value = out[a];
        if (k == 0) result.initial_value = value;
        const double verr = value - target.values[k];
        loss.value += verr * verr;
        loss.policy += nn::cross_entropy(target.policies[k], nn::softmax(out.first(a)));

        if (use_reconstruction) {
            recon_tapes[k] = recon.record(theta, latent);
            loss.reconstruction += nn::mse(target.observations[k], recon_tapes[k].output());
        }
        if (use_consistency) loss.consistency += nn::mse((*latent_targets)[k], latent);
    }
    loss.total = weights.reward * loss.reward + weights.value * loss.value +
                 weights.policy * loss.policy + weights.reconstruction * loss.reconstruction +
                 weights.consistency * loss.consistency;

    // Reverse pass. `carry` is dL/ds^k flowing back from step k + 1.
    std::vector<double> carry(d, 0.0);
    std::vector<double> head_grad(a + 1);
    std::vector<double> recon_grad(cfg.observation_dim);
    std::vector<double> dyn_grad(d + 1);
    for (std::size_t k = steps; k-- > 0;) {
        const auto& latent = latents[k];
        std::vector<double> ds = carry;

        if (train_prediction) {
            const auto out = f_tapes[k].output();
            std::fill(head_grad.begin(), head_grad.end(), 0.0);
            if (weights.policy > 0.0)
                nn::softmax_cross_entropy_grad(target.policies[k], out.first(a), weights.policy,
                                               std::span(head_grad).first(a));
            head_grad[a] = 2.0 * weights.value * (out[a] - target.values[k]);
            const auto in = f.backward(theta, f_tapes[k], head_grad, grad);
            for (std::size_t i = 0; i < d; ++i) ds[i] += in[i];
        }
        if (train_reconstruction) {
            std::fill(recon_grad.begin(), recon_grad.end(), 0.0);
            nn::mse_grad(recon_tapes[k].output(), target.observations[k], weights.reconstruction,
                         recon_grad);
            const auto in = recon.backward(theta, recon_tapes[k], recon_grad, grad);
            for (std::size_t i = 0; i < d; ++i) ds[i] += in[i];
        }
        if (train_consistency) nn::mse_grad(latent, (*latent_targets)[k], weights.consistency, ds);
        network.squash_backward(raw_latents[k], ds);

        if (k == 0) {
            h.backward(theta, h_tape, ds, grad);
        } else {
            std::copy(ds.begin(), ds.end(), dyn_grad.begin());
            dyn_grad[d] = weights.reward > 0.0
                              ? 2.0 * weights.reward * (rewards[k] - target.rewards[k])
                              : 0.0;
            const auto in = g.backward(theta, g_tapes[k], dyn_grad, grad);
            std::copy(in.begin(), in.begin() + static_cast<std::ptrdiff_t>(d), carry.begin());
        }
    }
    return result;
}

SampleLoss compute_losses(const Network& network, std::span<const double> theta,
                          const TrainingTarget& target, const LossWeights& weights,
                          std::span<double> grad, const LossOptions& options) {
    if (!options.auxiliary_paths) return unroll_loss(network, theta, target, weights, nullptr, grad, options);
    const auto latents = consistency_targets(network, theta, target);
    return unroll_loss(network, theta, target, weights, &latents, grad, options);
}

}  // namespace muzero
