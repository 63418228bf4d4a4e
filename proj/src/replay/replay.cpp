#include "muzero/replay.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "muzero/errors.hpp"

namespace muzero {

void GameHistory::validate() const {
    const auto n = actions.size();
    if (observations.size() != n + 1)
        throw std::invalid_argument("game: expected " + std::to_string(n + 1) + " observations, got " +
                                    std::to_string(observations.size()));
    if (rewards.size() != n || policies.size() != n || search_values.size() != n)
        throw std::invalid_argument("game: rewards, policies and search values must match actions");
    if (!priorities.empty() && priorities.size() != n)
        throw std::invalid_argument("game: priority count must match positions");
    for (const auto& p : policies) {
        double total = 0.0;
        for (double v : p) {
            if (!(v >= 0.0)) throw std::invalid_argument("game: negative policy entry");
            total += v;
        }
        if (std::abs(total - 1.0) > 1e-6) throw std::invalid_argument("game: policy does not sum to 1");
    }
}

double compute_z(const GameHistory& game, std::size_t t, std::size_t td_steps, double discount) {
    const auto end = game.length();
    if (t > end) throw std::invalid_argument("compute_z: position past the final observation");
    double z = 0.0;
    double scale = 1.0;
    const auto steps = std::min(td_steps, end - t);
    for (std::size_t i = 0; i < steps; ++i) {
        z += scale * game.rewards[t + i];
        scale *= discount;
    }
    if (t + td_steps < end) z += scale * game.search_values[t + td_steps];
    return z;
}

TrainingTarget make_target(const GameHistory& game, std::size_t t, std::size_t unroll_steps,
                           std::size_t td_steps, double discount, std::size_t action_count) {
    const auto end = game.length();
    const std::vector<double> uniform(action_count, 1.0 / static_cast<double>(action_count));
    TrainingTarget target;
    target.observations.reserve(unroll_steps + 1);
    for (std::size_t k = 0; k <= unroll_steps; ++k) {
        const auto i = t + k;
        const bool inside = i <= end;
        target.mask.push_back(inside ? 1 : 0);
        target.observations.push_back(game.observations[std::min(i, end)]);
        target.values.push_back(i < end ? compute_z(game, i, td_steps, discount) : 0.0);
        target.policies.push_back(i < end ? game.policies[i] : uniform);
        target.rewards.push_back(k > 0 && inside ? game.rewards[i - 1] : 0.0);
        if (k > 0) target.actions.push_back(i - 1 < end ? game.actions[i - 1] : 0);
    }
    return target;
}

ReplayBuffer::ReplayBuffer(ReplayConfig config, std::uint64_t seed)
    : config_(config), rng_(seed) {
    if (config_.capacity == 0) throw ConfigError("replay buffer capacity must be positive");
}

void ReplayBuffer::store_game(GameHistory game) {
    game.validate();
    game.priorities.resize(game.length());
    for (std::size_t t = 0; t < game.length(); ++t)
        game.priorities[t] =
            std::abs(game.search_values[t] - compute_z(game, t, config_.td_steps, config_.discount));

    std::lock_guard lock(mutex_);
    total_steps_ += game.length();
    games_.push_back({next_id_++, std::move(game)});
    while (games_.size() > config_.capacity) games_.pop_front();
}

std::vector<double> ReplayBuffer::weights_locked() const {
    std::vector<double> w;
    double total = 0.0;
    for (const auto& e : games_)
        for (double p : e.game.priorities) {
            w.push_back(std::pow(p, config_.priority_exponent));
            total += w.back();
        }
    if (!(total > 0.0)) std::fill(w.begin(), w.end(), 1.0);
    return w;
}

std::vector<double> ReplayBuffer::sampling_probabilities() const {
    std::lock_guard lock(mutex_);
    auto w = weights_locked();
    double total = 0.0;
    for (double v : w) total += v;
    for (auto& v : w) v /= total;
    return w;
}

Batch ReplayBuffer::sample_batch(std::size_t batch_size, std::size_t unroll_steps) {
    std::lock_guard lock(mutex_);
    const auto weights = weights_locked();
    if (weights.empty()) throw StateError("sample_batch on an empty replay buffer");

    std::vector<double> cumulative(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) cumulative[i] = acc += weights[i];
    // Game owning each flat position, for mapping a draw back to (game, t).
    std::vector<std::size_t> starts;
    starts.reserve(games_.size());
    std::size_t offset = 0;
    for (const auto& e : games_) {
        starts.push_back(offset);
        offset += e.game.length();
    }

    std::uniform_real_distribution<double> dist(0.0, acc);
    Batch batch;
    batch.targets.reserve(batch_size);
    batch.indices.reserve(batch_size);
    for (std::size_t b = 0; b < batch_size; ++b) {
        const double u = dist(rng_);
        auto flat = static_cast<std::size_t>(
            std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        flat = std::min(flat, weights.size() - 1);
        // Only reachable when u rounds up to the total: fall back to the last positive weight.
        while (weights[flat] == 0.0 && flat > 0) --flat;
        const auto g = static_cast<std::size_t>(
            std::upper_bound(starts.begin(), starts.end(), flat) - starts.begin() - 1);
        const auto& entry = games_[g];
        const auto t = flat - starts[g];
        batch.indices.push_back({entry.id, t});
        batch.targets.push_back(make_target(entry.game, t, unroll_steps, config_.td_steps,
                                            config_.discount, config_.action_count));
    }
    return batch;
}

void ReplayBuffer::update_priorities(std::span<const SampleIndex> indices,
                                     std::span<const double> errors) {
    if (indices.size() != errors.size())
        throw std::invalid_argument("update_priorities: indices and errors differ in length");
    std::lock_guard lock(mutex_);
    if (games_.empty()) return;
    const auto first_id = games_.front().id;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const auto id = indices[i].game_id;
        if (id < first_id || id - first_id >= games_.size()) continue;
        auto& game = games_[id - first_id].game;
        if (indices[i].position >= game.priorities.size()) continue;
        game.priorities[indices[i].position] = std::abs(errors[i]);
    }
}

std::size_t ReplayBuffer::size() const {
    std::lock_guard lock(mutex_);
    return games_.size();
}

std::uint64_t ReplayBuffer::total_steps() const {
    std::lock_guard lock(mutex_);
    return total_steps_;
}

std::vector<ReplayBuffer::Entry> ReplayBuffer::entries() const {
    std::lock_guard lock(mutex_);
    return {games_.begin(), games_.end()};
}

void ReplayBuffer::clear() {
    std::lock_guard lock(mutex_);
    games_.clear();
}

ReplayBuffer::Snapshot ReplayBuffer::snapshot() const {
    std::lock_guard lock(mutex_);
    return {{games_.begin(), games_.end()}, next_id_, total_steps_, rng_};
}

void ReplayBuffer::restore(Snapshot snapshot) {
    std::lock_guard lock(mutex_);
    games_.assign(std::make_move_iterator(snapshot.entries.begin()),
                  std::make_move_iterator(snapshot.entries.end()));
    next_id_ = snapshot.next_id;
    total_steps_ = snapshot.total_steps;
    rng_ = snapshot.rng;
}

}  // namespace muzero
