#pragma once

#include <cstdint>
#include <deque>
#include <mutex>
#include <random>
#include <span>
#include <vector>

#include "muzero/model.hpp"

namespace muzero {

/// One episode. Position t in [0, length()) has an observation, the search
/// policy and value computed there, the action taken and the reward received;
/// observations carries one extra entry for the final state.
struct GameHistory {
    std::vector<Observation> observations;
    std::vector<Action> actions;
    std::vector<double> rewards;
    std::vector<std::vector<double>> policies;
    std::vector<double> search_values;
    std::vector<double> priorities;

    std::size_t length() const { return actions.size(); }

    /// Throws std::invalid_argument when the sequence lengths disagree or a
    /// policy is not a distribution.
    void validate() const;

    friend bool operator==(const GameHistory&, const GameHistory&) = default;
};

/// z_t: up to n discounted rewards after t, plus discount^n * nu_{t+n} when
/// t + n is still inside the episode.
double compute_z(const GameHistory& game, std::size_t t, std::size_t td_steps, double discount);

/// Targets for one sampled position, unrolled K steps. Step k refers to
/// position t + k; steps past the end of the episode have mask 0, zero
/// reward/value targets, a uniform policy target and repeat the last
/// observation. rewards[0] is unused (no transition leads to step 0).
struct TrainingTarget {
    std::vector<Observation> observations;
    std::vector<Action> actions;  // actions[k - 1] leads from step k - 1 to k
    std::vector<double> rewards;
    std::vector<double> values;
    std::vector<std::vector<double>> policies;
    std::vector<std::uint8_t> mask;

    std::size_t unroll_steps() const { return actions.size(); }
};

TrainingTarget make_target(const GameHistory& game, std::size_t t, std::size_t unroll_steps,
                           std::size_t td_steps, double discount, std::size_t action_count);

struct SampleIndex {
    std::uint64_t game_id = 0;
    std::size_t position = 0;

    friend bool operator==(const SampleIndex&, const SampleIndex&) = default;
};

struct Batch {
    std::vector<TrainingTarget> targets;
    std::vector<SampleIndex> indices;
};

struct ReplayConfig {
    std::size_t capacity = 500;
    double priority_exponent = 0.5;
    std::size_t td_steps = 50;
    double discount = 0.997;
    std::size_t action_count = 2;
};

/// Bounded FIFO of games with per-position prioritized sampling. All public
/// operations lock the buffer, so actors and a learner may share it.
class ReplayBuffer {
public:
    struct Entry {
        std::uint64_t id = 0;
        GameHistory game;

        friend bool operator==(const Entry&, const Entry&) = default;
    };

    /// Complete buffer contents, used for checkpointing.
    struct Snapshot {
        std::vector<Entry> entries;
        std::uint64_t next_id = 0;
        std::uint64_t total_steps = 0;
        std::mt19937_64 rng;
    };

    ReplayBuffer(ReplayConfig config, std::uint64_t seed);

    const ReplayConfig& config() const { return config_; }

    /// Sets initial priorities to |nu_t - z_t| and evicts the oldest game when full.
    void store_game(GameHistory game);

    Batch sample_batch(std::size_t batch_size, std::size_t unroll_steps);

    /// Replaces priorities with |error|; indices of evicted games are ignored.
    void update_priorities(std::span<const SampleIndex> indices, std::span<const double> errors);

    /// Normalized sampling probability for every stored position, in storage order.
    std::vector<double> sampling_probabilities() const;

    std::size_t size() const;
    std::uint64_t total_steps() const;
    std::vector<Entry> entries() const;
    void clear();

    Snapshot snapshot() const;
    void restore(Snapshot snapshot);

private:
    std::vector<double> weights_locked() const;

    ReplayConfig config_;
    mutable std::mutex mutex_;
    std::deque<Entry> games_;
    std::uint64_t next_id_ = 0;
    std::uint64_t total_steps_ = 0;
    std::mt19937_64 rng_;
};

}  // namespace muzero
