#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "muzero/model.hpp"

namespace muzero::mcts {

/// Statistics for one (state, action) edge. `q` is the running mean of the
/// bootstrapped returns G backed up through the edge, i.e. the value of the
/// child state; `reward` is the model's transition reward for the edge.
struct Edge {
    std::uint32_t visits = 0;
    double q = 0.0;
    double prior = 0.0;
    double reward = 0.0;
    int child = -1;
};

struct Node {
    LatentState latent;
    double value = 0.0;  // v from the prediction function at expansion
    std::vector<Edge> edges;
    bool expanded = false;
};

/// Running min/max of the action values seen in one tree.
class MinMaxStats {
public:
    void update(double value);
    /// (q - min) / (max - min) when max > min, otherwise q unchanged.
    double normalize(double q) const;

    double minimum() const { return min_; }
    double maximum() const { return max_; }

private:
    double min_ = std::numeric_limits<double>::infinity();
    double max_ = -std::numeric_limits<double>::infinity();
};

struct SearchTree {
    std::vector<Node> nodes;  // nodes[0] is the root
    MinMaxStats minmax;
};

struct SearchConfig {
    std::size_t num_simulations = 50;
    double discount = 0.997;
    double c1 = 1.25;
    double c2 = 19652.0;
    bool root_noise = true;
    double dirichlet_alpha = 0.25;
    double exploration_fraction = 0.25;
    /// Temperature of the root policy; 0 selects the most visited action.
    double temperature = 1.0;
};

struct SearchResult {
    std::vector<double> policy;
    double value = 0.0;
    std::vector<std::uint32_t> visit_counts;
    Action action = 0;
};

struct PathStep {
    std::size_t node;
    Action action;
};

/// Called once per edge per backup with the return G assigned to that edge.
using BackupObserver = std::function<void(std::size_t node, Action action, double g)>;

/// Action value of an edge as seen from its parent: R(s,a) + discount * Q(s,a).
inline double edge_value(const Edge& e, double discount) { return e.reward + discount * e.q; }

/// pUCT score from an already normalized value term.
double puct_score(double normalized_q, double prior, double parent_visits, double child_visits,
                  double c1, double c2);

/// Argmax of the pUCT score over the node's edges, lowest index on ties.
/// Unvisited edges contribute a value term of 0.
Action select_child(const Node& node, const MinMaxStats& minmax, double c1, double c2,
                    double discount);

/// Creates the root from initial inference. Returns the root value v^0.
double expand_root(SearchTree& tree, const InferenceModel& model,
                   std::span<const double> observation);

struct Expansion {
    std::size_t child;
    double reward;
    double value;
};

/// Runs the dynamics + prediction functions for an unexpanded edge and
/// attaches the resulting node with zeroed edge statistics.
Expansion expand_node(SearchTree& tree, std::size_t node, Action action,
                      const InferenceModel& model);

/// Propagates `leaf_value` from the end of `path` to the root. Returns G^0.
double backup(SearchTree& tree, std::span<const PathStep> path, double leaf_value,
              double discount, const BackupObserver& observer = {});

/// Mixes Dirichlet(alpha) noise into the priors of an expanded node.
void add_root_noise(Node& node, double alpha, double fraction, std::mt19937_64& rng);

/// p_a = N(a)^(1/T) / sum_b N(b)^(1/T); T == 0 gives a one-hot argmax.
std::vector<double> root_policy(std::span<const std::uint32_t> visit_counts, double temperature);

SearchResult run_mcts(const InferenceModel& model, std::span<const double> observation,
                      const SearchConfig& config, std::mt19937_64& rng,
                      SearchTree* tree_out = nullptr, const BackupObserver& observer = {});

struct PlanResult {
    Action action = 0;
    double estimate = 0.0;
    std::vector<Action> sequence;
};

/// Brute force over all action sequences of length `depth`, scoring each by
/// sum_k discount^(k-1) r^k + discount^depth v^depth.
PlanResult exhaustive_plan(const InferenceModel& model, std::span<const double> observation,
                           std::size_t depth, double discount,
                           std::size_t max_sequences = 1u << 20);

}  // namespace muzero::mcts
