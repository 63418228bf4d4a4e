#include "muzero/mcts.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace muzero::mcts {

void MinMaxStats::update(double value) {
    min_ = std::min(min_, value);
    max_ = std::max(max_, value);
}

double MinMaxStats::normalize(double q) const {
    if (max_ > min_) return (q - min_) / (max_ - min_);
    return q;
}

double puct_score(double normalized_q, double prior, double parent_visits, double child_visits,
                  double c1, double c2) {
    const double exploration = prior * std::sqrt(parent_visits) / (1.0 + child_visits) *
                               (c1 + std::log((parent_visits + c2 + 1.0) / c2));
    return normalized_q + exploration;
}

Action select_child(const Node& node, const MinMaxStats& minmax, double c1, double c2,
                    double discount) {
    if (!node.expanded || node.edges.empty()) throw std::logic_error("select_child on unexpanded node");
    double parent_visits = 0.0;
    for (const auto& e : node.edges) parent_visits += e.visits;

    Action best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (Action a = 0; a < node.edges.size(); ++a) {
        const auto& e = node.edges[a];
        const double q = e.visits > 0 ? minmax.normalize(edge_value(e, discount)) : 0.0;
        const double score = puct_score(q, e.prior, parent_visits, e.visits, c1, c2);
        if (score > best_score) {
            best_score = score;
            best = a;
        }
    }
    return best;
}

namespace {

Node make_node(const ModelOutput& out) {
    Node node;
    node.latent = out.latent;
    node.value = out.value;
    const auto priors = nn::softmax(out.policy_logits);
    node.edges.resize(priors.size());
    for (std::size_t a = 0; a < priors.size(); ++a) node.edges[a].prior = priors[a];
    node.expanded = true;
    return node;
}

}  // namespace

double expand_root(SearchTree& tree, const InferenceModel& model,
                   std::span<const double> observation) {
    tree.nodes.clear();
    tree.minmax = MinMaxStats{};
    tree.nodes.push_back(make_node(model.initial_inference(observation)));
    return tree.nodes.front().value;
}

Expansion expand_node(SearchTree& tree, std::size_t node, Action action,
                      const InferenceModel& model) {
    if (node >= tree.nodes.size()) throw std::logic_error("expand_node: no such node");
    if (action >= tree.nodes[node].edges.size()) throw std::invalid_argument("expand_node: bad action");
    if (tree.nodes[node].edges[action].child >= 0)
        throw std::logic_error("expand_node: edge already expanded");

    const auto out = model.recurrent_inference(tree.nodes[node].latent, action);
    tree.nodes.push_back(make_node(out));
    const auto child = tree.nodes.size() - 1;
    auto& edge = tree.nodes[node].edges[action];
    edge.child = static_cast<int>(child);
    edge.reward = out.reward;
    return {child, out.reward, out.value};
}

double backup(SearchTree& tree, std::span<const PathStep> path, double leaf_value,
              double discount, const BackupObserver& observer) {
    double g = leaf_value;
    for (std::size_t i = path.size(); i-- > 0;) {
        auto& edge = tree.nodes[path[i].node].edges[path[i].action];
        edge.q = (edge.visits * edge.q + g) / (edge.visits + 1.0);
        edge.visits += 1;
        tree.minmax.update(edge_value(edge, discount));
        if (observer) observer(path[i].node, path[i].action, g);
        g = edge.reward + discount * g;
    }
    return g;
}

void add_root_noise(Node& node, double alpha, double fraction, std::mt19937_64& rng) {
    if (!node.expanded) throw std::logic_error("add_root_noise on unexpanded node");
    if (fraction == 0.0) return;
    std::gamma_distribution<double> gamma(alpha, 1.0);
    std::vector<double> noise(node.edges.size());
    double total = 0.0;
    for (auto& n : noise) {
        n = gamma(rng);
        total += n;
    }
    for (std::size_t a = 0; a < noise.size(); ++a) {
        const double eta = total > 0.0 ? noise[a] / total : 1.0 / static_cast<double>(noise.size());
        node.edges[a].prior = (1.0 - fraction) * node.edges[a].prior + fraction * eta;
    }
}

std::vector<double> root_policy(std::span<const std::uint32_t> visit_counts, double temperature) {
    if (temperature < 0.0) throw std::invalid_argument("root_policy: negative temperature");
    const auto top_it = std::max_element(visit_counts.begin(), visit_counts.end());
    if (top_it == visit_counts.end() || *top_it == 0)
        throw std::logic_error("root_policy: no visits recorded");
    std::vector<double> policy(visit_counts.size(), 0.0);
    if (temperature == 0.0) {
        policy[static_cast<std::size_t>(top_it - visit_counts.begin())] = 1.0;
        return policy;
    }
    // Computed relative to the largest count so small temperatures do not overflow.
    const double log_top = std::log(static_cast<double>(*top_it));
    double total = 0.0;
    for (std::size_t a = 0; a < visit_counts.size(); ++a) {
        if (visit_counts[a] == 0) continue;
        policy[a] = std::exp((std::log(static_cast<double>(visit_counts[a])) - log_top) / temperature);
        total += policy[a];
    }
    for (auto& p : policy) p /= total;
    return policy;
}

namespace {

Action sample(std::span<const double> policy, std::mt19937_64& rng) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0.0;
    Action last_positive = 0;
    for (Action a = 0; a < policy.size(); ++a) {
        if (policy[a] <= 0.0) continue;
        acc += policy[a];
        last_positive = a;
        if (u < acc) return a;
    }
    return last_positive;
}

}  // namespace

SearchResult run_mcts(const InferenceModel& model, std::span<const double> observation,
                      const SearchConfig& config, std::mt19937_64& rng, SearchTree* tree_out,
                      const BackupObserver& observer) {
    if (config.num_simulations < 1) throw std::invalid_argument("run_mcts needs at least one simulation");
    SearchTree local;
    SearchTree& tree = tree_out ? *tree_out : local;
    expand_root(tree, model, observation);
    if (config.root_noise)
        add_root_noise(tree.nodes[0], config.dirichlet_alpha, config.exploration_fraction, rng);

    std::vector<PathStep> path;
    for (std::size_t sim = 0; sim < config.num_simulations; ++sim) {
        path.clear();
        std::size_t node = 0;
        double leaf_value = 0.0;
        while (true) {
            const Action a = select_child(tree.nodes[node], tree.minmax, config.c1, config.c2,
                                          config.discount);
            path.push_back({node, a});
            const int child = tree.nodes[node].edges[a].child;
            if (child < 0) {
                leaf_value = expand_node(tree, node, a, model).value;
                break;
            }
            node = static_cast<std::size_t>(child);
        }
        backup(tree, path, leaf_value, config.discount, observer);
    }

    SearchResult result;
    const auto& root = tree.nodes[0];
    result.visit_counts.reserve(root.edges.size());
    for (const auto& e : root.edges) result.visit_counts.push_back(e.visits);
    result.policy = root_policy(result.visit_counts, config.temperature);
    for (Action a = 0; a < root.edges.size(); ++a)
        if (root.edges[a].visits > 0)
            result.value += result.policy[a] * edge_value(root.edges[a], config.discount);
    result.action = config.temperature == 0.0 ? static_cast<Action>(std::max_element(
                                                    result.policy.begin(), result.policy.end()) -
                                                                   result.policy.begin())
                                              : sample(result.policy, rng);
    return result;
}

namespace {

struct Enumerator {
    const InferenceModel& model;
    std::size_t depth;
    double discount;
    PlanResult best;
    bool have_best = false;
    std::vector<Action> prefix;

    void visit(const LatentState& latent, double partial, double scale) {
        if (prefix.size() == depth) return;
        for (Action a = 0; a < model.action_count(); ++a) {
            const auto out = model.recurrent_inference(latent, a);
            prefix.push_back(a);
            const double ret = partial + scale * out.reward;
            if (prefix.size() == depth) {
                const double estimate = ret + scale * discount * out.value;
                if (!have_best || estimate > best.estimate) {
                    best.estimate = estimate;
                    best.sequence = prefix;
                    best.action = prefix.front();
                    have_best = true;
                }
            } else {
                visit(out.latent, ret, scale * discount);
            }
            prefix.pop_back();
        }
    }
};

}  // namespace

PlanResult exhaustive_plan(const InferenceModel& model, std::span<const double> observation,
                           std::size_t depth, double discount, std::size_t max_sequences) {
    const auto root = model.initial_inference(observation);
    if (depth == 0) return {0, root.value, {}};

    std::size_t count = 1;
    for (std::size_t k = 0; k < depth; ++k) {
        if (count > max_sequences / std::max<std::size_t>(model.action_count(), 1))
            throw std::invalid_argument("exhaustive_plan: enumeration budget exceeded");
        count *= model.action_count();
    }
    if (count > max_sequences) throw std::invalid_argument("exhaustive_plan: enumeration budget exceeded");

    Enumerator e{model, depth, discount, {}, false, {}};
    e.visit(root.latent, 0.0, 1.0);
    return e.best;
}

}  // namespace muzero::mcts
