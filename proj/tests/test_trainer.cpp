#include <cmath>
#include <memory>
#include <random>

#include <gtest/gtest.h>

#include "muzero/trainer.hpp"
#include "support.hpp"

using namespace muzero;

namespace {

const ModelConfig kConfig{4, 2, 8, {16}};

ReplayConfig replay_config() {
    ReplayConfig c;
    c.capacity = 50;
    c.td_steps = 10;
    c.discount = 0.997;
    return c;
}

TrainSettings small_settings() {
    TrainSettings s;
    s.batch_size = 16;
    s.unroll_steps = 5;
    s.weights = {1.0, 1.0, 1.0, 1.0, 1.0};
    s.learning_rate = {0.005, 0.9, 1000.0};
    return s;
}

std::unique_ptr<ReplayBuffer> filled_buffer(std::uint64_t seed, std::size_t games = 10) {
    auto buf = std::make_unique<ReplayBuffer>(replay_config(), seed);
    envs::CartPole env;
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < games; ++i) buf->store_game(random_episode(env, rng));
    return buf;
}

double block_norm(std::span<const double> g, std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += g[i] * g[i];
    return s;
}

}  // namespace

TEST(Schedules, LearningRate) {
    const LearningRateSchedule lr{0.02, 0.9, 1000.0};
    EXPECT_DOUBLE_EQ(lr(0), 0.02);
    EXPECT_NEAR(lr(1000), 0.018, 1e-15);
    EXPECT_NEAR(lr(3000), 0.02 * 0.729, 1e-15);
    EXPECT_NEAR(lr(500), 0.02 * std::sqrt(0.9), 1e-15);
    for (std::uint64_t t = 0; t < 5000; t += 250) EXPECT_GT(lr(t), lr(t + 1));
}

TEST(Schedules, Temperature) {
    const TemperatureSchedule ts;
    EXPECT_EQ(ts(0), 1.0);
    EXPECT_EQ(ts(4999), 1.0);
    EXPECT_EQ(ts(5000), 0.5);
    EXPECT_EQ(ts(7499), 0.5);
    EXPECT_EQ(ts(7500), 0.25);
    EXPECT_EQ(ts(1000000), 0.25);
    EXPECT_EQ(TemperatureSchedule{{}}(10), 1.0);
    const TemperatureSchedule late{{{100, 0.3}}};
    EXPECT_EQ(late(0), 0.3);
    EXPECT_EQ(late(200), 0.3);
}

TEST(SelfPlay, RandomEpisodesAreUniform) {
    envs::CartPole env;
    std::mt19937_64 rng(1);
    double ones = 0.0, total = 0.0;
    for (int i = 0; i < 200; ++i) {
        const auto g = random_episode(env, rng);
        EXPECT_NO_THROW(g.validate());
        for (std::size_t t = 0; t < g.length(); ++t) {
            EXPECT_EQ(g.policies[t], (std::vector<double>{0.5, 0.5}));
            EXPECT_EQ(g.search_values[t], 0.0);
            EXPECT_EQ(g.rewards[t], 1.0);
            ones += static_cast<double>(g.actions[t]);
            total += 1.0;
        }
    }
    // Chi-square with one degree of freedom; the 0.999 quantile is 10.83.
    const double zeros = total - ones, e = total / 2.0;
    EXPECT_LT((ones - e) * (ones - e) / e + (zeros - e) * (zeros - e) / e, 10.83);
}

TEST(SelfPlay, EpisodeRecordsSearchOutputs) {
    const Network net(kConfig);
    const auto p = net.init_params(2);
    const NetworkModel model(net, p.values());
    envs::CartPole env;
    mcts::SearchConfig search;
    search.num_simulations = 10;
    std::mt19937_64 a(3), b(3);
    const auto g1 = self_play_episode(model, env, search, a);
    const auto g2 = self_play_episode(model, env, search, b);
    EXPECT_EQ(g1, g2);
    EXPECT_NO_THROW(g1.validate());
    EXPECT_GE(g1.length(), 1u);
    for (double v : g1.search_values) EXPECT_TRUE(std::isfinite(v));
    // Zero value and reward heads: every search value is exactly zero.
    for (double v : g1.search_values) EXPECT_EQ(v, 0.0);
}

TEST(TrainStep, ParallelMatchesSerialBitForBit) {
    const Network net(kConfig);
    auto settings = small_settings();
    auto pa = net.init_params(4), pb = pa;
    nn::AdamState oa(net.param_count()), ob(net.param_count());
    auto ba = filled_buffer(5), bb = filled_buffer(5);
    LossWorkspace wa, wb;
    for (std::uint64_t t = 0; t < 5; ++t) {
        settings.parallel = false;
        const auto la = train_step(net, pa, oa, *ba, settings, t, wa);
        settings.parallel = true;
        const auto lb = train_step(net, pb, ob, *bb, settings, t, wb);
        EXPECT_EQ(la, lb);
    }
    EXPECT_TRUE(pa == pb);
    EXPECT_TRUE(oa == ob);
    EXPECT_EQ(ba->entries(), bb->entries());
}

TEST(TrainStep, UpdatesPrioritiesFromInitialValue) {
    const Network net(kConfig);
    auto p = net.init_params(6);
    nn::AdamState opt(net.param_count());
    auto buf = filled_buffer(7, 3);
    ReplayBuffer probe(replay_config(), 0);
    probe.restore(buf->snapshot());
    const auto batch = probe.sample_batch(16, 5);  // the batch train_step will draw
    LossWorkspace ws;
    auto settings = small_settings();
    const std::vector<double> theta(p.values().begin(), p.values().end());
    train_step(net, p, opt, *buf, settings, 0, ws);

    const auto entries = buf->entries();
    for (std::size_t i = 0; i < batch.indices.size(); ++i) {
        const auto& idx = batch.indices[i];
        const auto v0 = net.initial_inference(theta, batch.targets[i].observations[0]).value;
        const auto& game = entries[idx.game_id - entries.front().id].game;
        EXPECT_NEAR(game.priorities[idx.position], std::abs(v0 - batch.targets[i].values[0]), 1e-12);
    }
}

TEST(TrainStep, BaselineDegenerates) {
    // With zero auxiliary weights, switching the auxiliary code paths off
    // must not change a single bit of the losses or the parameters.
    const Network net(kConfig);
    auto settings = small_settings();
    settings.weights = {1.0, 1.0, 1.0, 0.0, 0.0};
    settings.learning_rate = {0.02, 0.9, 1000.0};
    auto pa = net.init_params(8), pb = pa;
    nn::AdamState oa(net.param_count()), ob(net.param_count());
    auto ba = filled_buffer(9), bb = filled_buffer(9);
    LossWorkspace wa, wb;
    for (std::uint64_t t = 0; t < 50; ++t) {
        settings.loss_options.auxiliary_paths = true;
        const auto la = train_step(net, pa, oa, *ba, settings, t, wa);
        settings.loss_options.auxiliary_paths = false;
        const auto lb = train_step(net, pb, ob, *bb, settings, t, wb);
        EXPECT_EQ(la.total, lb.total) << "step " << t;
        EXPECT_EQ(la.reward, lb.reward);
        EXPECT_EQ(la.value, lb.value);
        EXPECT_EQ(la.policy, lb.policy);
        ASSERT_TRUE(pa == pb) << "step " << t;
    }
}

TEST(Pretraining, SettingsKeepOnlyAuxiliaryTerms) {
    auto s = small_settings();
    s.loss_options.auxiliary_paths = false;
    const auto pre = pretraining_settings(s);
    EXPECT_EQ(pre.weights, (LossWeights{0.0, 0.0, 0.0, 1.0, 1.0}));
    EXPECT_TRUE(pre.loss_options.auxiliary_paths);
    EXPECT_EQ(pre.batch_size, s.batch_size);
}

TEST(Pretraining, HeadGradientsAreExactlyZero) {
    const Network net(kConfig);
    std::mt19937_64 rng(10);
    const auto theta = oracle::uniform_vector(rng, net.param_count(), -0.5, 0.5);
    auto buf = filled_buffer(11);
    const auto batch = buf->sample_batch(16, 5);
    const auto pre = pretraining_settings(small_settings());
    std::vector<double> grad(theta.size());
    LossWorkspace ws;
    batch_loss_serial(net, theta, batch.targets, pre.weights, pre.loss_options, grad, ws);

    EXPECT_EQ(block_norm(grad, net.prediction().param_begin(), net.prediction().param_end()), 0.0);
    const auto& last = net.dynamics().layers().back();
    const std::size_t row = last.rows - 1;
    for (std::size_t i = 0; i < last.cols; ++i) EXPECT_EQ(grad[last.weight_offset + row * last.cols + i], 0.0);
    EXPECT_EQ(grad[last.bias_offset + row], 0.0);
    EXPECT_GT(block_norm(grad, net.representation().param_begin(), net.representation().param_end()), 0.0);
    EXPECT_GT(block_norm(grad, net.reconstruction().param_begin(), net.reconstruction().param_end()), 0.0);
}

TEST(Pretraining, HeldOutReconstructionImproves) {
    const Network net(kConfig);
    auto p = net.init_params(12);
    nn::AdamState opt(net.param_count());
    auto buf = filled_buffer(13, 30);
    auto held_out = filled_buffer(14, 10)->sample_batch(64, 5);
    auto settings = small_settings();

    auto held_out_loss = [&] {
        std::vector<double> g(net.param_count());
        LossWorkspace ws;
        return batch_loss_serial(net, p.values(), held_out.targets, {0, 0, 0, 1, 0}, {}, g, ws)
            .mean_loss.reconstruction;
    };
    const double before = held_out_loss();
    std::vector<std::uint64_t> seen;
    LossWorkspace ws;
    pretrain(net, p, opt, *buf, settings, 200, ws,
             [&](std::uint64_t step, const LossBreakdown& loss, double) {
                 seen.push_back(step);
                 EXPECT_NEAR(loss.total, loss.reconstruction + loss.consistency, 1e-12);
             });
    ASSERT_EQ(seen.size(), 200u);
    EXPECT_EQ(seen.front(), 1u);
    EXPECT_EQ(seen.back(), 200u);
    EXPECT_LT(held_out_loss(), 0.5 * before);
    EXPECT_EQ(opt.t, 200u);
}

TEST(Evaluation, GreedyAndSeeded) {
    const Network net(kConfig);
    const auto p = net.init_params(15);
    const NetworkModel model(net, p.values());
    envs::CartPole env;
    mcts::SearchConfig search;
    search.num_simulations = 8;
    const auto a = evaluate(model, env, 3, search, 42);
    const auto b = evaluate(model, env, 3, search, 42);
    EXPECT_EQ(a.totals, b.totals);
    ASSERT_EQ(a.totals.size(), 3u);
    double mean = 0.0;
    for (double t : a.totals) {
        EXPECT_GE(t, 1.0);
        EXPECT_LE(t, 500.0);
        mean += t / 3.0;
    }
    EXPECT_NEAR(a.mean, mean, 1e-12);
    double var = 0.0;
    for (double t : a.totals) var += (t - mean) * (t - mean) / 3.0;
    EXPECT_NEAR(a.stddev, std::sqrt(var), 1e-12);
    EXPECT_EQ(evaluate(model, env, 1, search, 1).stddev, 0.0);
    EXPECT_THROW(evaluate(model, env, 0, search, 1), std::invalid_argument);
}
