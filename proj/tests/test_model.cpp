#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "muzero/errors.hpp"
#include "muzero/model.hpp"
#include "support.hpp"

using namespace muzero;

namespace {

std::size_t mlp_params(const std::vector<std::size_t>& sizes) {
    std::size_t n = 0;
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) n += sizes[i] * sizes[i + 1] + sizes[i + 1];
    return n;
}

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

TEST(Network, ParameterCountClosedForm) {
    const ModelConfig cfg{4, 2, 8, {64, 64}};
    const Network net(cfg);
    const std::size_t expected = mlp_params({4, 64, 64, 8}) + mlp_params({8 + 2, 64, 64, 8 + 1}) +
                                 mlp_params({8, 64, 64, 2 + 1}) + mlp_params({8, 64, 64, 4});
    EXPECT_EQ(net.param_count(), expected);

    const Network lander(ModelConfig{4, 2, 10, {32}});
    EXPECT_EQ(lander.param_count(), mlp_params({4, 32, 10}) + mlp_params({12, 32, 11}) +
                                        mlp_params({10, 32, 3}) + mlp_params({10, 32, 4}));
}

TEST(Network, InitIsSeededAndBounded) {
    const Network net(ModelConfig{});
    const auto a = net.init_params(1), b = net.init_params(1), c = net.init_params(2);
    EXPECT_TRUE(a == b);
    EXPECT_FALSE(a.values()[0] == c.values()[0] && a.values()[1] == c.values()[1]);
    for (const auto& L : a.layout()) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(L.cols));
        for (std::size_t i = 0; i < L.weight_count(); ++i)
            EXPECT_LE(std::abs(a.values()[L.weight_offset + i]), bound);
        for (std::size_t i = 0; i < L.rows; ++i) EXPECT_EQ(a.values()[L.bias_offset + i], 0.0);
    }
}

TEST(Network, InitialInferenceShapes) {
    const Network net(ModelConfig{});
    const auto p = net.init_params(3);
    const std::vector<double> obs{0.01, -0.02, 0.03, 0.04};
    const auto out = net.initial_inference(p.values(), obs);
    EXPECT_EQ(out.latent.size(), 8u);
    EXPECT_EQ(out.reward, 0.0);
    EXPECT_EQ(out.policy_logits.size(), 2u);
    const auto pi = nn::softmax(out.policy_logits);
    EXPECT_NEAR(pi[0] + pi[1], 1.0, 1e-12);

    const auto again = net.initial_inference(p.values(), obs);
    EXPECT_EQ(out.latent, again.latent);
    EXPECT_EQ(out.value, again.value);
    EXPECT_EQ(out.policy_logits, again.policy_logits);

    EXPECT_THROW(net.initial_inference(p.values(), std::vector<double>{1.0, 2.0}), ConfigError);
}

TEST(Network, RecurrentInferenceShapesAndErrors) {
    const Network net(ModelConfig{});
    const auto p = net.init_params(4);
    const auto s0 = net.initial_inference(p.values(), std::vector<double>{0.1, 0.2, 0.3, 0.4}).latent;
    const auto copy = s0;
    for (Action a = 0; a < 2; ++a) {
        const auto out = net.recurrent_inference(p.values(), s0, a);
        EXPECT_EQ(out.latent.size(), 8u);
        EXPECT_TRUE(all_finite(out.latent));
        EXPECT_TRUE(std::isfinite(out.reward));
    }
    EXPECT_EQ(s0, copy);
    EXPECT_THROW(net.recurrent_inference(p.values(), s0, 2), std::invalid_argument);
    EXPECT_THROW(net.recurrent_inference(p.values(), std::vector<double>(5, 0.0), 0), ConfigError);
}

TEST(Network, ZeroRewardHeadGivesZeroReward) {
    const Network net(ModelConfig{});
    auto p = net.init_params(5);
    // The reward is the last output row of the dynamics network's final layer.
    const auto& last = net.dynamics().layers().back();
    const std::size_t row = last.rows - 1;
    for (std::size_t i = 0; i < last.cols; ++i) p.values()[last.weight_offset + row * last.cols + i] = 0.0;
    p.values()[last.bias_offset + row] = 0.0;
    std::mt19937_64 rng(1);
    for (int i = 0; i < 10; ++i) {
        const auto s = oracle::uniform_vector(rng, 8, -3.0, 3.0);
        EXPECT_EQ(net.recurrent_inference(p.values(), s, i % 2).reward, 0.0);
    }
}

TEST(Network, UnrollEqualsComposition) {
    const Network net(ModelConfig{});
    const auto p = net.init_params(6);
    const std::vector<double> obs{0.02, 0.1, -0.03, -0.2};
    const std::vector<Action> actions{1, 0, 1};

    LatentState s = net.initial_inference(p.values(), obs).latent;
    std::vector<ModelOutput> chained;
    for (Action a : actions) {
        chained.push_back(net.recurrent_inference(p.values(), s, a));
        s = chained.back().latent;
    }

    auto scale = [](std::vector<double> v) { return oracle::scale_latent(v, LatentScaling::MinMax); };
    // Manual composition straight from the four networks.
    LatentState m = scale(net.representation().evaluate(p.values(), obs));
    for (std::size_t k = 0; k < actions.size(); ++k) {
        std::vector<double> in = m;
        in.push_back(actions[k] == 0 ? 1.0 : 0.0);
        in.push_back(actions[k] == 1 ? 1.0 : 0.0);
        const auto d = net.dynamics().evaluate(p.values(), in);
        m = scale(std::vector<double>(d.begin(), d.end() - 1));
        EXPECT_EQ(chained[k].latent, m);
        EXPECT_EQ(chained[k].reward, d.back());
        const auto f = net.prediction().evaluate(p.values(), m);
        EXPECT_EQ(chained[k].value, f.back());
        EXPECT_EQ(chained[k].policy_logits, std::vector<double>(f.begin(), f.end() - 1));
    }
}

TEST(Network, LatentScalingModes) {
    ModelConfig cfg;
    cfg.latent_scaling = LatentScaling::None;
    const Network raw(cfg);
    cfg.latent_scaling = LatentScaling::Tanh;
    const Network tanh_net(cfg);
    cfg.latent_scaling = LatentScaling::MinMax;
    const Network minmax(cfg);
    ASSERT_EQ(minmax.param_count(), raw.param_count());
    auto p = minmax.init_params(8);
    for (auto& x : p.values()) x *= 20.0;  // large weights push raw latents far outside [0, 1]
    const std::vector<double> obs{1.0, -2.0, 0.5, 3.0};
    const auto sr = raw.initial_inference(p.values(), obs).latent;
    const auto st = tanh_net.initial_inference(p.values(), obs).latent;
    const auto sm = minmax.initial_inference(p.values(), obs).latent;
    bool exceeds = false;
    for (std::size_t i = 0; i < sr.size(); ++i) {
        EXPECT_EQ(st[i], std::tanh(sr[i]));
        exceeds |= std::abs(sr[i]) > 1.0;
    }
    EXPECT_TRUE(exceeds);
    EXPECT_EQ(*std::min_element(sm.begin(), sm.end()), 0.0);
    EXPECT_NEAR(*std::max_element(sm.begin(), sm.end()), 1.0, 1e-15);
    const auto want = oracle::scale_latent(sr, LatentScaling::MinMax);
    for (std::size_t i = 0; i < sm.size(); ++i) EXPECT_NEAR(sm[i], want[i], 1e-15);
    for (Action a = 0; a < 2; ++a)
        for (double x : minmax.recurrent_inference(p.values(), sm, a).latent) {
            EXPECT_GE(x, 0.0);
            EXPECT_LE(x, 1.0);
        }
}

TEST(Network, MinMaxOfConstantVectorIsZero) {
    const Network net(ModelConfig{});
    std::vector<double> v(8, 3.5);
    net.squash(v);
    for (double x : v) EXPECT_EQ(x, 0.0);
    std::vector<double> g(8, 1.0);
    net.squash_backward(std::vector<double>(8, 3.5), g);
    for (double x : g) EXPECT_TRUE(std::isfinite(x));
}

TEST(Network, Reconstruction) {
    const Network net(ModelConfig{});
    auto p = net.init_params(7);
    const std::vector<double> s(8, 0.3);
    EXPECT_EQ(net.reconstruct(p.values(), s).size(), 4u);
    const auto& r = net.reconstruction();
    for (std::size_t i = r.param_begin(); i < r.param_end(); ++i) p.values()[i] = 0.0;
    for (double x : net.reconstruct(p.values(), s)) EXPECT_EQ(x, 0.0);
}

TEST(Network, OutputsFiniteForFiniteInputs) {
    const Network net(ModelConfig{});
    std::mt19937_64 rng(9);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto p = net.init_params(seed);
        const auto obs = oracle::uniform_vector(rng, 4, -1e3, 1e3);
        const auto out = net.initial_inference(p.values(), obs);
        EXPECT_TRUE(all_finite(out.latent));
        EXPECT_TRUE(all_finite(out.policy_logits));
        EXPECT_TRUE(std::isfinite(out.value));
        EXPECT_TRUE(all_finite(net.reconstruct(p.values(), out.latent)));
    }
}

TEST(Network, ReconstructionOfEncodingLearns) {
    // Train h^-1(h(o)) to reproduce o on a fixed batch, with the Adam
    // optimizer acting as its own oracle: the error must fall every step.
    const Network net(ModelConfig{4, 2, 8, {32}});
    auto p = net.init_params(11);
    nn::AdamState opt(net.param_count());
    std::mt19937_64 rng(12);
    std::vector<std::vector<double>> batch;
    for (int i = 0; i < 16; ++i) batch.push_back(oracle::uniform_vector(rng, 4, -1.0, 1.0));

    auto batch_error = [&] {
        double e = 0.0;
        for (const auto& o : batch) {
            const auto s = net.representation().evaluate(p.values(), o);
            e += nn::mse(net.reconstruct(p.values(), s), o);
        }
        return e / static_cast<double>(batch.size());
    };

    double prev = batch_error();
    for (int step = 0; step < 100; ++step) {
        p.zero_grad();
        for (const auto& o : batch) {
            const auto th = net.representation().record(p.values(), o);
            const auto tr = net.reconstruction().record(p.values(), th.output());
            std::vector<double> g(4, 0.0);
            nn::mse_grad(tr.output(), o, 1.0 / static_cast<double>(batch.size()), g);
            const auto ds = net.reconstruction().backward(p.values(), tr, g, p.grads());
            net.representation().backward(p.values(), th, ds, p.grads());
        }
        nn::adam_step(p, opt, 1e-3, 0.0);
        const double now = batch_error();
        EXPECT_LT(now, prev) << "step " << step;
        prev = now;
    }
}
