#include "muzero/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "muzero/errors.hpp"

namespace muzero::nn {

std::size_t ParamStore::add_layer(std::string name, std::size_t rows, std::size_t cols) {
    LayerSlice slice;
    slice.name = std::move(name);
    slice.rows = rows;
    slice.cols = cols;
    slice.weight_offset = values_.size();
    slice.bias_offset = slice.weight_offset + rows * cols;
    values_.resize(slice.end(), 0.0);
    grads_.resize(slice.end(), 0.0);
    layout_.push_back(std::move(slice));
    return layout_.size() - 1;
}

void ParamStore::zero_grad() { std::fill(grads_.begin(), grads_.end(), 0.0); }

Mlp::Mlp(ParamStore& store, const std::string& name, std::vector<std::size_t> sizes,
         Activation hidden)
    : sizes_(std::move(sizes)), hidden_(hidden) {
    if (sizes_.size() < 2) throw ConfigError("mlp '" + name + "' needs at least two layer sizes");
    for (std::size_t i = 0; i + 1 < sizes_.size(); ++i) {
        if (sizes_[i] == 0 || sizes_[i + 1] == 0)
            throw ConfigError("mlp '" + name + "' has a zero-width layer");
        auto idx = store.add_layer(name + "." + std::to_string(i), sizes_[i + 1], sizes_[i]);
        layers_.push_back(store.layout()[idx]);
    }
}

void Mlp::check_input(std::span<const double> theta, std::span<const double> input) const {
    if (input.size() != input_size())
        throw ConfigError("mlp input has length " + std::to_string(input.size()) + ", expected " +
                          std::to_string(input_size()));
    if (theta.size() < param_end()) throw ConfigError("parameter vector too short for mlp");
}

namespace {

void dense(const LayerSlice& layer, std::span<const double> theta, std::span<const double> x,
           std::span<double> y) {
    const double* w = theta.data() + layer.weight_offset;
    const double* b = theta.data() + layer.bias_offset;
    for (std::size_t o = 0; o < layer.rows; ++o) {
        const double* row = w + o * layer.cols;
        double acc = b[o];
        for (std::size_t i = 0; i < layer.cols; ++i) acc += row[i] * x[i];
        y[o] = acc;
    }
}

}  // namespace

std::vector<double> Mlp::evaluate(std::span<const double> theta,
                                  std::span<const double> input) const {
    check_input(theta, input);
    std::vector<double> x(input.begin(), input.end());
    std::vector<double> y;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        y.assign(layers_[l].rows, 0.0);
        dense(layers_[l], theta, x, y);
        if (l + 1 < layers_.size() && hidden_ == Activation::Tanh)
            for (auto& v : y) v = std::tanh(v);
        std::swap(x, y);
    }
    return x;
}

Tape Mlp::record(std::span<const double> theta, std::span<const double> input) const {
    check_input(theta, input);
    Tape tape;
    tape.owner = param_begin();
    tape.activations.reserve(layers_.size() + 1);
    tape.activations.emplace_back(input.begin(), input.end());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        std::vector<double> y(layers_[l].rows);
        dense(layers_[l], theta, tape.activations.back(), y);
        if (l + 1 < layers_.size() && hidden_ == Activation::Tanh)
            for (auto& v : y) v = std::tanh(v);
        tape.activations.push_back(std::move(y));
    }
    return tape;
}

std::vector<double> Mlp::backward(std::span<const double> theta, const Tape& tape,
                                  std::span<const double> output_grad,
                                  std::span<double> param_grad) const {
    if (tape.owner != param_begin() || tape.activations.size() != layers_.size() + 1)
        throw std::logic_error("tape was not recorded by this network");
    for (std::size_t i = 0; i < tape.activations.size(); ++i)
        if (tape.activations[i].size() != sizes_[i])
            throw std::logic_error("tape shape does not match network");
    if (output_grad.size() != output_size())
        throw std::logic_error("output gradient has wrong length");
    if (param_grad.size() < param_end()) throw std::logic_error("gradient buffer too short");

    std::vector<double> delta(output_grad.begin(), output_grad.end());
    std::vector<double> prev;
    for (std::size_t l = layers_.size(); l-- > 0;) {
        const auto& layer = layers_[l];
        const auto& x = tape.activations[l];
        const double* w = theta.data() + layer.weight_offset;
        double* gw = param_grad.data() + layer.weight_offset;
        double* gb = param_grad.data() + layer.bias_offset;

        prev.assign(layer.cols, 0.0);
        for (std::size_t o = 0; o < layer.rows; ++o) {
            const double d = delta[o];
            gb[o] += d;
            const double* row = w + o * layer.cols;
            double* grow = gw + o * layer.cols;
            for (std::size_t i = 0; i < layer.cols; ++i) {
                grow[i] += d * x[i];
                prev[i] += row[i] * d;
            }
        }
        // x is the tanh output of the previous layer unless it is the raw input.
        if (l > 0 && hidden_ == Activation::Tanh)
            for (std::size_t i = 0; i < prev.size(); ++i) prev[i] *= 1.0 - x[i] * x[i];
        std::swap(delta, prev);
    }
    return delta;
}

void adam_step(ParamStore& params, AdamState& opt, double lr, double l2_weight) {
    auto theta = params.values();
    auto grad = params.grads();
    if (opt.m.size() != theta.size() || opt.v.size() != theta.size())
        throw ConfigError("optimizer state does not match parameter count");
    opt.t += 1;
    const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.t));
    const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.t));
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double g = grad[i] + 2.0 * l2_weight * theta[i];
        opt.m[i] = opt.beta1 * opt.m[i] + (1.0 - opt.beta1) * g;
        opt.v[i] = opt.beta2 * opt.v[i] + (1.0 - opt.beta2) * g * g;
        const double m_hat = opt.m[i] / c1;
        const double v_hat = opt.v[i] / c2;
        theta[i] -= lr * m_hat / (std::sqrt(v_hat) + opt.eps);
    }
    params.zero_grad();
}

std::vector<double> softmax(std::span<const double> logits, double temperature) {
    if (logits.empty()) throw std::invalid_argument("softmax of an empty array");
    if (!(temperature > 0.0)) throw std::invalid_argument("softmax temperature must be positive");
    const double top = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp((logits[i] - top) / temperature);
        total += out[i];
    }
    for (auto& p : out) p /= total;
    return out;
}

double mse(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::logic_error("mse operands differ in length");
    if (a.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

void mse_grad(std::span<const double> a, std::span<const double> b, double scale,
              std::span<double> out) {
    if (a.size() != b.size() || out.size() != a.size())
        throw std::logic_error("mse_grad operands differ in length");
    const double k = 2.0 * scale / static_cast<double>(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += k * (a[i] - b[i]);
}

double cross_entropy(std::span<const double> target, std::span<const double> predicted) {
    if (target.size() != predicted.size())
        throw std::logic_error("cross_entropy operands differ in length");
    double acc = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i)
        acc -= target[i] * std::log(predicted[i] + kProbEpsilon);
    return acc;
}

void softmax_cross_entropy_grad(std::span<const double> target, std::span<const double> logits,
                                double scale, std::span<double> out) {
    if (target.size() != logits.size() || out.size() != logits.size())
        throw std::logic_error("cross_entropy gradient operands differ in length");
    const auto p = softmax(logits);
    // dL/dz_j = -w_j + p_j * sum_i w_i with w_i = target_i * p_i / (p_i + eps)
    std::vector<double> w(p.size());
    double w_sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        w[i] = target[i] * p[i] / (p[i] + kProbEpsilon);
        w_sum += w[i];
    }
    for (std::size_t j = 0; j < p.size(); ++j) out[j] += scale * (p[j] * w_sum - w[j]);
}

}  // namespace muzero::nn
