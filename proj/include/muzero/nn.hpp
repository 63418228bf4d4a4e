#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace muzero::nn {

/// One dense layer's place inside a flat parameter array. Weights are stored
/// row-major (rows = outputs, cols = inputs), followed by the bias vector.
struct LayerSlice {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t weight_offset = 0;
    std::size_t bias_offset = 0;

    std::size_t weight_count() const { return rows * cols; }
    std::size_t end() const { return bias_offset + rows; }

    friend bool operator==(const LayerSlice&, const LayerSlice&) = default;
};

/// Flat parameter vector plus a gradient accumulator of identical shape.
///
/// Layers are appended in order, so every layer occupies a contiguous block
/// and the blocks tile [0, size()) without gaps.
class ParamStore {
public:
    std::size_t add_layer(std::string name, std::size_t rows, std::size_t cols);

    std::size_t size() const { return values_.size(); }
    const std::vector<LayerSlice>& layout() const { return layout_; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    std::span<double> grads() { return grads_; }
    std::span<const double> grads() const { return grads_; }

    void zero_grad();

    friend bool operator==(const ParamStore&, const ParamStore&) = default;

private:
    std::vector<LayerSlice> layout_;
    std::vector<double> values_;
    std::vector<double> grads_;
};

enum class Activation { Tanh, Identity };

/// Activations recorded by Mlp::record. activations[0] is the input and
/// activations[i + 1] the (post-activation) output of layer i.
struct Tape {
    std::size_t owner = 0;
    std::vector<std::vector<double>> activations;

    std::span<const double> output() const { return activations.back(); }
};

/// Fully connected network. Hidden layers use `hidden`; the last layer is
/// always linear (softmax and similar heads are applied by the caller).
class Mlp {
public:
    Mlp() = default;
    Mlp(ParamStore& store, const std::string& name, std::vector<std::size_t> sizes,
        Activation hidden = Activation::Tanh);

    std::size_t input_size() const { return sizes_.front(); }
    std::size_t output_size() const { return sizes_.back(); }
    const std::vector<std::size_t>& sizes() const { return sizes_; }
    const std::vector<LayerSlice>& layers() const { return layers_; }

    /// Half-open range of this network's parameters in the owning store.
    std::size_t param_begin() const { return layers_.front().weight_offset; }
    std::size_t param_end() const { return layers_.back().end(); }

    std::vector<double> evaluate(std::span<const double> theta, std::span<const double> input) const;
    Tape record(std::span<const double> theta, std::span<const double> input) const;

    /// Adds parameter gradients into `param_grad` (full store width) and
    /// returns the gradient with respect to the input.
    std::vector<double> backward(std::span<const double> theta, const Tape& tape,
                                 std::span<const double> output_grad,
                                 std::span<double> param_grad) const;

private:
    void check_input(std::span<const double> theta, std::span<const double> input) const;

    std::vector<std::size_t> sizes_;
    std::vector<LayerSlice> layers_;
    Activation hidden_ = Activation::Tanh;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    AdamState() = default;
    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

    friend bool operator==(const AdamState&, const AdamState&) = default;
};

/// Bias-corrected Adam update. The L2 penalty c * |theta|^2 enters as the
/// gradient term 2 * c * theta. Gradients are zeroed afterwards.
void adam_step(ParamStore& params, AdamState& opt, double lr, double l2_weight);

/// Used inside cross_entropy to keep ln() finite.
inline constexpr double kProbEpsilon = 1e-12;

std::vector<double> softmax(std::span<const double> logits, double temperature = 1.0);

double mse(std::span<const double> a, std::span<const double> b);

/// Adds scale * d mse(a, b) / d a into `out`.
void mse_grad(std::span<const double> a, std::span<const double> b, double scale,
              std::span<double> out);

double cross_entropy(std::span<const double> target, std::span<const double> predicted);

/// Gradient of cross_entropy(target, softmax(logits)) with respect to the
/// logits, scaled by `scale` and added into `out`. Exact including epsilon.
void softmax_cross_entropy_grad(std::span<const double> target, std::span<const double> logits,
                                double scale, std::span<double> out);

}  // namespace muzero::nn
