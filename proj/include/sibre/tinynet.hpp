#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sibre/rng.hpp"

namespace sibre::tinynet {

struct Matrix {
    int rows = 0, cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

enum class Activation { Tanh, Relu };

enum class Head {
    Linear,    // raw outputs (values, Q-values)
    Softmax,   // probabilities over discrete actions
    Gaussian,  // [mean..., log_std...]; log_std squashed into a bounded range
};

/// Fully connected net, weights row-major (out x in). The Gaussian head
/// expects an even final width: first half means (linear), second half raw
/// log-std mapped smoothly into [log_std_low, log_std_high].
struct DenseNet {
    std::vector<int> dims;
    Activation activation = Activation::Tanh;
    Head head = Head::Linear;
    double log_std_low = -5.0;
    double log_std_high = 2.0;

    std::vector<Matrix> weights;  // weights[l]: dims[l+1] x dims[l]
    std::vector<std::vector<double>> biases;

    int input_dim() const { return dims.front(); }
    int output_dim() const { return dims.back(); }
    std::size_t parameter_count() const;
};

/// Gradients mirroring a DenseNet's parameter shapes.
struct GradientSet {
    std::vector<Matrix> d_weights;
    std::vector<std::vector<double>> d_biases;

    void scale(double factor);
    void accumulate(const GradientSet& other);
    double global_norm() const;
    /// Rescales so the global L2 norm is at most max_norm (no-op when within).
    void clip_by_global_norm(double max_norm);
};

DenseNet make_net(std::vector<int> dims, Activation act, Head head, Rng& rng);
GradientSet zero_gradients(const DenseNet& net);

std::vector<double> forward(const DenseNet& net, const std::vector<double>& input);

/// Reverse-mode gradient of <upstream, output> with respect to every
/// parameter. Exact for the forward map including the head transform.
GradientSet backward(const DenseNet& net, const std::vector<double>& input,
                     const std::vector<double>& upstream);

/// As backward(), additionally returning d<upstream, output>/d input.
GradientSet backward(const DenseNet& net, const std::vector<double>& input,
                     const std::vector<double>& upstream, std::vector<double>* input_gradient);

struct SgdState {};

struct AdamState {
    double beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8;
    long t = 0;
    std::vector<double> m, v;  // flattened first/second moments
};

void sgd_step(DenseNet& net, const GradientSet& grads, double learning_rate);
void adam_step(DenseNet& net, const GradientSet& grads, AdamState& state, double learning_rate);

/// Parameters as one flat vector (layer by layer, weights then bias).
std::vector<double> flatten_parameters(const DenseNet& net);
void load_parameters(DenseNet& net, const std::vector<double>& flat);

/// CSV checkpoint: header with dims/activation/head, then one value per line.
std::string dump_parameters_csv(const DenseNet& net);
DenseNet load_parameters_csv(const std::string& csv);

}  // namespace sibre::tinynet
