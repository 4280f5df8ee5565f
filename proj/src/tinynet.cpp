#include "sibre/tinynet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sibre::tinynet {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_input(const DenseNet& net, const std::vector<double>& input) {
    if (static_cast<int>(input.size()) != net.input_dim())
        throw std::invalid_argument("input length does not match net input dim");
}

struct ForwardCache {
    // activations[0] is the input; activations[l+1] the output of layer l
    // (post hidden activation; final layer pre-head)
    std::vector<std::vector<double>> activations;
    std::vector<std::vector<double>> pre_activations;
    std::vector<double> head_output;
};

ForwardCache forward_cached(const DenseNet& net, const std::vector<double>& input) {
    check_input(net, input);
    ForwardCache cache;
    cache.activations.push_back(input);
    int num_layers = static_cast<int>(net.weights.size());
    for (int l = 0; l < num_layers; ++l) {
        const Matrix& w = net.weights[l];
        const std::vector<double>& a = cache.activations.back();
        std::vector<double> z(w.rows);
        for (int i = 0; i < w.rows; ++i) {
            double acc = net.biases[l][i];
            const double* row = &w.data[static_cast<std::size_t>(i) * w.cols];
            for (int j = 0; j < w.cols; ++j) acc += row[j] * a[j];
            z[i] = acc;
        }
        cache.pre_activations.push_back(z);
        bool hidden = l + 1 < num_layers;
        if (hidden) {
            for (double& v : z)
                v = net.activation == Activation::Tanh ? std::tanh(v) : std::max(v, 0.0);
        }
        cache.activations.push_back(std::move(z));
    }

    const std::vector<double>& raw = cache.activations.back();
    switch (net.head) {
        case Head::Linear:
            cache.head_output = raw;
            break;
        case Head::Softmax: {
            double mx = *std::max_element(raw.begin(), raw.end());
            std::vector<double> p(raw.size());
            double sum = 0.0;
            for (std::size_t i = 0; i < raw.size(); ++i) {
                p[i] = std::exp(raw[i] - mx);
                sum += p[i];
            }
            for (double& v : p) v /= sum;
            cache.head_output = std::move(p);
            break;
        }
        case Head::Gaussian: {
            std::size_t half = raw.size() / 2;
            std::vector<double> out(raw.size());
            for (std::size_t i = 0; i < half; ++i) out[i] = raw[i];
            double span = net.log_std_high - net.log_std_low;
            for (std::size_t i = half; i < raw.size(); ++i)
                out[i] = net.log_std_low + span * sigmoid(raw[i]);
            cache.head_output = std::move(out);
            break;
        }
    }
    return cache;
}

}  // namespace

std::size_t DenseNet::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
        n += weights[l].data.size() + biases[l].size();
    return n;
}

void GradientSet::scale(double factor) {
    for (Matrix& m : d_weights)
        for (double& v : m.data) v *= factor;
    for (auto& b : d_biases)
        for (double& v : b) v *= factor;
}

void GradientSet::accumulate(const GradientSet& other) {
    for (std::size_t l = 0; l < d_weights.size(); ++l) {
        for (std::size_t i = 0; i < d_weights[l].data.size(); ++i)
            d_weights[l].data[i] += other.d_weights[l].data[i];
        for (std::size_t i = 0; i < d_biases[l].size(); ++i)
            d_biases[l][i] += other.d_biases[l][i];
    }
}

double GradientSet::global_norm() const {
    double sq = 0.0;
    for (const Matrix& w : d_weights)
        for (double v : w.data) sq += v * v;
    for (const std::vector<double>& b : d_biases)
        for (double v : b) sq += v * v;
    return std::sqrt(sq);
}

void GradientSet::clip_by_global_norm(double max_norm) {
    double norm = global_norm();
    if (norm > max_norm && norm > 0.0) scale(max_norm / norm);
}

DenseNet make_net(std::vector<int> dims, Activation act, Head head, Rng& rng) {
    if (dims.size() < 2) throw std::invalid_argument("net needs at least input and output dims");
    if (head == Head::Gaussian && dims.back() % 2 != 0)
        throw std::invalid_argument("Gaussian head needs an even output width");
    DenseNet net;
    net.dims = std::move(dims);
    net.activation = act;
    net.head = head;
    for (std::size_t l = 0; l + 1 < net.dims.size(); ++l) {
        int fan_in = net.dims[l], fan_out = net.dims[l + 1];
        double bound = std::sqrt(6.0 / (fan_in + fan_out));
        Matrix w(fan_out, fan_in);
        for (double& v : w.data) v = rng.uniform(-bound, bound);
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(fan_out, 0.0);
    }
    return net;
}

GradientSet zero_gradients(const DenseNet& net) {
    GradientSet g;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        g.d_weights.emplace_back(net.weights[l].rows, net.weights[l].cols);
        g.d_biases.emplace_back(net.biases[l].size(), 0.0);
    }
    return g;
}

std::vector<double> forward(const DenseNet& net, const std::vector<double>& input) {
    return forward_cached(net, input).head_output;
}

GradientSet backward(const DenseNet& net, const std::vector<double>& input,
                     const std::vector<double>& upstream) {
    return backward(net, input, upstream, nullptr);
}

GradientSet backward(const DenseNet& net, const std::vector<double>& input,
                     const std::vector<double>& upstream, std::vector<double>* input_gradient) {
    if (static_cast<int>(upstream.size()) != net.output_dim())
        throw std::invalid_argument("upstream gradient does not match output dim");
    ForwardCache cache = forward_cached(net, input);
    GradientSet grads = zero_gradients(net);

    // pull the upstream gradient back through the head to the raw outputs
    std::vector<double> delta(upstream.size());
    switch (net.head) {
        case Head::Linear:
            delta = upstream;
            break;
        case Head::Softmax: {
            const std::vector<double>& p = cache.head_output;
            double dot = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) dot += upstream[i] * p[i];
            for (std::size_t i = 0; i < p.size(); ++i) delta[i] = p[i] * (upstream[i] - dot);
            break;
        }
        case Head::Gaussian: {
            std::size_t half = upstream.size() / 2;
            double span = net.log_std_high - net.log_std_low;
            const std::vector<double>& raw = cache.activations.back();
            for (std::size_t i = 0; i < half; ++i) delta[i] = upstream[i];
            for (std::size_t i = half; i < upstream.size(); ++i) {
                double s = sigmoid(raw[i]);
                delta[i] = upstream[i] * span * s * (1.0 - s);
            }
            break;
        }
    }

    int num_layers = static_cast<int>(net.weights.size());
    for (int l = num_layers - 1; l >= 0; --l) {
        bool hidden = l + 1 < num_layers;
        if (hidden) {
            const std::vector<double>& z = cache.pre_activations[l];
            for (std::size_t i = 0; i < delta.size(); ++i) {
                if (net.activation == Activation::Tanh) {
                    double t = std::tanh(z[i]);
                    delta[i] *= 1.0 - t * t;
                } else {
                    delta[i] *= z[i] > 0.0 ? 1.0 : 0.0;
                }
            }
        }
        const std::vector<double>& a = cache.activations[l];
        Matrix& dw = grads.d_weights[l];
        for (int i = 0; i < dw.rows; ++i) {
            double d = delta[i];
            grads.d_biases[l][i] = d;
            double* row = &dw.data[static_cast<std::size_t>(i) * dw.cols];
            for (int j = 0; j < dw.cols; ++j) row[j] = d * a[j];
        }
        if (l > 0 || input_gradient) {
            const Matrix& w = net.weights[l];
            std::vector<double> prev(w.cols, 0.0);
            for (int i = 0; i < w.rows; ++i) {
                double d = delta[i];
                const double* row = &w.data[static_cast<std::size_t>(i) * w.cols];
                for (int j = 0; j < w.cols; ++j) prev[j] += d * row[j];
            }
            delta = std::move(prev);
        }
    }
    if (input_gradient) *input_gradient = delta;
    return grads;
}

void sgd_step(DenseNet& net, const GradientSet& grads, double learning_rate) {
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        for (std::size_t i = 0; i < net.weights[l].data.size(); ++i)
            net.weights[l].data[i] -= learning_rate * grads.d_weights[l].data[i];
        for (std::size_t i = 0; i < net.biases[l].size(); ++i)
            net.biases[l][i] -= learning_rate * grads.d_biases[l][i];
    }
}

void adam_step(DenseNet& net, const GradientSet& grads, AdamState& state, double learning_rate) {
    std::size_t n = net.parameter_count();
    if (state.m.empty()) {
        state.m.assign(n, 0.0);
        state.v.assign(n, 0.0);
    }
    ++state.t;
    double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));

    std::size_t idx = 0;
    auto update = [&](double& param, double g) {
        state.m[idx] = state.beta1 * state.m[idx] + (1.0 - state.beta1) * g;
        state.v[idx] = state.beta2 * state.v[idx] + (1.0 - state.beta2) * g * g;
        double m_hat = state.m[idx] / bc1;
        double v_hat = state.v[idx] / bc2;
        param -= learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
        ++idx;
    };
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        for (std::size_t i = 0; i < net.weights[l].data.size(); ++i)
            update(net.weights[l].data[i], grads.d_weights[l].data[i]);
        for (std::size_t i = 0; i < net.biases[l].size(); ++i)
            update(net.biases[l][i], grads.d_biases[l][i]);
    }
}

std::vector<double> flatten_parameters(const DenseNet& net) {
    std::vector<double> flat;
    flat.reserve(net.parameter_count());
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        flat.insert(flat.end(), net.weights[l].data.begin(), net.weights[l].data.end());
        flat.insert(flat.end(), net.biases[l].begin(), net.biases[l].end());
    }
    return flat;
}

void load_parameters(DenseNet& net, const std::vector<double>& flat) {
    if (flat.size() != net.parameter_count())
        throw std::invalid_argument("flat parameter vector has wrong length");
    std::size_t idx = 0;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        for (double& v : net.weights[l].data) v = flat[idx++];
        for (double& v : net.biases[l]) v = flat[idx++];
    }
}

std::string dump_parameters_csv(const DenseNet& net) {
    std::ostringstream os;
    os.precision(17);
    os << "dims";
    for (int d : net.dims) os << ',' << d;
    os << '\n';
    os << "activation," << (net.activation == Activation::Tanh ? "tanh" : "relu") << '\n';
    os << "head,"
       << (net.head == Head::Linear ? "linear"
                                    : net.head == Head::Softmax ? "softmax" : "gaussian")
       << '\n';
    for (double v : flatten_parameters(net)) os << v << '\n';
    return os.str();
}

DenseNet load_parameters_csv(const std::string& csv) {
    std::istringstream is(csv);
    std::string line;

    if (!std::getline(is, line) || line.rfind("dims", 0) != 0)
        throw std::invalid_argument("checkpoint missing dims header");
    std::vector<int> dims;
    {
        std::istringstream ls(line.substr(4));
        std::string tok;
        while (std::getline(ls, tok, ','))
            if (!tok.empty()) dims.push_back(std::stoi(tok));
    }
    if (!std::getline(is, line) || line.rfind("activation,", 0) != 0)
        throw std::invalid_argument("checkpoint missing activation header");
    Activation act = line.substr(11) == "relu" ? Activation::Relu : Activation::Tanh;
    if (!std::getline(is, line) || line.rfind("head,", 0) != 0)
        throw std::invalid_argument("checkpoint missing head header");
    std::string head_name = line.substr(5);
    Head head = head_name == "softmax" ? Head::Softmax
                                       : head_name == "gaussian" ? Head::Gaussian : Head::Linear;

    Rng dummy(0);
    DenseNet net = make_net(dims, act, head, dummy);
    std::vector<double> flat;
    flat.reserve(net.parameter_count());
    while (std::getline(is, line))
        if (!line.empty()) flat.push_back(std::stod(line));
    load_parameters(net, flat);
    return net;
}

}  // namespace sibre::tinynet
