#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "sfdma/rng.hpp"
#include "sfdma/tensor.hpp"

namespace sfdma::nn {

enum class LayerKind { dense, relu, sigmoid, softmax, sign_ste };

inline const char* to_string(LayerKind k) {
    switch (k) {
        case LayerKind::dense: return "dense";
        case LayerKind::relu: return "relu";
        case LayerKind::sigmoid: return "sigmoid";
        case LayerKind::softmax: return "softmax";
        case LayerKind::sign_ste: return "sign_ste";
    }
    return "?";
}

inline LayerKind layer_kind_from(const std::string& s) {
    if (s == "dense") return LayerKind::dense;
    if (s == "relu") return LayerKind::relu;
    if (s == "sigmoid") return LayerKind::sigmoid;
    if (s == "softmax") return LayerKind::softmax;
    if (s == "sign_ste") return LayerKind::sign_ste;
    throw FormatError("unknown layer kind: " + s);
}

struct LayerSpec {
    LayerKind kind = LayerKind::dense;
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
};

/// Ordered layer stack with per-dense weights (in x out) and biases (out).
/// Non-dense layers carry empty parameter slots so indices line up.
struct NetworkParams {
    std::vector<LayerSpec> layers;
    std::vector<Tensor> weights;
    std::vector<Tensor> biases;

    std::size_t in_dim() const { return layers.empty() ? 0 : layers.front().in_dim; }
    std::size_t out_dim() const { return layers.empty() ? 0 : layers.back().out_dim; }

    std::size_t param_count() const {
        std::size_t n = 0;
        for (std::size_t k = 0; k < layers.size(); ++k) {
            n += weights[k].data.size() + biases[k].data.size();
        }
        return n;
    }

    void validate() const {
        if (layers.empty()) throw ShapeError("empty network");
        for (std::size_t k = 0; k < layers.size(); ++k) {
            const LayerSpec& l = layers[k];
            if (l.in_dim == 0 || l.out_dim == 0) throw ShapeError("zero layer dimension");
            if (l.kind != LayerKind::dense && l.in_dim != l.out_dim)
                throw ShapeError("non-dense layer must preserve dimension");
            if (k > 0 && layers[k - 1].out_dim != l.in_dim) throw ShapeError("adjacent layers dimension-incompatible");
            if (l.kind == LayerKind::dense) {
                if (weights[k].shape != std::vector<std::size_t>{l.in_dim, l.out_dim})
                    throw ShapeError("dense weight shape mismatch");
                if (biases[k].shape != std::vector<std::size_t>{l.out_dim}) throw ShapeError("dense bias shape mismatch");
            } else if (!weights[k].data.empty() || !biases[k].data.empty()) {
                throw ShapeError("non-dense layer carries parameters");
            }
        }
    }
};

/// Builds a network from layer specs with He-scaled dense init. A dense
/// layer feeding a softmax head is initialized an order of magnitude
/// smaller so untrained class posteriors start near uniform.
inline NetworkParams make_network(const std::vector<LayerSpec>& layers, SeededRng& rng) {
    NetworkParams net;
    net.layers = layers;
    net.weights.resize(layers.size());
    net.biases.resize(layers.size());
    for (std::size_t k = 0; k < layers.size(); ++k) {
        if (layers[k].kind != LayerKind::dense) continue;
        net.weights[k] = Tensor({layers[k].in_dim, layers[k].out_dim});
        net.biases[k] = Tensor({layers[k].out_dim});
        double scale = std::sqrt(2.0 / static_cast<double>(layers[k].in_dim));
        if (k + 1 < layers.size() && layers[k + 1].kind == LayerKind::softmax) scale *= 0.1;
        for (double& w : net.weights[k].data) w = scale * rng.normal();
    }
    net.validate();
    return net;
}

/// Dense MLP spec helper: dims = {in, h1, ..., out}; relu between hidden
/// layers and `top` appended after the last dense (or nothing).
inline std::vector<LayerSpec> mlp_spec(const std::vector<std::size_t>& dims, LayerKind top) {
    std::vector<LayerSpec> ls;
    for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
        ls.push_back({LayerKind::dense, dims[k], dims[k + 1]});
        if (k + 2 < dims.size()) ls.push_back({LayerKind::relu, dims[k + 1], dims[k + 1]});
    }
    std::size_t out = dims.back();
    if (top == LayerKind::relu || top == LayerKind::sigmoid || top == LayerKind::softmax || top == LayerKind::sign_ste)
        ls.push_back({top, out, out});
    return ls;
}

enum class Mode { train, eval };

/// Per-layer inputs cached by forward; xs[k] feeds layer k, xs.back() is
/// the network output. sign_probs[k] holds sigma(pre-activation) for
/// sign_ste layers (used by the encoder entropy term).
struct ForwardCache {
    std::vector<Tensor> xs;
    std::vector<Tensor> sign_probs;
    Mode mode = Mode::eval;
};

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EMap = Eigen::Map<EMat>;
using ECMap = Eigen::Map<const EMat>;

inline EMap mat(Tensor& t, std::size_t r, std::size_t c) { return EMap(t.data.data(), r, c); }
inline ECMap mat(const Tensor& t, std::size_t r, std::size_t c) { return ECMap(t.data.data(), r, c); }

inline double sigmoid(double x) { return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

/// Batched forward pass over rows of x (shape V x in_dim). In train mode
/// sign_ste samples each bit as sign(logit + logistic noise), so the
/// marginal of +1 is sigma(logit); in eval mode it is the hard sign of the
/// pre-activation (sign(0) := +1). Draw order across the batch is
/// row-major.
inline Tensor forward(const NetworkParams& net, const Tensor& x, SeededRng& rng, Mode mode,
                      ForwardCache* cache = nullptr) {
    if (x.cols() != net.in_dim()) throw ShapeError("forward: input width does not match first layer");
    const std::size_t V = x.rows();
    if (cache) {
        cache->xs.clear();
        cache->sign_probs.assign(net.layers.size(), Tensor{});
        cache->mode = mode;
    }
    Tensor cur = x;
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        const LayerSpec& l = net.layers[k];
        if (cache) cache->xs.push_back(cur);
        Tensor out({V, l.out_dim});
        switch (l.kind) {
            case LayerKind::dense: {
                mat(out, V, l.out_dim).noalias() =
                    mat(cur, V, l.in_dim) * mat(net.weights[k], l.in_dim, l.out_dim);
                for (std::size_t v = 0; v < V; ++v)
                    for (std::size_t c = 0; c < l.out_dim; ++c) out.at(v, c) += net.biases[k].data[c];
                break;
            }
            case LayerKind::relu:
                for (std::size_t i = 0; i < cur.size(); ++i) out.data[i] = cur.data[i] > 0.0 ? cur.data[i] : 0.0;
                break;
            case LayerKind::sigmoid:
                for (std::size_t i = 0; i < cur.size(); ++i) out.data[i] = sigmoid(cur.data[i]);
                break;
            case LayerKind::softmax:
                for (std::size_t v = 0; v < V; ++v) {
                    double mx = cur.at(v, 0);
                    for (std::size_t c = 1; c < l.out_dim; ++c) mx = std::max(mx, cur.at(v, c));
                    double sum = 0.0;
                    for (std::size_t c = 0; c < l.out_dim; ++c) {
                        double e = std::exp(cur.at(v, c) - mx);
                        out.at(v, c) = e;
                        sum += e;
                    }
                    for (std::size_t c = 0; c < l.out_dim; ++c) out.at(v, c) /= sum;
                }
                break;
            case LayerKind::sign_ste: {
                Tensor probs({V, l.out_dim});
                for (std::size_t i = 0; i < cur.size(); ++i) probs.data[i] = sigmoid(cur.data[i]);
                if (mode == Mode::train) {
                    for (std::size_t i = 0; i < cur.size(); ++i)
                        out.data[i] = (cur.data[i] + rng.logistic()) >= 0.0 ? 1.0 : -1.0;
                } else {
                    for (std::size_t i = 0; i < cur.size(); ++i) out.data[i] = cur.data[i] >= 0.0 ? 1.0 : -1.0;
                }
                if (cache) cache->sign_probs[k] = std::move(probs);
                break;
            }
        }
        cur = std::move(out);
    }
    cur.require_finite("network activations");
    if (cache) cache->xs.push_back(cur);
    return cur;
}

struct Gradients {
    std::vector<Tensor> d_weights;
    std::vector<Tensor> d_biases;
    Tensor d_input;
};

/// Backpropagation from d_out (gradient at the network output). sign_ste
/// applies the straight-through rule: the gradient passes unchanged onto
/// its pre-activation. With skip_top_softmax the caller supplies d_out
/// already at the input of a terminal softmax (the fused softmax+CE form,
/// posterior - onehot, which stays bounded at extreme posteriors).
inline Gradients backward(const NetworkParams& net, const ForwardCache& cache, const Tensor& d_out,
                          bool skip_top_softmax = false) {
    if (cache.xs.size() != net.layers.size() + 1) throw Error("backward: missing forward cache");
    const std::size_t V = cache.xs[0].rows();
    if (d_out.rows() != V || d_out.cols() != net.out_dim()) throw ShapeError("backward: output gradient shape");
    if (skip_top_softmax && net.layers.back().kind != LayerKind::softmax)
        throw ShapeError("backward: no terminal softmax to skip");

    Gradients g;
    g.d_weights.resize(net.layers.size());
    g.d_biases.resize(net.layers.size());
    Tensor delta = d_out;
    std::size_t top = net.layers.size() - (skip_top_softmax ? 1 : 0);
    for (std::size_t kk = top; kk-- > 0;) {
        const LayerSpec& l = net.layers[kk];
        const Tensor& xin = cache.xs[kk];
        Tensor next({V, l.in_dim});
        switch (l.kind) {
            case LayerKind::dense: {
                g.d_weights[kk] = Tensor({l.in_dim, l.out_dim});
                g.d_biases[kk] = Tensor({l.out_dim});
                mat(g.d_weights[kk], l.in_dim, l.out_dim).noalias() =
                    mat(xin, V, l.in_dim).transpose() * mat(delta, V, l.out_dim);
                for (std::size_t v = 0; v < V; ++v)
                    for (std::size_t c = 0; c < l.out_dim; ++c) g.d_biases[kk].data[c] += delta.at(v, c);
                mat(next, V, l.in_dim).noalias() =
                    mat(delta, V, l.out_dim) * mat(net.weights[kk], l.in_dim, l.out_dim).transpose();
                break;
            }
            case LayerKind::relu:
                for (std::size_t i = 0; i < next.size(); ++i)
                    next.data[i] = xin.data[i] > 0.0 ? delta.data[i] : 0.0;
                break;
            case LayerKind::sigmoid: {
                const Tensor& y = cache.xs[kk + 1];
                for (std::size_t i = 0; i < next.size(); ++i)
                    next.data[i] = delta.data[i] * y.data[i] * (1.0 - y.data[i]);
                break;
            }
            case LayerKind::softmax: {
                const Tensor& y = cache.xs[kk + 1];
                for (std::size_t v = 0; v < V; ++v) {
                    double dot = 0.0;
                    for (std::size_t c = 0; c < l.out_dim; ++c) dot += delta.at(v, c) * y.at(v, c);
                    for (std::size_t c = 0; c < l.out_dim; ++c)
                        next.at(v, c) = y.at(v, c) * (delta.at(v, c) - dot);
                }
                break;
            }
            case LayerKind::sign_ste:
                next = delta;
                break;
        }
        delta = std::move(next);
    }
    g.d_input = std::move(delta);
    return g;
}

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Moment tensors congruent with the parameter layout of one network.
struct AdamState {
    AdamConfig cfg;
    std::uint64_t step = 0;
    std::vector<Tensor> m_w, v_w, m_b, v_b;

    explicit AdamState(const NetworkParams& net, AdamConfig c = {}) : cfg(c) {
        for (std::size_t k = 0; k < net.layers.size(); ++k) {
            m_w.push_back(zeros_like(net.weights[k]));
            v_w.push_back(zeros_like(net.weights[k]));
            m_b.push_back(zeros_like(net.biases[k]));
            v_b.push_back(zeros_like(net.biases[k]));
        }
    }
};

namespace detail {
inline void adam_update(const AdamConfig& c, std::uint64_t t, Tensor& p, const Tensor& g, Tensor& m, Tensor& v) {
    if (!p.same_shape(g)) throw ShapeError("adam: gradient shape mismatch");
    double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(t));
    double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < p.size(); ++i) {
        m.data[i] = c.beta1 * m.data[i] + (1.0 - c.beta1) * g.data[i];
        v.data[i] = c.beta2 * v.data[i] + (1.0 - c.beta2) * g.data[i] * g.data[i];
        double mh = m.data[i] / bc1;
        double vh = v.data[i] / bc2;
        p.data[i] -= c.lr * mh / (std::sqrt(vh) + c.eps);
    }
}
}  // namespace detail

inline void adam_step(AdamState& st, NetworkParams& net, const Gradients& g) {
    ++st.step;
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        if (net.weights[k].data.empty()) continue;
        detail::adam_update(st.cfg, st.step, net.weights[k], g.d_weights[k], st.m_w[k], st.v_w[k]);
        detail::adam_update(st.cfg, st.step, net.biases[k], g.d_biases[k], st.m_b[k], st.v_b[k]);
    }
}

/// Entropy of a Bernoulli(p) in nats, with 0*ln(0) := 0. The two terms
/// are rounded separately so that H(p) == H(1-p) bit-for-bit whenever
/// 1-p is exact.
inline double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValueError("binary_entropy: p outside [0,1]");
    double a = p > 0.0 ? p * std::log(p) : 0.0;
    double b = p < 1.0 ? (1.0 - p) * std::log(1.0 - p) : 0.0;
    return -(a + b);
}

/// d binary_entropy(sigma(z)) / dz, safe at saturated probabilities
/// (the ratio (1-p)/p overflows for denormal p; the log difference
/// does not).
inline double binary_entropy_dlogit(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return (std::log1p(-p) - std::log(p)) * p * (1.0 - p);
}

}  // namespace sfdma::nn
