#pragma once

// Test-side oracles, kept independent of the library implementation paths
// they are used to check.

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "sfdma/nn.hpp"

namespace oracle {

// Gauss-Hermite nodes/weights (physicists' weight) via Golub-Welsch.
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussHermite(int n) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
        for (int k = 0; k + 1 < n; ++k) {
            double b = std::sqrt((k + 1) / 2.0);
            J(k, k + 1) = b;
            J(k + 1, k) = b;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
        nodes.resize(n);
        weights.resize(n);
        const double sqrt_pi = std::sqrt(3.14159265358979323846);
        for (int i = 0; i < n; ++i) {
            nodes[i] = es.eigenvalues()(i);
            double v0 = es.eigenvectors()(0, i);
            weights[i] = sqrt_pi * v0 * v0;
        }
    }
};

// Entropy of an equal-weight complex Gaussian mixture with common complex
// variance sigma2: h = -(1/M) sum_k E_{z~CN(mu_k, sigma2)}[ln f(z)], each
// expectation via a 2-D tensor Gauss-Hermite rule. Independent of the
// library's grid quadrature.
inline double mixture_entropy_gh(const std::vector<std::complex<double>>& means, double sigma2, int n_nodes = 80) {
    GaussHermite gh(n_nodes);
    const double pi = 3.14159265358979323846;
    const double s_dim = std::sqrt(sigma2 * 0.5);
    auto log_f = [&](std::complex<double> z) {
        double best = -1e300;
        for (const auto& mu : means) best = std::max(best, -std::norm(z - mu) / sigma2);
        double acc = 0.0;
        for (const auto& mu : means) acc += std::exp(-std::norm(z - mu) / sigma2 - best);
        return best + std::log(acc) - std::log(static_cast<double>(means.size()) * pi * sigma2);
    };
    double h = 0.0;
    for (const auto& mu : means) {
        double e = 0.0;
        for (std::size_t a = 0; a < gh.nodes.size(); ++a) {
            double x = mu.real() + std::sqrt(2.0) * s_dim * gh.nodes[a];
            double row = 0.0;
            for (std::size_t b = 0; b < gh.nodes.size(); ++b) {
                double y = mu.imag() + std::sqrt(2.0) * s_dim * gh.nodes[b];
                row += gh.weights[b] * log_f({x, y});
            }
            e += gh.weights[a] * row;
        }
        h += e / pi;  // 1/sqrt(pi) per axis
    }
    return -h / static_cast<double>(means.size());
}

// Central finite difference d f / d x at x with step h.
inline double central_diff(const std::function<double(double)>& f, double x, double h = 1e-5) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Plain-loop MLP evaluation, re-implemented independently of the library
// forward path. sign_ste layers report sigma(pre-activation) into `probs`
// and leave the stream at the pre-activation (callers enumerate bits).
struct NaiveMlp {
    const sfdma::nn::NetworkParams* net;

    std::vector<double> run(std::vector<double> x, std::vector<double>* sign_probs = nullptr) const {
        using sfdma::nn::LayerKind;
        for (std::size_t k = 0; k < net->layers.size(); ++k) {
            const auto& l = net->layers[k];
            if (l.kind == LayerKind::dense) {
                std::vector<double> y(l.out_dim, 0.0);
                for (std::size_t c = 0; c < l.out_dim; ++c) {
                    double acc = net->biases[k].data[c];
                    for (std::size_t r = 0; r < l.in_dim; ++r) acc += x[r] * net->weights[k].data[r * l.out_dim + c];
                    y[c] = acc;
                }
                x = std::move(y);
            } else if (l.kind == LayerKind::relu) {
                for (double& v : x) v = v > 0 ? v : 0;
            } else if (l.kind == LayerKind::sigmoid) {
                for (double& v : x) v = 1.0 / (1.0 + std::exp(-v));
            } else if (l.kind == LayerKind::softmax) {
                double mx = x[0];
                for (double v : x) mx = std::max(mx, v);
                double s = 0;
                for (double& v : x) {
                    v = std::exp(v - mx);
                    s += v;
                }
                for (double& v : x) v /= s;
            } else {  // sign_ste: expose probabilities, keep pre-activation
                if (sign_probs) {
                    sign_probs->resize(x.size());
                    for (std::size_t r = 0; r < x.size(); ++r) (*sign_probs)[r] = 1.0 / (1.0 + std::exp(-x[r]));
                }
            }
        }
        return x;
    }
};

inline double rel_err(double a, double b) {
    double d = std::abs(a - b);
    double m = std::max(std::abs(a), std::abs(b));
    return m > 1e-12 ? d / m : d;
}

}  // namespace oracle
