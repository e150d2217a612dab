#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include "sfdma/channel.hpp"
#include "sfdma/tensor.hpp"

namespace sfdma::chan {

/// (power, gain) of one interfering TX as seen by the RX of interest.
struct InterfererCfg {
    double power = 0.0;
    cplx gain{0.0, 0.0};
};

namespace detail {

constexpr double kPi = 3.14159265358979323846264338327950288;

/// ln of the mixture density (equal weights, common complex variance
/// sigma2) at z, via log-sum-exp.
inline double log_mixture_density(const cplx& z, const std::vector<cplx>& means, double sigma2) {
    double best = -1e300;
    for (const cplx& mu : means) best = std::max(best, -std::norm(z - mu) / sigma2);
    double acc = 0.0;
    for (const cplx& mu : means) acc += std::exp(-std::norm(z - mu) / sigma2 - best);
    return best + std::log(acc) - std::log(static_cast<double>(means.size()) * kPi * sigma2);
}

inline double neg_f_log_f(double logf) {
    if (logf < -700.0) return 0.0;
    double f = std::exp(logf);
    return -f * logf;
}

/// Simpson rule over [a, b] with n panels (n even), 1-D mixture of
/// N(mu_k, s^2) with equal weights.
inline double entropy_1d_simpson(const std::vector<double>& means, double s, double a, double b, std::size_t n) {
    const double var2 = 2.0 * s * s;
    const double lognorm = std::log(static_cast<double>(means.size()) * s * std::sqrt(2.0 * kPi));
    auto integrand = [&](double x) {
        double best = -1e300;
        for (double mu : means) best = std::max(best, -(x - mu) * (x - mu) / var2);
        double acc = 0.0;
        for (double mu : means) acc += std::exp(-(x - mu) * (x - mu) / var2 - best);
        return neg_f_log_f(best + std::log(acc) - lognorm);
    };
    const double h = (b - a) / static_cast<double>(n);
    double sum = integrand(a) + integrand(b);
    for (std::size_t k = 1; k < n; ++k) sum += integrand(a + h * static_cast<double>(k)) * (k % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

inline double entropy_1d(const std::vector<double>& means, double s) {
    double lo = means[0], hi = means[0];
    for (double m : means) {
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    lo -= 8.0 * s;
    hi += 8.0 * s;
    double prev = entropy_1d_simpson(means, s, lo, hi, 128);
    for (std::size_t n = 256; n <= 4096; n *= 2) {
        double cur = entropy_1d_simpson(means, s, lo, hi, n);
        if (std::abs(cur - prev) < 1e-9) return cur;
        prev = cur;
    }
    return prev;
}

inline double entropy_2d_simpson(const std::vector<cplx>& means, double sigma2, double ext_x, double ext_y,
                                 std::size_t n) {
    const double hx = 2.0 * ext_x / static_cast<double>(n);
    const double hy = 2.0 * ext_y / static_cast<double>(n);
    auto weight = [n](std::size_t k) { return k == 0 || k == n ? 1.0 : (k % 2 ? 4.0 : 2.0); };
    double sum = 0.0;
    for (std::size_t iy = 0; iy <= n; ++iy) {
        double y = -ext_y + hy * static_cast<double>(iy);
        double row = 0.0;
        for (std::size_t ix = 0; ix <= n; ++ix) {
            double x = -ext_x + hx * static_cast<double>(ix);
            row += weight(ix) * neg_f_log_f(log_mixture_density(cplx(x, y), means, sigma2));
        }
        sum += weight(iy) * row;
    }
    return sum * hx * hy / 9.0;
}

inline double entropy_2d(const std::vector<cplx>& means, double sigma2) {
    double mx = 0.0, my = 0.0;
    for (const cplx& mu : means) {
        mx = std::max(mx, std::abs(mu.real()));
        my = std::max(my, std::abs(mu.imag()));
    }
    const double ext = 6.0 * std::sqrt(sigma2);
    const double ext_x = mx + ext, ext_y = my + ext;
    double prev = entropy_2d_simpson(means, sigma2, ext_x, ext_y, 64);
    for (std::size_t n = 128; n <= 1024; n *= 2) {
        double cur = entropy_2d_simpson(means, sigma2, ext_x, ext_y, n);
        if (std::abs(cur - prev) < 1e-7) return cur;
        prev = cur;
    }
    return prev;
}

}  // namespace detail

/// Differential entropy (nats) of one received complex dimension given the
/// own transmitted symbol: interferer bits are modeled as uniform +-1, so
/// y_r - own term is a 2^K-component complex Gaussian mixture. The value
/// does not depend on own_symbol (translation invariance); the parameter
/// is kept to match the operation contract. With no interferers this is
/// the complex Gaussian entropy ln(pi e sigma2).
///
/// Collinear offset sets (always the case for one interferer) separate
/// into a Gaussian axis plus a 1-D mixture, which is much cheaper than the
/// general 2-D adaptive grid.
inline double cond_output_entropy(const cplx& own_symbol, const std::vector<InterfererCfg>& interferers,
                                  double sigma2) {
    (void)own_symbol;
    if (!(sigma2 > 0.0)) throw ValueError("cond_output_entropy: sigma2 must be positive");

    std::vector<cplx> offsets;
    for (const InterfererCfg& it : interferers) {
        if (it.power < 0.0) throw ValueError("cond_output_entropy: negative interferer power");
        cplx c = std::sqrt(it.power) * it.gain;
        if (std::norm(c) > 0.0) offsets.push_back(c);
    }
    const std::size_t K = offsets.size();
    if (K == 0) return std::log(detail::kPi * std::exp(1.0) * sigma2);
    if (K > 12) throw ValueError("cond_output_entropy: more than 12 interferers");

    bool collinear = true;
    for (std::size_t j = 1; j < K; ++j) {
        double cross = std::abs(std::imag(offsets[j] * std::conj(offsets[0])));
        if (cross > 1e-12 * std::abs(offsets[j]) * std::abs(offsets[0])) {
            collinear = false;
            break;
        }
    }

    const std::size_t M = std::size_t{1} << K;
    const double s_dim = std::sqrt(sigma2 * 0.5);
    if (collinear) {
        cplx axis = offsets[0] / std::abs(offsets[0]);
        std::vector<double> t(K);
        for (std::size_t j = 0; j < K; ++j) t[j] = std::real(offsets[j] * std::conj(axis));
        std::vector<double> means(M, 0.0);
        for (std::size_t mask = 0; mask < M; ++mask) {
            double m = 0.0;
            for (std::size_t j = 0; j < K; ++j) m += (mask >> j) & 1 ? t[j] : -t[j];
            means[mask] = m;
        }
        // Perpendicular axis is pure Gaussian with per-dimension variance
        // sigma2/2: entropy 0.5 ln(2 pi e sigma2/2) = 0.5 ln(pi e sigma2).
        return 0.5 * std::log(detail::kPi * std::exp(1.0) * sigma2) + detail::entropy_1d(means, s_dim);
    }

    std::vector<cplx> means(M, cplx(0.0, 0.0));
    for (std::size_t mask = 0; mask < M; ++mask) {
        cplx m(0.0, 0.0);
        for (std::size_t j = 0; j < K; ++j) m += (mask >> j) & 1 ? offsets[j] : -offsets[j];
        means[mask] = m;
    }
    return detail::entropy_2d(means, sigma2);
}

}  // namespace sfdma::chan
