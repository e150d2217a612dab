#pragma once

#include <complex>
#include <vector>

#include "sfdma/rng.hpp"
#include "sfdma/tensor.hpp"

namespace sfdma::chan {

using cplx = std::complex<double>;

/// Length-d complex symbol vector.
using ComplexBlock = std::vector<cplx>;

inline double block_energy(const ComplexBlock& b) {
    double e = 0.0;
    for (const cplx& z : b) e += std::norm(z);
    return e;
}

/// Per-TX transmit power, linear scale relative to a unit-power symbol.
struct PowerAllocation {
    std::vector<double> p;

    double at(std::size_t i) const { return p.at(i); }
    static PowerAllocation uniform(std::size_t n, double v = 1.0) { return {std::vector<double>(n, v)}; }
};

/// One draw of all N x N per-dimension gains plus per-RX noise variances.
/// Immutable after creation; safe to share across readers.
struct ChannelRealization {
    std::size_t users = 0;
    std::size_t d = 0;
    std::vector<ComplexBlock> gains;      // gains[i*users + j] = g_{i,j}, RX i / TX j
    std::vector<double> noise_var;        // sigma_i^2 per RX

    const ComplexBlock& g(std::size_t rx, std::size_t tx) const { return gains[rx * users + tx]; }
    ComplexBlock& g(std::size_t rx, std::size_t tx) { return gains[rx * users + tx]; }
};

/// BPSK map fixed as 0/-1 -> -1+0i and 1/+1 -> +1+0i.
inline ComplexBlock modulate_bpsk(const std::vector<double>& bits) {
    if (bits.empty()) throw ShapeError("modulate_bpsk: empty block");
    ComplexBlock out(bits.size());
    for (std::size_t r = 0; r < bits.size(); ++r) {
        double b = bits[r];
        if (b == 1.0 || b == 0.0 || b == -1.0)
            out[r] = cplx(b > 0.0 ? 1.0 : -1.0, 0.0);
        else
            throw ValueError("modulate_bpsk: non-binary input");
    }
    return out;
}

/// Scales the block so that ||x||^2 = d (unit average per-symbol power).
inline ComplexBlock normalize_power(const ComplexBlock& m) {
    double e = block_energy(m);
    if (!(e > 0.0)) throw ValueError("normalize_power: zero-energy input");
    double s = std::sqrt(static_cast<double>(m.size()) / e);
    ComplexBlock out(m.size());
    for (std::size_t r = 0; r < m.size(); ++r) out[r] = m[r] * s;
    return out;
}

/// i.i.d. CN(0,1) gains: real/imag parts ~ N(0, 1/2) so E|g|^2 = 1.
/// Draw order: rx, then tx, then dimension.
inline ChannelRealization sample_channel(std::size_t users, std::size_t d, const std::vector<double>& sigma2,
                                         SeededRng& rng) {
    if (users < 1 || d < 1) throw ShapeError("sample_channel: need users >= 1, d >= 1");
    if (sigma2.size() != users) throw ShapeError("sample_channel: one noise variance per RX");
    ChannelRealization ch;
    ch.users = users;
    ch.d = d;
    ch.noise_var = sigma2;
    ch.gains.resize(users * users);
    for (auto& blk : ch.gains) {
        blk.resize(d);
        for (std::size_t r = 0; r < d; ++r) blk[r] = rng.complex_normal(1.0);
    }
    return ch;
}

inline ChannelRealization sample_channel(std::size_t users, std::size_t d, double sigma2, SeededRng& rng) {
    return sample_channel(users, d, std::vector<double>(users, sigma2), rng);
}

/// Fresh AWGN blocks, n_i ~ CN(0, sigma_i^2 I). Draw order: rx, dimension.
inline std::vector<ComplexBlock> sample_noise(const ChannelRealization& ch, SeededRng& rng) {
    std::vector<ComplexBlock> n(ch.users);
    for (std::size_t i = 0; i < ch.users; ++i) {
        n[i].resize(ch.d);
        for (std::size_t r = 0; r < ch.d; ++r) n[i][r] = rng.complex_normal(ch.noise_var[i]);
    }
    return n;
}

/// y_i = g_ii (.) sqrt(p_i) x_i + sum_{j != i} g_ij (.) sqrt(p_j) x_j + n_i,
/// with the noise supplied explicitly so runs can be replayed.
inline std::vector<ComplexBlock> apply_channel(const std::vector<ComplexBlock>& x_all, const ChannelRealization& ch,
                                               const PowerAllocation& pw, const std::vector<ComplexBlock>& noise) {
    if (x_all.size() != ch.users || pw.p.size() != ch.users || noise.size() != ch.users)
        throw ShapeError("apply_channel: user count mismatch");
    for (const auto& x : x_all)
        if (x.size() != ch.d) throw ShapeError("apply_channel: block length mismatch");
    std::vector<ComplexBlock> y(ch.users);
    for (std::size_t i = 0; i < ch.users; ++i) {
        if (noise[i].size() != ch.d) throw ShapeError("apply_channel: noise length mismatch");
        y[i].assign(ch.d, cplx(0.0, 0.0));
        for (std::size_t j = 0; j < ch.users; ++j) {
            double a = std::sqrt(pw.at(j));
            const ComplexBlock& gij = ch.g(i, j);
            for (std::size_t r = 0; r < ch.d; ++r) y[i][r] += gij[r] * (a * x_all[j][r]);
        }
        for (std::size_t r = 0; r < ch.d; ++r) y[i][r] += noise[i][r];
    }
    return y;
}

inline std::vector<ComplexBlock> apply_channel(const std::vector<ComplexBlock>& x_all, const ChannelRealization& ch,
                                               const PowerAllocation& pw, SeededRng& rng) {
    return apply_channel(x_all, ch, pw, sample_noise(ch, rng));
}

inline constexpr double kDegenerateGain = 1e-9;

/// Per-dimension zero-forcing: yhat_r = y_r / g_r. Gains below the
/// degenerate threshold error out rather than amplify.
inline ComplexBlock equalize_zf(const ComplexBlock& y, const ComplexBlock& g_ii) {
    if (y.size() != g_ii.size()) throw ShapeError("equalize_zf: length mismatch");
    ComplexBlock out(y.size());
    for (std::size_t r = 0; r < y.size(); ++r) {
        if (std::abs(g_ii[r]) < kDegenerateGain) throw DegenerateChannelError("equalize_zf: near-zero channel gain");
        out[r] = y[r] / g_ii[r];
    }
    return out;
}

/// Mean-gain SINR for RX i: p_i m_ii / (sum_{j != i} p_j m_ij + sigma^2),
/// with m_ij the mean |g_ij|^2. Linear ratio.
inline double sinr(const PowerAllocation& pw, const std::vector<std::vector<double>>& mean_gain2, double sigma2,
                   std::size_t i) {
    if (i >= pw.p.size() || mean_gain2.size() != pw.p.size()) throw ShapeError("sinr: index out of range");
    double denom = sigma2;
    for (std::size_t j = 0; j < pw.p.size(); ++j)
        if (j != i) denom += pw.at(j) * mean_gain2[i][j];
    if (!(denom > 0.0)) throw ValueError("sinr: nonpositive denominator");
    return pw.at(i) * mean_gain2[i][i] / denom;
}

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace sfdma::chan
