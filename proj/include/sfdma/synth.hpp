#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "sfdma/dataset.hpp"
#include "sfdma/rng.hpp"
#include "sfdma/tensor.hpp"

namespace sfdma::io {

/// Isotropic Gaussian blobs. Class 0 sits at the origin and class k >= 1
/// at separation*sigma along axis k-1, so `separation` is the minimum
/// pairwise mean distance in units of sigma.
inline LabeledDataset make_blobs(std::size_t classes, std::size_t dim, std::size_t count, double separation,
                                 double sigma, SeededRng& rng) {
    if (classes < 2 || dim < classes - 1) throw ValueError("make_blobs: need dim >= classes-1");
    LabeledDataset ds;
    ds.samples = Tensor({count, dim});
    ds.labels.resize(count);
    ds.classes = classes;
    for (std::size_t n = 0; n < count; ++n) {
        std::size_t k = rng.below(classes);
        ds.labels[n] = static_cast<int>(k);
        for (std::size_t j = 0; j < dim; ++j) {
            double mean = (k >= 1 && j == k - 1) ? separation * sigma : 0.0;
            ds.samples.at(n, j) = mean + sigma * rng.normal();
        }
    }
    return ds;
}

/// Linear-ramp images with random orientation; each image spans [0,1].
inline std::vector<ImageTensor> make_gradients(std::size_t count, std::size_t h, std::size_t w, std::size_t c,
                                               SeededRng& rng) {
    std::vector<ImageTensor> out;
    out.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        double theta = rng.uniform() * 6.283185307179586;
        double cx = std::cos(theta), sy = std::sin(theta);
        ImageTensor img(h, w, c);
        for (std::size_t ch = 0; ch < c; ++ch) {
            double phase = c > 1 ? rng.uniform() : 0.0;
            double lo = 1e300, hi = -1e300;
            for (std::size_t y = 0; y < h; ++y)
                for (std::size_t x = 0; x < w; ++x) {
                    double t = cx * (static_cast<double>(x) / w) + sy * (static_cast<double>(y) / h) + phase;
                    img.at(y, x, ch) = t;
                    lo = std::min(lo, t);
                    hi = std::max(hi, t);
                }
            double span = hi > lo ? hi - lo : 1.0;
            for (std::size_t y = 0; y < h; ++y)
                for (std::size_t x = 0; x < w; ++x) img.at(y, x, ch) = (img.at(y, x, ch) - lo) / span;
        }
        out.push_back(std::move(img));
    }
    return out;
}

namespace detail {

struct Seg {
    double x0, y0, x1, y1;
};

// Seven-segment digit strokes on a unit box; jittered and distorted per
// sample below so classes are separable but not trivial.
inline const std::vector<Seg>& digit_segments(int digit) {
    static const Seg A{.30, .15, .70, .15}, B{.70, .15, .70, .50}, C{.70, .50, .70, .85}, D{.30, .85, .70, .85},
        E{.30, .50, .30, .85}, F{.30, .15, .30, .50}, G{.30, .50, .70, .50};
    static const std::vector<Seg> table[10] = {
        {A, B, C, D, E, F},     // 0
        {B, C},                 // 1
        {A, B, G, E, D},        // 2
        {A, B, G, C, D},        // 3
        {F, G, B, C},           // 4
        {A, F, G, C, D},        // 5
        {A, F, G, E, D, C},     // 6
        {A, B, C},              // 7
        {A, B, C, D, E, F, G},  // 8
        {A, B, C, D, F, G},     // 9
    };
    return table[digit];
}

inline double point_segment_dist(double px, double py, const Seg& s) {
    double dx = s.x1 - s.x0, dy = s.y1 - s.y0;
    double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((px - s.x0) * dx + (py - s.y0) * dy) / len2 : 0.0;
    t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
    double ex = px - (s.x0 + t * dx), ey = py - (s.y0 + t * dy);
    return std::sqrt(ex * ex + ey * ey);
}

}  // namespace detail

/// One 28x28 glyph of `digit` with randomized pose, stroke width,
/// intensity and pixel noise. Values in [0,1].
inline void render_digit(double* out28x28, int digit, SeededRng& rng) {
    const std::size_t n = 28;
    double scale = 0.90 + 0.20 * rng.uniform();
    double theta = (rng.uniform() - 0.5) * 0.24;  // about +-7 degrees
    double tx = (rng.uniform() - 0.5) * 0.12;
    double ty = (rng.uniform() - 0.5) * 0.12;
    double thick = 0.040 + 0.050 * rng.uniform();
    double amp = 0.70 + 0.30 * rng.uniform();
    double ct = std::cos(theta), st = std::sin(theta);

    std::vector<detail::Seg> segs = detail::digit_segments(digit);
    for (detail::Seg& s : segs) {
        // Endpoint wobble, then pose transform about the box center.
        auto xf = [&](double& x, double& y) {
            x += (rng.uniform() - 0.5) * 0.04;
            y += (rng.uniform() - 0.5) * 0.04;
            double u = (x - 0.5) * scale, v = (y - 0.5) * scale;
            x = 0.5 + ct * u - st * v + tx;
            y = 0.5 + st * u + ct * v + ty;
        };
        xf(s.x0, s.y0);
        xf(s.x1, s.y1);
    }

    std::fill(out28x28, out28x28 + n * n, 0.0);
    const double aa = 0.02;  // antialias band, ~0.55 px
    for (const detail::Seg& s : segs) {
        double pad = thick + aa;
        std::size_t x_lo = static_cast<std::size_t>(std::max(0.0, (std::min(s.x0, s.x1) - pad) * n));
        std::size_t x_hi = static_cast<std::size_t>(std::clamp((std::max(s.x0, s.x1) + pad) * n + 1.0, 0.0, double(n)));
        std::size_t y_lo = static_cast<std::size_t>(std::max(0.0, (std::min(s.y0, s.y1) - pad) * n));
        std::size_t y_hi = static_cast<std::size_t>(std::clamp((std::max(s.y0, s.y1) + pad) * n + 1.0, 0.0, double(n)));
        for (std::size_t y = y_lo; y < y_hi; ++y)
            for (std::size_t x = x_lo; x < x_hi; ++x) {
                double px = (x + 0.5) / n, py = (y + 0.5) / n;
                double d = detail::point_segment_dist(px, py, s);
                double v = std::clamp((thick - d) / aa + 1.0, 0.0, 1.0) * amp;
                double& cell = out28x28[y * n + x];
                cell = std::max(cell, v);
            }
    }
    for (std::size_t i = 0; i < n * n; ++i)
        out28x28[i] = std::clamp(out28x28[i] + 0.05 * rng.normal(), 0.0, 1.0);
}

/// Balanced 10-class digit-glyph dataset in MNIST layout: images
/// (count, 28, 28) in [0,1] plus labels. Deterministic under the seed.
inline void make_digits(std::size_t count, SeededRng& rng, Tensor& images, std::vector<int>& labels) {
    images = Tensor({count, 28, 28});
    labels.resize(count);
    std::vector<int> order(count);
    for (std::size_t i = 0; i < count; ++i) order[i] = static_cast<int>(i % 10);
    for (std::size_t i = count; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t i = 0; i < count; ++i) {
        labels[i] = order[i];
        render_digit(images.data.data() + i * 784, order[i], rng);
    }
}

inline LabeledDataset make_digit_dataset(std::size_t count, SeededRng& rng) {
    Tensor images;
    LabeledDataset ds;
    make_digits(count, rng, images, ds.labels);
    ds.samples = Tensor({count, 784}, std::move(images.data));
    ds.classes = 10;
    return ds;
}

}  // namespace sfdma::io
