#pragma once

#include <vector>

#include "sfdma/tensor.hpp"

namespace sfdma::io {

/// Sample batch (rows) with integer class labels.
struct LabeledDataset {
    Tensor samples;           // (count, features...)
    std::vector<int> labels;  // one per row
    std::size_t classes = 0;

    std::size_t count() const { return samples.rows(); }
    std::size_t features() const { return samples.cols(); }

    void validate() const {
        if (labels.size() != count()) throw ShapeError("dataset: sample/label count mismatch");
        for (int u : labels)
            if (u < 0 || static_cast<std::size_t>(u) >= classes) throw ValueError("dataset: label out of class range");
    }

    LabeledDataset slice(std::size_t begin, std::size_t n) const {
        if (begin + n > count()) throw ShapeError("dataset slice out of range");
        LabeledDataset out;
        std::size_t f = features();
        out.samples = Tensor({n, f});
        std::copy(samples.data.begin() + begin * f, samples.data.begin() + (begin + n) * f, out.samples.data.begin());
        out.labels.assign(labels.begin() + begin, labels.begin() + begin + n);
        out.classes = classes;
        return out;
    }
};

/// HxWxC image with values in [0,1], row-major (y, x, channel).
struct ImageTensor {
    std::size_t height = 0, width = 0, channels = 0;
    std::vector<double> data;

    ImageTensor() = default;
    ImageTensor(std::size_t h, std::size_t w, std::size_t c)
        : height(h), width(w), channels(c), data(h * w * c, 0.0) {}

    double& at(std::size_t y, std::size_t x, std::size_t c) { return data[(y * width + x) * channels + c]; }
    double at(std::size_t y, std::size_t x, std::size_t c) const { return data[(y * width + x) * channels + c]; }
    std::size_t size() const { return data.size(); }

    void clamp01() {
        for (double& v : data) v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    }
};

}  // namespace sfdma::io
