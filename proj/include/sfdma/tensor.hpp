#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfdma {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ShapeError : Error {
    using Error::Error;
};
struct ValueError : Error {
    using Error::Error;
};
struct FormatError : Error {
    using Error::Error;
};
struct VersionError : FormatError {
    using FormatError::FormatError;
};
struct DegenerateChannelError : Error {
    using Error::Error;
};
struct DivergenceError : Error {
    using Error::Error;
};
struct InfeasibleError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

/// Dense row-major real array. Shapes are lists of positive extents and
/// data length always equals their product; any non-finite value is an
/// error state, checked where results leave a module.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)), data(count(shape), 0.0) {}
    Tensor(std::vector<std::size_t> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
        if (data.size() != count(shape)) throw ShapeError("tensor data length does not match shape");
    }

    static std::size_t count(const std::vector<std::size_t>& s) {
        std::size_t n = 1;
        for (std::size_t e : s) {
            if (e == 0) throw ShapeError("zero extent in tensor shape");
            n *= e;
        }
        return n;
    }

    std::size_t size() const { return data.size(); }

    // 2-D accessors; most of the network code treats tensors as (rows, cols).
    std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
    std::size_t cols() const {
        if (shape.size() < 2) return shape.size() == 1 ? 1 : 0;
        std::size_t c = 1;
        for (std::size_t k = 1; k < shape.size(); ++k) c *= shape[k];
        return c;
    }
    double& at(std::size_t r, std::size_t c) { return data[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
    void require_finite(const char* what) const {
        if (!all_finite()) throw DivergenceError(std::string("non-finite values in ") + what);
    }
};

inline Tensor zeros_like(const Tensor& t) { return Tensor(t.shape); }

}  // namespace sfdma
