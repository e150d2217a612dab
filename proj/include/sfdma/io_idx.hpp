#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "sfdma/dataset.hpp"
#include "sfdma/tensor.hpp"

namespace sfdma::io {

// IDX container (the MNIST format): 4-byte big-endian magic, one
// big-endian u32 extent per rank byte, then raw unsigned bytes.
inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

struct IdxHeader {
    std::uint32_t magic = 0;
    std::vector<std::uint32_t> dims;
};

namespace detail {

inline std::uint32_t read_u32_be(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw FormatError("idx: truncated header");
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

inline void write_u32_be(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<char*>(b), 4);
}

inline IdxHeader read_header(std::istream& in, std::uint32_t expected_magic) {
    IdxHeader h;
    h.magic = read_u32_be(in);
    if (h.magic != expected_magic) throw FormatError("idx: bad magic");
    std::size_t rank = h.magic & 0xFF;
    for (std::size_t k = 0; k < rank; ++k) h.dims.push_back(read_u32_be(in));
    return h;
}

}  // namespace detail

/// Loads an IDX image file as a (count, rows, cols) tensor scaled to [0,1].
inline Tensor load_idx_images(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("idx: cannot open " + path);
    IdxHeader h = detail::read_header(in, kIdxImagesMagic);
    std::size_t count = h.dims[0], rows = h.dims[1], cols = h.dims[2];
    std::vector<unsigned char> raw(count * rows * cols);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw FormatError("idx: truncated image data");
    Tensor t({count, rows, cols});
    for (std::size_t i = 0; i < raw.size(); ++i) t.data[i] = raw[i] / 255.0;
    return t;
}

inline std::vector<int> load_idx_labels(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("idx: cannot open " + path);
    IdxHeader h = detail::read_header(in, kIdxLabelsMagic);
    std::size_t count = h.dims[0];
    std::vector<unsigned char> raw(count);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw FormatError("idx: truncated label data");
    std::vector<int> labels(count);
    for (std::size_t i = 0; i < count; ++i) labels[i] = raw[i];
    return labels;
}

/// Loads an image/label file pair into a flattened dataset; the two counts
/// must agree.
inline LabeledDataset load_idx_dataset(const std::string& images_path, const std::string& labels_path,
                                       std::size_t classes = 10) {
    Tensor imgs = load_idx_images(images_path);
    std::vector<int> labels = load_idx_labels(labels_path);
    if (imgs.rows() != labels.size()) throw FormatError("idx: image/label count mismatch");
    LabeledDataset ds;
    std::size_t count = imgs.rows();
    std::size_t features = imgs.cols();
    ds.samples = Tensor({count, features}, std::move(imgs.data));
    ds.labels = std::move(labels);
    ds.classes = classes;
    ds.validate();
    return ds;
}

/// Writes (count, rows, cols) values in [0,1] as an IDX ubyte image file.
inline void save_idx_images(const std::string& path, const Tensor& images) {
    if (images.shape.size() != 3) throw ShapeError("idx: image tensor must be rank 3");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("idx: cannot write " + path);
    detail::write_u32_be(out, kIdxImagesMagic);
    for (std::size_t e : images.shape) detail::write_u32_be(out, static_cast<std::uint32_t>(e));
    std::vector<unsigned char> raw(images.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        double v = images.data[i];
        v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
        raw[i] = static_cast<unsigned char>(v * 255.0 + 0.5);
    }
    out.write(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw FormatError("idx: write failed");
}

inline void save_idx_labels(const std::string& path, const std::vector<int>& labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("idx: cannot write " + path);
    detail::write_u32_be(out, kIdxLabelsMagic);
    detail::write_u32_be(out, static_cast<std::uint32_t>(labels.size()));
    std::vector<unsigned char> raw(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) raw[i] = static_cast<unsigned char>(labels[i]);
    out.write(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw FormatError("idx: write failed");
}

}  // namespace sfdma::io
