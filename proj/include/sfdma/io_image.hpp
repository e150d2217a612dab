#pragma once

#include <fstream>
#include <string>

#include "sfdma/dataset.hpp"
#include "sfdma/tensor.hpp"

namespace sfdma::io {

namespace detail {

// PNM header token reader; '#' starts a comment through end of line.
inline std::string pnm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    if (tok.empty()) throw FormatError("pnm: truncated header");
    return tok;
}

inline std::size_t pnm_number(std::istream& in) {
    std::string tok = pnm_token(in);
    std::size_t v = 0;
    for (char ch : tok) {
        if (ch < '0' || ch > '9') throw FormatError("pnm: bad number in header");
        v = v * 10 + static_cast<std::size_t>(ch - '0');
    }
    return v;
}

}  // namespace detail

/// Reads binary PGM (P5) or PPM (P6) with maxval 255 into [0,1] values.
/// ASCII variants and other maxvals are out of scope and rejected.
inline ImageTensor load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("pnm: cannot open " + path);
    std::string magic = detail::pnm_token(in);
    std::size_t channels;
    if (magic == "P5")
        channels = 1;
    else if (magic == "P6")
        channels = 3;
    else
        throw FormatError("pnm: unsupported format " + magic);
    std::size_t w = detail::pnm_number(in);
    std::size_t h = detail::pnm_number(in);
    std::size_t maxval = detail::pnm_number(in);
    if (maxval != 255) throw FormatError("pnm: unsupported maxval");
    // Exactly one whitespace byte separates the header from the raster;
    // pnm_number already consumed it.
    ImageTensor img(h, w, channels);
    std::vector<unsigned char> raw(h * w * channels);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw FormatError("pnm: truncated raster");
    for (std::size_t i = 0; i < raw.size(); ++i) img.data[i] = raw[i] / 255.0;
    return img;
}

/// Writes P5 (1 channel) or P6 (3 channels); exact inverse of load_image
/// for values on the 1/255 grid.
inline void save_image(const std::string& path, const ImageTensor& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("pnm: cannot write " + path);
    const char* magic;
    if (img.channels == 1)
        magic = "P5";
    else if (img.channels == 3)
        magic = "P6";
    else
        throw FormatError("pnm: only 1 or 3 channels supported");
    out << magic << "\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> raw(img.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        double v = img.data[i];
        v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
        raw[i] = static_cast<unsigned char>(v * 255.0 + 0.5);
    }
    out.write(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw FormatError("pnm: write failed");
}

}  // namespace sfdma::io
