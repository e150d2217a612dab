#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sfdma/csv.hpp"
#include "sfdma/io_idx.hpp"
#include "sfdma/io_image.hpp"
#include "sfdma/synth.hpp"

using namespace sfdma;
using namespace sfdma::io;

namespace {

std::filesystem::path tmp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("sfdma_io_" + name);
}

std::string read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST(Idx, RoundTripImagesAndLabels) {
    SeededRng rng(1);
    Tensor images({5, 7, 6});
    for (double& v : images.data) v = std::floor(rng.uniform() * 256.0) / 255.0;
    auto ip = tmp_path("imgs.idx3");
    save_idx_images(ip.string(), images);
    Tensor back = load_idx_images(ip.string());
    ASSERT_EQ(back.shape, images.shape);
    for (std::size_t i = 0; i < back.size(); ++i) EXPECT_NEAR(back.data[i], images.data[i], 0.5 / 255.0 + 1e-12);

    std::vector<int> labels = {0, 9, 3, 2, 7};
    auto lp = tmp_path("labels.idx1");
    save_idx_labels(lp.string(), labels);
    EXPECT_EQ(load_idx_labels(lp.string()), labels);

    LabeledDataset ds = load_idx_dataset(ip.string(), lp.string());
    EXPECT_EQ(ds.count(), 5u);
    EXPECT_EQ(ds.features(), 42u);
}

TEST(Idx, RejectsMalformedInput) {
    auto p = tmp_path("bad.idx");
    {
        std::ofstream out(p, std::ios::binary);
        out.write("\x00\x00\x08\x04", 4);  // wrong rank byte for images
    }
    EXPECT_THROW(load_idx_images(p.string()), FormatError);

    {
        std::ofstream out(p, std::ios::binary);
        out.write("\x00\x00\x08\x03", 4);
        io::detail::write_u32_be(out, 2);
        io::detail::write_u32_be(out, 4);
        io::detail::write_u32_be(out, 4);
        out.write("short", 5);  // 32 bytes promised
    }
    EXPECT_THROW(load_idx_images(p.string()), FormatError);

    // Count mismatch between paired files.
    Tensor images({3, 2, 2});
    auto ip = tmp_path("pair.idx3");
    auto lp = tmp_path("pair.idx1");
    save_idx_images(ip.string(), images);
    save_idx_labels(lp.string(), {1, 2});
    EXPECT_THROW(load_idx_dataset(ip.string(), lp.string()), FormatError);
}

TEST(Pnm, KnownPgmBytes) {
    auto p = tmp_path("two.pgm");
    {
        std::ofstream out(p, std::ios::binary);
        out << "P5\n2 2\n255\n";
        unsigned char raw[4] = {0, 255, 128, 64};
        out.write(reinterpret_cast<char*>(raw), 4);
    }
    ImageTensor img = load_image(p.string());
    EXPECT_EQ(img.height, 2u);
    EXPECT_EQ(img.width, 2u);
    EXPECT_EQ(img.channels, 1u);
    EXPECT_DOUBLE_EQ(img.data[0], 0.0);
    EXPECT_DOUBLE_EQ(img.data[1], 1.0);
    EXPECT_DOUBLE_EQ(img.data[2], 128.0 / 255.0);
    EXPECT_DOUBLE_EQ(img.data[3], 64.0 / 255.0);
}

TEST(Pnm, SaveLoadRoundTripIsByteExact) {
    SeededRng rng(2);
    ImageTensor img(9, 5, 3);
    for (double& v : img.data) v = std::floor(rng.uniform() * 256.0) / 255.0;
    auto p1 = tmp_path("a.ppm");
    auto p2 = tmp_path("b.ppm");
    save_image(p1.string(), img);
    ImageTensor back = load_image(p1.string());
    save_image(p2.string(), back);
    EXPECT_EQ(read_bytes(p1), read_bytes(p2));
    for (std::size_t i = 0; i < img.size(); ++i) EXPECT_DOUBLE_EQ(back.data[i], img.data[i]);
}

TEST(Pnm, RejectsAsciiAndBadMaxval) {
    auto p = tmp_path("ascii.pgm");
    {
        std::ofstream out(p, std::ios::binary);
        out << "P2\n2 2\n255\n0 1 2 3\n";
    }
    EXPECT_THROW(load_image(p.string()), FormatError);
    {
        std::ofstream out(p, std::ios::binary);
        out << "P5\n2 2\n65535\n";
        out.write("\0\0\0\0\0\0\0\0", 8);
    }
    EXPECT_THROW(load_image(p.string()), FormatError);
}

TEST(Blobs, SeparationControlsAccuracy) {
    SeededRng rng(3);
    // Separation 0: nearest-mean classification cannot beat chance by much.
    LabeledDataset zero = make_blobs(2, 4, 4000, 0.0, 1.0, rng);
    // Separation 8 sigma: thresholding the first coordinate at the midpoint
    // is >= 99% correct by the Gaussian error bound Phi(-4) ~= 3.2e-5.
    LabeledDataset wide = make_blobs(2, 4, 4000, 8.0, 1.0, rng);
    std::size_t ok = 0;
    for (std::size_t v = 0; v < wide.count(); ++v) {
        int pred = wide.samples.at(v, 0) > 4.0 ? 1 : 0;
        if (pred == wide.labels[v]) ++ok;
    }
    EXPECT_GE(static_cast<double>(ok) / wide.count(), 0.99);

    std::size_t ok0 = 0;
    for (std::size_t v = 0; v < zero.count(); ++v) {
        int pred = zero.samples.at(v, 0) > 0.0 ? 1 : 0;
        if (pred == zero.labels[v]) ++ok0;
    }
    EXPECT_NEAR(static_cast<double>(ok0) / zero.count(), 0.5, 0.03);
}

TEST(Blobs, DeterministicUnderSeed) {
    SeededRng a(4), b(4);
    LabeledDataset x = make_blobs(3, 5, 100, 2.0, 1.0, a);
    LabeledDataset y = make_blobs(3, 5, 100, 2.0, 1.0, b);
    EXPECT_EQ(x.labels, y.labels);
    for (std::size_t i = 0; i < x.samples.size(); ++i) EXPECT_EQ(x.samples.data[i], y.samples.data[i]);
}

TEST(Gradients, SpanFullRange) {
    SeededRng rng(5);
    auto imgs = make_gradients(4, 8, 8, 3, rng);
    for (const ImageTensor& img : imgs) {
        double lo = 1.0, hi = 0.0;
        for (double v : img.data) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        EXPECT_DOUBLE_EQ(lo, 0.0);
        EXPECT_DOUBLE_EQ(hi, 1.0);
    }
}

TEST(Digits, BalancedLabelsAndDeterminism) {
    SeededRng a(6), b(6);
    LabeledDataset x = make_digit_dataset(200, a);
    LabeledDataset y = make_digit_dataset(200, b);
    EXPECT_EQ(x.labels, y.labels);
    for (std::size_t i = 0; i < x.samples.size(); ++i) EXPECT_EQ(x.samples.data[i], y.samples.data[i]);
    std::vector<int> counts(10, 0);
    for (int u : x.labels) ++counts[u];
    for (int c : counts) EXPECT_EQ(c, 20);
    for (double v : x.samples.data) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(Digits, ClassesAreTemplateSeparable) {
    // Nearest-centroid in pixel space should already classify well; the
    // point is that the generator produces 10 genuinely distinct classes.
    SeededRng rng(7);
    LabeledDataset train = make_digit_dataset(2000, rng);
    LabeledDataset test = make_digit_dataset(500, rng);
    std::vector<std::vector<double>> centroid(10, std::vector<double>(784, 0.0));
    std::vector<double> n(10, 0.0);
    for (std::size_t v = 0; v < train.count(); ++v) {
        int u = train.labels[v];
        n[u] += 1.0;
        for (std::size_t f = 0; f < 784; ++f) centroid[u][f] += train.samples.at(v, f);
    }
    for (int u = 0; u < 10; ++u)
        for (std::size_t f = 0; f < 784; ++f) centroid[u][f] /= n[u];
    std::size_t ok = 0;
    for (std::size_t v = 0; v < test.count(); ++v) {
        int best = 0;
        double best_d = 1e300;
        for (int u = 0; u < 10; ++u) {
            double dist = 0.0;
            for (std::size_t f = 0; f < 784; ++f) {
                double diff = test.samples.at(v, f) - centroid[u][f];
                dist += diff * diff;
            }
            if (dist < best_d) {
                best_d = dist;
                best = u;
            }
        }
        if (best == test.labels[v]) ++ok;
    }
    // Nearest-centroid is a weak baseline; learned encoders do much
    // better. This guards against degenerate class overlap.
    EXPECT_GE(static_cast<double>(ok) / test.count(), 0.85);
}

TEST(Csv, WriterReaderRoundTripAndDeterminism) {
    auto p1 = tmp_path("a.csv");
    auto p2 = tmp_path("b.csv");
    for (const auto& p : {p1, p2}) {
        CsvWriter w(p.string(), {"epoch", "user", "value"});
        w.field(1).field(0).field(0.123456789012345).end_row();
        w.field(2).field(1).field(-3.5e-11).end_row();
    }
    EXPECT_EQ(read_bytes(p1), read_bytes(p2));
    CsvTable t = read_csv(p1.string());
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.column("user"), 1u);
    EXPECT_NEAR(std::stod(t.rows[0][2]), 0.123456789012345, 1e-12);
}
