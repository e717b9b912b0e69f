#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include <zlib.h>

#include "gelulab/dataset.hpp"
#include "gelulab/idx.hpp"
#include "gelulab/network.hpp"
#include "support/oracles.hpp"

namespace {

using namespace gelulab;

TEST(IdxImages, GoldenSinglePixel) {
    const auto full = oracle::make_idx_images(1, 1, 1, {0xFF});
    const Tensor2D t = parse_idx_images(full);
    EXPECT_EQ(t.rows(), 1u);
    EXPECT_EQ(t.cols(), 1u);
    EXPECT_EQ(t(0, 0), 1.0);

    const auto zero = oracle::make_idx_images(1, 1, 1, {0x00});
    EXPECT_EQ(parse_idx_images(zero)(0, 0), 0.0);
}

TEST(IdxImages, GoldenMultiPixel) {
    // 2 images of 2x3 pixels; values i/255 stay exact after the round trip.
    std::vector<std::uint8_t> pixels(12);
    for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = static_cast<std::uint8_t>(i * 20);
    const Tensor2D t = parse_idx_images(oracle::make_idx_images(2, 2, 3, pixels));
    EXPECT_EQ(t.rows(), 2u);
    EXPECT_EQ(t.cols(), 6u);
    for (std::size_t i = 0; i < 12; ++i) {
        EXPECT_EQ(t.data()[i], static_cast<double>(pixels[i]) / 255.0);
    }
}

TEST(IdxImages, WrongMagicAndTruncation) {
    auto labels_as_images = oracle::make_idx_labels({1});
    try {
        parse_idx_images(labels_as_images);
        FAIL() << "expected magic error";
    } catch (const DataError& e) {
        EXPECT_STREQ(e.what(), "not an IDX3 image file");
    }

    auto truncated = oracle::make_idx_images(2, 2, 2, {1, 2, 3});  // needs 8 payload bytes
    try {
        parse_idx_images(truncated);
        FAIL() << "expected EOF error";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("unexpected EOF at byte 19"), std::string::npos);
    }

    const std::vector<std::uint8_t> header_only = {0x00, 0x00};
    EXPECT_THROW(parse_idx_images(header_only), DataError);
}

TEST(IdxLabels, GoldenAndErrors) {
    const auto bytes = oracle::make_idx_labels({1, 0, 9});
    const std::vector<int> labels = parse_idx_labels(bytes);
    ASSERT_EQ(labels.size(), 3u);
    EXPECT_EQ(labels[0], 1);
    EXPECT_EQ(labels[1], 0);
    EXPECT_EQ(labels[2], 9);

    EXPECT_TRUE(parse_idx_labels(oracle::make_idx_labels({})).empty());

    auto short_payload = oracle::make_idx_labels({1, 2});
    short_payload.pop_back();
    EXPECT_THROW(parse_idx_labels(short_payload), DataError);

    EXPECT_THROW(parse_idx_labels(oracle::make_idx_labels({10})), DataError);
    EXPECT_THROW(parse_idx_labels(oracle::make_idx_images(0, 0, 0, {})), DataError);
}

TEST(IdxRoundTrip, SerializeParseIsIdentity) {
    SplitMix64 rng(149);
    for (int round = 0; round < 20; ++round) {
        const std::uint32_t n = 1 + static_cast<std::uint32_t>(rng.next_below(4));
        const std::uint32_t r = 1 + static_cast<std::uint32_t>(rng.next_below(5));
        const std::uint32_t c = 1 + static_cast<std::uint32_t>(rng.next_below(5));
        std::vector<std::uint8_t> pixels(static_cast<std::size_t>(n) * r * c);
        for (auto& p : pixels) p = static_cast<std::uint8_t>(rng.next_below(256));
        const Tensor2D t = parse_idx_images(oracle::make_idx_images(n, r, c, pixels));
        // Re-serialize from the parsed tensor and parse again.
        std::vector<std::uint8_t> again(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            again[i] = static_cast<std::uint8_t>(std::lround(t.data()[i] * 255.0));
        }
        EXPECT_EQ(again, pixels);
        const Tensor2D t2 = parse_idx_images(oracle::make_idx_images(n, r, c, again));
        for (std::size_t i = 0; i < t.size(); ++i) ASSERT_EQ(t.data()[i], t2.data()[i]);
    }
}

std::vector<std::uint8_t> gzip_compress(const std::vector<std::uint8_t>& raw) {
    z_stream zs{};
    deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, 16 + MAX_WBITS, 8, Z_DEFAULT_STRATEGY);
    std::vector<std::uint8_t> out(raw.size() + 128);
    zs.next_in = const_cast<Bytef*>(raw.data());
    zs.avail_in = static_cast<uInt>(raw.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    deflate(&zs, Z_FINISH);
    out.resize(out.size() - zs.avail_out);
    deflateEnd(&zs);
    return out;
}

TEST(Gzip, CompressedIdxAccepted) {
    const auto raw = oracle::make_idx_images(1, 2, 2, {10, 20, 30, 40});
    const auto gz = gzip_compress(raw);
    ASSERT_TRUE(is_gzip(gz));
    const Tensor2D direct = parse_idx_images(raw);
    const Tensor2D via_gz = parse_idx_images(gunzip_if_needed(gz));
    for (std::size_t i = 0; i < direct.size(); ++i) {
        EXPECT_EQ(direct.data()[i], via_gz.data()[i]);
    }
    // Pass-through for raw bytes.
    EXPECT_EQ(gunzip_if_needed(raw), raw);
}

TEST(Standardize, HandCaseAndErrors) {
    Dataset train;
    train.features = Tensor2D::from_rows({{0.0}, {2.0}});
    const StandardizeStats stats = standardize(train);
    EXPECT_DOUBLE_EQ(stats.mean, 1.0);
    EXPECT_DOUBLE_EQ(stats.stddev, 1.0);  // population std
    EXPECT_DOUBLE_EQ(train.features(0, 0), -1.0);
    EXPECT_DOUBLE_EQ(train.features(1, 0), 1.0);

    Dataset constant;
    constant.features = Tensor2D::from_rows({{3.0}, {3.0}});
    EXPECT_THROW(standardize(constant), DataError);
}

TEST(Standardize, OthersUseTrainStats) {
    Dataset train, val;
    train.features = Tensor2D::from_rows({{0.0}, {2.0}});  // mean 1, std 1
    val.features = Tensor2D::from_rows({{10.0}, {10.0}});  // different mean on purpose
    standardize(train, {&val});
    EXPECT_DOUBLE_EQ(val.features(0, 0), 9.0);
    EXPECT_DOUBLE_EQ(val.features(1, 0), 9.0);
}

TEST(Standardize, IdempotentStatsOnLargeData) {
    SplitMix64 rng(151);
    Dataset d;
    d.features = Tensor2D(500, 300);
    for (std::size_t i = 0; i < d.features.size(); ++i) {
        d.features.data()[i] = rng.next_normal() * 3.0 + 17.0;
    }
    standardize(d);
    Dataset copy = d;
    const StandardizeStats stats = standardize(copy);
    EXPECT_NEAR(stats.mean, 0.0, 1e-12);
    EXPECT_NEAR(stats.stddev, 1.0, 1e-12);
}

TEST(SyntheticBlobs, DeterministicUnderSeed) {
    SplitMix64 a(157), b(157);
    const Dataset da = synthetic_blobs(10, 3, 8, 2.0, a);
    const Dataset db = synthetic_blobs(10, 3, 8, 2.0, b);
    ASSERT_EQ(da.features.size(), db.features.size());
    for (std::size_t i = 0; i < da.features.size(); ++i) {
        ASSERT_EQ(da.features.data()[i], db.features.data()[i]);
    }
    EXPECT_EQ(da.labels, db.labels);
}

TEST(SyntheticBlobs, PairwiseMeanDistanceEqualsSeparation) {
    SplitMix64 rng(163);
    const double sep = 4.0;
    const Dataset d = synthetic_blobs(2000, 3, 16, sep, rng);
    std::vector<std::vector<double>> means(3, std::vector<double>(16, 0.0));
    std::vector<int> counts(3, 0);
    for (std::size_t r = 0; r < d.size(); ++r) {
        const int c = d.labels[r];
        ++counts[c];
        for (std::size_t f = 0; f < 16; ++f) means[c][f] += d.features(r, f);
    }
    for (int c = 0; c < 3; ++c) {
        for (auto& v : means[c]) v /= counts[c];
    }
    for (int a1 = 0; a1 < 3; ++a1) {
        for (int b1 = a1 + 1; b1 < 3; ++b1) {
            double dist2 = 0.0;
            for (std::size_t f = 0; f < 16; ++f) {
                const double diff = means[a1][f] - means[b1][f];
                dist2 += diff * diff;
            }
            EXPECT_NEAR(std::sqrt(dist2), sep, 0.15);
        }
    }
}

TEST(SyntheticBlobs, ZeroSeparationIsUnlearnable) {
    // A linear classifier on indistinguishable classes stays at ln(2).
    SplitMix64 data_rng(167);
    Dataset data = synthetic_blobs(1000, 2, 16, 0.0, data_rng);
    standardize(data);
    SplitMix64 init_rng(173);
    DenseNet net = make_mlp({16, 2}, Nonlinearity::identity(), 0.0, init_rng);
    Adam opt(net, AdamHyper{1e-2, 0.9, 0.999, 1e-8});
    double loss = 0.0;
    for (int epoch = 1; epoch <= 20; ++epoch) {
        SplitMix64 epoch_rng(400 + epoch);
        loss = train_epoch(net, data, opt, epoch_rng, 64, LossKind::LogLoss);
    }
    EXPECT_NEAR(loss, std::log(2.0), 0.05);
}

TEST(SyntheticBlobs, WellSeparatedBlobsAreLearnable) {
    SplitMix64 data_rng(179);
    Dataset data = synthetic_blobs(500, 2, 16, 10.0, data_rng);
    standardize(data);
    SplitMix64 init_rng(181);
    DenseNet net = make_mlp({16, 16, 2}, Nonlinearity::activation(Activation::gelu()), 0.0,
                            init_rng);
    Adam opt(net, AdamHyper{1e-3, 0.9, 0.999, 1e-8});
    double loss = 1e9;
    for (int epoch = 1; epoch <= 20; ++epoch) {
        SplitMix64 epoch_rng(600 + epoch);
        loss = train_epoch(net, data, opt, epoch_rng, 64, LossKind::LogLoss);
    }
    EXPECT_LT(loss, 0.1);
}

TEST(SyntheticBlobs, Validation) {
    SplitMix64 rng(191);
    EXPECT_THROW(synthetic_blobs(0, 2, 4, 1.0, rng), std::invalid_argument);
    EXPECT_THROW(synthetic_blobs(5, 10, 4, 1.0, rng), std::invalid_argument);
}

TEST(Subset, FirstNInOrder) {
    SplitMix64 rng(193);
    const Dataset d = synthetic_blobs(5, 2, 3, 1.0, rng);
    const Dataset s = subset(d, 4);
    EXPECT_EQ(s.size(), 4u);
    for (std::size_t r = 0; r < 4; ++r) {
        EXPECT_EQ(s.labels[r], d.labels[r]);
        for (std::size_t c = 0; c < 3; ++c) ASSERT_EQ(s.features(r, c), d.features(r, c));
    }
    EXPECT_THROW(subset(d, 0), std::invalid_argument);
    EXPECT_THROW(subset(d, 11), std::invalid_argument);
}

// Shape checks against the real MNIST distribution, when a copy is present.
TEST(Mnist, RealFilesWhenAvailable) {
    const char* dir = std::getenv("GELU_LAB_MNIST_DIR");
    if (dir == nullptr) GTEST_SKIP() << "GELU_LAB_MNIST_DIR not set";
    const std::string base(dir);
    const Dataset train = load_mnist(base + "/train-images-idx3-ubyte",
                                     base + "/train-labels-idx1-ubyte");
    const Dataset test = load_mnist(base + "/t10k-images-idx3-ubyte",
                                    base + "/t10k-labels-idx1-ubyte");
    EXPECT_EQ(train.features.rows(), 60000u);
    EXPECT_EQ(train.features.cols(), 784u);
    EXPECT_EQ(train.labels.size(), 60000u);
    EXPECT_EQ(test.features.rows(), 10000u);
    EXPECT_EQ(test.labels.size(), 10000u);
}

}  // namespace
