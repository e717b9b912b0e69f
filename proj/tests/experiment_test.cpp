#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "gelulab/experiment.hpp"

namespace {

using namespace gelulab;

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig tiny_synthetic_config() {
    ExperimentConfig cfg;
    cfg.task = Task::MnistClf;
    cfg.synthetic = true;
    cfg.synth_features = 16;
    cfg.synth_classes = 4;
    cfg.synth_separation = 3.0;
    cfg.subset_train = 64;
    cfg.subset_val = 32;
    cfg.widths = {8};
    cfg.epochs = 2;
    cfg.batch_size = 32;
    cfg.runs = 1;
    cfg.seed = 5;
    return cfg;
}

TEST(ConfigJson, RoundTripIsIdentity) {
    ExperimentConfig cfg = tiny_synthetic_config();
    cfg.task = Task::MnistAe;
    cfg.activation = Activation::elu(0.7);
    cfg.lr_sweep = {1e-3, 1e-4, 1e-5};
    cfg.dropout_rate = 0.25;
    cfg.lr = 2.5e-4;
    cfg.width_div = 4;
    cfg.out = "curve.csv";
    cfg.train_images = "a";
    cfg.train_labels = "b";
    cfg.test_images = "c";
    cfg.test_labels = "d";

    const std::string text = config_to_json_string(cfg);
    const ExperimentConfig back = config_from_json_string(text);
    EXPECT_EQ(config_to_json_string(back), text);
    EXPECT_EQ(back.task, cfg.task);
    EXPECT_EQ(back.activation.type, cfg.activation.type);
    EXPECT_EQ(back.activation.alpha, cfg.activation.alpha);
    EXPECT_EQ(back.lr, cfg.lr);
    EXPECT_EQ(back.lr_sweep, cfg.lr_sweep);
    EXPECT_EQ(back.widths, cfg.widths);
    EXPECT_EQ(back.seed, cfg.seed);
    EXPECT_EQ(back.out, cfg.out);
}

TEST(ConfigJson, SoiVariantRoundTrips) {
    ExperimentConfig cfg = tiny_synthetic_config();
    cfg.task = Task::SoiDemo;
    cfg.use_soi = true;
    const ExperimentConfig back = config_from_json_string(config_to_json_string(cfg));
    EXPECT_TRUE(back.use_soi);
    EXPECT_EQ(back.task, Task::SoiDemo);
    EXPECT_THROW(config_from_json_string("{nonsense"), ConfigError);
}

TEST(LossCurveMedian, OddAndEvenRunCounts) {
    LossCurve curve;
    const double odd[5] = {5.0, 1.0, 3.0, 2.0, 4.0};
    for (int r = 0; r < 5; ++r) curve.add(r, 1, Split::Train, odd[r]);
    EXPECT_EQ(curve.median(1, Split::Train), 3.0);  // middle order statistic

    LossCurve even;
    const double vals[4] = {4.0, 1.0, 3.0, 2.0};
    for (int r = 0; r < 4; ++r) even.add(r, 1, Split::Val, vals[r]);
    EXPECT_EQ(even.median(1, Split::Val), 2.0);  // lower median

    EXPECT_THROW(curve.median(2, Split::Train), std::invalid_argument);
}

TEST(WriteCsv, StructureAndDigits) {
    const std::string path = "/tmp/gelulab_csv_test.csv";

    LossCurve empty;
    write_csv(empty, path);
    EXPECT_EQ(read_text(path), "run,epoch,split,loss\n");

    LossCurve curve;
    curve.add(0, 2, Split::Val, 0.25);
    curve.add(0, 1, Split::Train, 1.0 / 3.0);
    curve.add(0, 1, Split::Val, 0.5);
    curve.add(0, 2, Split::Train, 0.125);
    write_csv(curve, path);
    const std::string text = read_text(path);
    EXPECT_EQ(text,
              "run,epoch,split,loss\n"
              "0,1,train,0.33333333333333331\n"
              "0,1,val,0.5\n"
              "0,2,train,0.125\n"
              "0,2,val,0.25\n");

    EXPECT_THROW(write_csv(curve, "/nonexistent-dir/x.csv"), DataError);
}

TEST(RunClassification, StructuralContract) {
    ExperimentConfig cfg = tiny_synthetic_config();
    cfg.epochs = 1;
    const LossCurve curve = run_classification(cfg);
    ASSERT_EQ(curve.records.size(), 2u);  // one train row, one val row
    EXPECT_EQ(curve.records[0].epoch, 1);
    EXPECT_EQ(curve.records[0].split, Split::Train);
    EXPECT_EQ(curve.records[1].split, Split::Val);
}

TEST(RunClassification, DeterministicCsvBytes) {
    ExperimentConfig cfg = tiny_synthetic_config();
    cfg.runs = 2;
    const LossCurve a = run_classification(cfg);
    const LossCurve b = run_classification(cfg);
    write_csv(a, "/tmp/gelulab_det_a.csv");
    write_csv(b, "/tmp/gelulab_det_b.csv");
    EXPECT_EQ(read_text("/tmp/gelulab_det_a.csv"), read_text("/tmp/gelulab_det_b.csv"));
}

TEST(RunClassification, MedianIsMiddleOrderStatistic) {
    ExperimentConfig cfg = tiny_synthetic_config();
    cfg.runs = 5;
    cfg.epochs = 1;
    const LossCurve curve = run_classification(cfg);
    std::vector<double> finals = curve.losses(1, Split::Train);
    ASSERT_EQ(finals.size(), 5u);
    std::sort(finals.begin(), finals.end());
    EXPECT_EQ(curve.median(1, Split::Train), finals[2]);
}

TEST(RunClassification, MissingDataListsExpectedPaths) {
    ExperimentConfig cfg = tiny_synthetic_config();
    cfg.synthetic = false;
    cfg.train_images = "/no/such/train-images";
    try {
        run_classification(cfg);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("--synthetic"), std::string::npos);
        EXPECT_NE(msg.find("/no/such/train-images"), std::string::npos);
    }
}

TEST(RunClassification, RejectsSoiActivation) {
    ExperimentConfig cfg = tiny_synthetic_config();
    cfg.use_soi = true;
    EXPECT_THROW(run_classification(cfg), ConfigError);
}

TEST(RunAutoencoder, ZeroLearningRateIsFlat) {
    ExperimentConfig cfg = tiny_synthetic_config();
    cfg.task = Task::MnistAe;
    cfg.widths = {8, 4, 8};
    cfg.width_div = 1;
    cfg.lr = 0.0;
    cfg.epochs = 3;
    cfg.batch_size = 16;
    const LossCurve curve = run_autoencoder(cfg);
    const double v1 = curve.median(1, Split::Val);
    for (int e = 2; e <= 3; ++e) {
        EXPECT_EQ(curve.median(e, Split::Val), v1);  // params frozen -> same eval
        EXPECT_NEAR(curve.median(e, Split::Train), curve.median(1, Split::Train), 1e-12);
    }
}

TEST(RunAutoencoder, RejectsZeroWidths) {
    ExperimentConfig cfg = tiny_synthetic_config();
    cfg.task = Task::MnistAe;
    cfg.widths = {8, 0, 8};
    EXPECT_THROW(run_autoencoder(cfg), ConfigError);
}

TEST(RunSoiDemo, RefusesDropout) {
    ExperimentConfig cfg = tiny_synthetic_config();
    cfg.task = Task::SoiDemo;
    cfg.use_soi = true;
    cfg.dropout_rate = 0.5;
    try {
        run_soi_demo(cfg);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_STREQ(e.what(), "SOI runs use no dropout");
    }
}

TEST(RunSoiDemo, ValidationIsDeterministic) {
    ExperimentConfig cfg = tiny_synthetic_config();
    cfg.task = Task::SoiDemo;
    cfg.use_soi = true;
    cfg.epochs = 2;
    const LossCurve a = run_soi_demo(cfg);
    const LossCurve b = run_soi_demo(cfg);
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        EXPECT_EQ(a.records[i].loss, b.records[i].loss);
    }
}

TEST(WidthScaling, DeskScaleLadder) {
    const std::vector<std::size_t> expected = {250, 125, 64, 8, 64, 125, 250};
    EXPECT_EQ(scale_ladder(kAutoencoderLadder, 4), expected);
    EXPECT_EQ(scale_ladder(kAutoencoderLadder, 1), kAutoencoderLadder);
    EXPECT_EQ(scale_width(1000, 4), 250u);
    EXPECT_EQ(scale_width(250, 4), 64u);  // ragged quotients round up to a multiple of 8
    EXPECT_EQ(scale_width(30, 4), 8u);
}

TEST(ActivationTable, RowContract) {
    const std::vector<Activation> kinds = {Activation::gelu(), Activation::relu(),
                                           Activation::elu(1.0)};
    const auto rows = emit_activation_table(-1.0, 1.0, 0.25, kinds);
    ASSERT_EQ(rows.size(), 9u);  // floor((hi-lo)/step) + 1
    // Row at x = 0: all three defaults vanish.
    const auto& mid = rows[4];
    EXPECT_EQ(mid.x, 0.0);
    for (double v : mid.values) EXPECT_EQ(v, 0.0);
    // Row at x = -1 for ELU(1).
    EXPECT_DOUBLE_EQ(rows[0].values[2], -0.63212055882855768);
    // Grid arithmetic survives a step that is inexact in binary.
    EXPECT_EQ(emit_activation_table(-8.0, 8.0, 1e-3, {Activation::relu()}).size(), 16001u);
}

TEST(ValidateConfig, RejectsBadValues) {
    ExperimentConfig cfg = tiny_synthetic_config();
    cfg.runs = 0;
    EXPECT_THROW(validate_config(cfg), ConfigError);
    cfg = tiny_synthetic_config();
    cfg.epochs = 0;
    EXPECT_THROW(validate_config(cfg), ConfigError);
    cfg = tiny_synthetic_config();
    cfg.dropout_rate = 1.0;
    EXPECT_THROW(validate_config(cfg), ConfigError);
    cfg = tiny_synthetic_config();
    cfg.lr = -1.0;
    EXPECT_THROW(validate_config(cfg), ConfigError);
}

}  // namespace
