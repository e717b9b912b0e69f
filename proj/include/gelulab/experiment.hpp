#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gelulab/activations.hpp"
#include "gelulab/dataset.hpp"
#include "gelulab/errors.hpp"
#include "gelulab/network.hpp"

namespace gelulab {

enum class Task { MnistClf, MnistAe, SoiDemo };

inline std::string task_name(Task t) {
    switch (t) {
        case Task::MnistClf: return "clf";
        case Task::MnistAe: return "ae";
        case Task::SoiDemo: return "soi-demo";
    }
    return "?";
}

inline Task task_from_name(const std::string& s) {
    if (s == "clf") return Task::MnistClf;
    if (s == "ae") return Task::MnistAe;
    if (s == "soi-demo") return Task::SoiDemo;
    throw ConfigError("unknown task: " + s);
}

// Declarative description of one experiment. Everything a run needs is in
// here; two identical configs produce byte-identical CSV output.
struct ExperimentConfig {
    Task task = Task::MnistClf;
    Activation activation = Activation::gelu();
    bool use_soi = false;         // SOI layers instead of a fixed nonlinearity
    double dropout_rate = 0.0;
    double lr = 1e-3;
    std::vector<double> lr_sweep;  // optional; empty = single lr
    int epochs = 10;
    int batch_size = 128;
    int runs = 1;
    std::uint64_t seed = 1;
    std::vector<std::size_t> widths;  // hidden widths (clf) or the ae ladder
    std::string train_images, train_labels, test_images, test_labels;
    bool synthetic = false;
    std::size_t subset_train = 8000;  // desk-scale caps; 0 = use everything
    std::size_t subset_val = 2000;
    std::size_t width_div = 1;  // ae ladder divisor
    std::string out;            // CSV path; empty = don't write

    // Synthetic fallback shape, MNIST-like by default.
    std::size_t synth_features = 784;
    std::size_t synth_classes = 10;
    double synth_separation = 3.0;
};

// The paper-scale autoencoder ladder.
inline const std::vector<std::size_t> kAutoencoderLadder = {1000, 500, 250, 30, 250, 500, 1000};

// Desk-scale ladder division: exact quotients pass through; ragged ones
// round up to the next multiple of 8. div = 4 gives 250,125,64,8,64,125,250.
inline std::size_t scale_width(std::size_t w, std::size_t div) {
    if (div < 1) throw ConfigError("width divisor must be >= 1");
    if (w % div == 0) return std::max<std::size_t>(1, w / div);
    const std::size_t q = (w + div - 1) / div;
    return ((q + 7) / 8) * 8;
}

inline std::vector<std::size_t> scale_ladder(const std::vector<std::size_t>& ladder,
                                             std::size_t div) {
    std::vector<std::size_t> out;
    out.reserve(ladder.size());
    for (std::size_t w : ladder) out.push_back(scale_width(w, div));
    return out;
}

enum class Split { Train, Val };

inline std::string split_name(Split s) { return s == Split::Train ? "train" : "val"; }

struct LossRecord {
    int run = 0;
    int epoch = 0;  // 1-based
    Split split = Split::Train;
    double loss = 0.0;
};

// Per (run, epoch, split) loss records. Medians are recomputed from the
// records rather than stored.
struct LossCurve {
    std::vector<LossRecord> records;

    void add(int run, int epoch, Split split, double loss) {
        records.push_back({run, epoch, split, loss});
    }

    std::vector<double> losses(int epoch, Split split) const {
        std::vector<double> out;
        for (const auto& r : records) {
            if (r.epoch == epoch && r.split == split) out.push_back(r.loss);
        }
        return out;
    }

    // Middle order statistic across runs; the lower median for even counts.
    double median(int epoch, Split split) const {
        std::vector<double> v = losses(epoch, split);
        if (v.empty()) throw std::invalid_argument("median: no records for epoch " +
                                                   std::to_string(epoch));
        std::sort(v.begin(), v.end());
        return v[(v.size() - 1) / 2];
    }

    int max_epoch() const {
        int m = 0;
        for (const auto& r : records) m = std::max(m, r.epoch);
        return m;
    }

    void sort() {
        std::stable_sort(records.begin(), records.end(),
                         [](const LossRecord& a, const LossRecord& b) {
                             if (a.run != b.run) return a.run < b.run;
                             if (a.epoch != b.epoch) return a.epoch < b.epoch;
                             return static_cast<int>(a.split) < static_cast<int>(b.split);
                         });
    }
};

// Header `run,epoch,split,loss`, rows ordered by (run, epoch, split), losses
// printed with 17 significant digits so re-reading loses nothing.
inline void write_csv(const LossCurve& curve, const std::string& path) {
    LossCurve sorted = curve;
    sorted.sort();
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << "run,epoch,split,loss\n";
    char buf[64];
    for (const auto& r : sorted.records) {
        std::snprintf(buf, sizeof buf, "%.17g", r.loss);
        out << r.run << ',' << r.epoch << ',' << split_name(r.split) << ',' << buf << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Config <-> JSON
// ---------------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
    nlohmann::json act;
    if (c.use_soi) {
        act = {{"kind", "soi"}};
    } else {
        act = {{"kind", activation_name(c.activation)},
               {"alpha", c.activation.alpha},
               {"mu", c.activation.mu},
               {"sigma", c.activation.sigma}};
    }
    j = nlohmann::json{{"task", task_name(c.task)},
                       {"activation", act},
                       {"dropout", c.dropout_rate},
                       {"lr", c.lr},
                       {"lr_sweep", c.lr_sweep},
                       {"epochs", c.epochs},
                       {"batch_size", c.batch_size},
                       {"runs", c.runs},
                       {"seed", c.seed},
                       {"widths", c.widths},
                       {"train_images", c.train_images},
                       {"train_labels", c.train_labels},
                       {"test_images", c.test_images},
                       {"test_labels", c.test_labels},
                       {"synthetic", c.synthetic},
                       {"subset_train", c.subset_train},
                       {"subset_val", c.subset_val},
                       {"width_div", c.width_div},
                       {"out", c.out},
                       {"synth_features", c.synth_features},
                       {"synth_classes", c.synth_classes},
                       {"synth_separation", c.synth_separation}};
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
    c.task = task_from_name(j.at("task").get<std::string>());
    const auto& act = j.at("activation");
    const std::string kind = act.at("kind").get<std::string>();
    if (kind == "soi") {
        c.use_soi = true;
        c.activation = Activation::gelu();
    } else {
        c.use_soi = false;
        c.activation = activation_from_name(kind, act.value("alpha", 1.0),
                                            act.value("mu", 0.0), act.value("sigma", 1.0));
    }
    j.at("dropout").get_to(c.dropout_rate);
    j.at("lr").get_to(c.lr);
    j.at("lr_sweep").get_to(c.lr_sweep);
    j.at("epochs").get_to(c.epochs);
    j.at("batch_size").get_to(c.batch_size);
    j.at("runs").get_to(c.runs);
    j.at("seed").get_to(c.seed);
    j.at("widths").get_to(c.widths);
    j.at("train_images").get_to(c.train_images);
    j.at("train_labels").get_to(c.train_labels);
    j.at("test_images").get_to(c.test_images);
    j.at("test_labels").get_to(c.test_labels);
    j.at("synthetic").get_to(c.synthetic);
    j.at("subset_train").get_to(c.subset_train);
    j.at("subset_val").get_to(c.subset_val);
    j.at("width_div").get_to(c.width_div);
    j.at("out").get_to(c.out);
    j.at("synth_features").get_to(c.synth_features);
    j.at("synth_classes").get_to(c.synth_classes);
    j.at("synth_separation").get_to(c.synth_separation);
}

inline std::string config_to_json_string(const ExperimentConfig& c) {
    nlohmann::json j = c;
    return j.dump(2) + "\n";
}

inline ExperimentConfig config_from_json_string(const std::string& text) {
    try {
        return nlohmann::json::parse(text).get<ExperimentConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Runners
// ---------------------------------------------------------------------------

inline void validate_config(const ExperimentConfig& c) {
    if (c.runs < 1) throw ConfigError("runs must be >= 1");
    if (c.epochs < 1) throw ConfigError("epochs must be >= 1");
    if (c.batch_size < 1) throw ConfigError("batch size must be >= 1");
    if (!(c.dropout_rate >= 0.0 && c.dropout_rate < 1.0)) {
        throw ConfigError("dropout rate must be in [0, 1)");
    }
    if (!(c.lr >= 0.0)) throw ConfigError("learning rate must be >= 0");
    for (std::size_t w : c.widths) {
        if (w == 0) throw ConfigError("zero-width layer in widths");
    }
    if (c.use_soi && c.dropout_rate != 0.0) {
        throw ConfigError("SOI runs use no dropout");
    }
}

struct TrainValData {
    Dataset train;
    Dataset val;
};

// Synthetic fallback: two independent blob draws (train/val) from streams
// derived off the config seed, then standardized with the train stats.
// Class counts are padded up when the subset size does not divide evenly.
inline TrainValData make_synthetic_data(const ExperimentConfig& c) {
    const std::size_t classes = c.synth_classes;
    auto per_class = [&](std::size_t total) {
        return std::max<std::size_t>(1, (total + classes - 1) / classes);
    };
    SplitMix64 data_master(c.seed ^ 0x5d41402abc4b2a76ULL);
    SplitMix64 train_rng = data_master.split();
    SplitMix64 val_rng = data_master.split();
    TrainValData d;
    d.train = synthetic_blobs(per_class(c.subset_train), classes, c.synth_features,
                              c.synth_separation, train_rng);
    d.val = synthetic_blobs(per_class(c.subset_val), classes, c.synth_features,
                            c.synth_separation, val_rng);
    standardize(d.train, {&d.val});
    return d;
}

inline TrainValData load_real_data(const ExperimentConfig& c) {
    TrainValData d;
    d.train = load_mnist(c.train_images, c.train_labels);
    d.val = load_mnist(c.test_images, c.test_labels);
    if (c.subset_train > 0 && c.subset_train < d.train.size()) {
        d.train = subset(d.train, c.subset_train);
    }
    if (c.subset_val > 0 && c.subset_val < d.val.size()) {
        d.val = subset(d.val, c.subset_val);
    }
    standardize(d.train, {&d.val});
    return d;
}

inline bool file_exists(const std::string& path) {
    std::ifstream f(path);
    return f.good();
}

inline TrainValData resolve_data(const ExperimentConfig& c) {
    if (c.synthetic) return make_synthetic_data(c);
    const bool all_set = !c.train_images.empty() && !c.train_labels.empty() &&
                         !c.test_images.empty() && !c.test_labels.empty();
    if (all_set && file_exists(c.train_images) && file_exists(c.train_labels) &&
        file_exists(c.test_images) && file_exists(c.test_labels)) {
        return load_real_data(c);
    }
    throw DataError(
        "missing data files and no --synthetic flag; expected --train-images '" +
        c.train_images + "', --train-labels '" + c.train_labels + "', --test-images '" +
        c.test_images + "', --test-labels '" + c.test_labels + "'");
}

namespace detail {

// Per-run stream layout: a master stream seeded with seed + run yields, in
// order, the init seed, the SOI split base, and the epoch seed base. Epoch
// e then trains with SplitMix64(epoch_base + e).
struct RunStreams {
    std::uint64_t init_seed;
    std::uint64_t soi_seed;
    std::uint64_t epoch_base;
};

inline RunStreams run_streams(std::uint64_t seed, int run) {
    SplitMix64 master(seed + static_cast<std::uint64_t>(run));
    RunStreams s{};
    s.init_seed = master.next_u64();
    s.soi_seed = master.next_u64();
    s.epoch_base = master.next_u64();
    return s;
}

inline LossCurve run_experiment(const ExperimentConfig& cfg,
                                const std::vector<std::size_t>& dims, Nonlinearity hidden,
                                LossKind loss_kind) {
    TrainValData data = resolve_data(cfg);
    if (data.train.features.cols() != dims.front()) {
        throw ConfigError("widths do not compose: input dim " +
                          std::to_string(data.train.features.cols()) + " vs configured " +
                          std::to_string(dims.front()));
    }
    LossCurve curve;
    for (int r = 0; r < cfg.runs; ++r) {
        const RunStreams streams = run_streams(cfg.seed, r);
        SplitMix64 init_rng(streams.init_seed);
        DenseNet net;
        try {
            net = make_mlp(dims, hidden, cfg.dropout_rate, init_rng, streams.soi_seed);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        Adam optimizer(net, AdamHyper{cfg.lr, 0.9, 0.999, 1e-8});
        for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
            net.set_mode(Mode::Train);
            SplitMix64 epoch_rng(streams.epoch_base + static_cast<std::uint64_t>(epoch));
            const double train_loss =
                train_epoch(net, data.train, optimizer, epoch_rng,
                            static_cast<std::size_t>(cfg.batch_size), loss_kind);
            net.set_mode(Mode::Eval);
            const double val_loss = evaluate(net, data.val, loss_kind);
            curve.add(r, epoch, Split::Train, train_loss);
            curve.add(r, epoch, Split::Val, val_loss);
        }
    }
    curve.sort();
    return curve;
}

}  // namespace detail

// 7-layer > 128-wide MNIST classifier (or the configured widths); records
// train log loss (mean of minibatch losses) and Eval-mode validation log
// loss per epoch for each run.
inline LossCurve run_classification(const ExperimentConfig& cfg) {
    validate_config(cfg);
    if (cfg.use_soi) throw ConfigError("use the soi-demo task for SOI runs");
    std::vector<std::size_t> hidden = cfg.widths.empty()
                                          ? std::vector<std::size_t>(7, 128)
                                          : cfg.widths;
    const std::size_t in_dim = cfg.synthetic ? cfg.synth_features : 784;
    const std::size_t out_dim = cfg.synthetic ? cfg.synth_classes : 10;
    std::vector<std::size_t> dims;
    dims.push_back(in_dim);
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(out_dim);
    return detail::run_experiment(cfg, dims, Nonlinearity::activation(cfg.activation),
                                  LossKind::LogLoss);
}

// Deep autoencoder with the (optionally width-divided) ladder, MSE
// reconstruction loss against the standardized inputs.
inline LossCurve run_autoencoder(const ExperimentConfig& cfg) {
    validate_config(cfg);
    if (cfg.use_soi) throw ConfigError("use the soi-demo task for SOI runs");
    std::vector<std::size_t> ladder = cfg.widths.empty() ? kAutoencoderLadder : cfg.widths;
    ladder = scale_ladder(ladder, cfg.width_div);
    const std::size_t in_dim = cfg.synthetic ? cfg.synth_features : 784;
    std::vector<std::size_t> dims;
    dims.push_back(in_dim);
    dims.insert(dims.end(), ladder.begin(), ladder.end());
    dims.push_back(in_dim);
    return detail::run_experiment(cfg, dims, Nonlinearity::activation(cfg.activation),
                                  LossKind::Mse);
}

// The classifier with SOI layers in every activation position and no
// dropout; validation passes swap in the exact GELU via Eval mode.
inline LossCurve run_soi_demo(const ExperimentConfig& cfg) {
    if (cfg.dropout_rate != 0.0) throw ConfigError("SOI runs use no dropout");
    validate_config(cfg);
    std::vector<std::size_t> hidden = cfg.widths.empty()
                                          ? std::vector<std::size_t>(7, 128)
                                          : cfg.widths;
    const std::size_t in_dim = cfg.synthetic ? cfg.synth_features : 784;
    const std::size_t out_dim = cfg.synthetic ? cfg.synth_classes : 10;
    std::vector<std::size_t> dims;
    dims.push_back(in_dim);
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(out_dim);
    return detail::run_experiment(cfg, dims, Nonlinearity::soi(), LossKind::LogLoss);
}

// ---------------------------------------------------------------------------
// Plot tables
// ---------------------------------------------------------------------------

struct ActivationTableRow {
    double x = 0.0;
    std::vector<double> values;
};

// Grid of x against f_k(x) for each requested nonlinearity, for external
// plotting.
inline std::vector<ActivationTableRow> emit_activation_table(double lo, double hi, double step,
                                                             const std::vector<Activation>&
                                                                 kinds) {
    const std::size_t n = grid_point_count(lo, hi, step);
    std::vector<ActivationTableRow> rows;
    rows.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        ActivationTableRow row;
        row.x = lo + static_cast<double>(k) * step;
        row.values.reserve(kinds.size());
        for (const auto& kind : kinds) row.values.push_back(act_forward(kind, row.x));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace gelulab
