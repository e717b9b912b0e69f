// gelu-lab: train desk-scale MNIST-style experiments with selectable
// nonlinearities (GELU / ReLU / ELU / CauchyLU / LaLU / stochastic 0-I
// layers) and emit loss curves and plot tables as CSV/TSV.
//
// Exit codes: 0 success, 2 config error, 3 data error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gelulab/gelulab.hpp"

namespace {

using namespace gelulab;

struct CliOptions {
    std::string activation = "gelu";
    double alpha = 1.0;
    double mu = 0.0;
    double sigma = 1.0;
    double dropout = 0.0;
    double lr = 1e-3;
    bool lr_sweep = false;
    int epochs = 10;
    int batch_size = 128;
    int runs = 5;
    std::uint64_t seed = 1;
    std::vector<std::size_t> widths;
    std::string train_images, train_labels, test_images, test_labels;
    bool synthetic = false;
    std::size_t subset = 8000;
    std::size_t subset_val = 0;  // 0 = subset / 4
    std::size_t width_div = 4;
    std::string out;
    std::string config_path;
    std::string dump_config_path;
    double blob_sep = 3.0;
};

void add_common_options(CLI::App* cmd, CliOptions& o, bool is_ae) {
    cmd->add_option("--activation", o.activation,
                    "relu|elu|gelu|gelu-tanh|cauchylu|lalu|soi");
    cmd->add_option("--alpha", o.alpha, "ELU alpha");
    cmd->add_option("--mu", o.mu, "GELU mu");
    cmd->add_option("--sigma", o.sigma, "GELU sigma");
    cmd->add_option("--dropout", o.dropout, "dropout rate in [0,1)");
    cmd->add_option("--lr", o.lr, "Adam learning rate");
    cmd->add_option("--epochs", o.epochs, "training epochs");
    cmd->add_option("--batch-size", o.batch_size, "minibatch size");
    cmd->add_option("--runs", o.runs, "independent runs for median aggregation");
    cmd->add_option("--seed", o.seed, "base seed; run r uses seed+r");
    cmd->add_option("--widths", o.widths, "layer widths, comma separated")
        ->delimiter(',');
    cmd->add_option("--train-images", o.train_images, "IDX3 training images (.gz ok)");
    cmd->add_option("--train-labels", o.train_labels, "IDX1 training labels");
    cmd->add_option("--test-images", o.test_images, "IDX3 validation images");
    cmd->add_option("--test-labels", o.test_labels, "IDX1 validation labels");
    cmd->add_flag("--synthetic", o.synthetic, "use the synthetic blob dataset");
    cmd->add_option("--subset", o.subset, "training subset cap (0 = all)");
    cmd->add_option("--subset-val", o.subset_val, "validation subset cap (default subset/4)");
    cmd->add_option("--blob-sep", o.blob_sep, "synthetic class-mean separation");
    cmd->add_option("--out", o.out, "CSV output path");
    cmd->add_option("--config", o.config_path, "load a JSON config; flags override");
    cmd->add_option("--dump-config", o.dump_config_path,
                    "write the resolved config as JSON and exit");
    if (is_ae) {
        cmd->add_flag("--lr-sweep", o.lr_sweep, "sweep lr over 1e-3, 1e-4, 1e-5");
        cmd->add_option("--width-div", o.width_div, "autoencoder ladder divisor");
    }
}

ExperimentConfig resolve_config(const CLI::App* cmd, const CliOptions& o, Task task) {
    ExperimentConfig cfg;
    cfg.task = task;
    if (task == Task::MnistAe) {
        cfg.batch_size = 64;
        cfg.runs = 3;
        cfg.width_div = 4;
    } else {
        cfg.batch_size = 128;
        cfg.runs = 5;
        cfg.width_div = 1;
    }
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw ConfigError("cannot open config: " + o.config_path);
        std::stringstream ss;
        ss << in.rdbuf();
        cfg = config_from_json_string(ss.str());
    }
    auto passed = [&](const std::string& name) {
        const CLI::Option* opt = cmd->get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    };
    if (passed("--activation")) {
        if (o.activation == "soi") {
            cfg.use_soi = true;
        } else {
            cfg.use_soi = false;
            cfg.activation = activation_from_name(o.activation, o.alpha, o.mu, o.sigma);
        }
    } else if (!cfg.use_soi && (passed("--alpha") || passed("--mu") || passed("--sigma"))) {
        cfg.activation = activation_from_name(activation_name(cfg.activation), o.alpha, o.mu,
                                              o.sigma);
    }
    if (task == Task::SoiDemo) cfg.use_soi = true;
    if (passed("--dropout")) cfg.dropout_rate = o.dropout;
    if (passed("--lr")) cfg.lr = o.lr;
    if (passed("--epochs")) cfg.epochs = o.epochs;
    if (passed("--batch-size")) cfg.batch_size = o.batch_size;
    if (passed("--runs")) cfg.runs = o.runs;
    if (passed("--seed")) cfg.seed = o.seed;
    if (passed("--widths")) cfg.widths = o.widths;
    if (passed("--train-images")) cfg.train_images = o.train_images;
    if (passed("--train-labels")) cfg.train_labels = o.train_labels;
    if (passed("--test-images")) cfg.test_images = o.test_images;
    if (passed("--test-labels")) cfg.test_labels = o.test_labels;
    if (passed("--synthetic")) cfg.synthetic = o.synthetic;
    if (passed("--subset")) cfg.subset_train = o.subset;
    if (passed("--subset-val")) {
        cfg.subset_val = o.subset_val;
    } else if (o.config_path.empty() || passed("--subset")) {
        // No explicit val cap: track the train cap at the desk-scale 4:1 ratio.
        cfg.subset_val = cfg.subset_train / 4;
        if (cfg.subset_val == 0) cfg.subset_val = cfg.subset_train;
    }
    if (passed("--blob-sep")) cfg.synth_separation = o.blob_sep;
    if (passed("--out")) cfg.out = o.out;
    if (passed("--width-div")) cfg.width_div = o.width_div;
    if (passed("--lr-sweep") && o.lr_sweep) cfg.lr_sweep = {1e-3, 1e-4, 1e-5};
    return cfg;
}

void report_curve(const LossCurve& curve, const ExperimentConfig& cfg,
                  const std::string& out_path) {
    const int last = curve.max_epoch();
    std::printf("final median train loss = %.6f, val loss = %.6f (epoch %d, %d run%s)\n",
                curve.median(last, Split::Train), curve.median(last, Split::Val), last,
                cfg.runs, cfg.runs == 1 ? "" : "s");
    if (!out_path.empty()) {
        write_csv(curve, out_path);
        std::printf("wrote %s\n", out_path.c_str());
    }
}

// Inserts a tag before the extension: curves.csv -> curves_lr1e-04.csv
std::string tagged_path(const std::string& path, const std::string& tag) {
    const std::size_t dot = path.find_last_of('.');
    const std::size_t slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return path + "_" + tag;
    }
    return path.substr(0, dot) + "_" + tag + path.substr(dot);
}

int run_training_command(const CLI::App* cmd, const CliOptions& o, Task task) {
    ExperimentConfig cfg = resolve_config(cmd, o, task);
    if (!o.dump_config_path.empty()) {
        std::ofstream out(o.dump_config_path);
        if (!out) throw ConfigError("cannot write config: " + o.dump_config_path);
        out << config_to_json_string(cfg);
        std::printf("wrote %s\n", o.dump_config_path.c_str());
        return 0;
    }
    if (task == Task::MnistAe && !cfg.lr_sweep.empty()) {
        double best_lr = cfg.lr_sweep.front();
        double best_final = std::numeric_limits<double>::infinity();
        for (double lr : cfg.lr_sweep) {
            ExperimentConfig sweep_cfg = cfg;
            sweep_cfg.lr = lr;
            sweep_cfg.lr_sweep.clear();
            char tag[32];
            std::snprintf(tag, sizeof tag, "lr%.0e", lr);
            std::printf("-- lr = %g --\n", lr);
            LossCurve curve = run_autoencoder(sweep_cfg);
            const std::string path = cfg.out.empty() ? "" : tagged_path(cfg.out, tag);
            report_curve(curve, sweep_cfg, path);
            const double final_train = curve.median(curve.max_epoch(), Split::Train);
            if (final_train < best_final) {
                best_final = final_train;
                best_lr = lr;
            }
        }
        std::printf("best lr by final median train loss: %g (loss %.6f)\n", best_lr,
                    best_final);
        return 0;
    }
    LossCurve curve;
    switch (task) {
        case Task::MnistClf: curve = run_classification(cfg); break;
        case Task::MnistAe: curve = run_autoencoder(cfg); break;
        case Task::SoiDemo: curve = run_soi_demo(cfg); break;
    }
    report_curve(curve, cfg, cfg.out);
    return 0;
}

int run_plot_act(double lo, double hi, double step, const std::vector<std::string>& kind_names,
                 double alpha, double mu, double sigma, const std::string& out_path) {
    std::vector<Activation> kinds;
    for (const auto& name : kind_names) {
        kinds.push_back(activation_from_name(name, alpha, mu, sigma));
    }
    const auto rows = emit_activation_table(lo, hi, step, kinds);
    std::ostringstream text;
    text << "# x";
    for (const auto& name : kind_names) text << '\t' << name;
    text << '\n';
    char buf[64];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%.17g", row.x);
        text << buf;
        for (double v : row.values) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            text << '\t' << buf;
        }
        text << '\n';
    }
    if (out_path.empty()) {
        std::cout << text.str();
    } else {
        std::ofstream out(out_path);
        if (!out) throw DataError("cannot open for writing: " + out_path);
        out << text.str();
        std::printf("wrote %s (%zu rows)\n", out_path.c_str(), rows.size());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GELU-family activation library and experiment runner"};
    app.require_subcommand(1);

    CliOptions clf_opts, ae_opts, soi_opts;
    CLI::App* clf = app.add_subcommand("clf", "MNIST-style classifier (7x128 MLP)");
    add_common_options(clf, clf_opts, false);
    CLI::App* ae = app.add_subcommand("ae", "MNIST-style deep autoencoder");
    add_common_options(ae, ae_opts, true);
    CLI::App* soi = app.add_subcommand("soi-demo",
                                       "classifier with stochastic 0-I layers, no dropout");
    add_common_options(soi, soi_opts, false);

    double plot_lo = -4.0, plot_hi = 4.0, plot_step = 0.01;
    double plot_alpha = 1.0, plot_mu = 0.0, plot_sigma = 1.0;
    std::vector<std::string> plot_kinds = {"gelu", "relu", "elu"};
    std::string plot_out;
    CLI::App* plot = app.add_subcommand("plot-act", "emit a TSV table of activation curves");
    plot->add_option("--lo", plot_lo, "grid start");
    plot->add_option("--hi", plot_hi, "grid end");
    plot->add_option("--step", plot_step, "grid step");
    plot->add_option("--kinds", plot_kinds, "activations, comma separated")->delimiter(',');
    plot->add_option("--alpha", plot_alpha, "ELU alpha");
    plot->add_option("--mu", plot_mu, "GELU mu");
    plot->add_option("--sigma", plot_sigma, "GELU sigma");
    plot->add_option("--out", plot_out, "TSV output path (default stdout)");

    double scan_lo = -8.0, scan_hi = 8.0, scan_step = 1e-3;
    CLI::App* scan = app.add_subcommand(
        "approx-scan", "max |tanh-approximate GELU - exact GELU| over a grid");
    scan->add_option("--lo", scan_lo, "grid start");
    scan->add_option("--hi", scan_hi, "grid end");
    scan->add_option("--step", scan_step, "grid step");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (clf->parsed()) return run_training_command(clf, clf_opts, gelulab::Task::MnistClf);
        if (ae->parsed()) return run_training_command(ae, ae_opts, gelulab::Task::MnistAe);
        if (soi->parsed()) return run_training_command(soi, soi_opts, gelulab::Task::SoiDemo);
        if (plot->parsed()) {
            return run_plot_act(plot_lo, plot_hi, plot_step, plot_kinds, plot_alpha, plot_mu,
                                plot_sigma, plot_out);
        }
        if (scan->parsed()) {
            const auto result = gelulab::approximation_error_scan(scan_lo, scan_hi, scan_step);
            std::printf("max_abs_err = %.17g at x = %.17g\n", result.max_abs_err,
                        result.argmax);
            return 0;
        }
    } catch (const gelulab::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const gelulab::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
