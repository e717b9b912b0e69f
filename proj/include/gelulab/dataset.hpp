#pragma once

#include <cmath>
#include <initializer_list>
#include <string>
#include <vector>

#include "gelulab/errors.hpp"
#include "gelulab/idx.hpp"
#include "gelulab/rng.hpp"
#include "gelulab/tensor.hpp"

namespace gelulab {

// Feature matrix plus class labels. Autoencoder targets are the features
// themselves, so no separate target member exists.
struct Dataset {
    Tensor2D features;        // n_examples x n_features
    std::vector<int> labels;  // empty for label-free data

    std::size_t size() const { return features.rows(); }
};

struct StandardizeStats {
    double mean = 0.0;
    double stddev = 0.0;
};

namespace detail {

// Neumaier-compensated sum; plain accumulation over tens of millions of
// pixels loses more digits than the standardization contract allows.
inline double compensated_sum(const double* data, std::size_t n) {
    double sum = 0.0;
    double comp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = data[i];
        const double t = sum + v;
        if (std::fabs(sum) >= std::fabs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

}  // namespace detail

// One global scalar mean and population standard deviation computed over
// every entry of the training features; the same two numbers are applied
// to the other datasets. Mutates in place, returns the stats.
inline StandardizeStats standardize(Dataset& train, std::initializer_list<Dataset*> others = {}) {
    if (train.features.size() == 0) throw DataError("standardize: empty training set");
    const std::size_t n = train.features.size();
    const double mean = detail::compensated_sum(train.features.data(), n) /
                        static_cast<double>(n);
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = train.features.data()[i] - mean;
        sq[i] = d * d;
    }
    const double var = detail::compensated_sum(sq.data(), n) / static_cast<double>(n);
    const double stddev = std::sqrt(var);
    if (stddev == 0.0) throw DataError("standardize: zero standard deviation");
    auto apply = [&](Dataset& d) {
        for (std::size_t i = 0; i < d.features.size(); ++i) {
            d.features.data()[i] = (d.features.data()[i] - mean) / stddev;
        }
    };
    apply(train);
    for (Dataset* d : others) apply(*d);
    return {mean, stddev};
}

// Gaussian clusters, one per class, with unit-variance noise per feature.
// Class c is centered at (separation / sqrt(2)) * e_c, which puts every
// pair of class means at Euclidean distance exactly `separation`. Requires
// n_features >= n_classes so the means stay distinct.
inline Dataset synthetic_blobs(std::size_t n_per_class, std::size_t n_classes,
                               std::size_t n_features, double separation, SplitMix64& rng) {
    if (n_per_class < 1 || n_classes < 1 || n_features < 1) {
        throw std::invalid_argument("synthetic_blobs: all counts must be >= 1");
    }
    if (n_classes > n_features) {
        throw std::invalid_argument("synthetic_blobs: n_features must be >= n_classes");
    }
    const double offset = separation / std::sqrt(2.0);
    const std::size_t n = n_per_class * n_classes;
    Dataset d;
    d.features = Tensor2D(n, n_features);
    d.labels.resize(n);
    std::size_t row = 0;
    for (std::size_t c = 0; c < n_classes; ++c) {
        for (std::size_t k = 0; k < n_per_class; ++k, ++row) {
            for (std::size_t f = 0; f < n_features; ++f) {
                d.features(row, f) = rng.next_normal() + (f == c ? offset : 0.0);
            }
            d.labels[row] = static_cast<int>(c);
        }
    }
    return d;
}

// First n examples, in order.
inline Dataset subset(const Dataset& full, std::size_t n) {
    if (n == 0 || n > full.size()) {
        throw std::invalid_argument("subset: need 1 <= n <= " + std::to_string(full.size()));
    }
    Dataset d;
    d.features = Tensor2D(n, full.features.cols());
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < full.features.cols(); ++c)
            d.features(r, c) = full.features(r, c);
    if (!full.labels.empty()) {
        d.labels.assign(full.labels.begin(), full.labels.begin() + static_cast<long>(n));
    }
    return d;
}

inline Dataset load_mnist(const std::string& images_path, const std::string& labels_path) {
    Dataset d;
    d.features = load_idx_images(images_path);
    d.labels = load_idx_labels(labels_path);
    if (d.labels.size() != d.features.rows()) {
        throw DataError("image/label count mismatch: " + std::to_string(d.features.rows()) +
                        " images vs " + std::to_string(d.labels.size()) + " labels");
    }
    return d;
}

}  // namespace gelulab
