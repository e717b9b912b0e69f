#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gelulab/tensor.hpp"

namespace gelulab {

enum class LossKind { LogLoss, Mse };

struct LossResult {
    double loss = 0.0;
    Tensor2D grad;  // d loss / d prediction
};

// Mean negative log softmax probability of the true class, stabilized by
// row-max subtraction. grad = (softmax - onehot) / batch.
inline LossResult softmax_cross_entropy(const Tensor2D& logits, const std::vector<int>& labels) {
    if (labels.size() != logits.rows()) {
        throw std::invalid_argument("softmax_cross_entropy: " + std::to_string(labels.size()) +
                                    " labels for " + std::to_string(logits.rows()) + " rows");
    }
    const std::size_t n = logits.rows();
    const std::size_t k = logits.cols();
    LossResult res;
    res.grad = Tensor2D(n, k);
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const int label = labels[r];
        if (label < 0 || static_cast<std::size_t>(label) >= k) {
            throw std::invalid_argument("label out of range: " + std::to_string(label) +
                                        " with " + std::to_string(k) + " classes");
        }
        double row_max = logits(r, 0);
        for (std::size_t c = 1; c < k; ++c) row_max = std::max(row_max, logits(r, c));
        double denom = 0.0;
        for (std::size_t c = 0; c < k; ++c) denom += std::exp(logits(r, c) - row_max);
        const double log_denom = std::log(denom);
        total += log_denom - (logits(r, static_cast<std::size_t>(label)) - row_max);
        for (std::size_t c = 0; c < k; ++c) {
            double p = std::exp(logits(r, c) - row_max) / denom;
            if (c == static_cast<std::size_t>(label)) p -= 1.0;
            res.grad(r, c) = p / static_cast<double>(n);
        }
    }
    res.loss = total / static_cast<double>(n);
    return res;
}

// Mean of squared entry differences; grad = 2 (pred - target) / count.
inline LossResult mse_loss(const Tensor2D& pred, const Tensor2D& target) {
    require_same_shape(pred, target);
    const double count = static_cast<double>(pred.size());
    LossResult res;
    res.grad = Tensor2D(pred.rows(), pred.cols());
    double total = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred.data()[i] - target.data()[i];
        total += d * d;
        res.grad.data()[i] = 2.0 * d / count;
    }
    res.loss = total / count;
    return res;
}

}  // namespace gelulab
