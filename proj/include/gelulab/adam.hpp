#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "gelulab/tensor.hpp"

namespace gelulab {

struct AdamHyper {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// First/second moment accumulators for one parameter tensor.
struct AdamState {
    Tensor2D m;
    Tensor2D v;
    std::int64_t t = 0;
    AdamHyper hyper;

    explicit AdamState(std::size_t rows, std::size_t cols, AdamHyper h = {})
        : m(rows, cols), v(rows, cols), hyper(h) {}
};

// One bias-corrected Adam update, in place:
//   m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2
//   p <- p - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
inline void adam_step(AdamState& state, Tensor2D& param, const Tensor2D& grad) {
    require_same_shape(param, grad);
    require_same_shape(param, state.m);
    state.t += 1;
    const AdamHyper& h = state.hyper;
    const double mc = 1.0 - std::pow(h.beta1, static_cast<double>(state.t));
    const double vc = 1.0 - std::pow(h.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < param.size(); ++i) {
        const double g = grad.data()[i];
        double& m = state.m.data()[i];
        double& v = state.v.data()[i];
        m = h.beta1 * m + (1.0 - h.beta1) * g;
        v = h.beta2 * v + (1.0 - h.beta2) * g * g;
        const double mhat = m / mc;
        const double vhat = v / vc;
        param.data()[i] -= h.lr * mhat / (std::sqrt(vhat) + h.epsilon);
    }
}

}  // namespace gelulab
