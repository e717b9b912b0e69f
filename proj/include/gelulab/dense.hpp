#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

#include "gelulab/activations.hpp"
#include "gelulab/rng.hpp"
#include "gelulab/soi.hpp"
#include "gelulab/tensor.hpp"

namespace gelulab {

enum class NonlinKind { Activation, Soi, Identity };

struct Nonlinearity {
    NonlinKind kind = NonlinKind::Identity;
    Activation act;  // meaningful only when kind == Activation

    static Nonlinearity identity() { return {}; }
    static Nonlinearity activation(Activation a) { return {NonlinKind::Activation, a}; }
    static Nonlinearity soi() { return {NonlinKind::Soi, {}}; }
};

// Weight matrix with each column (the fan-in vector feeding one output
// unit) drawn i.i.d. standard normal and scaled to unit L2 norm.
inline Tensor2D hypersphere_init(std::size_t fan_in, std::size_t fan_out, SplitMix64& rng) {
    if (fan_in < 1 || fan_out < 1) {
        throw std::invalid_argument("hypersphere_init: fan_in and fan_out must be >= 1");
    }
    Tensor2D w(fan_in, fan_out);
    std::vector<double> col(fan_in);
    for (std::size_t j = 0; j < fan_out; ++j) {
        double norm = 0.0;
        do {
            norm = 0.0;
            for (std::size_t i = 0; i < fan_in; ++i) {
                col[i] = rng.next_normal();
                norm += col[i] * col[i];
            }
        } while (norm == 0.0);
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < fan_in; ++i) w(i, j) = col[i] / norm;
    }
    return w;
}

// One affine layer plus its nonlinearity. SOI layers carry their own
// random stream in `soi`.
struct DenseLayer {
    Tensor2D weights;  // fan_in x fan_out
    Tensor2D bias;     // 1 x fan_out
    Nonlinearity nonlin;
    std::optional<SoiLayer> soi;

    std::size_t fan_in() const { return weights.rows(); }
    std::size_t fan_out() const { return weights.cols(); }
};

inline DenseLayer make_dense_layer(std::size_t fan_in, std::size_t fan_out,
                                   Nonlinearity nonlin, SplitMix64& init_rng,
                                   std::uint64_t soi_seed = 0) {
    DenseLayer layer;
    layer.weights = hypersphere_init(fan_in, fan_out, init_rng);
    layer.bias = Tensor2D(1, fan_out);
    layer.nonlin = nonlin;
    if (nonlin.kind == NonlinKind::Soi) layer.soi.emplace(soi_seed);
    return layer;
}

// Everything the backward pass needs from one forward call.
struct DenseCache {
    Tensor2D input;
    Tensor2D pre_act;
    Tensor2D soi_mask;  // empty unless the nonlinearity is SOI in Train mode
};

inline Tensor2D dense_forward_cached(DenseLayer& layer, const Tensor2D& x, DenseCache& cache) {
    if (x.cols() != layer.fan_in()) {
        throw std::invalid_argument("dense_forward shape mismatch: input " + x.shape_str() +
                                    " vs weights " + layer.weights.shape_str());
    }
    cache.input = x;
    cache.pre_act = add_row_vector(matmul(x, layer.weights), layer.bias);
    cache.soi_mask = Tensor2D();
    switch (layer.nonlin.kind) {
        case NonlinKind::Identity:
            return cache.pre_act;
        case NonlinKind::Activation:
            return act_forward_batch(layer.nonlin.act, cache.pre_act);
        case NonlinKind::Soi: {
            auto [y, mask] = soi_forward(*layer.soi, cache.pre_act);
            if (layer.soi->mode() == Mode::Train) cache.soi_mask = std::move(mask);
            return y;
        }
    }
    throw std::logic_error("unreachable nonlinearity kind");
}

// (pre_act, out) pair.
inline std::pair<Tensor2D, Tensor2D> dense_forward(DenseLayer& layer, const Tensor2D& x) {
    DenseCache cache;
    Tensor2D out = dense_forward_cached(layer, x, cache);
    return {std::move(cache.pre_act), std::move(out)};
}

struct DenseGrads {
    Tensor2D dweights;
    Tensor2D dbias;
    Tensor2D dinput;
};

// delta = upstream .* f'(pre_act); dW = x^T delta; db = column sums of
// delta; dx = delta W^T. For SOI the realized mask plays the role of f'.
inline DenseGrads dense_backward_cached(const DenseLayer& layer, const DenseCache& cache,
                                        const Tensor2D& upstream) {
    require_same_shape(cache.pre_act, upstream);
    Tensor2D delta;
    switch (layer.nonlin.kind) {
        case NonlinKind::Identity:
            delta = upstream;
            break;
        case NonlinKind::Activation:
            delta = act_backward_batch(layer.nonlin.act, cache.pre_act, upstream);
            break;
        case NonlinKind::Soi:
            delta = soi_backward(cache.soi_mask, upstream);
            break;
    }
    DenseGrads g;
    g.dweights = matmul_transpose_a(cache.input, delta);
    g.dbias = column_sums(delta);
    g.dinput = matmul_transpose_b(delta, layer.weights);
    return g;
}

inline DenseGrads dense_backward(const DenseLayer& layer, const Tensor2D& x,
                                 const Tensor2D& pre_act, const Tensor2D& upstream) {
    if (layer.nonlin.kind == NonlinKind::Soi) {
        throw std::logic_error("dense_backward: SOI layers need the cached mask");
    }
    DenseCache cache;
    cache.input = x;
    cache.pre_act = pre_act;
    return dense_backward_cached(layer, cache, upstream);
}

struct DropoutSpec {
    double drop_prob = 0.0;  // in [0, 1)

    static DropoutSpec none() { return {0.0}; }
    static DropoutSpec rate(double p) {
        if (!(p >= 0.0 && p < 1.0)) {
            throw std::invalid_argument("dropout probability must be in [0, 1)");
        }
        return {p};
    }
};

// Inverted dropout: Train-mode outputs are scaled by 1/(1-p) so Eval mode
// is the plain identity. The returned mask holds bare 0/1 keep decisions.
inline std::pair<Tensor2D, Tensor2D> dropout_forward(const DropoutSpec& spec, const Tensor2D& x,
                                                     SplitMix64& rng, Mode mode) {
    if (mode == Mode::Eval || spec.drop_prob == 0.0) {
        Tensor2D ones(x.rows(), x.cols());
        for (std::size_t i = 0; i < ones.size(); ++i) ones.data()[i] = 1.0;
        return {x, std::move(ones)};
    }
    const double keep = 1.0 - spec.drop_prob;
    const double scale = 1.0 / keep;
    Tensor2D mask(x.rows(), x.cols());
    Tensor2D y(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const bool kept = rng.next_double() < keep;
        mask.data()[i] = kept ? 1.0 : 0.0;
        y.data()[i] = kept ? x.data()[i] * scale : 0.0;
    }
    return {std::move(y), std::move(mask)};
}

inline Tensor2D dropout_backward(const DropoutSpec& spec, const Tensor2D& mask,
                                 const Tensor2D& upstream) {
    require_same_shape(mask, upstream);
    const double scale = 1.0 / (1.0 - spec.drop_prob);
    Tensor2D dx(upstream.rows(), upstream.cols());
    for (std::size_t i = 0; i < dx.size(); ++i) {
        dx.data()[i] = upstream.data()[i] * mask.data()[i] * scale;
    }
    return dx;
}

}  // namespace gelulab
