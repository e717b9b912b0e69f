#pragma once

#include <stdexcept>
#include <utility>

#include "gelulab/activations.hpp"
#include "gelulab/rng.hpp"
#include "gelulab/tensor.hpp"

namespace gelulab {

enum class Mode { Train, Eval };

// Stochastic zero-or-identity map. In Train mode each entry x is kept with
// probability Phi(x) and zeroed otherwise, so the expected output is
// x * Phi(x) -- exactly the GELU. In Eval mode the layer IS the GELU
// (mu = 0, sigma = 1), which makes validation passes deterministic.
//
// The layer owns its random stream; identical seeds and input sequences
// reproduce identical masks. Instances are not safe to share across threads.
class SoiLayer {
public:
    explicit SoiLayer(std::uint64_t seed, Mode mode = Mode::Train)
        : rng_(seed), mode_(mode) {}

    Mode mode() const { return mode_; }
    void set_mode(Mode m) { mode_ = m; }
    void reseed(std::uint64_t seed) { rng_ = SplitMix64(seed); }

    SplitMix64& rng() { return rng_; }

private:
    SplitMix64 rng_;
    Mode mode_;
};

// Bernoulli(Phi(x_ij)) mask; entries are 0 or 1. Advances the layer stream.
inline Tensor2D soi_sample_mask(SoiLayer& layer, const Tensor2D& x) {
    if (layer.mode() != Mode::Train) {
        throw std::logic_error("mask sampling requires Train mode");
    }
    Tensor2D mask(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double keep_prob = std_normal_cdf(x.data()[i]);
        mask.data()[i] = layer.rng().next_double() < keep_prob ? 1.0 : 0.0;
    }
    return mask;
}

// Train: y = mask .* x with a fresh sampled mask.
// Eval:  y = GELU(x) exactly; the mask is an all-ones sentinel.
inline std::pair<Tensor2D, Tensor2D> soi_forward(SoiLayer& layer, const Tensor2D& x) {
    if (layer.mode() == Mode::Eval) {
        Tensor2D ones(x.rows(), x.cols());
        for (std::size_t i = 0; i < ones.size(); ++i) ones.data()[i] = 1.0;
        return {act_forward_batch(Activation::gelu(), x), std::move(ones)};
    }
    Tensor2D mask = soi_sample_mask(layer, x);
    Tensor2D y = hadamard(mask, x);
    return {std::move(y), std::move(mask)};
}

// The realized mask is treated as a fixed linear map during the backward
// pass; no gradient flows through the Phi(x) sampling probability.
inline Tensor2D soi_backward(const Tensor2D& mask, const Tensor2D& upstream) {
    require_same_shape(mask, upstream);
    return hadamard(mask, upstream);
}

}  // namespace gelulab
