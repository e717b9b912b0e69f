#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gelulab/adam.hpp"
#include "gelulab/dataset.hpp"
#include "gelulab/dense.hpp"
#include "gelulab/loss.hpp"
#include "gelulab/rng.hpp"
#include "gelulab/tensor.hpp"

namespace gelulab {

// Ordered dense layers with an optional dropout slot after each layer's
// nonlinearity. A network instance is single-owner during training.
struct DenseNet {
    std::vector<DenseLayer> layers;
    std::vector<DropoutSpec> dropout;  // dropout[i] follows layers[i]
    Mode mode = Mode::Train;

    void set_mode(Mode m) {
        mode = m;
        for (auto& layer : layers) {
            if (layer.soi) layer.soi->set_mode(m);
        }
    }

    std::size_t input_dim() const { return layers.front().fan_in(); }
    std::size_t output_dim() const { return layers.back().fan_out(); }
};

// Fully connected net over `dims` = {in, hidden..., out}. Hidden layers get
// `hidden` as nonlinearity, the output layer is linear (Identity), and
// `dropout_rate` applies after every hidden nonlinearity. SOI layers get
// independent streams split off `soi_seed`.
inline DenseNet make_mlp(const std::vector<std::size_t>& dims, Nonlinearity hidden,
                         double dropout_rate, SplitMix64& init_rng, std::uint64_t soi_seed = 0) {
    if (dims.size() < 2) throw std::invalid_argument("make_mlp: need at least in/out dims");
    for (std::size_t d : dims) {
        if (d == 0) throw std::invalid_argument("make_mlp: zero-width layer");
    }
    DenseNet net;
    SplitMix64 soi_splitter(soi_seed);
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        const bool last = (i + 2 == dims.size());
        const Nonlinearity nonlin = last ? Nonlinearity::identity() : hidden;
        net.layers.push_back(
            make_dense_layer(dims[i], dims[i + 1], nonlin, init_rng, soi_splitter.next_u64()));
        net.dropout.push_back(last ? DropoutSpec::none() : DropoutSpec::rate(dropout_rate));
    }
    return net;
}

// Per-layer weight and bias gradients, aligned with DenseNet::layers.
struct NetGrads {
    std::vector<Tensor2D> dweights;
    std::vector<Tensor2D> dbias;
};

struct NetCaches {
    std::vector<DenseCache> layer;
    std::vector<Tensor2D> dropout_mask;
};

inline Tensor2D net_forward(DenseNet& net, const Tensor2D& x, SplitMix64& dropout_rng,
                            NetCaches& caches) {
    caches.layer.resize(net.layers.size());
    caches.dropout_mask.resize(net.layers.size());
    Tensor2D h = x;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        h = dense_forward_cached(net.layers[i], h, caches.layer[i]);
        if (net.dropout[i].drop_prob > 0.0 && net.mode == Mode::Train) {
            auto [y, mask] = dropout_forward(net.dropout[i], h, dropout_rng, net.mode);
            caches.dropout_mask[i] = std::move(mask);
            h = std::move(y);
        } else {
            caches.dropout_mask[i] = Tensor2D();
        }
    }
    return h;
}

// Inference-only forward; requires Eval mode so no masks are needed.
inline Tensor2D net_predict(DenseNet& net, const Tensor2D& x) {
    if (net.mode != Mode::Eval) throw std::logic_error("net_predict requires Eval mode");
    Tensor2D h = x;
    for (auto& layer : net.layers) {
        DenseCache scratch;
        h = dense_forward_cached(layer, h, scratch);
    }
    return h;
}

inline NetGrads net_backward(DenseNet& net, const NetCaches& caches, const Tensor2D& dloss) {
    NetGrads grads;
    grads.dweights.resize(net.layers.size());
    grads.dbias.resize(net.layers.size());
    Tensor2D delta = dloss;
    for (std::size_t i = net.layers.size(); i-- > 0;) {
        if (!caches.dropout_mask[i].empty()) {
            delta = dropout_backward(net.dropout[i], caches.dropout_mask[i], delta);
        }
        DenseGrads g = dense_backward_cached(net.layers[i], caches.layer[i], delta);
        grads.dweights[i] = std::move(g.dweights);
        grads.dbias[i] = std::move(g.dbias);
        delta = std::move(g.dinput);
    }
    return grads;
}

// Adam states for every parameter tensor of a net.
class Adam {
public:
    Adam(const DenseNet& net, AdamHyper hyper) {
        for (const auto& layer : net.layers) {
            weight_states_.emplace_back(layer.weights.rows(), layer.weights.cols(), hyper);
            bias_states_.emplace_back(layer.bias.rows(), layer.bias.cols(), hyper);
        }
    }

    void step(DenseNet& net, const NetGrads& grads) {
        for (std::size_t i = 0; i < net.layers.size(); ++i) {
            adam_step(weight_states_[i], net.layers[i].weights, grads.dweights[i]);
            adam_step(bias_states_[i], net.layers[i].bias, grads.dbias[i]);
        }
    }

private:
    std::vector<AdamState> weight_states_;
    std::vector<AdamState> bias_states_;
};

namespace detail {

inline Tensor2D gather_rows(const Tensor2D& src, const std::vector<std::size_t>& idx,
                            std::size_t begin, std::size_t end) {
    Tensor2D out(end - begin, src.cols());
    for (std::size_t r = begin; r < end; ++r)
        for (std::size_t c = 0; c < src.cols(); ++c) out(r - begin, c) = src(idx[r], c);
    return out;
}

inline LossResult compute_loss(const Tensor2D& output, const Tensor2D& batch_features,
                               const std::vector<int>& batch_labels, LossKind kind) {
    if (kind == LossKind::LogLoss) return softmax_cross_entropy(output, batch_labels);
    return mse_loss(output, batch_features);  // reconstruction target = input
}

}  // namespace detail

// One pass over the dataset: Fisher-Yates shuffle with `epoch_rng`,
// minibatch forward/backward, one Adam step per batch. Returns the mean of
// the minibatch losses. The trailing partial batch is included.
inline double train_epoch(DenseNet& net, const Dataset& data, Adam& optimizer,
                          SplitMix64& epoch_rng, std::size_t batch_size, LossKind loss_kind) {
    if (data.size() == 0) throw std::invalid_argument("train_epoch: empty dataset");
    if (net.mode != Mode::Train) throw std::logic_error("train_epoch requires Train mode");
    std::vector<std::size_t> idx(data.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    fisher_yates_shuffle(idx, epoch_rng);

    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < data.size(); begin += batch_size) {
        const std::size_t end = std::min(begin + batch_size, data.size());
        Tensor2D bx = detail::gather_rows(data.features, idx, begin, end);
        std::vector<int> by;
        if (loss_kind == LossKind::LogLoss) {
            by.reserve(end - begin);
            for (std::size_t r = begin; r < end; ++r) by.push_back(data.labels[idx[r]]);
        }
        NetCaches caches;
        Tensor2D out = net_forward(net, bx, epoch_rng, caches);
        LossResult lr = detail::compute_loss(out, bx, by, loss_kind);
        NetGrads grads = net_backward(net, caches, lr.grad);
        optimizer.step(net, grads);
        loss_sum += lr.loss;
        ++batches;
    }
    return loss_sum / static_cast<double>(batches);
}

// Mean loss over the dataset with no parameter updates. Deterministic:
// requires Eval mode (dropout off, SOI replaced by the exact GELU) and
// walks the data in order with fixed chunking.
inline double evaluate(DenseNet& net, const Dataset& data, LossKind loss_kind,
                       std::size_t chunk_size = 512) {
    if (data.size() == 0) throw std::invalid_argument("evaluate: empty dataset");
    if (net.mode != Mode::Eval) throw std::logic_error("evaluate requires Eval mode");
    double weighted_sum = 0.0;
    for (std::size_t begin = 0; begin < data.size(); begin += chunk_size) {
        const std::size_t end = std::min(begin + chunk_size, data.size());
        std::vector<std::size_t> idx(end - begin);
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = begin + i;
        Tensor2D bx = detail::gather_rows(data.features, idx, 0, idx.size());
        std::vector<int> by;
        if (loss_kind == LossKind::LogLoss) {
            by.assign(data.labels.begin() + static_cast<long>(begin),
                      data.labels.begin() + static_cast<long>(end));
        }
        Tensor2D out = net_predict(net, bx);
        LossResult lr = detail::compute_loss(out, bx, by, loss_kind);
        weighted_sum += lr.loss * static_cast<double>(end - begin);
    }
    return weighted_sum / static_cast<double>(data.size());
}

}  // namespace gelulab
