#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "gelulab/special_functions.hpp"
#include "gelulab/tensor.hpp"

namespace gelulab {

enum class ActivationType { Relu, Elu, Gelu, GeluTanh, CauchyLU, LaLU };

// sqrt(2/pi) and the cubic coefficient of the fast tanh-based GELU
// approximation.
inline constexpr double kGeluTanhScale = 0.7978845608028654;
inline constexpr double kGeluTanhCubic = 0.044715;

// Tagged nonlinearity choice with its parameters. Construct through the
// factories, which validate alpha > 0 and sigma > 0.
struct Activation {
    ActivationType type = ActivationType::Relu;
    double alpha = 1.0;  // Elu
    double mu = 0.0;     // Gelu
    double sigma = 1.0;  // Gelu

    static Activation relu() { return {ActivationType::Relu}; }

    static Activation elu(double alpha = 1.0) {
        if (!(alpha > 0.0)) throw std::invalid_argument("Elu: alpha must be > 0");
        Activation a{ActivationType::Elu};
        a.alpha = alpha;
        return a;
    }

    static Activation gelu(double mu = 0.0, double sigma = 1.0) {
        if (!(sigma > 0.0)) throw std::invalid_argument("Gelu: sigma must be > 0");
        Activation a{ActivationType::Gelu};
        a.mu = mu;
        a.sigma = sigma;
        return a;
    }

    static Activation gelu_tanh() { return {ActivationType::GeluTanh}; }
    static Activation cauchylu() { return {ActivationType::CauchyLU}; }
    static Activation lalu() { return {ActivationType::LaLU}; }
};

inline double act_forward(const Activation& kind, double x) {
    switch (kind.type) {
        case ActivationType::Relu:
            return x > 0.0 ? x : 0.0;
        case ActivationType::Elu:
            return x > 0.0 ? x : kind.alpha * (std::exp(x) - 1.0);
        case ActivationType::Gelu:
            return x * std_normal_cdf((x - kind.mu) / kind.sigma);
        case ActivationType::GeluTanh: {
            const double u = kGeluTanhScale * (x + kGeluTanhCubic * x * x * x);
            return 0.5 * x * (1.0 + std::tanh(u));
        }
        case ActivationType::CauchyLU:
            return x * cauchy_cdf(x);
        case ActivationType::LaLU:
            return x * laplace_cdf(x);
    }
    throw std::logic_error("unreachable activation type");
}

// Analytic derivative of act_forward with respect to x. The ReLU derivative
// at exactly 0 is defined as 0 (the zero-map side of the subgradient).
// GeluTanh differentiates the approximation itself, not the exact GELU, so
// forward/backward pairs stay mutually consistent.
inline double act_grad(const Activation& kind, double x) {
    switch (kind.type) {
        case ActivationType::Relu:
            return x > 0.0 ? 1.0 : 0.0;
        case ActivationType::Elu:
            return x > 0.0 ? 1.0 : kind.alpha * std::exp(x);
        case ActivationType::Gelu: {
            const double z = (x - kind.mu) / kind.sigma;
            return std_normal_cdf(z) + (x / kind.sigma) * std_normal_pdf(z);
        }
        case ActivationType::GeluTanh: {
            const double u = kGeluTanhScale * (x + kGeluTanhCubic * x * x * x);
            const double t = std::tanh(u);
            const double du = kGeluTanhScale * (1.0 + 3.0 * kGeluTanhCubic * x * x);
            return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du;
        }
        case ActivationType::CauchyLU:
            return cauchy_cdf(x) + x * cauchy_pdf(x);
        case ActivationType::LaLU:
            return laplace_cdf(x) + x * laplace_pdf(x);
    }
    throw std::logic_error("unreachable activation type");
}

inline Tensor2D act_forward_batch(const Activation& kind, const Tensor2D& x) {
    Tensor2D y(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i) y.data()[i] = act_forward(kind, x.data()[i]);
    return y;
}

// upstream .* act_grad(kind, x), elementwise chain rule.
inline Tensor2D act_backward_batch(const Activation& kind, const Tensor2D& x,
                                   const Tensor2D& upstream) {
    require_same_shape(x, upstream);
    Tensor2D dx(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i) {
        dx.data()[i] = upstream.data()[i] * act_grad(kind, x.data()[i]);
    }
    return dx;
}

struct ScanResult {
    double max_abs_err = 0.0;
    double argmax = 0.0;
};

// Number of grid points for lo + k*step, k = 0..floor((hi-lo)/step). The
// quotient is nudged before flooring so that spans that are an exact
// multiple of step in real arithmetic (16 / 1e-3, say) do not lose their
// final point to rounding.
inline std::size_t grid_point_count(double lo, double hi, double step) {
    if (step <= 0.0 || hi < lo) throw std::invalid_argument("empty grid");
    const double q = (hi - lo) / step;
    return static_cast<std::size_t>(std::floor(q + 1e-9 * std::max(1.0, q))) + 1;
}

// Max over the grid of |GeluTanh(x) - Gelu(x; 0, 1)| and where it occurs.
inline ScanResult approximation_error_scan(double lo, double hi, double step) {
    const std::size_t n = grid_point_count(lo, hi, step);
    const Activation exact = Activation::gelu();
    const Activation approx = Activation::gelu_tanh();
    ScanResult best{-1.0, lo};
    for (std::size_t k = 0; k < n; ++k) {
        const double x = lo + static_cast<double>(k) * step;
        const double err = std::fabs(act_forward(approx, x) - act_forward(exact, x));
        if (err > best.max_abs_err) {
            best.max_abs_err = err;
            best.argmax = x;
        }
    }
    return best;
}

inline std::string activation_name(const Activation& a) {
    switch (a.type) {
        case ActivationType::Relu: return "relu";
        case ActivationType::Elu: return "elu";
        case ActivationType::Gelu: return "gelu";
        case ActivationType::GeluTanh: return "gelu-tanh";
        case ActivationType::CauchyLU: return "cauchylu";
        case ActivationType::LaLU: return "lalu";
    }
    return "?";
}

inline Activation activation_from_name(const std::string& name, double alpha = 1.0,
                                       double mu = 0.0, double sigma = 1.0) {
    if (name == "relu") return Activation::relu();
    if (name == "elu") return Activation::elu(alpha);
    if (name == "gelu") return Activation::gelu(mu, sigma);
    if (name == "gelu-tanh") return Activation::gelu_tanh();
    if (name == "cauchylu") return Activation::cauchylu();
    if (name == "lalu") return Activation::lalu();
    throw std::invalid_argument("unknown activation: " + name);
}

}  // namespace gelulab
