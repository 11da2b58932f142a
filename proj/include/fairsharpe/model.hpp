#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fairsharpe/dataset.hpp"
#include "fairsharpe/errors.hpp"

namespace fairsharpe {

/// Hyperplane classifier: decision value is weights . z + bias, predicted
/// label is its sign with the boundary (value 0) mapped to +1.
struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;

    std::size_t dim() const { return weights.size(); }

    static LinearModel zeros(std::size_t n) { return {std::vector<double>(n, 0.0), 0.0}; }

    bool finite() const {
        if (!std::isfinite(bias)) return false;
        for (double w : weights)
            if (!std::isfinite(w)) return false;
        return true;
    }
};

struct LossConfig {
    double lambda = 0.0; // L2 coefficient on the weights; the bias is never regularized
};

namespace detail {

inline void check_dim(const LinearModel& m, std::size_t n) {
    if (m.dim() != n)
        raise(errc::dimension_mismatch,
              "model dim " + std::to_string(m.dim()) + " vs " + std::to_string(n));
}

/// log(1 + exp(u)) without overflow for large |u|.
inline double softplus(double u) {
    return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u)));
}

/// Logistic function, evaluated on whichever side avoids exp overflow.
inline double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

} // namespace detail

inline double decision_value(const LinearModel& m, std::span<const double> z) {
    detail::check_dim(m, z.size());
    double acc = m.bias;
    for (std::size_t i = 0; i < z.size(); ++i) acc += m.weights[i] * z[i];
    return acc;
}

inline int predict_label(const LinearModel& m, std::span<const double> z) {
    return decision_value(m, z) >= 0.0 ? 1 : -1;
}

/// Mean logistic loss over the given rows plus (lambda/2)|w|^2.
inline double logistic_loss(const LinearModel& m, const Dataset& d,
                            std::span<const std::size_t> batch, const LossConfig& cfg = {}) {
    if (batch.empty()) raise(errc::empty_dataset, "logistic_loss on empty batch");
    detail::check_dim(m, d.dim());
    double acc = 0.0;
    for (const std::size_t i : batch) {
        const double margin = static_cast<double>(d.label(i)) * decision_value(m, d.features(i));
        acc += detail::softplus(-margin);
    }
    double reg = 0.0;
    for (double w : m.weights) reg += w * w;
    return acc / static_cast<double>(batch.size()) + 0.5 * cfg.lambda * reg;
}

inline double logistic_loss(const LinearModel& m, const Dataset& d, const LossConfig& cfg = {}) {
    if (d.size() == 0) raise(errc::empty_dataset, "logistic_loss on empty dataset");
    std::vector<std::size_t> all(d.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return logistic_loss(m, d, all, cfg);
}

/// Gradient of the batch-mean logistic loss with respect to (weights, bias),
/// returned as a vector of length dim + 1 with the bias component last.
inline std::vector<double> logistic_loss_grad(const LinearModel& m, const Dataset& d,
                                              std::span<const std::size_t> batch,
                                              const LossConfig& cfg = {}) {
    if (batch.empty()) raise(errc::empty_dataset, "logistic_loss_grad on empty batch");
    detail::check_dim(m, d.dim());
    const std::size_t n = d.dim();
    std::vector<double> g(n + 1, 0.0);
    for (const std::size_t i : batch) {
        const auto z = d.features(i);
        const double y = static_cast<double>(d.label(i));
        const double phi = decision_value(m, z);
        const double coeff = -y * detail::sigmoid(-y * phi);
        for (std::size_t f = 0; f < n; ++f) g[f] += coeff * z[f];
        g[n] += coeff;
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (auto& v : g) v *= inv;
    for (std::size_t f = 0; f < n; ++f) g[f] += cfg.lambda * m.weights[f];
    return g;
}

inline std::vector<double> logistic_loss_grad(const LinearModel& m, const Dataset& d,
                                              const LossConfig& cfg = {}) {
    if (d.size() == 0) raise(errc::empty_dataset, "logistic_loss_grad on empty dataset");
    std::vector<std::size_t> all(d.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return logistic_loss_grad(m, d, all, cfg);
}

/// Fraction of samples whose predicted label differs from the true label.
inline double error_rate(const LinearModel& m, const Dataset& d) {
    if (d.size() == 0) raise(errc::empty_dataset, "error_rate on empty dataset");
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (predict_label(m, d.features(i)) != d.label(i)) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(d.size());
}

/// Applies one gradient step x <- x - step * g. The gradient layout matches
/// logistic_loss_grad: weights first, bias last.
inline void apply_step(LinearModel& m, std::span<const double> grad, double step) {
    if (grad.size() != m.dim() + 1)
        raise(errc::dimension_mismatch, "gradient length != dim + 1");
    for (std::size_t f = 0; f < m.dim(); ++f) m.weights[f] -= step * grad[f];
    m.bias -= step * grad[m.dim()];
}

} // namespace fairsharpe
