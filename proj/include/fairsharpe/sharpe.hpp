#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairsharpe/dataset.hpp"
#include "fairsharpe/errors.hpp"
#include "fairsharpe/fairness.hpp"
#include "fairsharpe/model.hpp"
#include "fairsharpe/pareto.hpp"
#include "fairsharpe/sgd.hpp"

namespace fairsharpe {

/// Configuration of the ratio problem max (ff - f1) / f2: the benchmark loss
/// ff, a floor on the denominator (f2 vanishes on the perfectly fair
/// manifold, e.g. at the zero model, where the raw ratio is singular), and
/// the solver settings.
struct SharpeConfig {
    double ff = 0.0;
    double epsilon_f2 = 1e-12;
    SGDConfig sgd;
    LossConfig loss;
    /// Cap on ||step * gradient|| inside the solver. The plug-in ratio
    /// gradient carries a 1/f2^2 factor, so one batch whose covariance
    /// estimate lands near zero would otherwise throw the iterate
    /// arbitrarily far. Steps are shortened, never redirected.
    double max_step_norm = 0.25;
};

struct SharpeResult {
    LinearModel model;
    double ratio = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;
    double ff = 0.0;
    double epsilon_f2 = 0.0;
    bool floor_active = false;
    std::optional<bool> nondominated; // set by verify_nondominated when a front is supplied
    double error_train = 0.0;
    double error_test = 0.0;
    double cv_train = 0.0;
    double cv_test = 0.0;
    Trajectory trajectory;
};

namespace detail {

inline void check_both_groups(const Dataset& d, const char* where) {
    if (d.size() == 0) raise(errc::empty_dataset, where);
    const double abar = d.sensitive_mean();
    if (abar <= 0.0) raise(errc::empty_group, std::string(where) + ": group 1 has no samples");
    if (abar >= 1.0) raise(errc::empty_group, std::string(where) + ": group 0 has no samples");
}

inline double floored(double f2, double eps) { return std::max(f2, eps); }

} // namespace detail

/// Ratio of a bare objective pair against a benchmark, denominator floored.
inline double pair_ratio(const ObjectivePair& p, double ff, double epsilon_f2 = 1e-12) {
    return (ff - p.f1) / detail::floored(p.f2, epsilon_f2);
}

/// (ff - f1) / max(f2, epsilon): prediction return above the benchmark per
/// unit of prediction risk.
inline double sharpe_ratio(const LinearModel& m, const Dataset& d, const SharpeConfig& cfg) {
    detail::check_both_groups(d, "sharpe_ratio");
    const double f1 = logistic_loss(m, d, cfg.loss);
    const double f2 = f2_di(m, d);
    return (cfg.ff - f1) / detail::floored(f2, cfg.epsilon_f2);
}

/// Gradient of the ratio from batch plug-in estimates of f1, f2 and their
/// gradients (quotient rule). The estimator is biased at small batches and
/// exact at the full batch. attribute_mean follows the same frozen-mean
/// convention as f2_di_grad.
///
/// Below the floor the ratio is (ff - f1) / epsilon, whose literal gradient
/// carries a 1/epsilon factor that would blow up any fixed step size; the
/// solver follows the unscaled benchmark-gap direction -grad(f1) there
/// instead, so on perfectly fair data it keeps improving the loss at finite
/// step lengths.
inline std::vector<double> sharpe_grad(const LinearModel& m, const Dataset& d,
                                       std::span<const std::size_t> batch, double attribute_mean,
                                       const SharpeConfig& cfg) {
    if (batch.empty()) raise(errc::empty_dataset, "sharpe_grad on empty batch");
    const double f1 = logistic_loss(m, d, batch, cfg.loss);
    const std::vector<double> g1 = logistic_loss_grad(m, d, batch, cfg.loss);
    const double f2 = f2_di(m, d, batch, attribute_mean);
    std::vector<double> g(g1.size());
    if (f2 < cfg.epsilon_f2) {
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = -g1[i];
        return g;
    }
    const std::vector<double> g2 = f2_di_grad(m, d, batch, attribute_mean);
    const double num = cfg.ff - f1;
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = (-g1[i] * f2 - num * g2[i]) / (f2 * f2);
    return g;
}

inline std::vector<double> sharpe_grad(const LinearModel& m, const Dataset& d,
                                       const SharpeConfig& cfg) {
    if (d.size() == 0) raise(errc::empty_dataset, "sharpe_grad on empty dataset");
    const auto all = detail::iota_indices(d);
    return sharpe_grad(m, d, all, d.sensitive_mean(), cfg);
}

/// Benchmark loss derived from a traced front: the front's largest training
/// loss minus delta, i.e. slightly below the loss of its fairest point.
inline double default_ff(const ParetoFront& front, double delta) {
    if (front.empty()) raise(errc::empty_front, "default_ff");
    if (!(delta >= 0.0)) raise(errc::invalid_spec, "delta must be >= 0");
    return front.max_f1() - delta;
}

/// Maximizes the ratio by SGD on its negation with growing batches. Warm
/// start: the highest-ratio point of the supplied front, otherwise the
/// unconstrained loss minimizer computed by a presolve (the ratio is not
/// globally concave and the perfectly fair manifold is a degenerate basin,
/// so starting near the front matters). Fails if the final loss does not
/// beat the benchmark.
inline SharpeResult solve_sharpe(const Dataset& train, const Dataset& test,
                                 const SharpeConfig& cfg, const ParetoFront* front = nullptr) {
    detail::check_both_groups(train, "solve_sharpe");

    LinearModel start;
    if (front != nullptr && !front->empty()) {
        const FrontPoint* best = nullptr;
        double best_ratio = -std::numeric_limits<double>::infinity();
        for (const auto& p : front->points()) {
            const double r = pair_ratio(p.objectives, cfg.ff, cfg.epsilon_f2);
            if (r > best_ratio) {
                best_ratio = r;
                best = &p;
            }
        }
        start = best->model;
    } else {
        SGDConfig presolve = cfg.sgd;
        presolve.seed = derive_seed(cfg.sgd.seed, 0x70FFu);
        start = detail::solve_scalarized(train, 1.0, LinearModel::zeros(train.dim()), presolve,
                                         cfg.loss);
    }

    const double a_bar = train.sensitive_mean();
    auto grad = [&](const LinearModel& m, std::span<const std::size_t> batch) {
        std::vector<double> g = sharpe_grad(m, train, batch, a_bar, cfg);
        double ss = 0.0;
        for (double v : g) ss += v * v;
        const double displacement = cfg.sgd.step_size * std::sqrt(ss);
        const double scale =
            displacement > cfg.max_step_norm ? -cfg.max_step_norm / displacement : -1.0;
        for (auto& v : g) v *= scale;
        return g;
    };
    auto objective = [&](const LinearModel& m) { return -sharpe_ratio(m, train, cfg); };

    SharpeResult result;
    result.trajectory = sgd_minimize(grad, objective, start, train.size(), cfg.sgd);
    result.model = result.trajectory.final_model;
    result.ff = cfg.ff;
    result.epsilon_f2 = cfg.epsilon_f2;
    result.f1 = logistic_loss(result.model, train, cfg.loss);
    result.f2 = f2_di(result.model, train);
    result.floor_active = result.f2 < cfg.epsilon_f2;
    result.ratio = (cfg.ff - result.f1) / detail::floored(result.f2, cfg.epsilon_f2);
    if (result.f1 >= cfg.ff)
        raise(errc::benchmark_violated,
              "final loss " + std::to_string(result.f1) + " >= benchmark " + std::to_string(cfg.ff));
    result.error_train = error_rate(result.model, train);
    result.cv_train = cv_score(result.model, train);
    result.error_test = error_rate(result.model, test);
    result.cv_test = cv_score(result.model, test);
    return result;
}

/// True iff no front point beats the solved point by more than tol in both
/// objectives at once. The verdict is also stored on the result.
inline bool verify_nondominated(SharpeResult& result, const ParetoFront& front, double tol = 1e-4) {
    if (front.empty()) raise(errc::empty_front, "verify_nondominated");
    bool ok = true;
    for (const auto& p : front.points()) {
        if (p.objectives.f1 < result.f1 - tol && p.objectives.f2 < result.f2 - tol) {
            ok = false;
            break;
        }
    }
    result.nondominated = ok;
    return ok;
}

/// True iff the solved point attains the highest benchmark-relative ratio
/// over the whole front, up to tol_ratio. Requires every front loss to beat
/// the benchmark; otherwise the ratio comparison is meaningless.
inline bool ratio_dominance_check(const SharpeResult& result, const ParetoFront& front,
                                  double tol_ratio = 1e-3) {
    if (front.empty()) raise(errc::empty_front, "ratio_dominance_check");
    for (const auto& p : front.points())
        if (p.objectives.f1 >= result.ff)
            raise(errc::benchmark_violated,
                  "front point with f1 " + std::to_string(p.objectives.f1) + " >= benchmark " +
                      std::to_string(result.ff));
    for (const auto& p : front.points()) {
        const double r = pair_ratio(p.objectives, result.ff, result.epsilon_f2);
        if (r > result.ratio + tol_ratio) return false;
    }
    return true;
}

} // namespace fairsharpe
