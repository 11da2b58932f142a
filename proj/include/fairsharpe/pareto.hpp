#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <span>
#include <string>
#include <vector>

#include "fairsharpe/dataset.hpp"
#include "fairsharpe/errors.hpp"
#include "fairsharpe/fairness.hpp"
#include "fairsharpe/model.hpp"
#include "fairsharpe/sgd.hpp"

namespace fairsharpe {

/// (prediction loss, disparate-impact risk) of one model on the training set.
struct ObjectivePair {
    double f1 = 0.0;
    double f2 = 0.0;
};

/// Strict componentwise dominance: p is better than q in both objectives.
/// Ties in either coordinate mean no dominance.
inline bool dominates(const ObjectivePair& p, const ObjectivePair& q) {
    return p.f1 < q.f1 && p.f2 < q.f2;
}

struct FrontPoint {
    LinearModel model;
    ObjectivePair objectives;
    double weight = 1.0; // scalarization weight that produced the point
    FairnessReport train_report;
    FairnessReport test_report;
    double error_train = 0.0;
    double error_test = 0.0;
};

/// Mutually non-dominated set kept sorted by f1 ascending (f2 descending on
/// f1 ties, so f2 is nonincreasing across the list). Points that coincide in
/// objective space within duplicate_tol are collapsed, keeping the earliest.
class ParetoFront {
public:
    explicit ParetoFront(double duplicate_tol = 1e-9) : dup_tol_(duplicate_tol) {}

    /// Returns true if the point was retained.
    bool insert(FrontPoint pt) {
        for (const auto& q : points_) {
            if (std::abs(q.objectives.f1 - pt.objectives.f1) <= dup_tol_ &&
                std::abs(q.objectives.f2 - pt.objectives.f2) <= dup_tol_)
                return false;
            if (dominates(q.objectives, pt.objectives)) return false;
        }
        std::erase_if(points_, [&](const FrontPoint& q) {
            return dominates(pt.objectives, q.objectives);
        });
        const auto pos = std::lower_bound(
            points_.begin(), points_.end(), pt, [](const FrontPoint& a, const FrontPoint& b) {
                if (a.objectives.f1 != b.objectives.f1) return a.objectives.f1 < b.objectives.f1;
                return a.objectives.f2 > b.objectives.f2;
            });
        points_.insert(pos, std::move(pt));
        return true;
    }

    const std::vector<FrontPoint>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    double duplicate_tol() const { return dup_tol_; }

    double max_f1() const {
        if (points_.empty()) raise(errc::empty_front, "max_f1");
        return points_.back().objectives.f1;
    }

private:
    std::vector<FrontPoint> points_;
    double dup_tol_ = 1e-9;
};

/// Scalarization weights for the front sweep: w = 1 first, then 1 - w spaced
/// geometrically from 1e-3 up to 1 (so w ends exactly at 0). The grid is
/// densest near the accuracy end, where the front bends hardest.
inline std::vector<double> default_weight_grid(std::size_t k) {
    if (k < 1) raise(errc::invalid_spec, "weight grid needs at least one point");
    std::vector<double> w;
    w.push_back(1.0);
    if (k == 1) return w;
    constexpr double lo = 1e-3;
    for (std::size_t j = 0; j + 1 < k; ++j) {
        if (j + 2 == k) {
            w.push_back(0.0);
        } else {
            const double t = static_cast<double>(j) / static_cast<double>(k - 2);
            w.push_back(1.0 - std::exp(std::log(lo) * (1.0 - t)));
        }
    }
    return w;
}

struct FrontConfig {
    std::vector<double> weights; // explicit list; empty selects the default grid
    std::size_t grid = 50;
    bool parallel = false; // cold starts solved concurrently instead of a warm-start chain
};

namespace detail {

template <typename T>
std::vector<std::size_t> iota_indices(const T& d) {
    std::vector<std::size_t> all(d.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
}

/// Minimizes w * f1 + (1 - w) * f2 by SGD. The covariance centering constant
/// is the full training-set attribute mean for every batch.
inline LinearModel solve_scalarized(const Dataset& train, double w, const LinearModel& start,
                                    const SGDConfig& sgd, const LossConfig& loss_cfg) {
    const double a_bar = train.sensitive_mean();
    auto grad = [&](const LinearModel& m, std::span<const std::size_t> batch) {
        std::vector<double> g = logistic_loss_grad(m, train, batch, loss_cfg);
        const std::vector<double> g2 = f2_di_grad(m, train, batch, a_bar);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = w * g[i] + (1.0 - w) * g2[i];
        return g;
    };
    auto objective = [&](const LinearModel& m) {
        return w * logistic_loss(m, train, loss_cfg) + (1.0 - w) * f2_di(m, train);
    };
    return sgd_minimize(grad, objective, start, train.size(), sgd).final_model;
}

inline FrontPoint evaluate_point(const LinearModel& model, double w, const Dataset& train,
                                 const Dataset& test, const LossConfig& loss_cfg) {
    FrontPoint pt;
    pt.model = model;
    pt.weight = w;
    pt.objectives.f1 = logistic_loss(model, train, loss_cfg);
    pt.objectives.f2 = f2_di(model, train);
    pt.train_report = fairness_report(model, train);
    pt.test_report = fairness_report(model, test);
    pt.error_train = error_rate(model, train);
    pt.error_test = error_rate(model, test);
    return pt;
}

} // namespace detail

/// Sweeps the scalarization weights, solving each single-objective problem
/// by SGD, and keeps the non-dominated solutions. Sequential mode chains
/// warm starts from the previous weight's solution (the first starts at the
/// zero model); parallel mode solves every weight from a cold start. Each
/// weight draws batches from its own derived seed, so the result does not
/// depend on scheduling.
inline ParetoFront trace_front(const Dataset& train, const Dataset& test,
                               const FrontConfig& cfg, const SGDConfig& sgd,
                               const LossConfig& loss_cfg) {
    std::vector<double> weights = cfg.weights.empty() ? default_weight_grid(cfg.grid) : cfg.weights;
    if (weights.empty()) raise(errc::invalid_spec, "no scalarization weights");
    for (const double w : weights)
        if (!(w >= 0.0 && w <= 1.0)) raise(errc::invalid_spec, "weights must lie in [0, 1]");

    std::vector<LinearModel> solutions(weights.size());
    if (cfg.parallel) {
        std::vector<std::future<LinearModel>> tasks;
        tasks.reserve(weights.size());
        for (std::size_t j = 0; j < weights.size(); ++j) {
            SGDConfig local = sgd;
            local.seed = derive_seed(sgd.seed, j);
            tasks.push_back(std::async(std::launch::async, [&train, &loss_cfg, local,
                                                            w = weights[j]] {
                return detail::solve_scalarized(train, w, LinearModel::zeros(train.dim()), local,
                                                loss_cfg);
            }));
        }
        for (std::size_t j = 0; j < weights.size(); ++j) solutions[j] = tasks[j].get();
    } else {
        LinearModel start = LinearModel::zeros(train.dim());
        for (std::size_t j = 0; j < weights.size(); ++j) {
            SGDConfig local = sgd;
            local.seed = derive_seed(sgd.seed, j);
            solutions[j] = detail::solve_scalarized(train, weights[j], start, local, loss_cfg);
            start = solutions[j];
        }
    }

    ParetoFront front;
    for (std::size_t j = 0; j < weights.size(); ++j)
        front.insert(detail::evaluate_point(solutions[j], weights[j], train, test, loss_cfg));
    return front;
}

/// CSV with one row per front point; enough to plot loss-vs-risk and
/// accuracy-vs-CV views. Refuses to write an empty front.
inline void export_front_csv(const ParetoFront& front, const std::filesystem::path& path) {
    if (front.empty()) raise(errc::empty_front, "export_front_csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(errc::io_error, "cannot write " + path.string());
    out << "weight,f1_train,f2_di_train,error_train,error_test,cv_train,cv_test,accuracy_test\n";
    for (const auto& p : front.points()) {
        out << detail::format_double(p.weight) << ','
            << detail::format_double(p.objectives.f1) << ','
            << detail::format_double(p.objectives.f2) << ','
            << detail::format_double(p.error_train) << ','
            << detail::format_double(p.error_test) << ','
            << detail::format_double(p.train_report.cv_score) << ','
            << detail::format_double(p.test_report.cv_score) << ','
            << detail::format_double(1.0 - p.error_test) << '\n';
    }
}

} // namespace fairsharpe
