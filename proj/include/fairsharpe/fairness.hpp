#pragma once

#include <span>
#include <vector>

#include "fairsharpe/dataset.hpp"
#include "fairsharpe/errors.hpp"
#include "fairsharpe/model.hpp"

namespace fairsharpe {

/// Disparate-impact view of one model on one dataset. cv_score is the gap
/// between the groups' positive-prediction rates; f2_di is the squared
/// decision-boundary covariance.
struct FairnessReport {
    double cv_score = 0.0;
    double p_pos_group0 = 0.0;
    double p_pos_group1 = 0.0;
    double boundary_covariance = 0.0;
    double f2_di = 0.0;
};

/// |P(prediction = +1 | group 0) - P(prediction = +1 | group 1)| on hard
/// threshold predictions. Requires samples from both groups.
inline double cv_score(const LinearModel& m, const Dataset& d) {
    if (d.size() == 0) raise(errc::empty_dataset, "cv_score on empty dataset");
    std::size_t count[2] = {0, 0};
    std::size_t pos[2] = {0, 0};
    for (std::size_t i = 0; i < d.size(); ++i) {
        const std::size_t g = static_cast<std::size_t>(d.sensitive(i));
        ++count[g];
        if (predict_label(m, d.features(i)) == 1) ++pos[g];
    }
    if (count[0] == 0) raise(errc::empty_group, "group 0 has no samples");
    if (count[1] == 0) raise(errc::empty_group, "group 1 has no samples");
    const double p0 = static_cast<double>(pos[0]) / static_cast<double>(count[0]);
    const double p1 = static_cast<double>(pos[1]) / static_cast<double>(count[1]);
    return p0 >= p1 ? p0 - p1 : p1 - p0;
}

/// Empirical covariance between the sensitive attribute and the decision
/// value over the given rows, centering with the supplied attribute mean.
inline double boundary_covariance(const LinearModel& m, const Dataset& d,
                                  std::span<const std::size_t> batch, double attribute_mean) {
    if (batch.empty()) raise(errc::empty_dataset, "boundary_covariance on empty batch");
    double acc = 0.0;
    for (const std::size_t i : batch) {
        const double centered = static_cast<double>(d.sensitive(i)) - attribute_mean;
        acc += centered * decision_value(m, d.features(i));
    }
    return acc / static_cast<double>(batch.size());
}

inline double boundary_covariance(const LinearModel& m, const Dataset& d) {
    if (d.size() == 0) raise(errc::empty_dataset, "boundary_covariance on empty dataset");
    std::vector<std::size_t> all(d.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return boundary_covariance(m, d, all, d.sensitive_mean());
}

/// Squared boundary covariance: the smooth, convex disparate-impact risk.
inline double f2_di(const LinearModel& m, const Dataset& d,
                    std::span<const std::size_t> batch, double attribute_mean) {
    const double cov = boundary_covariance(m, d, batch, attribute_mean);
    return cov * cov;
}

inline double f2_di(const LinearModel& m, const Dataset& d) {
    const double cov = boundary_covariance(m, d);
    return cov * cov;
}

/// Gradient of the squared batch covariance w.r.t. (weights, bias); chain
/// rule gives 2 * cov * mean((a_i - abar) * (z_i, 1)). The attribute mean is
/// a caller-supplied constant: during training it is the full training-set
/// mean frozen at start, not the batch mean.
inline std::vector<double> f2_di_grad(const LinearModel& m, const Dataset& d,
                                      std::span<const std::size_t> batch, double attribute_mean) {
    if (batch.empty()) raise(errc::empty_dataset, "f2_di_grad on empty batch");
    detail::check_dim(m, d.dim());
    const std::size_t n = d.dim();
    const double cov = boundary_covariance(m, d, batch, attribute_mean);
    std::vector<double> g(n + 1, 0.0);
    for (const std::size_t i : batch) {
        const double centered = static_cast<double>(d.sensitive(i)) - attribute_mean;
        const auto z = d.features(i);
        for (std::size_t f = 0; f < n; ++f) g[f] += centered * z[f];
        g[n] += centered;
    }
    const double scale = 2.0 * cov / static_cast<double>(batch.size());
    for (auto& v : g) v *= scale;
    return g;
}

inline std::vector<double> f2_di_grad(const LinearModel& m, const Dataset& d) {
    if (d.size() == 0) raise(errc::empty_dataset, "f2_di_grad on empty dataset");
    std::vector<std::size_t> all(d.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return f2_di_grad(m, d, all, d.sensitive_mean());
}

inline FairnessReport fairness_report(const LinearModel& m, const Dataset& d) {
    if (d.size() == 0) raise(errc::empty_dataset, "fairness_report on empty dataset");
    FairnessReport r;
    std::size_t count[2] = {0, 0};
    std::size_t pos[2] = {0, 0};
    for (std::size_t i = 0; i < d.size(); ++i) {
        const std::size_t g = static_cast<std::size_t>(d.sensitive(i));
        ++count[g];
        if (predict_label(m, d.features(i)) == 1) ++pos[g];
    }
    if (count[0] == 0) raise(errc::empty_group, "group 0 has no samples");
    if (count[1] == 0) raise(errc::empty_group, "group 1 has no samples");
    r.p_pos_group0 = static_cast<double>(pos[0]) / static_cast<double>(count[0]);
    r.p_pos_group1 = static_cast<double>(pos[1]) / static_cast<double>(count[1]);
    r.cv_score = r.p_pos_group0 >= r.p_pos_group1 ? r.p_pos_group0 - r.p_pos_group1
                                                  : r.p_pos_group1 - r.p_pos_group0;
    r.boundary_covariance = boundary_covariance(m, d);
    r.f2_di = r.boundary_covariance * r.boundary_covariance;
    return r;
}

} // namespace fairsharpe
