#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fairsharpe/dataset.hpp"
#include "fairsharpe/errors.hpp"
#include "fairsharpe/model.hpp"
#include "fairsharpe/rng.hpp"

namespace fairsharpe {

/// Constant-step SGD with a geometrically growing batch. growth = 1 keeps
/// the batch fixed; growth > 1 reaches the full dataset in finitely many
/// iterations, which turns the late iterations into deterministic full-batch
/// descent.
struct SGDConfig {
    double step_size = 0.01;
    std::size_t iterations = 6500;
    std::size_t batch0 = 8;
    double growth = 1.001;
    std::uint64_t seed = 0;
    std::size_t checkpoint_every = 50; // trajectory thinning interval
};

struct TrajectoryPoint {
    std::size_t iter;
    double objective; // full-data objective at this iterate
    std::size_t batch;
};

struct Trajectory {
    std::vector<TrajectoryPoint> checkpoints;
    double best_objective = 0.0;
    LinearModel final_model;
    std::vector<std::size_t> batch_sizes;
};

/// min(N, ceil(batch0 * growth^t)); nondecreasing in t.
inline std::size_t batch_schedule(std::size_t t, const SGDConfig& cfg, std::size_t n_samples) {
    const double raw = static_cast<double>(cfg.batch0) *
                       std::pow(cfg.growth, static_cast<double>(t));
    if (!std::isfinite(raw) || raw >= static_cast<double>(n_samples)) return n_samples;
    const double c = std::ceil(raw);
    return std::max<std::size_t>(1, static_cast<std::size_t>(c));
}

namespace detail {

/// Partial Fisher-Yates over a caller-owned permutation of [0, N); the first
/// `size` slots become a uniform sample without replacement. The result is
/// sorted ascending so a full-size batch is exactly the identity order.
inline void sample_batch_into(std::vector<std::size_t>& pool, std::size_t size, Rng& rng,
                              std::vector<std::size_t>& out) {
    const std::size_t n = pool.size();
    for (std::size_t i = 0; i < size; ++i) {
        const std::size_t j = i + rng.uniform_index(n - i);
        std::swap(pool[i], pool[j]);
    }
    out.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
    std::sort(out.begin(), out.end());
}

} // namespace detail

/// Uniform sample of `size` distinct row indices from [0, n_samples).
inline std::vector<std::size_t> sample_batch(std::size_t n_samples, std::size_t size, Rng& rng) {
    if (size < 1 || size > n_samples)
        raise(errc::invalid_batch_size,
              "size=" + std::to_string(size) + " with N=" + std::to_string(n_samples));
    std::vector<std::size_t> pool(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) pool[i] = i;
    std::vector<std::size_t> out;
    detail::sample_batch_into(pool, size, rng, out);
    return out;
}

inline void validate_sgd_config(const SGDConfig& cfg, std::size_t n_samples) {
    if (!(cfg.step_size > 0.0)) raise(errc::invalid_spec, "step_size must be > 0");
    if (cfg.iterations < 1) raise(errc::invalid_spec, "iterations must be >= 1");
    if (cfg.batch0 < 1 || cfg.batch0 > n_samples)
        raise(errc::invalid_spec, "batch0 must be in [1, N]");
    if (!(cfg.growth >= 1.0)) raise(errc::invalid_spec, "growth must be >= 1");
}

/// Runs x_{t+1} = x_t - step * g_t with g_t = grad_oracle(x_t, batch_t) and
/// batch sizes from batch_schedule. objective_eval is called on the full
/// iterate at thinned checkpoints (iteration 0, every checkpoint_every
/// iterations, and the final iterate) for the best-so-far record. Throws on
/// a non-finite iterate.
template <typename GradFn, typename ObjFn>
Trajectory sgd_minimize(GradFn&& grad_oracle, ObjFn&& objective_eval, LinearModel x0,
                        std::size_t n_samples, const SGDConfig& cfg) {
    validate_sgd_config(cfg, n_samples);
    const std::size_t thin = std::max<std::size_t>(1, cfg.checkpoint_every);

    Trajectory traj;
    traj.batch_sizes.reserve(cfg.iterations);
    traj.best_objective = std::numeric_limits<double>::infinity();

    Rng rng(cfg.seed);
    std::vector<std::size_t> pool(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) pool[i] = i;
    std::vector<std::size_t> batch;

    LinearModel x = std::move(x0);
    auto checkpoint = [&](std::size_t iter, std::size_t batch_size) {
        const double obj = objective_eval(x);
        traj.best_objective = std::min(traj.best_objective, obj);
        traj.checkpoints.push_back({iter, obj, batch_size});
    };

    for (std::size_t t = 0; t < cfg.iterations; ++t) {
        const std::size_t bs = batch_schedule(t, cfg, n_samples);
        if (t % thin == 0) checkpoint(t, bs);
        traj.batch_sizes.push_back(bs);
        detail::sample_batch_into(pool, bs, rng, batch);
        const std::vector<double> g = grad_oracle(x, std::span<const std::size_t>(batch));
        apply_step(x, g, cfg.step_size);
        if (!x.finite())
            raise(errc::non_finite_iterate, "divergence at iteration " + std::to_string(t));
    }
    checkpoint(cfg.iterations, traj.batch_sizes.back());
    traj.final_model = std::move(x);
    return traj;
}

/// One line per checkpoint: {"iter": .., "objective": .., "batch": ..}.
inline void export_trajectory_jsonl(const Trajectory& traj, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(errc::io_error, "cannot write " + path.string());
    for (const auto& p : traj.checkpoints)
        out << "{\"iter\": " << p.iter << ", \"objective\": " << detail::format_double(p.objective)
            << ", \"batch\": " << p.batch << "}\n";
}

struct ConsistencyReport {
    std::vector<std::size_t> sizes;
    std::vector<double> mean_errors; // mean L2 distance to the exact gradient
    bool nonincreasing = false;      // within the given slack
    bool exact_at_full = false;      // error is exactly zero at size N
};

/// Measures how the batch gradient estimator approaches the exact gradient
/// as the batch grows: draws `draws` batches per size and averages the L2
/// error. The last size must be the full dataset, where the sorted full
/// batch reproduces the exact summation order and the error vanishes
/// identically.
template <typename GradFn>
ConsistencyReport estimator_consistency_check(GradFn&& grad_oracle,
                                              std::span<const double> exact_grad,
                                              const Dataset& d, const LinearModel& m,
                                              std::span<const std::size_t> sizes,
                                              std::size_t draws, std::uint64_t seed,
                                              double slack = 0.1) {
    if (sizes.empty() || sizes.back() != d.size())
        raise(errc::invalid_spec, "sizes must end at the dataset size");
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] <= sizes[i - 1]) raise(errc::invalid_spec, "sizes must be increasing");
    if (draws < 1) raise(errc::invalid_spec, "draws must be >= 1");

    ConsistencyReport report;
    report.sizes.assign(sizes.begin(), sizes.end());
    Rng rng(seed);
    for (const std::size_t size : sizes) {
        double acc = 0.0;
        for (std::size_t k = 0; k < draws; ++k) {
            const auto batch = sample_batch(d.size(), size, rng);
            const std::vector<double> g = grad_oracle(m, std::span<const std::size_t>(batch));
            if (g.size() != exact_grad.size())
                raise(errc::dimension_mismatch, "estimator gradient length mismatch");
            double ss = 0.0;
            for (std::size_t j = 0; j < g.size(); ++j) {
                const double dv = g[j] - exact_grad[j];
                ss += dv * dv;
            }
            acc += std::sqrt(ss);
        }
        report.mean_errors.push_back(acc / static_cast<double>(draws));
    }
    report.nonincreasing = true;
    for (std::size_t i = 1; i < report.mean_errors.size(); ++i)
        if (report.mean_errors[i] > report.mean_errors[i - 1] * (1.0 + slack))
            report.nonincreasing = false;
    report.exact_at_full = report.mean_errors.back() == 0.0;
    return report;
}

} // namespace fairsharpe
