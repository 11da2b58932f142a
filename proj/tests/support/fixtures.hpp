#pragma once

// Shared test fixtures and independent numerical oracles. Nothing here may
// call the gradient implementations it is used to check.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "fairsharpe/dataset.hpp"
#include "fairsharpe/model.hpp"
#include "fairsharpe/rng.hpp"

namespace testsupport {

using fairsharpe::Dataset;
using fairsharpe::LinearModel;
using fairsharpe::SynthSpec;

/// Central finite differences of a scalar function of (weights, bias);
/// bias is the last component, matching the library gradient layout.
template <typename F>
std::vector<double> fd_gradient(F&& f, const LinearModel& m, double h = 1e-5) {
    std::vector<double> g(m.dim() + 1);
    LinearModel p = m;
    for (std::size_t i = 0; i <= m.dim(); ++i) {
        double& slot = i < m.dim() ? p.weights[i] : p.bias;
        const double keep = slot;
        slot = keep + h;
        const double up = f(p);
        slot = keep - h;
        const double down = f(p);
        slot = keep;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

inline double l2_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double l2_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

/// |a - b| / max(1, |b|), vector form.
inline double rel_error(const std::vector<double>& got, const std::vector<double>& want) {
    return l2_distance(got, want) / std::max(1.0, l2_norm(want));
}

/// Two Gaussian label clusters per group along the first axis; group 1 is
/// shifted by `group_shift` along that same axis, so accuracy-optimal
/// hyperplanes predict positives at different rates per group.
inline Dataset biased_fixture(std::size_t dim, std::size_t per_cell, double group_shift,
                              std::uint64_t seed, double noise = 0.9) {
    SynthSpec spec;
    spec.noise_std = noise;
    std::vector<double> mneg(dim, 0.0), mpos(dim, 0.0);
    mneg[0] = -1.0;
    mpos[0] = 1.0;
    auto shifted = [&](std::vector<double> m) {
        m[0] += group_shift;
        return m;
    };
    spec.cells = {{0, -1, per_cell, mneg},
                  {0, 1, per_cell, mpos},
                  {1, -1, per_cell, shifted(mneg)},
                  {1, 1, per_cell, shifted(mpos)}};
    return fairsharpe::synthesize(spec, seed);
}

inline Dataset unbiased_fixture(std::size_t dim, std::size_t per_cell, std::uint64_t seed) {
    return biased_fixture(dim, per_cell, 0.0, seed);
}

inline LinearModel random_model(std::size_t dim, fairsharpe::Rng& rng, double scale = 1.0) {
    LinearModel m;
    m.weights.resize(dim);
    for (auto& w : m.weights) w = scale * (2.0 * rng.uniform01() - 1.0);
    m.bias = scale * (2.0 * rng.uniform01() - 1.0);
    return m;
}

inline LinearModel lerp_model(const LinearModel& a, const LinearModel& b, double t) {
    LinearModel m;
    m.weights.resize(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        m.weights[i] = t * a.weights[i] + (1.0 - t) * b.weights[i];
    m.bias = t * a.bias + (1.0 - t) * b.bias;
    return m;
}

/// Fresh directory under the system temp root, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        dir_ = std::filesystem::temp_directory_path() /
               ("fairsharpe_" + tag + "_" + std::to_string(++counter) + "_" +
                std::to_string(std::random_device{}()));
        std::filesystem::create_directories(dir_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(dir_, ec);
    }
    const std::filesystem::path& path() const { return dir_; }

private:
    std::filesystem::path dir_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary);
    out << body;
}

} // namespace testsupport
