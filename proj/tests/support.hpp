#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "gemtomo/config.hpp"
#include "gemtomo/field.hpp"

namespace testing_support {

using gemtomo::cdouble;

inline std::vector<cdouble> random_values(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    std::vector<cdouble> v(n);
    for (auto& x : v) x = {g(rng), g(rng)};
    return v;
}

inline gemtomo::ComplexField3D random_field(const gemtomo::GridSpec& g, unsigned seed) {
    return gemtomo::ComplexField3D(g, random_values(g.size(), seed));
}

inline double rel_err(const std::vector<cdouble>& a, const std::vector<cdouble>& ref) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - ref[i]);
        den += std::norm(ref[i]);
    }
    return std::sqrt(num / den);
}

inline double max_abs(const std::vector<cdouble>& a) {
    double m = 0;
    for (const auto& v : a) m = std::max(m, std::abs(v));
    return m;
}

inline gemtomo::GridSpec small_grid(std::size_t nx, std::size_t ny, std::size_t nz, double dx = 1e-5, double dz = 1e-4) {
    return {gemtomo::AxisSpec::centered(nx, dx), gemtomo::AxisSpec::centered(ny, dx), gemtomo::AxisSpec::centered(nz, dz)};
}

// Checkerboard cloud on a 32 x 32 x 64 lattice-matched grid, detector off.
inline gemtomo::RunConfig small_run_config(std::size_t nz = 64) {
    auto cfg = gemtomo::default_config();
    const double dz = cfg.grid.z.step;
    cfg.grid = {gemtomo::AxisSpec::centered(32, 25e-6), gemtomo::AxisSpec::centered(32, 25e-6),
                gemtomo::AxisSpec::centered(nz, dz)};
    cfg.times = gemtomo::AxisSpec::centered(nz, 1.0 / (cfg.physics.beta0 * double(nz) * dz));
    cfg.scenario.cloud.length_z = 0.6 * double(nz) * dz;
    cfg.scenario.cloud.edge_softness = 2 * dz;
    cfg.detector.enabled = false;
    return cfg;
}

} // namespace testing_support
