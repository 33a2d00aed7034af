#include <doctest.h>

#include <cmath>
#include <random>

#include "gemtomo/calibration.hpp"
#include "gemtomo/error.hpp"
#include "gemtomo/pipeline.hpp"
#include "support.hpp"

using namespace gemtomo;
using namespace testing_support;

namespace {

// Readout chirp of -0.01 rad/us^2 expressed through the gradient decay rate.
RunConfig focus_config(std::size_t nxy = 32) {
    auto cfg = small_run_config(128);
    cfg.grid.x = cfg.grid.y = AxisSpec::centered(nxy, 25e-6);
    cfg.physics.z_g = -0.05;
    cfg.physics.xi = -1e10 / (kPi * cfg.physics.z_g);
    cfg.forward.focus_plane = 2e-3;
    return cfg;
}

double tile_parity(double u, double v, double tu, double tv, double amp) {
    const auto a = static_cast<long long>(std::floor(u / tu)) + static_cast<long long>(std::floor(v / tv));
    return a % 2 != 0 ? amp : 0.0;
}

} // namespace

TEST_CASE("sharpness examples") {
    std::vector<cdouble> delta(50);
    delta[17] = {0.0, 3.0};
    CHECK(sharpness(delta) == doctest::Approx(1.0));
    std::vector<cdouble> flat(50, cdouble{1.0, 1.0});
    CHECK(sharpness(flat) == doctest::Approx(1.0 / 50));
    CHECK_THROWS_AS(sharpness(std::vector<cdouble>(4)), ValidationError);
    const auto r = random_values(50, 2);
    CHECK(sharpness(r) > 1.0 / 50);
    CHECK(sharpness(r) < 1.0);
}

TEST_CASE("edge sharpness prefers the focused reconstruction") {
    auto cfg = focus_config();
    const auto sig = simulate(cfg, {true, true});
    const auto good = cfg.effective_calibration();
    auto off = good;
    off.z0 += 5e-3;
    const auto ro = reconstruct_options(cfg);
    const double focused = edge_sharpness(reconstruct(sig, cfg.physics, good, ro));
    const double blurred = edge_sharpness(reconstruct(sig, cfg.physics, off, ro));
    MESSAGE("edge sharpness focused " << focused << ", 5 mm off " << blurred);
    CHECK(focused > blurred);

    // Invariant under global phase and amplitude of the signal.
    auto scaled = sig;
    for (auto& v : scaled.values) v *= std::polar(4.0, -0.7);
    CHECK(edge_sharpness(reconstruct(scaled, cfg.physics, good, ro)) == doctest::Approx(focused).epsilon(1e-10));
}

TEST_CASE("edge sharpness on selected axes") {
    const GridSpec g = small_grid(3, 4, 5);
    const auto f = random_field(g, 8);
    CHECK(edge_sharpness(f, AxisSet{}) == 1.0);
    std::vector<cdouble> dz;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            for (std::size_t k = 0; k + 1 < 5; ++k) dz.push_back(f.at(i, j, k + 1) - f.at(i, j, k));
    CHECK(edge_sharpness(f, AxisSet::only(Axis::Z)) == doctest::Approx(sharpness(dz)).epsilon(1e-14));
    const double x = edge_sharpness(f, AxisSet::only(Axis::X)), y = edge_sharpness(f, AxisSet::only(Axis::Y));
    CHECK(edge_sharpness(f, AxisSet::xy()) == doctest::Approx(std::sqrt(x * y)).epsilon(1e-14));
    CHECK(edge_sharpness(f) == doctest::Approx(std::cbrt(x * y * sharpness(dz))).epsilon(1e-14));
    // A single-sample transverse grid carries no transverse edges.
    CHECK(edge_sharpness(random_field(small_grid(1, 1, 6), 2), AxisSet::xy()) == 1.0);
}

TEST_CASE("focus calibration recovers an injected plane and chirp") {
    auto cfg = focus_config();
    const auto sig = simulate(cfg, {true, true});
    const auto truth = cfg.effective_calibration();
    CHECK(truth.zeta == doctest::Approx(-1e10));
    CHECK(truth.z0 == 2e-3);
    auto base = truth;
    base.z0 = 0.0;
    base.zeta = 0.0;
    const auto res = calibrate_focus(sig, cfg.physics, base, cfg.focus_search, reconstruct_options(cfg));
    MESSAGE("z0 " << res.z0 << " zeta " << res.zeta << " evals " << res.evaluations);
    CHECK(res.z0_identifiable);
    CHECK(res.zeta_identifiable);
    CHECK(res.z0 == doctest::Approx(2e-3).epsilon(0.05));
    CHECK(res.zeta == doctest::Approx(-1e10).epsilon(0.05));

    // Determinism.
    const auto again = calibrate_focus(sig, cfg.physics, base, cfg.focus_search, reconstruct_options(cfg));
    CHECK(again.z0 == res.z0);
    CHECK(again.zeta == res.zeta);

    // An optimum outside the range is reported.
    FocusSearch narrow = cfg.focus_search;
    narrow.z0_range = {-4e-3, 1e-3};
    narrow.refine = false;
    CHECK_THROWS_AS(calibrate_focus(sig, cfg.physics, base, narrow, reconstruct_options(cfg)), NumericalError);
}

TEST_CASE("without transverse structure only the chirp is identifiable") {
    auto cfg = focus_config(1);
    const auto sig = simulate(cfg, {true, true});
    auto base = cfg.effective_calibration();
    base.z0 = 0.0;
    base.zeta = 0.0;
    const auto res = calibrate_focus(sig, cfg.physics, base, cfg.focus_search, reconstruct_options(cfg));
    CHECK_FALSE(res.z0_identifiable);
    CHECK(res.z0 == 0.0);
    CHECK(res.zeta_identifiable);
    CHECK(res.zeta == doctest::Approx(-1e10).epsilon(0.05));
}

TEST_CASE("axis calibration: self match and identity") {
    auto cfg = small_run_config();
    cfg.scenario.cloud.sigma_x = cfg.scenario.cloud.sigma_y = 0.12e-3;
    const auto scene = build_scene(cfg);
    CHECK(axis_correlation(scene.spinwave, *scene.target_phase, {1, 1, 1}, 0.0) == doctest::Approx(1.0).epsilon(1e-6));

    const auto sig = simulate(cfg, {true, true});
    const auto rt = evaluate_round_trip(sig, cfg, cfg.effective_calibration());
    const auto res = calibrate_axes(rt.recon, *scene.target_phase);
    CHECK(res.correlation == doctest::Approx(1.0).epsilon(1e-6));
    for (double s : res.scale) CHECK(s == doctest::Approx(1.0).epsilon(0.01));
    CHECK(std::abs(res.rotation_xy) < 0.01);

    ComplexField3D noise(cfg.grid, random_values(cfg.grid.size(), 4));
    CHECK_THROWS_AS(calibrate_axes(noise, *scene.target_phase), NumericalError);
}

TEST_CASE("axis calibration: stretched z") {
    // Sample i of the recon holds the pattern at z_i / 1.1.
    GridSpec g{AxisSpec::centered(16, 25e-6), AxisSpec::centered(16, 25e-6), AxisSpec::centered(96, 50e-6)};
    const CheckerboardSpec spec{0.4e-3, 100e-6, kPi / 2, PatternPlane::ZX, 150e-6};
    const auto target = checkerboard_phase(g, spec);
    GridSpec squeezed = g;
    squeezed.z.step /= 1.1;
    squeezed.z.origin /= 1.1;
    const auto stretched = checkerboard_phase(squeezed, spec);
    ComplexField3D recon(g);
    for (std::size_t i = 0; i < recon.values.size(); ++i) recon.values[i] = std::polar(1.0, stretched.values[i]);
    const auto res = calibrate_axes(recon, target);
    MESSAGE("scales " << res.scale[0] << " " << res.scale[1] << " " << res.scale[2] << " rot " << res.rotation_xy);
    CHECK(res.scale[2] == doctest::Approx(1.1).epsilon(0.02));
    CHECK(res.scale[0] == doctest::Approx(1.0).epsilon(0.02));
    CHECK(res.scale[1] == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("axis calibration: in-plane rotation") {
    GridSpec g{AxisSpec::centered(128, 10e-6), AxisSpec::centered(128, 10e-6), AxisSpec::centered(2, 50e-6)};
    const CheckerboardSpec spec{80e-6, 80e-6, kPi / 2, PatternPlane::XY, 0.0};
    const auto target = checkerboard_phase(g, spec);
    const double theta = 0.03;
    ComplexField3D recon(g);
    for (std::size_t i = 0; i < g.x.n; ++i)
        for (std::size_t j = 0; j < g.y.n; ++j) {
            const double x = g.x.coord(i), y = g.y.coord(j);
            // recon(r) = target(R(-theta) r)
            const double xr = std::cos(theta) * x + std::sin(theta) * y;
            const double yr = -std::sin(theta) * x + std::cos(theta) * y;
            const double ph = tile_parity(xr, yr, spec.tile_first, spec.tile_second, spec.amplitude);
            for (std::size_t k = 0; k < g.z.n; ++k) recon.at(i, j, k) = std::polar(1.0, ph);
        }
    const auto res = calibrate_axes(recon, target);
    MESSAGE("rotation " << res.rotation_xy << " scales " << res.scale[0] << " " << res.scale[1] << " corr " << res.correlation
            << " at truth " << axis_correlation(recon, target, {1, 1, 1}, theta));
    CHECK(std::abs(res.rotation_xy - theta) < 2e-3);
}

TEST_CASE("fit_decay: exact model data") {
    std::vector<double> t, a_off, a_on;
    for (int i = 0; i < 30; ++i) {
        const double ti = i * 10e-6;
        t.push_back(ti);
        a_off.push_back(2.5 * decoherence_envelope(ti, {173e-6, std::numeric_limits<double>::infinity()}));
        a_on.push_back(2.5 * decoherence_envelope(ti, {173e-6, 175.4e-6}));
    }
    const double ksw = k_sw_from_angle(4.6e-3, kTwoPi / 795e-9);
    DecayFitOptions opt;
    opt.k_sw = ksw;
    const auto off = fit_decay(t, a_off, DecayMode::GradientOff, opt);
    CHECK(off.tau_k == doctest::Approx(173e-6).epsilon(1e-8));
    CHECK(off.amplitude == doctest::Approx(2.5).epsilon(1e-8));
    CHECK(std::isinf(off.tau_beta));
    CHECK(off.tau_k_err < 1e-12);
    CHECK(off.temperature == doctest::Approx(temperature_from_tau_k(173e-6, ksw)).epsilon(1e-8));
    CHECK(off.temperature == doctest::Approx(265e-6).epsilon(0.01));

    opt.fixed_tau_k = 173e-6;
    const auto on = fit_decay(t, a_on, DecayMode::GradientOn, opt);
    CHECK(on.tau_beta == doctest::Approx(175.4e-6).epsilon(1e-8));
    CHECK(on.tau_k == 173e-6);
    opt.fixed_tau_k.reset();
    const auto both = fit_decay(t, a_on, DecayMode::GradientOn, opt);
    CHECK(both.tau_k == doctest::Approx(173e-6).epsilon(1e-8));
    CHECK(both.tau_beta == doctest::Approx(175.4e-6).epsilon(1e-8));
    CHECK(both.temperature == doctest::Approx(temperature_from_tau_beta(175.4e-6, 1.4e8)).epsilon(1e-8));
    CHECK(to_string(both.mode) == "gradient-on");
}

TEST_CASE("fit_decay: noisy data and reported errors") {
    std::mt19937 rng(5);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<double> t;
    for (int i = 0; i < 40; ++i) t.push_back(i * 10e-6);
    std::vector<double> est, err;
    for (int run = 0; run < 200; ++run) {
        std::vector<double> a;
        for (double ti : t)
            a.push_back(decoherence_envelope(ti, {173e-6, std::numeric_limits<double>::infinity()}) * (1 + noise(rng)));
        const auto r = fit_decay(t, a, DecayMode::GradientOff);
        est.push_back(r.tau_k);
        err.push_back(r.tau_k_err);
    }
    double mean = 0, var = 0, mean_err = 0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        mean += est[i] / est.size();
        mean_err += err[i] / est.size();
    }
    for (double e : est) var += (e - mean) * (e - mean) / (est.size() - 1);
    CHECK(mean == doctest::Approx(173e-6).epsilon(0.01));
    // Covariance-based errors match the Monte Carlo scatter.
    CHECK(mean_err / std::sqrt(var) == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("fit_decay: errors") {
    std::vector<double> t{0, 1e-5, 2e-5, 3e-5, 4e-5};
    std::vector<double> a{1, 0.9, 0.8, 0.7, 0.6};
    CHECK_THROWS_AS(fit_decay(t, a, DecayMode::GradientOff), ValidationError);
    t.push_back(5e-5);
    a.push_back(-0.1);
    CHECK_THROWS_AS(fit_decay(t, a, DecayMode::GradientOff), ValidationError);
    // Growing amplitudes cannot be a decay.
    a = {1, 1.1, 1.3, 1.6, 2.0, 2.5};
    CHECK_THROWS_AS(fit_decay(t, a, DecayMode::GradientOff), NumericalError);
}
