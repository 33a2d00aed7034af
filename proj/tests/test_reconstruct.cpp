#include <doctest.h>

#include <cmath>
#include <limits>

#include "gemtomo/error.hpp"
#include "gemtomo/forward.hpp"
#include "gemtomo/pipeline.hpp"
#include "gemtomo/reconstruct.hpp"
#include "support.hpp"

using namespace gemtomo;
using namespace testing_support;

namespace {

struct Lattice {
    GridSpec grid;
    AxisSpec times;
};

// z and t sampled so that beta0 dt dz n = 1.
Lattice matched(std::size_t nxy, std::size_t nz, double beta = 1.4e8) {
    const double dz = 0.25e-3;
    return {small_grid(nxy, nxy, nz, 30e-6, dz), AxisSpec::centered(nz, 1.0 / (beta * double(nz) * dz))};
}

} // namespace

TEST_CASE("reconstruct inverts forward_fft on matched lattices") {
    const auto L = matched(8, 32);
    const auto s = random_field(L.grid, 12);
    PhysicsParams p;
    p.xi = 2e10;
    p.z_g = -0.05;
    p.omega_L_bar = 3e4;
    p.g_omega_c = {0.0, -7.0};
    ForwardOptions o;
    o.focus_plane = 1.5e-3;
    o.include_decay = true;
    o.decoherence = DecoherenceParams{173e-6, 175.4e-6};
    const auto sig = forward_fft(s, p, L.times, o);
    ReconstructOptions ro;
    ro.z_axis = L.grid.z;
    ro.decoherence = o.decoherence;
    const auto r = reconstruct(sig, p, matched_calibration(p, o.focus_plane), ro);
    CHECK(r.grid == s.grid);
    CHECK(rel_err(r.values, s.values) < 1e-6);
    CHECK(rel_err(r.values, s.values) < 1e-12);

    // A wrong bias no longer inverts.
    auto c = matched_calibration(p, o.focus_plane);
    c.omega_L_bar += 1e5;
    CHECK(rel_err(reconstruct(sig, p, c, ro).values, s.values) > 0.1);
}

TEST_CASE("flat spin wave round trip reproduces the density") {
    auto cfg = small_run_config();
    cfg.scenario.kind = ScenarioKind::Flat;
    const auto scene = build_scene(cfg);
    const auto sig = simulate(cfg, {true, true});
    const auto r = reconstruct(sig, cfg.physics, cfg.effective_calibration(), reconstruct_options(cfg));
    CHECK(rel_err(r.values, scene.spinwave.values) < 1e-10);
}

TEST_CASE("default z axis") {
    const AxisSpec t = AxisSpec::centered(600, 100e-9);
    const AxisSpec z = default_z_axis(t, 1.4e8, 1e-3);
    CHECK(z.n == 600);
    CHECK(z.step * 600 == doctest::Approx(1.0 / (1.4e8 * 100e-9)));
    CHECK(z.coord(300) == doctest::Approx(1e-3));
    CHECK_THROWS_AS(default_z_axis(t, 0.0), ValidationError);
}

TEST_CASE("compensate_chirp") {
    KSpaceSignal sig(AxisSpec::centered(2, 1.0), AxisSpec::centered(1, 1.0), AxisSpec{2, 100e-6, 0.0});
    sig.values = random_values(sig.values.size(), 1);
    CHECK(compensate_chirp(sig, 0.0).values == sig.values);
    const double zeta = -0.01 / 1e-12; // -0.01 rad / us^2
    const auto c = compensate_chirp(sig, zeta);
    const cdouble ratio = c.at(1, 0, 1) / sig.at(1, 0, 1);
    CHECK(std::abs(ratio) == doctest::Approx(1.0));
    CHECK(wrap_phase(std::arg(ratio) - 100.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(rel_err(compensate_chirp(c, -zeta).values, sig.values) < 1e-14);
}

TEST_CASE("compensate_decay") {
    KSpaceSignal sig(AxisSpec::centered(1, 1.0), AxisSpec::centered(1, 1.0), AxisSpec{4, 100e-6, 0.0});
    for (auto& v : sig.values) v = 1.0;
    const DecoherenceParams fig5{173e-6, 175.4e-6};
    const auto g = compensate_decay(sig, fig5, 0.1);
    CHECK(g.values[0].real() == 1.0);
    CHECK(g.values[1].real() == doctest::Approx(1.246).epsilon(1e-3));
    CHECK(g.values[2].real() == doctest::Approx(1.0 / decoherence_envelope(200e-6, fig5)));
    // eta(300 us) falls under the floor.
    CHECK(decoherence_envelope(300e-6, fig5) < 0.1);
    CHECK(g.values[3].real() == doctest::Approx(10.0));
    CHECK_THROWS_AS(compensate_decay(sig, fig5, 0.0), ValidationError);
}

TEST_CASE("zero signal reconstructs to zero") {
    const auto L = matched(4, 16);
    KSpaceSignal sig(L.grid.x.conjugate(), L.grid.y.conjugate(), L.times);
    CHECK(max_abs(reconstruct(sig, {}, {}).values) == 0.0);
}

TEST_CASE("normalize_and_mask") {
    const GridSpec g = small_grid(2, 2, 5);
    const auto s = random_field(g, 3);
    const auto self = normalize_and_mask(s, s, 0.1);
    for (std::size_t i = 0; i < s.values.size(); ++i)
        if (self.mask[i]) CHECK(std::abs(self.ratio.values[i] - 1.0) < 1e-15);

    // Threshold is strict: exactly 0.1 max is excluded.
    ComplexField3D ref(g);
    ref.values[0] = 10.0;
    ref.values[1] = {0.0, 1.0};
    ref.values[2] = 1.0001;
    ref.values[3] = -0.5;
    const auto m = normalize_and_mask(s, ref, 0.1);
    CHECK(m.count == 2);
    CHECK(m.mask[0] == 1);
    CHECK(m.mask[1] == 0);
    CHECK(m.mask[2] == 1);
    CHECK(m.ratio.values[2] == s.values[2] / 1.0001);
    CHECK(m.ratio.values[1] == cdouble{});

    const auto empty = normalize_and_mask(s, ComplexField3D(g), 0.1);
    CHECK(empty.count == 0);
    CHECK(max_abs(empty.ratio.values) == 0.0);
    CHECK_THROWS_AS(normalize_and_mask(s, ComplexField3D(small_grid(2, 2, 4)), 0.1), ValidationError);
}

TEST_CASE("masked phase is invariant under a constant signal factor") {
    auto cfg = small_run_config();
    const auto sig = simulate(cfg, {true, true});
    auto scaled = sig;
    const cdouble factor = std::polar(0.37, 2.1);
    for (auto& v : scaled.values) v *= factor;
    const auto c = cfg.effective_calibration();
    const auto a = reconstruct(sig, cfg.physics, c, reconstruct_options(cfg));
    const auto b = reconstruct(scaled, cfg.physics, c, reconstruct_options(cfg));
    const auto mask = magnitude_mask(a, 0.1);
    double worst = 0;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) worst = std::max(worst, std::abs(wrap_phase(std::arg(b.values[i] / a.values[i]) - 2.1)));
    CHECK(worst < 1e-9);
}

TEST_CASE("longitudinal point spread of a single plane") {
    const double beta = 1.4e8, T = 100e-6;
    const std::size_t nt = 1000;
    const AxisSpec t = AxisSpec::centered(nt, T / double(nt));
    GridSpec g{{1, 1e-5, 0.0}, {1, 1e-5, 0.0}, {1, 1e-6, 0.0}};
    ComplexField3D plane(g);
    plane.values[0] = 1.0;
    PhysicsParams p;
    p.beta0 = beta;
    ForwardOptions o;
    o.include_diffraction = false;
    const auto sig = forward_fft(plane, p, t, o);
    ReconstructOptions ro;
    ro.z_axis = AxisSpec::centered(801, 0.5e-6);
    const auto psf = reconstruct(sig, p, {}, ro);

    std::vector<double> amp(psf.values.size());
    for (std::size_t i = 0; i < amp.size(); ++i) amp[i] = std::abs(psf.values[i]);
    const double peak = amp[400];
    CHECK(peak == doctest::Approx(*std::max_element(amp.begin(), amp.end())));
    auto fwhm = [&](bool intensity) {
        auto level = [&](std::size_t i) { return intensity ? amp[i] * amp[i] / (peak * peak) : amp[i] / peak; };
        std::size_t k = 400;
        while (level(k + 1) > 0.5) ++k;
        const double right = ro.z_axis->coord(k) + ro.z_axis->step * (level(k) - 0.5) / (level(k) - level(k + 1));
        return 2 * right;
    };
    // Sinc main lobe: intensity FWHM 0.886 / (T beta), amplitude FWHM 1.207 / (T beta).
    const double unit = 1.0 / (T * beta);
    CHECK(fwhm(true) / (0.886 * unit) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(fwhm(true) / (0.886 * unit) >= 0.7);
    CHECK(fwhm(true) / (0.886 * unit) <= 1.3);
    CHECK(fwhm(false) / unit == doctest::Approx(1.207).epsilon(0.01));
    // Half of 1 / (T beta) lies inside the main lobe, whose first zero is at 1 / (T beta).
    const std::size_t half = 400 + std::size_t(std::lround(0.5 * unit / 0.5e-6));
    CHECK(amp[half] / peak > 0.5);
    const std::size_t zero = 400 + std::size_t(std::lround(unit / 0.5e-6));
    CHECK(amp[zero] / peak < 0.01);
}

TEST_CASE("diffraction unwinding at the wrong plane blurs phase edges") {
    auto cfg = small_run_config(128);
    cfg.scenario.cloud.sigma_x = cfg.scenario.cloud.sigma_y = 0.12e-3;
    const auto scene = build_scene(cfg);
    const auto sig = simulate(cfg, {true, true});
    auto good = cfg.effective_calibration();
    auto bad = good;
    bad.z0 += 5e-3;
    const auto rt_good = evaluate_round_trip(sig, cfg, good);
    const auto rt_bad = evaluate_round_trip(sig, cfg, bad);
    CHECK(rt_good.fidelity.phase_rmse < 1e-6);
    const double w_good = phase_edge_width(rt_good.rho, rt_good.mask, *scene.target_phase, Axis::X, kPi / 2);
    const double w_bad = phase_edge_width(rt_bad.rho, rt_good.mask, *scene.target_phase, Axis::X, kPi / 2);
    MESSAGE("edge width focused " << w_good * 1e6 << " um, defocused " << w_bad * 1e6 << " um");
    CHECK(w_good == doctest::Approx(0.8 * 25e-6));
    CHECK(w_bad >= 2 * w_good);
}

TEST_CASE("phase_edge_width on synthetic profiles") {
    const GridSpec g = small_grid(12, 1, 1);
    RealMap3D target(g);
    for (std::size_t i = 6; i < 12; ++i) target.values[i] = 1.0;
    ComplexField3D rho(g);
    std::vector<std::uint8_t> mask(12, 1);
    for (std::size_t i = 0; i < 12; ++i) rho.values[i] = std::polar(1.0, target.values[i]);
    CHECK(phase_edge_width(rho, mask, target, Axis::X, 1.0) == doctest::Approx(0.8 * 1e-5));
    // Linear ramp over five samples: 10-90% spans 0.8 of it.
    for (std::size_t i = 0; i < 12; ++i)
        rho.values[i] = std::polar(1.0, std::clamp((double(i) - 3.0) / 5.0, 0.0, 1.0));
    CHECK(phase_edge_width(rho, mask, target, Axis::X, 1.0) == doctest::Approx(4e-5));
    mask[0] = 0;
    CHECK_THROWS_AS(phase_edge_width(rho, mask, target, Axis::X, 1.0), ValidationError);
}
