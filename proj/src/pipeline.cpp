#include "gemtomo/pipeline.hpp"

#include <cmath>

#include "gemtomo/error.hpp"

namespace gemtomo {

Scene build_scene(const RunConfig& cfg) {
    cfg.grid.validate();
    const auto& sc = cfg.scenario;
    Scene scene;
    scene.reference = flat_spinwave(cfg.grid, sc.cloud);
    switch (sc.kind) {
    case ScenarioKind::Flat:
        scene.spinwave = scene.reference;
        break;
    case ScenarioKind::Checkerboard:
        scene.target_phase = checkerboard_phase(cfg.grid, sc.checkerboard);
        scene.spinwave = imprint_phase(scene.reference, *scene.target_phase);
        break;
    case ScenarioKind::Bitmap:
        scene.target_phase =
            bitmap_phase(cfg.grid, read_pgm(sc.bitmap_path), sc.bitmap_meters_per_pixel, sc.bitmap_amplitude, sc.bitmap_plane);
        scene.spinwave = imprint_phase(scene.reference, *scene.target_phase);
        break;
    case ScenarioKind::TwoPulse:
        scene.spinwave = two_pulse_spinwave(cfg.grid, sc.cloud, sc.two_pulse, cfg.physics.beta0);
        break;
    case ScenarioKind::Coil: {
        // The reference shot sees only the bias field; rho keeps the coil's share.
        CoilParams off = sc.coil;
        off.current = 0.0;
        const RealMap3D with = coil_phase_map(cfg.grid, sc.coil);
        const RealMap3D without = coil_phase_map(cfg.grid, off);
        RealMap3D diff(cfg.grid);
        for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] = with.values[i] - without.values[i];
        scene.spinwave = imprint_phase(scene.reference, with);
        scene.reference = imprint_phase(scene.reference, without);
        scene.target_phase = std::move(diff);
        break;
    }
    }
    return scene;
}

ForwardOptions forward_options(const RunConfig& cfg) {
    ForwardOptions o = cfg.forward;
    o.decoherence = cfg.decoherence;
    return o;
}

ReconstructOptions reconstruct_options(const RunConfig& cfg) {
    ReconstructOptions o;
    o.z_axis = cfg.grid.z;
    if (cfg.forward.include_decay) o.decoherence = cfg.decoherence;
    return o;
}

KSpaceSignal simulate_field(const ComplexField3D& s, const RunConfig& cfg, const SimulateFlags& flags) {
    cfg.validate();
    KSpaceSignal sig = forward(s, cfg.physics, cfg.times, forward_options(cfg));
    if (cfg.detector.enabled && !flags.skip_detector) {
        DetectorConfig det = cfg.detector.resolve(sig, cfg.physics.k0, cfg.seed);
        if (flags.no_noise) det.shot_noise = false;
        sig = detect(sig, det);
    }
    return sig;
}

KSpaceSignal simulate(const RunConfig& cfg, const SimulateFlags& flags) {
    return simulate_field(build_scene(cfg).spinwave, cfg, flags);
}

double wrap_phase(double phi) { return std::remainder(phi, kTwoPi); }

Fidelity compare_fields(const ComplexField3D& recon, const ComplexField3D& truth, const std::vector<std::uint8_t>& mask) {
    require(recon.grid.shape() == truth.grid.shape(), "compare_fields: shapes differ");
    require(mask.size() == truth.values.size(), "compare_fields: mask does not match");
    Fidelity f;
    double se = 0.0, me = 0.0, mref = 0.0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        const cdouble a = recon.values[i], b = truth.values[i];
        const double d = std::arg(a * std::conj(b));
        se += d * d;
        const double dm = std::abs(a) - std::abs(b);
        me += dm * dm;
        mref += std::norm(b);
        ++f.mask_count;
    }
    if (f.mask_count == 0) throw NumericalError("compare_fields: mask is empty");
    f.phase_rmse = std::sqrt(se / static_cast<double>(f.mask_count));
    f.magnitude_rel_rmse = mref > 0 ? std::sqrt(me / mref) : 0.0;
    return f;
}

RoundTrip evaluate_round_trip(const KSpaceSignal& sig, const RunConfig& cfg, const CalibParams& calib) {
    const Scene scene = build_scene(cfg);
    const ReconstructOptions ropt = reconstruct_options(cfg);
    RoundTrip rt;
    rt.recon = reconstruct(sig, cfg.physics, calib, ropt);
    const KSpaceSignal ref_sig = simulate_field(scene.reference, cfg, {true, true});
    const ComplexField3D ref = reconstruct(ref_sig, cfg.physics, calib, ropt);
    MaskedRatio mr = normalize_and_mask(rt.recon, ref, cfg.mask_threshold);
    ComplexField3D truth = scene.spinwave;
    for (std::size_t i = 0; i < truth.values.size(); ++i) {
        const cdouble r = scene.reference.values[i];
        truth.values[i] = std::abs(r) > 0 ? truth.values[i] / r : cdouble{};
    }
    rt.fidelity = compare_fields(mr.ratio, truth, mr.mask);
    rt.rho = std::move(mr.ratio);
    rt.mask = std::move(mr.mask);
    return rt;
}

double phase_edge_width(const ComplexField3D& rho, const std::vector<std::uint8_t>& mask, const RealMap3D& target,
                        Axis axis, double amplitude) {
    require(rho.grid.shape() == target.grid.shape() && mask.size() == rho.values.size(),
            "phase_edge_width: grid mismatch");
    require(amplitude != 0.0, "phase_edge_width: amplitude must be nonzero");
    const int a = static_cast<int>(axis);
    const GridSpec& g = target.grid;
    const std::size_t n = g.axis(a).n;
    const double step = g.axis(a).step;
    const std::size_t stride = a == 0 ? g.y.n * g.z.n : (a == 1 ? g.z.n : 1);

    double total = 0.0;
    std::size_t edges = 0;
    std::vector<double> u;
    std::vector<std::size_t> starts;
    for (std::size_t base = 0; base < g.size(); ++base) {
        // Lines start at index 0 along the axis.
        if ((base / stride) % n != 0) continue;
        bool high_prev = false;
        starts.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t idx = base + i * stride;
            const bool high = std::abs(target.values[idx]) > 0.5 * std::abs(amplitude);
            if (i > 0 && high != high_prev) starts.push_back(i);
            high_prev = high;
        }
        for (std::size_t e = 0; e < starts.size(); ++e) {
            const std::size_t lo = e == 0 ? 0 : starts[e - 1];
            const std::size_t hi = e + 1 == starts.size() ? n : starts[e + 1];
            const std::size_t edge = starts[e];
            bool inside = true;
            for (std::size_t i = lo; i < hi; ++i) inside = inside && mask[base + i * stride];
            if (!inside) continue;
            // Orient low -> high and normalize the wrapped phase to the step.
            const bool rising = std::abs(target.values[base + edge * stride]) > 0.5 * std::abs(amplitude);
            u.clear();
            for (std::size_t k = 0; k < hi - lo; ++k) {
                const std::size_t i = rising ? lo + k : hi - 1 - k;
                u.push_back(wrap_phase(std::arg(rho.values[base + i * stride])) / amplitude);
            }
            const std::size_t first_high = rising ? edge - lo : hi - edge;
            // 10% crossing: last low-side sample at or below 0.1, before the first high sample.
            std::size_t j10 = 0;
            bool found10 = false;
            for (std::size_t k = 0; k <= first_high && k < u.size(); ++k)
                if (u[k] <= 0.1) {
                    j10 = k;
                    found10 = true;
                }
            double width = static_cast<double>(u.size());
            if (found10 && j10 + 1 < u.size()) {
                const double rise = u[j10 + 1] - u[j10];
                const double x10 = static_cast<double>(j10) + (rise > 0.0 ? (0.1 - u[j10]) / rise : 0.0);
                for (std::size_t k = j10 + 1; k < u.size(); ++k)
                    if (u[k] >= 0.9) {
                        const double x90 = static_cast<double>(k - 1) + (0.9 - u[k - 1]) / (u[k] - u[k - 1]);
                        width = x90 - x10;
                        break;
                    }
            }
            total += width * step;
            ++edges;
        }
    }
    require(edges > 0, "phase_edge_width: no masked edges along the axis");
    return total / static_cast<double>(edges);
}

double relative_difference(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
    require(a.size() == b.size(), "relative_difference: sizes differ");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(a[i]);
    }
    require(den > 0.0, "relative_difference: reference is zero");
    return std::sqrt(num / den);
}

OracleReport oracle_compare(const ComplexField3D& s, const PhysicsParams& p, const AxisSpec& times, int substeps) {
    require(substeps >= 1, "oracle: substeps must be >= 1");
    OracleReport r;
    r.substeps = substeps;
    ForwardOptions o;
    o.z_substeps_per_cell = substeps;
    o.include_diffraction = false;
    r.rel_diff_no_diffraction =
        relative_difference(forward_fft(s, p, times, o).values, forward_splitstep(s, p, times, o).values);
    o.include_diffraction = true;
    const auto ref = forward_fft(s, p, times, o).values;
    r.rel_diff_diffraction = relative_difference(ref, forward_splitstep(s, p, times, o).values);
    o.z_substeps_per_cell = 2 * substeps;
    r.rel_diff_diffraction_double = relative_difference(ref, forward_splitstep(s, p, times, o).values);
    return r;
}

RunConfig oracle_config() {
    RunConfig c = default_config();
    const std::size_t nz = 32;
    const double dz = 0.25e-3;
    c.grid.x = AxisSpec::centered(8, 30e-6);
    c.grid.y = AxisSpec::centered(8, 30e-6);
    c.grid.z = AxisSpec::centered(nz, dz);
    c.times = AxisSpec::centered(nz, 1.0 / (c.physics.beta0 * static_cast<double>(nz) * dz));
    c.scenario.cloud.length_z = 4e-3;
    c.scenario.cloud.edge_softness = 0.5e-3;
    c.scenario.checkerboard = {1e-3, 60e-6, kPi / 2, PatternPlane::ZX, 0.0};
    c.detector.enabled = false;
    return c;
}

} // namespace gemtomo
