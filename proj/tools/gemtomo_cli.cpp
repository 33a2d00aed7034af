// gemtomo: simulate, detect and invert gradient-echo spin-wave tomography data.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "gemtomo/config.hpp"
#include "gemtomo/error.hpp"
#include "gemtomo/gemt.hpp"
#include "gemtomo/pipeline.hpp"
#include "gemtomo/render.hpp"

using namespace gemtomo;
using ordered = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kValidation = 2, kNumerical = 3, kIo = 4 };

struct Options {
    std::string config, in, out, calib, grid, times, slice = "z=0", method, mode = "off", mask, frames_out;
    std::optional<std::uint64_t> seed;
    bool no_noise = false, skip_detector = false, axes = false;
    double angle = 4.6e-3;
    std::optional<std::size_t> frames_delay;
};

AxisSpec resize(const AxisSpec& a, std::size_t n) { return AxisSpec::centered(n, a.step, a.coord(a.n / 2)); }

RunConfig load(const Options& o, RunConfig (*fallback)() = default_config) {
    RunConfig c = o.config.empty() ? fallback() : load_config(o.config);
    if (o.seed) c.seed = *o.seed;
    if (!o.grid.empty()) {
        std::size_t nx = 0, ny = 0, nz = 0;
        char x1 = 0, x2 = 0;
        std::istringstream is(o.grid);
        if (!(is >> nx >> x1 >> ny >> x2 >> nz) || x1 != 'x' || x2 != 'x' || !is.eof() || nx == 0 || ny == 0 || nz == 0)
            throw ValidationError("--grid must look like NXxNYxNZ, e.g. 64x64x256");
        c.grid.x = resize(c.grid.x, nx);
        c.grid.y = resize(c.grid.y, ny);
        c.grid.z = resize(c.grid.z, nz);
    }
    if (!o.times.empty()) {
        const auto at = o.times.find('@');
        if (at == std::string::npos) throw ValidationError("--times must look like N@DT, e.g. 600@1e-7");
        std::size_t n = 0;
        double dt = 0;
        try {
            std::size_t used = 0;
            n = std::stoull(o.times.substr(0, at), &used);
            if (used != at) throw std::invalid_argument("n");
            dt = std::stod(o.times.substr(at + 1), &used);
            if (used != o.times.size() - at - 1) throw std::invalid_argument("dt");
        } catch (const std::logic_error&) {
            throw ValidationError("--times must look like N@DT, e.g. 600@1e-7");
        }
        if (n == 0 || !(dt > 0)) throw ValidationError("--times needs N >= 1 and DT > 0");
        c.times = AxisSpec::centered(n, dt);
    }
    if (!o.method.empty()) c.forward.method = o.method == "fft" ? ForwardMethod::Fft : ForwardMethod::SplitStep;
    c.validate();
    return c;
}

void emit_json(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") std::cout << text;
    else write_text_file(path, text);
}

std::string sibling(const std::string& out, const std::string& suffix) {
    const auto dot = out.rfind('.');
    const auto slash = out.rfind('/');
    const std::string stem = (dot != std::string::npos && (slash == std::string::npos || dot > slash)) ? out.substr(0, dot) : out;
    return stem + suffix;
}

ordered calib_report(const CalibParams& c) { return ordered::parse(dump_calibration(c)); }

int cmd_simulate(const Options& o) {
    const RunConfig c = load(o);
    const KSpaceSignal sig = simulate(c, {o.no_noise, o.skip_detector});
    write_signal(o.out, sig);
    std::cerr << "simulate: wrote " << sig.kx.n << "x" << sig.ky.n << "x" << sig.t.n << " signal to " << o.out << "\n";
    return kOk;
}

int cmd_detect(const Options& o) {
    const RunConfig c = load(o);
    const KSpaceSignal sig = read_signal(o.in);
    DetectorConfig det = c.detector.resolve(sig, c.physics.k0, c.seed);
    if (o.no_noise) det.shot_noise = false;
    write_signal(o.out, detect(sig, det));
    if (!o.frames_out.empty()) {
        const std::size_t it = o.frames_delay.value_or(sig.t.n / 2);
        require(it < sig.t.n, "--frames-delay out of range");
        write_gemt(o.frames_out, frames_to_gemt(synthesize_frames(sig.slice(it), det, it), det.pixel_pitch));
    }
    return kOk;
}

int cmd_reconstruct(const Options& o) {
    const RunConfig c = load(o);
    const KSpaceSignal sig = read_signal(o.in);
    const CalibParams calib = o.calib.empty() ? c.effective_calibration() : load_calibration(o.calib);
    const ComplexField3D recon = reconstruct(sig, c.physics, calib, reconstruct_options(c));
    write_field(o.out, recon);
    write_gemt(sibling(o.out, ".mask.gemt"), mask_to_gemt(recon.grid, magnitude_mask(recon, c.mask_threshold)));

    ordered report;
    report["input"] = o.in;
    report["calibration"] = calib_report(calib);
    report["mask_threshold"] = c.mask_threshold;
    report["scenario"] = to_string(c.scenario.kind);
    if (recon.grid.shape() == c.grid.shape()) {
        const RoundTrip rt = evaluate_round_trip(sig, c, calib);
        report["phase_rmse_rad"] = rt.fidelity.phase_rmse;
        report["magnitude_rel_rmse"] = rt.fidelity.magnitude_rel_rmse;
        report["mask_count"] = rt.fidelity.mask_count;
    }
    write_text_file(sibling(o.out, ".report.json"), report.dump(2) + "\n");
    std::cout << report.dump(2) << "\n";
    return kOk;
}

int cmd_calibrate(const Options& o) {
    const RunConfig c = load(o);
    const KSpaceSignal sig = read_signal(o.in);
    CalibParams calib = c.effective_calibration();
    const FocusResult fr = calibrate_focus(sig, c.physics, calib, c.focus_search, reconstruct_options(c));
    calib.z0 = fr.z0;
    calib.zeta = fr.zeta;
    std::cerr << "calibrate: z0 " << fr.z0 << " m" << (fr.z0_identifiable ? "" : " (unidentifiable)") << ", zeta "
              << fr.zeta << " rad/s^2" << (fr.zeta_identifiable ? "" : " (unidentifiable)") << ", score " << fr.score
              << " after " << fr.evaluations << " reconstructions\n";
    if (o.axes) {
        const Scene scene = build_scene(c);
        require(scene.target_phase.has_value(), "--axes needs a scenario with an imprinted phase pattern");
        const AxisResult ar = calibrate_axes(reconstruct(sig, c.physics, calib, reconstruct_options(c)), *scene.target_phase);
        calib.axis_scale = ar.scale;
        calib.rotation_xy = ar.rotation_xy;
        std::cerr << "calibrate: axis correlation " << ar.correlation << "\n";
    }
    emit_json(o.out, dump_calibration(calib));
    return kOk;
}

int cmd_fit_decay(const Options& o) {
    std::istringstream is(read_text_file(o.in));
    std::string line;
    if (!std::getline(is, line)) throw IoError(o.in + ": empty decay CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t_s,amplitude") throw IoError(o.in + ":1: header must be 't_s,amplitude', got '" + line + "'");
    std::vector<double> t, a;
    for (std::size_t no = 2; std::getline(is, line); ++no) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        try {
            if (comma == std::string::npos) throw std::invalid_argument("comma");
            std::size_t u1 = 0, u2 = 0;
            const double tv = std::stod(line.substr(0, comma), &u1);
            const double av = std::stod(line.substr(comma + 1), &u2);
            if (u1 != comma || u2 != line.size() - comma - 1) throw std::invalid_argument("trailing");
            t.push_back(tv);
            a.push_back(av);
        } catch (const std::logic_error&) {
            throw IoError(o.in + ":" + std::to_string(no) + ": expected two numbers 't_s,amplitude', got '" + line + "'");
        }
    }
    DecayMode mode;
    if (o.mode == "off") mode = DecayMode::GradientOff;
    else if (o.mode == "on") mode = DecayMode::GradientOn;
    else throw ValidationError("--mode must be off or on");
    DecayFitOptions opt;
    opt.k_sw = k_sw_from_angle(o.angle, PhysicsParams{}.k0);
    if (!o.config.empty()) opt.beta_bar = load(o).physics.beta0;
    emit_json(o.out, dump_decay_fit(fit_decay(t, a, mode, opt)));
    return kOk;
}

int cmd_scenario(const Options& o) {
    const RunConfig c = load(o);
    const Scene scene = build_scene(c);
    write_field(o.out, scene.spinwave);
    if (scene.target_phase) {
        ComplexField3D phase(c.grid);
        for (std::size_t i = 0; i < phase.values.size(); ++i) phase.values[i] = scene.target_phase->values[i];
        write_field(sibling(o.out, ".phase.gemt"), phase);
    }
    return kOk;
}

int cmd_render(const Options& o) {
    const SliceSpec s = parse_slice(o.slice);
    const ComplexField3D f = read_field(o.in);
    std::vector<std::uint8_t> mask;
    if (!o.mask.empty()) {
        const GemtArray m = read_gemt(o.mask);
        if (m.dtype != GemtType::UInt8 || m.byte_data.size() != f.values.size())
            throw IoError(o.mask + ": not a byte mask matching the field");
        mask = m.byte_data;
    }
    write_png(o.out + "_phase.png", render_phase(f, s, mask.empty() ? nullptr : &mask));
    write_png(o.out + "_magnitude.png", render_magnitude(f, s));
    write_text_file(o.out + "_profiles.csv", slice_profiles_csv(f, s));
    return kOk;
}

int cmd_oracle(const Options& o) {
    const RunConfig c = load(o, oracle_config);
    const Scene scene = build_scene(c);
    const OracleReport r = oracle_compare(scene.spinwave, c.physics, c.times, c.forward.z_substeps_per_cell);
    ordered j;
    j["grid"] = std::to_string(c.grid.x.n) + "x" + std::to_string(c.grid.y.n) + "x" + std::to_string(c.grid.z.n);
    j["substeps"] = r.substeps;
    j["rel_diff_no_diffraction"] = r.rel_diff_no_diffraction;
    j["rel_diff_diffraction"] = r.rel_diff_diffraction;
    j["rel_diff_diffraction_double_substeps"] = r.rel_diff_diffraction_double;
    j["convergence_ratio"] = r.ratio();
    emit_json(o.out, j.dump(2) + "\n");
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gradient-echo spin-wave tomography: simulate, detect, reconstruct, calibrate"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "Run configuration (JSON)");
        sub->add_option("--seed", o.seed, "RNG seed");
        sub->add_option("--grid", o.grid, "Grid size NXxNYxNZ");
        sub->add_option("--times", o.times, "Readout delays N@DT");
    };

    auto* sim = app.add_subcommand("simulate", "Scenario -> spin wave -> readout signal (GEMT)");
    common(sim);
    sim->add_option("--out", o.out, "Output signal (GEMT)")->required();
    sim->add_flag("--no-noise", o.no_noise, "Disable shot noise");
    sim->add_flag("--skip-detector", o.skip_detector, "Write the forward-model signal directly");
    sim->add_option("--method", o.method, "Forward model")->check(CLI::IsMember({"fft", "splitstep"}));

    auto* det = app.add_subcommand("detect", "Run a signal through the heterodyne camera");
    common(det);
    det->add_option("--in", o.in, "Input signal (GEMT)")->required();
    det->add_option("--out", o.out, "Output signal (GEMT)")->required();
    det->add_flag("--no-noise", o.no_noise, "Disable shot noise");
    det->add_option("--frames-out", o.frames_out, "Export the raw frame pairs of one delay (GEMT)");
    det->add_option("--frames-delay", o.frames_delay, "Delay index for --frames-out");

    auto* rec = app.add_subcommand("reconstruct", "Invert a signal to the spin wave (GEMT + JSON report)");
    common(rec);
    rec->add_option("--in", o.in, "Input signal (GEMT)")->required();
    rec->add_option("--calib", o.calib, "Calibration JSON; defaults to the matched calibration");
    rec->add_option("--out", o.out, "Output field (GEMT)")->required();

    auto* cal = app.add_subcommand("calibrate", "Focus (z0, zeta) and optional axis calibration");
    common(cal);
    cal->add_option("--in", o.in, "Input signal (GEMT)")->required();
    cal->add_option("--out", o.out, "Calibration JSON (stdout if omitted)");
    cal->add_flag("--axes", o.axes, "Also fit axis scales and rotation against the scenario pattern");

    auto* fit = app.add_subcommand("fit-decay", "Fit readout decay lifetimes from a t_s,amplitude CSV");
    fit->add_option("--in", o.in, "Decay CSV")->required();
    fit->add_option("--out", o.out, "Result JSON (stdout if omitted)");
    fit->add_option("--mode", o.mode, "Gradient off (tau_k) or on (tau_k, tau_beta)")->check(CLI::IsMember({"off", "on"}));
    fit->add_option("--angle-rad", o.angle, "Signal/coupling crossing angle for the temperature");
    fit->add_option("--config", o.config, "Run configuration supplying beta0");

    auto* scen = app.add_subcommand("scenario", "Write the scenario spin wave (GEMT)");
    common(scen);
    scen->add_option("--out", o.out, "Output field (GEMT)")->required();

    auto* ren = app.add_subcommand("render", "PNG phase/magnitude slices and CSV profiles");
    ren->add_option("--in", o.in, "Field (GEMT)")->required();
    ren->add_option("--slice", o.slice, "Slice, e.g. z=128");
    ren->add_option("--mask", o.mask, "Byte mask (GEMT) applied to the phase image");
    ren->add_option("--out", o.out, "Output prefix")->required();

    auto* orc = app.add_subcommand("oracle", "Compare forward_fft against forward_splitstep");
    common(orc);
    orc->add_option("--out", o.out, "Report JSON (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidation;
    }

    try {
        if (*sim) return cmd_simulate(o);
        if (*det) return cmd_detect(o);
        if (*rec) return cmd_reconstruct(o);
        if (*cal) return cmd_calibrate(o);
        if (*fit) return cmd_fit_decay(o);
        if (*scen) return cmd_scenario(o);
        if (*ren) return cmd_render(o);
        if (*orc) return cmd_oracle(o);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kNumerical;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumerical;
    }
    return kOk;
}
