#include "gemtomo/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gemtomo/error.hpp"

namespace gemtomo {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

std::string to_string(ScenarioKind k) {
    switch (k) {
    case ScenarioKind::Flat: return "flat";
    case ScenarioKind::Checkerboard: return "checkerboard";
    case ScenarioKind::Bitmap: return "bitmap";
    case ScenarioKind::TwoPulse: return "two_pulse";
    case ScenarioKind::Coil: return "coil";
    }
    return "flat";
}

ScenarioKind scenario_kind_from_string(const std::string& s) {
    for (auto k : {ScenarioKind::Flat, ScenarioKind::Checkerboard, ScenarioKind::Bitmap, ScenarioKind::TwoPulse,
                   ScenarioKind::Coil})
        if (to_string(k) == s) return k;
    throw ValidationError("unknown scenario type '" + s + "' (flat, checkerboard, bitmap, two_pulse, coil)");
}

namespace {

std::string plane_name(PatternPlane p) {
    switch (p) {
    case PatternPlane::ZX: return "zx";
    case PatternPlane::XY: return "xy";
    case PatternPlane::ZY: return "zy";
    }
    return "zx";
}

PatternPlane plane_from(const std::string& s) {
    if (s == "zx") return PatternPlane::ZX;
    if (s == "xy") return PatternPlane::XY;
    if (s == "zy") return PatternPlane::ZY;
    throw ValidationError("unknown pattern plane '" + s + "' (zx, xy, zy)");
}

std::string method_name(ForwardMethod m) { return m == ForwardMethod::Fft ? "fft" : "splitstep"; }

ForwardMethod method_from(const std::string& s) {
    if (s == "fft") return ForwardMethod::Fft;
    if (s == "splitstep") return ForwardMethod::SplitStep;
    throw ValidationError("unknown forward method '" + s + "' (fft, splitstep)");
}

std::size_t line_at(const std::string& text, std::size_t pos) {
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(std::min(pos, text.size())), '\n'));
}

/// Walks a parsed JSON object, tracking the dotted field path, consumed keys
/// and the approximate source line of each key.
class Reader {
public:
    Reader(const json& j, std::string path, const std::string& text, const std::string& source, std::size_t from)
        : j_(j), path_(std::move(path)), text_(text), source_(source), from_(from) {
        if (!j_.is_object()) fail_self("expected an object");
    }

    bool has(const char* key) const { return j_.contains(key); }

    template <typename T>
    void get(const char* key, T& out) {
        if (!j_.contains(key)) return;
        used_.insert(key);
        const json& v = j_.at(key);
        try {
            if constexpr (std::is_same_v<T, double>) {
                if (!v.is_number()) throw json::type_error::create(302, "expected a number", &v);
                out = v.get<double>();
                if (!std::isfinite(out)) fail(key, "must be finite");
            } else if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t> ||
                                 std::is_same_v<T, int>) {
                if (!v.is_number_integer()) throw json::type_error::create(302, "expected an integer", &v);
                if (v.is_number_unsigned() || v.get<long long>() >= 0)
                    out = static_cast<T>(v.get<unsigned long long>());
                else if constexpr (std::is_same_v<T, int>)
                    out = v.get<int>();
                else
                    fail(key, "must be a non-negative integer");
            } else {
                out = v.get<T>();
            }
        } catch (const json::type_error& e) {
            fail(key, std::string("wrong type: ") + describe<T>() + " expected, got " + v.type_name());
        }
    }

    /// JSON null maps to `null_value`.
    void get_nullable(const char* key, double& out, double null_value) {
        if (j_.contains(key) && j_.at(key).is_null()) {
            used_.insert(key);
            out = null_value;
            return;
        }
        get(key, out);
    }

    template <std::size_t N>
    void get_array(const char* key, std::array<double, N>& out) {
        if (!j_.contains(key)) return;
        used_.insert(key);
        const json& v = j_.at(key);
        if (!v.is_array() || v.size() != N) fail(key, "expected an array of " + std::to_string(N) + " numbers");
        for (std::size_t i = 0; i < N; ++i) {
            if (!v[i].is_number()) fail(key, "expected an array of " + std::to_string(N) + " numbers");
            out[i] = v[i].get<double>();
        }
    }

    void skip(const char* key) { used_.insert(key); }

    Reader child(const char* key) {
        used_.insert(key);
        return Reader(j_.at(key), path_.empty() ? key : path_ + "." + key, text_, source_, key_pos(key));
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) fail(it.key().c_str(), "unknown key");
    }

    [[noreturn]] void fail(const char* key, const std::string& msg) const {
        std::ostringstream os;
        os << source_ << ":" << line_at(text_, key_pos(key)) << ": field " << (path_.empty() ? "" : path_ + ".")
           << key << ": " << msg;
        throw ValidationError(os.str());
    }

    [[noreturn]] void fail_self(const std::string& msg) const {
        std::ostringstream os;
        os << source_ << ":" << line_at(text_, from_) << ": " << (path_.empty() ? "document" : "field " + path_) << ": "
           << msg;
        throw ValidationError(os.str());
    }

    /// Runs a struct's own validation, attributing failures to this object.
    template <typename F>
    void check(F&& f) const {
        try {
            f();
        } catch (const ValidationError& e) {
            fail_self(e.what());
        }
    }

private:
    std::size_t key_pos(const char* key) const {
        const auto p = text_.find("\"" + std::string(key) + "\"", from_);
        return p == std::string::npos ? from_ : p;
    }

    template <typename T>
    static const char* describe() {
        if constexpr (std::is_same_v<T, bool>) return "boolean";
        else if constexpr (std::is_same_v<T, std::string>) return "string";
        else return "value";
    }

    const json& j_;
    std::string path_;
    const std::string& text_;
    const std::string& source_;
    std::size_t from_;
    std::set<std::string> used_;
};

json parse_json(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // byte is 1-based and points just past the offending character.
        const std::size_t pos = e.byte > 0 ? e.byte - 1 : 0;
        const std::size_t line_start = text.rfind('\n', pos == 0 ? 0 : pos - 1);
        const std::size_t col = line_start == std::string::npos ? pos + 1 : pos - line_start;
        std::ostringstream os;
        os << source << ":" << line_at(text, pos) << ":" << col << ": JSON syntax error: " << e.what();
        throw ValidationError(os.str());
    }
}

void read_axis(Reader r, AxisSpec& a, const char* step_key, const char* origin_key) {
    r.get("n", a.n);
    r.get(step_key, a.step);
    r.get(origin_key, a.origin);
    r.finish();
}

ordered axis_json(const AxisSpec& a, const char* step_key, const char* origin_key) {
    ordered j;
    j["n"] = a.n;
    j[step_key] = a.step;
    j[origin_key] = a.origin;
    return j;
}

void read_calib(Reader r, CalibParams& c) {
    r.get("z0_m", c.z0);
    r.get("zeta_rad_per_s2", c.zeta);
    r.get("sx", c.axis_scale[0]);
    r.get("sy", c.axis_scale[1]);
    r.get("sz", c.axis_scale[2]);
    r.get("rotation_rad", c.rotation_xy);
    r.get("omega_L_bar_rad_per_s", c.omega_L_bar);
    r.get("eta_floor", c.eta_floor);
    r.finish();
    r.check([&] { c.validate(); });
}

ordered calib_json(const CalibParams& c) {
    ordered j;
    j["z0_m"] = c.z0;
    j["zeta_rad_per_s2"] = c.zeta;
    j["sx"] = c.axis_scale[0];
    j["sy"] = c.axis_scale[1];
    j["sz"] = c.axis_scale[2];
    j["rotation_rad"] = c.rotation_xy;
    j["omega_L_bar_rad_per_s"] = c.omega_L_bar;
    j["eta_floor"] = c.eta_floor;
    return j;
}

void read_cloud(Reader r, CloudParams& c) {
    r.get("length_z_m", c.length_z);
    r.get("sigma_x_m", c.sigma_x);
    r.get("sigma_y_m", c.sigma_y);
    r.get("edge_softness_m", c.edge_softness);
    r.get("peak_density", c.peak_density);
    r.get("center_z_m", c.center_z);
    r.finish();
    r.check([&] { c.validate(); });
}

ordered cloud_json(const CloudParams& c) {
    ordered j;
    j["length_z_m"] = c.length_z;
    j["sigma_x_m"] = c.sigma_x;
    j["sigma_y_m"] = c.sigma_y;
    j["edge_softness_m"] = c.edge_softness;
    j["peak_density"] = c.peak_density;
    j["center_z_m"] = c.center_z;
    return j;
}

void read_scenario(Reader r, ScenarioConfig& s) {
    std::string type = to_string(s.kind);
    r.get("type", type);
    try {
        s.kind = scenario_kind_from_string(type);
    } catch (const ValidationError& e) {
        r.fail("type", e.what());
    }
    if (r.has("cloud")) read_cloud(r.child("cloud"), s.cloud);
    std::string plane;
    switch (s.kind) {
    case ScenarioKind::Flat: break;
    case ScenarioKind::Checkerboard:
        r.get("tile_first_m", s.checkerboard.tile_first);
        r.get("tile_second_m", s.checkerboard.tile_second);
        r.get("tile_third_m", s.checkerboard.tile_third);
        r.get("amplitude_rad", s.checkerboard.amplitude);
        plane = plane_name(s.checkerboard.plane);
        r.get("plane", plane);
        try {
            s.checkerboard.plane = plane_from(plane);
        } catch (const ValidationError& e) {
            r.fail("plane", e.what());
        }
        if (!(s.checkerboard.tile_first > 0 && s.checkerboard.tile_second > 0 && s.checkerboard.tile_third >= 0))
            r.fail_self("checkerboard tiles must be > 0");
        break;
    case ScenarioKind::Bitmap:
        r.get("pgm_path", s.bitmap_path);
        r.get("meters_per_pixel", s.bitmap_meters_per_pixel);
        r.get("amplitude_rad", s.bitmap_amplitude);
        plane = plane_name(s.bitmap_plane);
        r.get("plane", plane);
        try {
            s.bitmap_plane = plane_from(plane);
        } catch (const ValidationError& e) {
            r.fail("plane", e.what());
        }
        if (s.bitmap_path.empty()) r.fail("pgm_path", "bitmap scenario needs a PGM path");
        if (!(s.bitmap_meters_per_pixel > 0)) r.fail("meters_per_pixel", "must be > 0");
        break;
    case ScenarioKind::TwoPulse:
        r.get("alpha", s.two_pulse.alpha);
        r.get("delta_t_s", s.two_pulse.delta_t);
        if (!(s.two_pulse.alpha >= 0)) r.fail("alpha", "must be >= 0");
        if (!(s.two_pulse.delta_t > 0)) r.fail("delta_t_s", "must be > 0");
        break;
    case ScenarioKind::Coil:
        r.get_array("center_m", s.coil.center);
        r.get("radius_m", s.coil.radius);
        r.get("current_a", s.coil.current);
        r.get_array("axis", s.coil.axis);
        r.get("t_c_s", s.coil.t_c);
        r.get("b0_t", s.coil.b0);
        r.check([&] { s.coil.validate(); });
        break;
    }
    r.finish();
}

ordered scenario_json(const ScenarioConfig& s) {
    ordered j;
    j["type"] = to_string(s.kind);
    j["cloud"] = cloud_json(s.cloud);
    switch (s.kind) {
    case ScenarioKind::Flat: break;
    case ScenarioKind::Checkerboard:
        j["tile_first_m"] = s.checkerboard.tile_first;
        j["tile_second_m"] = s.checkerboard.tile_second;
        j["tile_third_m"] = s.checkerboard.tile_third;
        j["amplitude_rad"] = s.checkerboard.amplitude;
        j["plane"] = plane_name(s.checkerboard.plane);
        break;
    case ScenarioKind::Bitmap:
        j["pgm_path"] = s.bitmap_path;
        j["meters_per_pixel"] = s.bitmap_meters_per_pixel;
        j["amplitude_rad"] = s.bitmap_amplitude;
        j["plane"] = plane_name(s.bitmap_plane);
        break;
    case ScenarioKind::TwoPulse:
        j["alpha"] = s.two_pulse.alpha;
        j["delta_t_s"] = s.two_pulse.delta_t;
        break;
    case ScenarioKind::Coil:
        j["center_m"] = s.coil.center;
        j["radius_m"] = s.coil.radius;
        j["current_a"] = s.coil.current;
        j["axis"] = s.coil.axis;
        j["t_c_s"] = s.coil.t_c;
        j["b0_t"] = s.coil.b0;
        break;
    }
    return j;
}

} // namespace

DetectorConfig DetectorSettings::resolve(const KSpaceSignal& sig, double k0, std::uint64_t seed) const {
    DetectorConfig cfg = detector;
    if (auto_geometry) {
        const DetectorConfig geo = detector_for_signal(sig.kx, sig.ky, k0, cloud_radius, focal_length);
        cfg.n_px_x = geo.n_px_x;
        cfg.n_px_y = geo.n_px_y;
        cfg.pixel_pitch = geo.pixel_pitch;
        cfg.carrier_k = geo.carrier_k;
        cfg.filter_radius = geo.filter_radius;
    }
    cfg.rng_seed = seed;
    return cfg;
}

void RunConfig::validate() const {
    grid.validate();
    times.validate("times");
    physics.validate();
    ForwardOptions f = forward;
    f.decoherence = decoherence;
    f.validate();
    if (decoherence) decoherence->validate();
    if (calib) calib->validate();
    require(mask_threshold > 0.0 && mask_threshold < 1.0, "mask_threshold must lie in (0, 1)");
}

CalibParams RunConfig::effective_calibration() const {
    return calib ? *calib : matched_calibration(physics, forward.focus_plane);
}

RunConfig default_config() {
    RunConfig c;
    const double beta = 1.4e8, dt = 100e-9;
    const std::size_t nt = 600;
    c.times = AxisSpec::centered(nt, dt);
    c.grid.x = AxisSpec::centered(64, 25e-6);
    c.grid.y = AxisSpec::centered(64, 25e-6);
    // Lattice-matched to the readout: dz = 1 / (beta n_t dt).
    c.grid.z = AxisSpec::centered(256, 1.0 / (beta * static_cast<double>(nt) * dt));
    c.physics.beta0 = beta;
    // Photon-flux scale: peak signal of a few photons per pixel and frame.
    c.physics.g_omega_c = {1000.0, 0.0};
    c.scenario.kind = ScenarioKind::Checkerboard;
    c.scenario.checkerboard = {0.6e-3, 75e-6, kPi / 2, PatternPlane::ZX, 0.0};
    return c;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
    const json j = parse_json(text, source);
    RunConfig c = default_config();
    Reader root(j, "", text, source, 0);

    root.get("seed", c.seed);
    root.get("mask_threshold", c.mask_threshold);
    if (root.has("grid")) {
        Reader g = root.child("grid");
        if (g.has("x")) read_axis(g.child("x"), c.grid.x, "step_m", "origin_m");
        if (g.has("y")) read_axis(g.child("y"), c.grid.y, "step_m", "origin_m");
        if (g.has("z")) read_axis(g.child("z"), c.grid.z, "step_m", "origin_m");
        g.finish();
        g.check([&] { c.grid.validate(); });
    }
    if (root.has("times")) {
        Reader t = root.child("times");
        read_axis(t, c.times, "step_s", "origin_s");
        t.check([&] { c.times.validate("times"); });
    }
    if (root.has("physics")) {
        Reader p = root.child("physics");
        p.get("beta0_hz_per_m", c.physics.beta0);
        p.get("xi_hz_per_m_per_s", c.physics.xi);
        p.get("z_g_m", c.physics.z_g);
        p.get("omega_L_bar_rad_per_s", c.physics.omega_L_bar);
        p.get("k0_rad_per_m", c.physics.k0);
        std::array<double, 2> g{c.physics.g_omega_c.real(), c.physics.g_omega_c.imag()};
        p.get_array("g_omega_c_re_im", g);
        c.physics.g_omega_c = {g[0], g[1]};
        p.finish();
        p.check([&] { c.physics.validate(); });
    }
    if (root.has("forward")) {
        Reader f = root.child("forward");
        std::string m = method_name(c.forward.method);
        f.get("method", m);
        try {
            c.forward.method = method_from(m);
        } catch (const ValidationError& e) {
            f.fail("method", e.what());
        }
        f.get("z_substeps_per_cell", c.forward.z_substeps_per_cell);
        f.get("include_diffraction", c.forward.include_diffraction);
        f.get("include_decay", c.forward.include_decay);
        f.get("focus_plane_m", c.forward.focus_plane);
        f.finish();
        if (c.forward.z_substeps_per_cell < 1) f.fail("z_substeps_per_cell", "must be >= 1");
    }
    if (root.has("decoherence") && !j.at("decoherence").is_null()) {
        Reader d = root.child("decoherence");
        DecoherenceParams dp{173e-6, std::numeric_limits<double>::infinity()};
        d.get("tau_k_s", dp.tau_k);
        d.get_nullable("tau_beta_s", dp.tau_beta, std::numeric_limits<double>::infinity());
        d.finish();
        d.check([&] { dp.validate(); });
        c.decoherence = dp;
    } else if (root.has("decoherence")) {
        root.skip("decoherence");
        c.decoherence.reset();
    }
    if (root.has("calibration")) {
        if (j.at("calibration").is_null()) {
            root.skip("calibration");
            c.calib.reset();
        } else {
            CalibParams cp;
            read_calib(root.child("calibration"), cp);
            c.calib = cp;
        }
    }
    if (root.has("detector")) {
        Reader d = root.child("detector");
        d.get("enabled", c.detector.enabled);
        d.get("auto_geometry", c.detector.auto_geometry);
        d.get("cloud_radius_m", c.detector.cloud_radius);
        d.get("focal_length_m", c.detector.focal_length);
        d.get("n_px_x", c.detector.detector.n_px_x);
        d.get("n_px_y", c.detector.detector.n_px_y);
        d.get("pixel_pitch_m", c.detector.detector.pixel_pitch);
        d.get("lo_amplitude_sqrt_photons", c.detector.detector.lo_amplitude);
        d.get_array("carrier_k_rad_per_m", c.detector.detector.carrier_k);
        d.get("frames_per_delay", c.detector.detector.frames_per_delay);
        d.get("shot_noise", c.detector.detector.shot_noise);
        d.get("filter_radius_rad_per_m", c.detector.detector.filter_radius);
        d.finish();
        if (c.detector.detector.frames_per_delay < 1) d.fail("frames_per_delay", "must be >= 1");
        if (!(c.detector.detector.lo_amplitude > 0)) d.fail("lo_amplitude_sqrt_photons", "must be > 0");
        if (!(c.detector.cloud_radius > 0)) d.fail("cloud_radius_m", "must be > 0");
        if (!(c.detector.focal_length > 0)) d.fail("focal_length_m", "must be > 0");
        if (!c.detector.auto_geometry) d.check([&] { c.detector.detector.validate(); });
    }
    if (root.has("scenario")) read_scenario(root.child("scenario"), c.scenario);
    if (root.has("focus_search")) {
        Reader f = root.child("focus_search");
        f.get_array("z0_range_m", c.focus_search.z0_range);
        f.get_array("zeta_range_rad_per_s2", c.focus_search.zeta_range);
        f.get("grid_points", c.focus_search.grid_points);
        f.get("refine", c.focus_search.refine);
        f.get("flat_tolerance", c.focus_search.flat_tolerance);
        f.finish();
        if (c.focus_search.grid_points < 3) f.fail("grid_points", "must be >= 3");
    }
    root.finish();
    root.check([&] { c.validate(); });
    return c;
}

std::string dump_config(const RunConfig& c) {
    ordered j;
    j["seed"] = c.seed;
    j["mask_threshold"] = c.mask_threshold;
    j["grid"] = {{"x", axis_json(c.grid.x, "step_m", "origin_m")},
                 {"y", axis_json(c.grid.y, "step_m", "origin_m")},
                 {"z", axis_json(c.grid.z, "step_m", "origin_m")}};
    j["times"] = axis_json(c.times, "step_s", "origin_s");
    ordered p;
    p["beta0_hz_per_m"] = c.physics.beta0;
    p["xi_hz_per_m_per_s"] = c.physics.xi;
    p["z_g_m"] = c.physics.z_g;
    p["omega_L_bar_rad_per_s"] = c.physics.omega_L_bar;
    p["k0_rad_per_m"] = c.physics.k0;
    p["g_omega_c_re_im"] = {c.physics.g_omega_c.real(), c.physics.g_omega_c.imag()};
    j["physics"] = p;
    ordered f;
    f["method"] = method_name(c.forward.method);
    f["z_substeps_per_cell"] = c.forward.z_substeps_per_cell;
    f["include_diffraction"] = c.forward.include_diffraction;
    f["include_decay"] = c.forward.include_decay;
    f["focus_plane_m"] = c.forward.focus_plane;
    j["forward"] = f;
    if (c.decoherence) {
        ordered d;
        d["tau_k_s"] = c.decoherence->tau_k;
        if (std::isfinite(c.decoherence->tau_beta)) d["tau_beta_s"] = c.decoherence->tau_beta;
        else d["tau_beta_s"] = nullptr;
        j["decoherence"] = d;
    } else {
        j["decoherence"] = nullptr;
    }
    j["calibration"] = c.calib ? calib_json(*c.calib) : ordered(nullptr);
    ordered d;
    d["enabled"] = c.detector.enabled;
    d["auto_geometry"] = c.detector.auto_geometry;
    d["cloud_radius_m"] = c.detector.cloud_radius;
    d["focal_length_m"] = c.detector.focal_length;
    d["n_px_x"] = c.detector.detector.n_px_x;
    d["n_px_y"] = c.detector.detector.n_px_y;
    d["pixel_pitch_m"] = c.detector.detector.pixel_pitch;
    d["lo_amplitude_sqrt_photons"] = c.detector.detector.lo_amplitude;
    d["carrier_k_rad_per_m"] = c.detector.detector.carrier_k;
    d["frames_per_delay"] = c.detector.detector.frames_per_delay;
    d["shot_noise"] = c.detector.detector.shot_noise;
    d["filter_radius_rad_per_m"] = c.detector.detector.filter_radius;
    j["detector"] = d;
    j["scenario"] = scenario_json(c.scenario);
    ordered fs;
    fs["z0_range_m"] = c.focus_search.z0_range;
    fs["zeta_range_rad_per_s2"] = c.focus_search.zeta_range;
    fs["grid_points"] = c.focus_search.grid_points;
    fs["refine"] = c.focus_search.refine;
    fs["flat_tolerance"] = c.focus_search.flat_tolerance;
    j["focus_search"] = fs;
    return j.dump(2) + "\n";
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_text_file(path), path.string()); }

void save_config(const std::filesystem::path& path, const RunConfig& cfg) { write_text_file(path, dump_config(cfg)); }

std::string dump_calibration(const CalibParams& c) { return calib_json(c).dump(2) + "\n"; }

CalibParams parse_calibration(const std::string& text, const std::string& source) {
    const json j = parse_json(text, source);
    CalibParams c;
    read_calib(Reader(j, "", text, source, 0), c);
    return c;
}

CalibParams load_calibration(const std::filesystem::path& path) {
    return parse_calibration(read_text_file(path), path.string());
}

void save_calibration(const std::filesystem::path& path, const CalibParams& c) {
    write_text_file(path, dump_calibration(c));
}

std::string dump_decay_fit(const DecayFitResult& r) {
    ordered j;
    j["mode"] = to_string(r.mode);
    j["tau_k_s"] = r.tau_k;
    j["tau_k_err_s"] = r.tau_k_err;
    if (std::isfinite(r.tau_beta)) {
        j["tau_beta_s"] = r.tau_beta;
        j["tau_beta_err_s"] = r.tau_beta_err;
    } else {
        j["tau_beta_s"] = nullptr;
        j["tau_beta_err_s"] = nullptr;
    }
    j["temperature_k"] = r.temperature;
    j["temperature_err_k"] = r.temperature_err;
    j["amplitude"] = r.amplitude;
    j["residual_rms_log"] = r.residual_rms;
    return j.dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << text;
    if (!os) throw IoError("write to " + path.string() + " failed");
}

} // namespace gemtomo
