#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "gemtomo/calibration.hpp"
#include "gemtomo/field.hpp"
#include "gemtomo/forward.hpp"
#include "gemtomo/heterodyne.hpp"
#include "gemtomo/physics.hpp"
#include "gemtomo/reconstruct.hpp"
#include "gemtomo/scenarios.hpp"

namespace gemtomo {

enum class ScenarioKind { Flat, Checkerboard, Bitmap, TwoPulse, Coil };

std::string to_string(ScenarioKind k);
ScenarioKind scenario_kind_from_string(const std::string& s);

/// Tagged scenario parameters; only the block matching `kind` is serialized.
struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::Checkerboard;
    CloudParams cloud;
    CheckerboardSpec checkerboard;
    TwoPulseParams two_pulse;
    CoilParams coil;
    std::string bitmap_path;
    double bitmap_meters_per_pixel = 20e-6;
    double bitmap_amplitude = kPi / 2;
    PatternPlane bitmap_plane = PatternPlane::ZX;
};

/// Detector settings. With auto_geometry the pitch, carrier and filter
/// radius follow from the signal lattice (see detector_for_signal).
struct DetectorSettings {
    bool enabled = true;
    bool auto_geometry = true;
    double cloud_radius = 0.3e-3;
    double focal_length = 0.25;
    DetectorConfig detector;

    DetectorConfig resolve(const KSpaceSignal& sig, double k0, std::uint64_t seed) const;
};

struct RunConfig {
    GridSpec grid;
    AxisSpec times;
    PhysicsParams physics;
    ForwardOptions forward;
    std::optional<DecoherenceParams> decoherence;
    /// Unset means the calibration matched to `physics` and the focus plane.
    std::optional<CalibParams> calib;
    DetectorSettings detector;
    ScenarioConfig scenario;
    FocusSearch focus_search;
    double mask_threshold = 0.1;
    std::uint64_t seed = 1;

    void validate() const;
    CalibParams effective_calibration() const;
};

/// Checkerboard on a 64x64x256 grid read out with 600 delays at 100 ns.
RunConfig default_config();

/// Parses JSON text. Syntax errors report the line and column; semantic
/// errors name the offending field and the line it sits on.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);
std::string dump_config(const RunConfig& cfg);
void save_config(const std::filesystem::path& path, const RunConfig& cfg);

/// Calibration JSON with keys z0_m, zeta_rad_per_s2, sx, sy, sz, rotation_rad,
/// omega_L_bar_rad_per_s, eta_floor.
std::string dump_calibration(const CalibParams& c);
CalibParams parse_calibration(const std::string& text, const std::string& source = "<calibration>");
CalibParams load_calibration(const std::filesystem::path& path);
void save_calibration(const std::filesystem::path& path, const CalibParams& c);

std::string dump_decay_fit(const DecayFitResult& r);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace gemtomo
