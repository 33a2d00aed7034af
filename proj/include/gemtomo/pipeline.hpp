#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gemtomo/config.hpp"

namespace gemtomo {

/// Spin wave for a scenario, its zero-phase reference (same density, with
/// any uniform background phase) and the differential phase that was imprinted.
struct Scene {
    ComplexField3D spinwave;
    ComplexField3D reference;
    std::optional<RealMap3D> target_phase;
};

Scene build_scene(const RunConfig& cfg);

struct SimulateFlags {
    bool no_noise = false;
    bool skip_detector = false;
};

ForwardOptions forward_options(const RunConfig& cfg);
/// Output z axis equal to the configured grid; decay is unwound when the
/// forward model applied it.
ReconstructOptions reconstruct_options(const RunConfig& cfg);

/// Forward model followed by the detector loop unless skipped.
KSpaceSignal simulate_field(const ComplexField3D& s, const RunConfig& cfg, const SimulateFlags& flags = {});
KSpaceSignal simulate(const RunConfig& cfg, const SimulateFlags& flags = {});

double wrap_phase(double phi);

struct Fidelity {
    double phase_rmse = 0.0;         // rad, wrapped difference
    double magnitude_rel_rmse = 0.0; // sqrt(sum (|a|-|b|)^2 / sum |b|^2)
    std::size_t mask_count = 0;
};

Fidelity compare_fields(const ComplexField3D& recon, const ComplexField3D& truth,
                        const std::vector<std::uint8_t>& mask);

/// Reconstructs `sig` and scores it against the scene of `cfg`. The mask is
/// |s_ref| > threshold * max|s_ref| on the noiseless reconstructed reference,
/// and the phase compared is that of rho = s / s_ref.
struct RoundTrip {
    ComplexField3D recon;
    ComplexField3D rho;
    std::vector<std::uint8_t> mask;
    Fidelity fidelity;
};

RoundTrip evaluate_round_trip(const KSpaceSignal& sig, const RunConfig& cfg, const CalibParams& calib);

struct OracleReport {
    double rel_diff_no_diffraction = 0.0;
    double rel_diff_diffraction = 0.0;        // at `substeps`
    double rel_diff_diffraction_double = 0.0; // at 2 * substeps
    int substeps = 4;
    double ratio() const { return rel_diff_diffraction / rel_diff_diffraction_double; }
};

/// forward_fft against forward_splitstep on the same source.
OracleReport oracle_compare(const ComplexField3D& s, const PhysicsParams& p, const AxisSpec& times, int substeps = 4);

/// 8 x 8 x 32 checkerboard cloud used by the oracle command and acceptance.
RunConfig oracle_config();

/// Mean 10-90% width (m) of the steps of `target` (levels 0 and `amplitude`)
/// along `axis`, read from arg(rho) inside `mask`. Each edge is searched up to
/// the neighbouring edges; an edge that never reaches 90% counts as the full run.
double phase_edge_width(const ComplexField3D& rho, const std::vector<std::uint8_t>& mask, const RealMap3D& target,
                        Axis axis, double amplitude);

double relative_difference(const std::vector<cdouble>& a, const std::vector<cdouble>& b);

} // namespace gemtomo
