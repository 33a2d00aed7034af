#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "gemtomo/field.hpp"
#include "gemtomo/physics.hpp"

namespace gemtomo {

struct CalibParams {
    double z0 = 0.0;          // m, diffraction reference plane
    double zeta = 0.0;        // rad/s^2, readout chirp
    double omega_L_bar = 0.0; // rad/s, z-independent Larmor rate to unwind
    std::array<double, 3> axis_scale{1.0, 1.0, 1.0};
    double rotation_xy = 0.0; // rad
    double eta_floor = 0.1;

    void validate() const;
};

/// Calibration that exactly undoes the linearized phases of `p` for data
/// detected at `focus_plane`.
CalibParams matched_calibration(const PhysicsParams& p, double focus_plane = 0.0);

struct ReconstructOptions {
    /// Output z axis; defaults to n_t samples spanning 1/(beta0 dt), centered on z_center.
    std::optional<AxisSpec> z_axis;
    double z_center = 0.0;
    /// Decay compensation is skipped when unset.
    std::optional<DecoherenceParams> decoherence;
};

KSpaceSignal compensate_chirp(const KSpaceSignal& sig, double zeta);

KSpaceSignal compensate_decay(const KSpaceSignal& sig, const DecoherenceParams& d, double eta_floor);

/// Default output z axis for a time axis: n_t samples spanning 1/(beta_bar dt).
AxisSpec default_z_axis(const AxisSpec& times, double beta_bar, double z_center = 0.0);

/// Inverts a readout signal to the complex spin wave on a real-space grid.
/// Transverse output axes are centered on the optical axis. Axis scale and
/// rotation from the calibration are applied to the output metadata only.
ComplexField3D reconstruct(const KSpaceSignal& sig, const PhysicsParams& p, const CalibParams& c,
                           const ReconstructOptions& opt = {});

/// Stages 1-4 of the reconstruction: bias, chirp, and decay unwinding followed
/// by the inverse z transform. Result is in the (kx, ky, z) domain.
ComplexField3D reconstruct_kxy_z(const KSpaceSignal& sig, const PhysicsParams& p,
                                 const CalibParams& c, const ReconstructOptions& opt = {});

/// Stages 5-8: diffraction unwinding at z0, inverse transverse FFT, coupling
/// division and axis metadata.
ComplexField3D finish_reconstruction(const ComplexField3D& kxy_z, const PhysicsParams& p,
                                     const CalibParams& c);

struct MaskedRatio {
    ComplexField3D ratio;      // s / s_ref inside the mask, 0 outside
    std::vector<std::uint8_t> mask;
    std::size_t count = 0;
};

/// rho = s / s_ref where |s_ref| > threshold * max|s_ref|.
MaskedRatio normalize_and_mask(const ComplexField3D& s, const ComplexField3D& s_ref, double threshold = 0.1);

/// Mask of samples with |s| > threshold * max|s|.
std::vector<std::uint8_t> magnitude_mask(const ComplexField3D& s, double threshold = 0.1);

} // namespace gemtomo
