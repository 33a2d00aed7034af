#pragma once

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <string>

#include "gemtomo/field.hpp"
#include "gemtomo/physics.hpp"
#include "gemtomo/reconstruct.hpp"

namespace gemtomo {

/// Participation ratio sum|v|^4 / (sum|v|^2)^2: 1 for a single nonzero
/// sample, 1/N for a uniform field.
double sharpness(std::span<const cdouble> values);
double sharpness(const ComplexField3D& field);

/// Geometric mean over axes (with more than one sample) of the participation
/// ratio of forward differences along that axis. Peaks when edges are
/// sharpest, for amplitude and phase structure alike. The second form uses
/// only the listed axes and returns 1 when none has more than one sample.
double edge_sharpness(const ComplexField3D& field);
double edge_sharpness(const ComplexField3D& field, const AxisSet& axes);

struct FocusSearch {
    std::array<double, 2> z0_range{-5e-3, 5e-3};
    std::array<double, 2> zeta_range{-2e10, 2e10};
    int grid_points = 21;
    bool refine = true;
    /// Relative objective variation below which a parameter counts as unidentifiable.
    double flat_tolerance = 1e-6;
};

struct FocusResult {
    double z0 = 0.0;
    double zeta = 0.0;
    double score = 0.0;
    bool z0_identifiable = true;
    bool zeta_identifiable = true;
    int evaluations = 0;
};

/// zeta blurs only along z and z0 only across it, so each is scored on its
/// own axes: zeta by the z edge sharpness, z0 by the transverse one. The grid
/// optimum is the fixed point of the two per-parameter argmaxes, refined by
/// alternating 1D Brent searches. Other entries of `base` (bias, decay
/// floor) are used as given. `score` is the all-axis edge_sharpness there.
FocusResult calibrate_focus(const KSpaceSignal& sig, const PhysicsParams& p, const CalibParams& base,
                            const FocusSearch& search, const ReconstructOptions& recon = {});

struct AxisSearch {
    std::array<double, 2> scale_range{0.8, 1.25};
    std::array<double, 2> rotation_range{-0.1, 0.1};
    int grid_points = 15;
    double mask_threshold = 0.1;
    double min_correlation = 0.2;
};

struct AxisResult {
    std::array<double, 3> scale{1.0, 1.0, 1.0};
    double rotation_xy = 0.0;
    double correlation = 0.0;
};

/// |normalized cross-correlation| between exp(i target) and the masked phase
/// of `recon`, for recon(r) ~ target(diag(1/s) R(-rotation) r).
double axis_correlation(const ComplexField3D& recon, const RealMap3D& target,
                        const std::array<double, 3>& scale, double rotation, double mask_threshold = 0.1);

AxisResult calibrate_axes(const ComplexField3D& recon, const RealMap3D& target, const AxisSearch& search = {});

enum class DecayMode { GradientOff, GradientOn };

std::string to_string(DecayMode m);

struct DecayFitOptions {
    double k_sw = 0.0;      // rad/m, for temperature from tau_k
    double beta_bar = 1.4e8; // Hz/m, for temperature from tau_beta
    double mass = constants::kRb87Mass;
    /// Gradient-on mode only: hold tau_k at a prior gradient-off value.
    std::optional<double> fixed_tau_k;
};

struct DecayFitResult {
    double tau_k = 0.0, tau_k_err = 0.0;
    double tau_beta = std::numeric_limits<double>::infinity(), tau_beta_err = 0.0;
    double temperature = 0.0, temperature_err = 0.0;
    double amplitude = 0.0;
    double residual_rms = 0.0; // log domain
    DecayMode mode = DecayMode::GradientOff;
};

/// Least squares of log A = log A0 - t^2 / 2 tau_k^2 - t^4 / 2 tau_beta^4.
DecayFitResult fit_decay(std::span<const double> times, std::span<const double> amplitudes, DecayMode mode,
                         const DecayFitOptions& opt = {});

} // namespace gemtomo
