#pragma once

#include <optional>

#include "gemtomo/field.hpp"
#include "gemtomo/physics.hpp"

namespace gemtomo {

enum class ForwardMethod { Fft, SplitStep };

struct ForwardOptions {
    ForwardMethod method = ForwardMethod::Fft;
    int z_substeps_per_cell = 4;
    bool include_diffraction = true;
    bool include_decay = false;
    std::optional<DecoherenceParams> decoherence;
    /// Plane (grid z coordinate, m) the far-field detection is referenced to.
    /// The emitted field carries exp(i (z - focus_plane) k_perp^2 / 2 k0).
    double focus_plane = 0.0;

    void validate() const;
};

/// Pointwise multiplication by exp(i phase).
ComplexField3D imprint_phase(const ComplexField3D& s, const RealMap3D& phase);

/// Readout signal through the Fourier relation: transverse FFT, per-slice
/// paraxial phase, exact DFT kernel exp(i 2 pi beta0 t z) summed over z, and
/// the z-independent bias and chirp phases.
KSpaceSignal forward_fft(const ComplexField3D& s, const PhysicsParams& p, const AxisSpec& times,
                         const ForwardOptions& opt = {});

/// Readout signal by marching the paraxial source equation through the
/// sample with Strang-split diffraction half steps. Applies the exact GEM
/// phase including the z t^2 drift term.
KSpaceSignal forward_splitstep(const ComplexField3D& s, const PhysicsParams& p,
                               const AxisSpec& times, const ForwardOptions& opt = {});

/// Dispatches on opt.method.
KSpaceSignal forward(const ComplexField3D& s, const PhysicsParams& p, const AxisSpec& times,
                     const ForwardOptions& opt = {});

KSpaceSignal apply_decay(const KSpaceSignal& sig, const DecoherenceParams& d);

} // namespace gemtomo
