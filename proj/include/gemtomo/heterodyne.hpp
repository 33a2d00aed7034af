#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "gemtomo/field.hpp"

namespace gemtomo {

/// Balanced, spatially resolved heterodyne camera with an off-axis LO.
/// Pixel (i, j) sits at ((i - n_x/2) p, (j - n_y/2) p) for pitch p.
struct DetectorConfig {
    std::size_t n_px_x = 64;
    std::size_t n_px_y = 64;
    double pixel_pitch = 100e-6;        // m
    double lo_amplitude = 100.0;        // sqrt(photons / px)
    std::array<double, 2> carrier_k{};  // rad/m, in-plane LO tilt
    int frames_per_delay = 100;
    bool shot_noise = true;
    std::uint64_t rng_seed = 1;
    double filter_radius = 1.0;         // rad/m, sideband disk radius

    void validate() const;
    /// Spatial-frequency step of the pixel grid (rad/m).
    double frequency_step(int axis) const;
};

/// Detector matched to a signal lattice: far-field pixel pitch f dk / k0, a
/// sideband disk covering transverse radius `cloud_radius`, and a diagonal
/// carrier on the frequency grid (at least half the Nyquist frequency).
DetectorConfig detector_for_signal(const AxisSpec& kx, const AxisSpec& ky, double k0,
                                   double cloud_radius = 0.3e-3, double focal_length = 0.25);

struct FramePair {
    std::size_t n_x = 0, n_y = 0;
    std::vector<double> plus, minus;

    std::vector<double> differential() const;
};

/// Frames for one delay. Frame f draws its noise from a stream seeded by
/// (cfg.rng_seed, stream, f).
std::vector<FramePair> synthesize_frames(std::span<const cdouble> slice, const DetectorConfig& cfg,
                                         std::uint64_t stream = 0);

/// Side-band demodulation of one frame pair back to the complex field.
std::vector<cdouble> demodulate(const FramePair& pair, const DetectorConfig& cfg);

std::vector<cdouble> coherent_average(std::span<const std::vector<cdouble>> fields);

/// Frame synthesis, demodulation and coherent averaging for every t_R slice.
/// Shot noise is the Gaussian limit of photon counting.
KSpaceSignal detect(const KSpaceSignal& sig, const DetectorConfig& cfg);

} // namespace gemtomo
