#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "gemtomo/field.hpp"

namespace gemtomo {

struct CloudParams {
    double length_z = 10e-3;
    double sigma_x = 0.05e-3; // 0.3 mm full extent = 6 sigma
    double sigma_y = 0.05e-3;
    double edge_softness = 0.2e-3;
    double peak_density = 1.0;
    double center_z = 0.0;

    void validate() const;
};

struct TwoPulseParams {
    double alpha = 1.0;
    double delta_t = 8e-6;
};

struct CoilParams {
    std::array<double, 3> center{0.0, 2e-3, 0.0};
    double radius = 1e-3;
    double current = 1.0;
    std::array<double, 3> axis{0.0, 0.0, 1.0};
    double t_c = 1e-6;
    double b0 = 1e-4;

    void validate() const;
};

/// The two axes a 2D pattern is drawn in; it is extruded along the third.
enum class PatternPlane { ZX, XY, ZY };

struct CheckerboardSpec {
    double tile_first = 0.5e-3;  // along the first axis of the plane (z for ZX)
    double tile_second = 60e-6;  // along the second axis (x for ZX)
    double amplitude = kPi / 2;
    PatternPlane plane = PatternPlane::ZX;
    /// Tile along the remaining axis; 0 extrudes the 2D pattern.
    double tile_third = 0.0;
};

/// 8-bit grayscale raster, row-major.
struct Raster {
    std::size_t width = 0, height = 0;
    std::vector<std::uint8_t> pixels;
};

Raster read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Raster& r);

RealMap3D cloud_density(const GridSpec& grid, const CloudParams& c);

ComplexField3D flat_spinwave(const GridSpec& grid, const CloudParams& c);

RealMap3D checkerboard_phase(const GridSpec& grid, const CheckerboardSpec& spec);
/// Square tiles of size `tile` in the z-x plane.
RealMap3D checkerboard_phase(const GridSpec& grid, double tile, double amplitude);

/// Nearest-neighbour rendering of a raster centered on the origin of the
/// chosen plane: raster columns run along the first plane axis, rows along
/// the second. Pixels >= 128 take `amplitude`, the rest 0.
RealMap3D bitmap_phase(const GridSpec& grid, const Raster& raster, double meters_per_pixel,
                       double amplitude, PatternPlane plane = PatternPlane::ZX);

/// density * (1 + alpha exp(2 pi i delta_t beta_bar z)) / (1 + alpha).
ComplexField3D two_pulse_spinwave(const GridSpec& grid, const CloudParams& c, const TwoPulseParams& tp,
                                  double beta_bar);

/// Magnetic field of a circular current loop (T).
std::array<double, 3> coil_field(const std::array<double, 3>& point, const CoilParams& coil);

/// mu_B |B_coil + z B0| t_c / hbar.
RealMap3D coil_phase_map(const GridSpec& grid, const CoilParams& coil);

} // namespace gemtomo
