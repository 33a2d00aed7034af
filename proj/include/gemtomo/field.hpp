#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gemtomo {

using cdouble = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Uniform 1D sampling: coordinate of sample i is origin + i * step.
struct AxisSpec {
    std::size_t n = 1;
    double step = 1.0;
    double origin = 0.0;

    double coord(std::size_t i) const { return origin + static_cast<double>(i) * step; }
    double span() const { return static_cast<double>(n) * step; }
    void validate(const char* name) const;

    /// n samples of the given step, with sample n/2 at `center`.
    static AxisSpec centered(std::size_t n, double step, double center = 0.0);
    /// Axis of the unitary DFT conjugate: step 2*pi/(n*step), DC at sample n/2.
    AxisSpec conjugate() const;

    bool operator==(const AxisSpec&) const = default;
};

struct GridSpec {
    AxisSpec x, y, z;

    const AxisSpec& axis(int a) const { return a == 0 ? x : (a == 1 ? y : z); }
    AxisSpec& axis(int a) { return a == 0 ? x : (a == 1 ? y : z); }
    std::array<std::size_t, 3> shape() const { return {x.n, y.n, z.n}; }
    std::size_t size() const { return x.n * y.n * z.n; }
    std::size_t index(std::size_t ix, std::size_t iy, std::size_t iz) const {
        return (ix * y.n + iy) * z.n + iz;
    }
    void validate() const;

    bool operator==(const GridSpec&) const = default;
};

enum class Axis { X = 0, Y = 1, Z = 2 };

/// Subset of {x, y, z}.
struct AxisSet {
    bool x = false, y = false, z = false;

    bool has(int a) const { return a == 0 ? x : (a == 1 ? y : z); }
    static AxisSet xy() { return {true, true, false}; }
    static AxisSet xyz() { return {true, true, true}; }
    static AxisSet only(Axis a) {
        return {a == Axis::X, a == Axis::Y, a == Axis::Z};
    }
};

enum class Direction { Forward, Inverse };

enum class DomainTag { RealSpace, KxyZ, Kxyz, Mixed };

std::string to_string(DomainTag tag);

/// Complex scalar field on a rectilinear grid.
///
/// Each axis is either in its direct domain or has been Fourier transformed
/// (`spectral[a]`). For a transformed axis `dual[a]` keeps the direct-domain
/// axis so that the inverse transform lands back on the original coordinates.
struct ComplexField3D {
    GridSpec grid;
    std::vector<cdouble> values;
    std::array<bool, 3> spectral{false, false, false};
    std::array<AxisSpec, 3> dual{};
    /// Orientation of the grid x axis relative to the physical x axis (rad).
    double rotation_xy = 0.0;

    ComplexField3D() = default;
    explicit ComplexField3D(const GridSpec& g);
    ComplexField3D(const GridSpec& g, std::vector<cdouble> v);

    DomainTag domain() const;
    cdouble& at(std::size_t ix, std::size_t iy, std::size_t iz) {
        return values[grid.index(ix, iy, iz)];
    }
    const cdouble& at(std::size_t ix, std::size_t iy, std::size_t iz) const {
        return values[grid.index(ix, iy, iz)];
    }
    void validate() const;
};

/// Real-valued 3D map (densities, phase maps).
struct RealMap3D {
    GridSpec grid;
    std::vector<double> values;

    RealMap3D() = default;
    explicit RealMap3D(const GridSpec& g) : grid(g), values(g.size(), 0.0) {}
    double& at(std::size_t ix, std::size_t iy, std::size_t iz) {
        return values[grid.index(ix, iy, iz)];
    }
    double at(std::size_t ix, std::size_t iy, std::size_t iz) const {
        return values[grid.index(ix, iy, iz)];
    }
};

/// Readout samples on a (kx, ky, t_R) lattice, t fastest.
struct KSpaceSignal {
    AxisSpec kx, ky, t;
    std::vector<cdouble> values;

    KSpaceSignal() = default;
    KSpaceSignal(const AxisSpec& kx_axis, const AxisSpec& ky_axis, const AxisSpec& t_axis);

    std::size_t index(std::size_t ikx, std::size_t iky, std::size_t it) const {
        return (ikx * ky.n + iky) * t.n + it;
    }
    cdouble& at(std::size_t ikx, std::size_t iky, std::size_t it) {
        return values[index(ikx, iky, it)];
    }
    const cdouble& at(std::size_t ikx, std::size_t iky, std::size_t it) const {
        return values[index(ikx, iky, it)];
    }
    /// Copy of the (kx, ky) plane at time index it, ky fastest.
    std::vector<cdouble> slice(std::size_t it) const;
    void set_slice(std::size_t it, std::span<const cdouble> plane);
    void validate() const;
};

/// Unitary DFT along the selected axes (forward kernel e^{-ik.r}).
ComplexField3D fft_axes(const ComplexField3D& field, AxisSet axes, Direction dir);

/// Unitary 2D DFT of an (n0 x n1) row-major array with centered index
/// coordinates on both sides: kernel exp(-+2 pi i (i - n0/2)(j - n0/2) / n0) per axis.
std::vector<cdouble> fft2_centered(std::span<const cdouble> data, std::size_t n0, std::size_t n1,
                                   Direction dir);

/// Longitudinal wavevector probed at readout time t_R (rad/m).
double kz_of_time(double t_r, double beta_bar);

double total_power(std::span<const cdouble> values);
inline double total_power(const ComplexField3D& f) { return total_power(f.values); }

} // namespace gemtomo
