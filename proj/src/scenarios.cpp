#include "gemtomo/scenarios.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gemtomo/error.hpp"
#include "gemtomo/physics.hpp"

namespace gemtomo {

void CloudParams::validate() const {
    require(length_z > 0 && sigma_x > 0 && sigma_y > 0 && edge_softness > 0 && peak_density > 0,
            "cloud parameters must be > 0");
}

void CoilParams::validate() const {
    require(radius > 0.0, "coil radius must be > 0");
    const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    require(std::abs(n - 1.0) < 1e-9, "coil axis must be a unit vector");
}

namespace {

// Plateau of length L with tanh edges of width w.
double plateau(double z, double length, double w) {
    return 0.5 * (std::tanh((z + 0.5 * length) / w) - std::tanh((z - 0.5 * length) / w));
}

// Grid axis indices (first, second) spanning a pattern plane.
std::array<int, 2> plane_axes(PatternPlane p) {
    switch (p) {
    case PatternPlane::ZX: return {2, 0};
    case PatternPlane::XY: return {0, 1};
    case PatternPlane::ZY: return {2, 1};
    }
    return {2, 0};
}

template <typename F>
RealMap3D fill(const GridSpec& grid, F f) {
    grid.validate();
    RealMap3D m(grid);
    for (std::size_t i = 0; i < grid.x.n; ++i)
        for (std::size_t j = 0; j < grid.y.n; ++j)
            for (std::size_t k = 0; k < grid.z.n; ++k)
                m.at(i, j, k) = f(grid.x.coord(i), grid.y.coord(j), grid.z.coord(k));
    return m;
}

} // namespace

RealMap3D cloud_density(const GridSpec& grid, const CloudParams& c) {
    c.validate();
    return fill(grid, [&](double x, double y, double z) {
        return c.peak_density * std::exp(-x * x / (2 * c.sigma_x * c.sigma_x) - y * y / (2 * c.sigma_y * c.sigma_y)) *
               plateau(z - c.center_z, c.length_z, c.edge_softness);
    });
}

ComplexField3D flat_spinwave(const GridSpec& grid, const CloudParams& c) {
    const RealMap3D n = cloud_density(grid, c);
    ComplexField3D s(grid);
    for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] = n.values[i];
    return s;
}

RealMap3D checkerboard_phase(const GridSpec& grid, const CheckerboardSpec& spec) {
    const auto [a, b] = plane_axes(spec.plane);
    const int c = 3 - a - b;
    require(spec.tile_first > grid.axis(a).step && spec.tile_second > grid.axis(b).step,
            "checkerboard tile must exceed the grid step");
    require(spec.tile_third == 0.0 || spec.tile_third > grid.axis(c).step,
            "checkerboard tile must exceed the grid step");
    return fill(grid, [&](double x, double y, double z) {
        const double r[3] = {x, y, z};
        const auto ia = static_cast<long long>(std::floor(r[a] / spec.tile_first));
        const auto ib = static_cast<long long>(std::floor(r[b] / spec.tile_second));
        const auto ic = spec.tile_third > 0.0 ? static_cast<long long>(std::floor(r[c] / spec.tile_third)) : 0LL;
        return ((ia + ib + ic) % 2 != 0) ? spec.amplitude : 0.0;
    });
}

RealMap3D checkerboard_phase(const GridSpec& grid, double tile, double amplitude) {
    return checkerboard_phase(grid, CheckerboardSpec{tile, tile, amplitude, PatternPlane::ZX, 0.0});
}

RealMap3D bitmap_phase(const GridSpec& grid, const Raster& raster, double meters_per_pixel,
                       double amplitude, PatternPlane plane) {
    require(raster.width > 0 && raster.height > 0 && raster.pixels.size() == raster.width * raster.height,
            "bitmap_phase: raster is empty or malformed");
    require(meters_per_pixel > 0.0, "bitmap_phase: pixel scale must be > 0");
    const auto [a, b] = plane_axes(plane);
    return fill(grid, [&](double x, double y, double z) {
        const double r[3] = {x, y, z};
        const double col = std::floor(r[a] / meters_per_pixel + 0.5 * static_cast<double>(raster.width));
        const double row = std::floor(r[b] / meters_per_pixel + 0.5 * static_cast<double>(raster.height));
        if (col < 0 || row < 0 || col >= static_cast<double>(raster.width) ||
            row >= static_cast<double>(raster.height))
            return 0.0;
        const auto px = raster.pixels[static_cast<std::size_t>(row) * raster.width + static_cast<std::size_t>(col)];
        return px >= 128 ? amplitude : 0.0;
    });
}

ComplexField3D two_pulse_spinwave(const GridSpec& grid, const CloudParams& c, const TwoPulseParams& tp,
                                  double beta_bar) {
    require(tp.alpha >= 0.0 && tp.delta_t > 0.0, "two-pulse: alpha must be >= 0 and delta_t > 0");
    const RealMap3D n = cloud_density(grid, c);
    ComplexField3D s(grid);
    for (std::size_t i = 0; i < grid.x.n; ++i)
        for (std::size_t j = 0; j < grid.y.n; ++j)
            for (std::size_t k = 0; k < grid.z.n; ++k) {
                const double theta = kTwoPi * tp.delta_t * beta_bar * grid.z.coord(k);
                const cdouble mod = (1.0 + tp.alpha * cdouble(std::cos(theta), std::sin(theta))) / (1.0 + tp.alpha);
                s.at(i, j, k) = n.at(i, j, k) * mod;
            }
    return s;
}

std::array<double, 3> coil_field(const std::array<double, 3>& point, const CoilParams& coil) {
    coil.validate();
    const auto& n = coil.axis;
    const double d[3] = {point[0] - coil.center[0], point[1] - coil.center[1], point[2] - coil.center[2]};
    const double zl = d[0] * n[0] + d[1] * n[1] + d[2] * n[2];
    double rv[3] = {d[0] - zl * n[0], d[1] - zl * n[1], d[2] - zl * n[2]};
    const double rho = std::sqrt(rv[0] * rv[0] + rv[1] * rv[1] + rv[2] * rv[2]);
    const double a = coil.radius;
    const double wire = std::hypot(rho - a, zl);
    if (wire <= 1e-6) throw ValidationError("coil_field: point lies on the wire");

    const double q = (a + rho) * (a + rho) + zl * zl;
    const double k = std::sqrt(4.0 * a * rho / q);
    const double kk = std::comp_ellint_1(k);
    const double ee = std::comp_ellint_2(k);
    const double pref = constants::kMu0 * coil.current / (2.0 * kPi * std::sqrt(q));
    const double w2 = wire * wire;
    const double bz = pref * (kk + (a * a - rho * rho - zl * zl) / w2 * ee);
    double brho = 0.0;
    if (rho > 1e-12 * a) brho = pref * zl / rho * (-kk + (a * a + rho * rho + zl * zl) / w2 * ee);

    std::array<double, 3> b{};
    for (int i = 0; i < 3; ++i) {
        const double rhat = rho > 1e-12 * a ? rv[i] / rho : 0.0;
        b[i] = bz * n[i] + brho * rhat;
    }
    return b;
}

RealMap3D coil_phase_map(const GridSpec& grid, const CoilParams& coil) {
    coil.validate();
    const double rate = constants::kBohrMagneton * coil.t_c / constants::kHbar;
    return fill(grid, [&](double x, double y, double z) {
        auto b = coil_field({x, y, z}, coil);
        b[2] += coil.b0;
        return rate * std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
    });
}

Raster read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open PGM file: " + path.string());
    auto token = [&]() {
        std::string t;
        while (in >> std::ws && in.peek() == '#') std::getline(in, t);
        in >> t;
        return t;
    };
    if (token() != "P5") throw IoError(path.string() + ": not a binary (P5) PGM");
    Raster r;
    int maxval = 0;
    try {
        r.width = std::stoul(token());
        r.height = std::stoul(token());
        maxval = std::stoi(token());
    } catch (const std::exception&) {
        throw IoError(path.string() + ": malformed PGM header");
    }
    if (maxval <= 0 || maxval > 255) throw IoError(path.string() + ": only 8-bit PGM is supported");
    in.get();
    r.pixels.resize(r.width * r.height);
    in.read(reinterpret_cast<char*>(r.pixels.data()), static_cast<std::streamsize>(r.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(r.pixels.size()))
        throw IoError(path.string() + ": truncated PGM payload");
    return r;
}

void write_pgm(const std::filesystem::path& path, const Raster& r) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write PGM file: " + path.string());
    out << "P5\n" << r.width << " " << r.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(r.pixels.data()), static_cast<std::streamsize>(r.pixels.size()));
}

} // namespace gemtomo
