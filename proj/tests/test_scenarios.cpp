#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "gemtomo/error.hpp"
#include "gemtomo/physics.hpp"
#include "gemtomo/scenarios.hpp"
#include "support.hpp"

using namespace gemtomo;
using namespace testing_support;

namespace {

constexpr double kMu0 = 1.25663706212e-6;

using Vec = std::array<double, 3>;

// Biot-Savart sum over a polygonal loop in the plane normal to z.
Vec biot_savart(const Vec& p, const Vec& center, double a, double current, int segments = 20000) {
    Vec b{};
    for (int s = 0; s < segments; ++s) {
        const double p0 = kTwoPi * s / segments, p1 = kTwoPi * (s + 1) / segments, pm = 0.5 * (p0 + p1);
        const Vec dl{a * (std::cos(p1) - std::cos(p0)), a * (std::sin(p1) - std::sin(p0)), 0.0};
        const Vec r{p[0] - center[0] - a * std::cos(pm), p[1] - center[1] - a * std::sin(pm), p[2] - center[2]};
        const double r3 = std::pow(r[0] * r[0] + r[1] * r[1] + r[2] * r[2], 1.5);
        b[0] += (dl[1] * r[2] - dl[2] * r[1]) / r3;
        b[1] += (dl[2] * r[0] - dl[0] * r[2]) / r3;
        b[2] += (dl[0] * r[1] - dl[1] * r[0]) / r3;
    }
    for (auto& v : b) v *= kMu0 * current / (4 * kPi);
    return b;
}

double norm3(const Vec& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

CoilParams coil5mm() {
    CoilParams c;
    c.center = {0, 0, 0};
    c.radius = 5e-3;
    c.current = 1.0;
    return c;
}

} // namespace

TEST_CASE("cloud density") {
    const CloudParams c;
    GridSpec g{AxisSpec::centered(9, 20e-6), AxisSpec::centered(9, 20e-6), AxisSpec::centered(801, 25e-6)};
    const auto n = cloud_density(g, c);
    CHECK(n.at(4, 4, 400) == doctest::Approx(c.peak_density).epsilon(1e-9));
    double peak_far = 0;
    for (std::size_t k = 0; k < g.z.n; ++k)
        if (std::abs(g.z.coord(k)) > 0.5 * c.length_z + 4 * c.edge_softness) peak_far = std::max(peak_far, n.at(4, 4, k));
    CHECK(peak_far < 1e-3 * c.peak_density);

    // (x, y)-integrated profile over the central 80% of the length.
    std::vector<double> prof(g.z.n);
    for (std::size_t k = 0; k < g.z.n; ++k)
        for (std::size_t i = 0; i < 9; ++i)
            for (std::size_t j = 0; j < 9; ++j) prof[k] += n.at(i, j, k);
    double lo = 1e300, hi = 0;
    for (std::size_t k = 0; k < g.z.n; ++k)
        if (std::abs(g.z.coord(k)) <= 0.4 * c.length_z) {
            lo = std::min(lo, prof[k]);
            hi = std::max(hi, prof[k]);
        }
    CHECK((hi - lo) / hi < 0.01);

    CloudParams bad;
    bad.sigma_x = 0;
    CHECK_THROWS_AS(cloud_density(g, bad), ValidationError);
}

TEST_CASE("flat spin wave") {
    const GridSpec g = small_grid(5, 5, 40, 20e-6, 0.3e-3);
    const CloudParams c;
    const auto s = flat_spinwave(g, c);
    const auto n = cloud_density(g, c);
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        CHECK(s.values[i].imag() == 0.0);
        CHECK(s.values[i].real() == n.values[i]);
    }
}

TEST_CASE("checkerboard phase") {
    GridSpec g{AxisSpec::centered(16, 10e-6), AxisSpec::centered(3, 10e-6), AxisSpec::centered(40, 50e-6)};
    const auto zero = checkerboard_phase(g, 0.3e-3, 0.0);
    for (double v : zero.values) CHECK(v == 0.0);

    const CheckerboardSpec spec{0.5e-3, 60e-6, 1.3, PatternPlane::ZX, 0.0};
    const auto m = checkerboard_phase(g, spec);
    std::set<double> levels(m.values.begin(), m.values.end());
    CHECK(levels == std::set<double>{0.0, 1.3});
    for (std::size_t i = 0; i < g.x.n; ++i)
        for (std::size_t j = 0; j < g.y.n; ++j)
            for (std::size_t k = 0; k < g.z.n; ++k) {
                const long long tz = (long long)std::floor(g.z.coord(k) / 0.5e-3);
                const long long tx = (long long)std::floor(g.x.coord(i) / 60e-6);
                CHECK(m.at(i, j, k) == ((tz + tx) % 2 ? 1.3 : 0.0));
                // Extruded along y.
                CHECK(m.at(i, j, k) == m.at(i, 0, k));
            }
    // Parity flips exactly across z = 0.5 mm.
    GridSpec line{{1, 1e-5, 1e-6}, {1, 1e-5, 0.0}, {2, 2e-6, 0.5e-3 - 1e-6}};
    const auto edge = checkerboard_phase(line, spec);
    CHECK(edge.values[0] != edge.values[1]);

    CHECK_THROWS_AS(checkerboard_phase(g, 40e-6, 1.0), ValidationError);
    CheckerboardSpec third = spec;
    third.tile_third = 20e-6;
    const auto m3 = checkerboard_phase(g, third);
    CHECK(m3.at(5, 0, 7) != m3.at(5, 2, 7));
    third.tile_third = 5e-6;
    CHECK_THROWS_AS(checkerboard_phase(g, third), ValidationError);
}

TEST_CASE("bitmap phase and PGM files") {
    const auto dir = std::filesystem::temp_directory_path() / "gemtomo_test_pgm";
    std::filesystem::create_directories(dir);
    Raster r{4, 3, {0, 127, 128, 255, 10, 200, 30, 40, 129, 0, 0, 0}};
    write_pgm(dir / "a.pgm", r);
    const auto back = read_pgm(dir / "a.pgm");
    CHECK(back.width == 4);
    CHECK(back.height == 3);
    CHECK(back.pixels == r.pixels);

    // One grid sample per raster pixel, centred on the origin.
    GridSpec g{AxisSpec::centered(3, 1e-5), {1, 1e-5, 0.0}, AxisSpec::centered(4, 1e-5)};
    const auto m = bitmap_phase(g, back, 1e-5, 2.0, PatternPlane::ZX);
    for (std::size_t row = 0; row < 3; ++row)
        for (std::size_t col = 0; col < 4; ++col)
            CHECK(m.at(row, 0, col) == (r.pixels[row * 4 + col] >= 128 ? 2.0 : 0.0));
    std::set<double> levels(m.values.begin(), m.values.end());
    CHECK(levels == std::set<double>{0.0, 2.0});

    {
        std::ofstream f(dir / "ascii.pgm");
        f << "P2\n2 2\n255\n0 1 2 3\n";
    }
    CHECK_THROWS_AS(read_pgm(dir / "ascii.pgm"), IoError);
    {
        std::ofstream f(dir / "short.pgm", std::ios::binary);
        f << "P5\n# comment\n4 4\n255\n" << std::string(5, 'x');
    }
    CHECK_THROWS_AS(read_pgm(dir / "short.pgm"), IoError);
    CHECK_THROWS_AS(read_pgm(dir / "missing.pgm"), IoError);
    CHECK_THROWS_AS(bitmap_phase(g, Raster{}, 1e-5, 1.0), ValidationError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("two-pulse spin wave") {
    const double beta = 1.4e8, dt = 8e-6;
    const double period = 1.0 / (dt * beta);
    CHECK(period == doctest::Approx(0.893e-3).epsilon(1e-3));
    CloudParams c;
    c.sigma_x = c.sigma_y = 1.0;
    c.edge_softness = 1e-6;
    // Samples at integer and half-integer multiples of the period.
    GridSpec g{{1, 1e-5, 0.0}, {1, 1e-5, 0.0}, {9, 0.5 * period, -2 * period}};
    const auto s = two_pulse_spinwave(g, c, {1.0, dt}, beta);
    const auto n = cloud_density(g, c);
    for (std::size_t k = 0; k < 9; ++k) {
        if (k % 2 == 0) CHECK(std::abs(s.values[k]) == doctest::Approx(n.values[k]).epsilon(1e-12));
        else CHECK(std::abs(s.values[k]) < 1e-12);
    }
    // |S| follows |cos(pi dt beta z)|; real and imaginary parts are cos^2 and sin cos.
    GridSpec fine{{1, 1e-5, 0.0}, {1, 1e-5, 0.0}, AxisSpec::centered(101, period / 37)};
    const auto f = two_pulse_spinwave(fine, c, {1.0, dt}, beta);
    const auto nf = cloud_density(fine, c);
    for (std::size_t k = 0; k < 101; ++k) {
        const double th = kPi * dt * beta * fine.z.coord(k);
        CHECK(std::abs(f.values[k]) == doctest::Approx(nf.values[k] * std::abs(std::cos(th))).scale(1.0).epsilon(1e-12));
        CHECK(f.values[k].real() == doctest::Approx(nf.values[k] * std::cos(th) * std::cos(th)).scale(1.0).epsilon(1e-12));
        CHECK(f.values[k].imag() == doctest::Approx(nf.values[k] * std::sin(th) * std::cos(th)).scale(1.0).epsilon(1e-12));
    }
    const auto flat = two_pulse_spinwave(fine, c, {0.0, dt}, beta);
    CHECK(rel_err(flat.values, flat_spinwave(fine, c).values) < 1e-15);
    CHECK_THROWS_AS(two_pulse_spinwave(fine, c, {-1.0, dt}, beta), ValidationError);
}

TEST_CASE("coil field: analytic limits") {
    const auto coil = coil5mm();
    CHECK(norm3(coil_field({0, 0, 0}, coil)) == doctest::Approx(kMu0 / (2 * 5e-3)).epsilon(1e-9));
    CHECK(norm3(coil_field({0, 0, 0}, coil)) == doctest::Approx(1.2566e-4).epsilon(1e-4));
    const double a = 5e-3, d = 5e-3;
    const double on_axis = kMu0 * a * a / (2 * std::pow(a * a + d * d, 1.5));
    const auto b = coil_field({0, 0, d}, coil);
    CHECK(std::abs(norm3(b) - on_axis) / on_axis < 1e-6);
    CHECK(norm3(b) == doctest::Approx(4.443e-5).epsilon(1e-4));
    CHECK(std::abs(b[0]) < 1e-15);
    CHECK_THROWS_AS(coil_field({5e-3, 0, 0}, coil), ValidationError);
}

TEST_CASE("coil field matches a Biot-Savart sum off axis") {
    const auto coil = coil5mm();
    for (const Vec p : {Vec{2e-3, 1e-3, 3e-3}, Vec{7e-3, -2e-3, 0.5e-3}, Vec{-1e-3, 4e-3, -6e-3}}) {
        const auto b = coil_field(p, coil);
        const auto ref = biot_savart(p, coil.center, coil.radius, coil.current);
        for (int i = 0; i < 3; ++i) CHECK(b[i] == doctest::Approx(ref[i]).scale(norm3(ref)).epsilon(1e-6));
    }
    // Tilted axis: rotating the point with the coil leaves the field rotated alike.
    auto tilted = coil;
    tilted.axis = {0.0, 1.0, 0.0};
    const auto bt = coil_field({1e-3, 3e-3, -2e-3}, tilted);
    // R(x, y, z) = (x, z, -y) maps the z-axis coil onto the y-axis coil.
    const auto bz = coil_field({1e-3, 2e-3, 3e-3}, coil);
    CHECK(bt[0] == doctest::Approx(bz[0]).scale(norm3(bz)).epsilon(1e-12));
    CHECK(bt[1] == doctest::Approx(bz[2]).scale(norm3(bz)).epsilon(1e-12));
    CHECK(bt[2] == doctest::Approx(-bz[1]).scale(norm3(bz)).epsilon(1e-12));
}

TEST_CASE("coil field: dipole far field and zero divergence") {
    const auto coil = coil5mm();
    const double m = coil.current * kPi * coil.radius * coil.radius;
    for (double r : {0.1, 0.2, 0.5}) {
        for (double th : {0.0, 0.7, kPi / 2}) {
            const Vec p{r * std::sin(th), 0.0, r * std::cos(th)};
            // Dipole: mu0 m / (4 pi r^3) (3 cos(th) r_hat - z_hat)
            const double f = kMu0 * m / (4 * kPi * r * r * r);
            const Vec ref{f * 3 * std::cos(th) * std::sin(th), 0.0, f * (3 * std::cos(th) * std::cos(th) - 1)};
            const auto b = coil_field(p, coil);
            CHECK(norm3({b[0] - ref[0], b[1] - ref[1], b[2] - ref[2]}) < 0.01 * norm3(ref));
        }
    }
    const double h = 1e-5;
    for (const Vec p : {Vec{1e-3, 2e-3, 1e-3}, Vec{6e-3, 1e-3, -2e-3}, Vec{0.0, 0.0, 4e-3}}) {
        double div = 0;
        for (int i = 0; i < 3; ++i) {
            Vec pp = p, pm = p;
            pp[i] += h;
            pm[i] -= h;
            div += (coil_field(pp, coil)[i] - coil_field(pm, coil)[i]) / (2 * h);
        }
        CHECK(std::abs(div) < 1e-6 * norm3(coil_field(p, coil)) / h);
    }
}

TEST_CASE("coil phase map") {
    const GridSpec g = small_grid(3, 3, 4, 1e-4, 1e-4);
    CoilParams c;
    c.current = 0.0;
    c.b0 = 1e-4;
    c.t_c = 1e-6;
    const auto m = coil_phase_map(g, c);
    const double expect = 9.2740100783e-24 * 1e-4 * 1e-6 / 1.054571817e-34;
    for (double v : m.values) {
        CHECK(v == doctest::Approx(expect).epsilon(1e-9));
        CHECK(v == doctest::Approx(8.794).epsilon(1e-4));
    }
    // mu_B / h in MHz per gauss.
    CHECK(constants::kBohrMagneton * 1e-4 / (kTwoPi * constants::kHbar) == doctest::Approx(1.3996e6).epsilon(1e-4));
    c.t_c = 0.0;
    for (double v : coil_phase_map(g, c).values) CHECK(v == 0.0);

    // Phase is a monotone function of |B + z B0|.
    c = CoilParams{};
    const auto ph = coil_phase_map(g, c);
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < g.x.n; ++i)
        for (std::size_t j = 0; j < g.y.n; ++j)
            for (std::size_t k = 0; k < g.z.n; ++k) {
                auto b = coil_field({g.x.coord(i), g.y.coord(j), g.z.coord(k)}, c);
                b[2] += c.b0;
                pairs.push_back({norm3(b), ph.at(i, j, k)});
            }
    std::sort(pairs.begin(), pairs.end());
    for (std::size_t i = 1; i < pairs.size(); ++i) CHECK(pairs[i].second >= pairs[i - 1].second);
    c.axis = {0, 0, 2};
    CHECK_THROWS_AS(coil_phase_map(g, c), ValidationError);
}
