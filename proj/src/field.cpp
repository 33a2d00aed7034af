#include "gemtomo/field.hpp"

#include <cmath>
#include <string>

#include "dft.hpp"
#include "gemtomo/error.hpp"

namespace gemtomo {

void AxisSpec::validate(const char* name) const {
    require(n >= 1, std::string(name) + ": sample count must be >= 1");
    require(std::isfinite(step) && step > 0.0, std::string(name) + ": step must be > 0");
    require(std::isfinite(origin), std::string(name) + ": origin must be finite");
}

AxisSpec AxisSpec::centered(std::size_t n, double step, double center) {
    return {n, step, center - static_cast<double>(n / 2) * step};
}

AxisSpec AxisSpec::conjugate() const {
    return centered(n, kTwoPi / (static_cast<double>(n) * step));
}

void GridSpec::validate() const {
    x.validate("x axis");
    y.validate("y axis");
    z.validate("z axis");
}

std::string to_string(DomainTag tag) {
    switch (tag) {
    case DomainTag::RealSpace: return "real-space";
    case DomainTag::KxyZ: return "kxy-z";
    case DomainTag::Kxyz: return "kxykz";
    case DomainTag::Mixed: return "mixed";
    }
    return "unknown";
}

ComplexField3D::ComplexField3D(const GridSpec& g) : grid(g), values(g.size()) {}

ComplexField3D::ComplexField3D(const GridSpec& g, std::vector<cdouble> v)
    : grid(g), values(std::move(v)) {
    require(values.size() == grid.size(), "field values do not match grid shape");
}

DomainTag ComplexField3D::domain() const {
    const auto [sx, sy, sz] = spectral;
    if (!sx && !sy && !sz) return DomainTag::RealSpace;
    if (sx && sy && !sz) return DomainTag::KxyZ;
    if (sx && sy && sz) return DomainTag::Kxyz;
    return DomainTag::Mixed;
}

void ComplexField3D::validate() const {
    grid.validate();
    require(values.size() == grid.size(), "field values do not match grid shape");
    for (const auto& v : values)
        require(std::isfinite(v.real()) && std::isfinite(v.imag()), "field contains non-finite values");
}

KSpaceSignal::KSpaceSignal(const AxisSpec& kx_axis, const AxisSpec& ky_axis,
                           const AxisSpec& t_axis)
    : kx(kx_axis), ky(ky_axis), t(t_axis), values(kx.n * ky.n * t.n) {}

std::vector<cdouble> KSpaceSignal::slice(std::size_t it) const {
    std::vector<cdouble> out(kx.n * ky.n);
    for (std::size_t p = 0; p < out.size(); ++p) out[p] = values[p * t.n + it];
    return out;
}

void KSpaceSignal::set_slice(std::size_t it, std::span<const cdouble> plane) {
    require(plane.size() == kx.n * ky.n, "slice size does not match (kx, ky) shape");
    for (std::size_t p = 0; p < plane.size(); ++p) values[p * t.n + it] = plane[p];
}

void KSpaceSignal::validate() const {
    kx.validate("kx axis");
    ky.validate("ky axis");
    t.validate("t axis");
    require(values.size() == kx.n * ky.n * t.n, "signal values do not match axes");
    for (const auto& v : values)
        require(std::isfinite(v.real()) && std::isfinite(v.imag()), "signal contains non-finite values");
}

namespace {

// Applies a separable phase factor f(i) along axis a of a row-major 3D array.
template <typename F>
void scale_along(std::vector<cdouble>& data, const std::array<std::size_t, 3>& shape, int a, F factor) {
    std::vector<cdouble> w(shape[a]);
    for (std::size_t i = 0; i < shape[a]; ++i) w[i] = factor(i);
    for (std::size_t i0 = 0; i0 < shape[0]; ++i0)
        for (std::size_t i1 = 0; i1 < shape[1]; ++i1)
            for (std::size_t i2 = 0; i2 < shape[2]; ++i2) {
                const std::size_t idx[3] = {i0, i1, i2};
                data[(i0 * shape[1] + i1) * shape[2] + i2] *= w[idx[a]];
            }
}

cdouble cis(double phase) { return {std::cos(phase), std::sin(phase)}; }

} // namespace

ComplexField3D fft_axes(const ComplexField3D& field, AxisSet axes, Direction dir) {
    field.validate();
    ComplexField3D out = field;
    const auto shape = field.grid.shape();
    std::array<bool, 3> sel{axes.x, axes.y, axes.z};
    double norm = 1.0;

    for (int a = 0; a < 3; ++a) {
        if (!sel[a]) continue;
        const bool forward = dir == Direction::Forward;
        require(field.spectral[a] != forward,
                forward ? "fft_axes: axis already in the spectral domain"
                        : "fft_axes: axis is not in the spectral domain");
        const AxisSpec src = field.grid.axis(a);
        norm /= std::sqrt(static_cast<double>(src.n));
        if (forward) {
            // k_j x_i = k0 x0 + k0 i dx + j dk x0 + 2 pi ij/n
            const AxisSpec k = src.conjugate();
            scale_along(out.values, shape, a,
                        [&](std::size_t i) { return cis(-k.origin * static_cast<double>(i) * src.step); });
            out.grid.axis(a) = k;
            out.dual[a] = src;
        } else {
            const AxisSpec x = field.dual[a];
            scale_along(out.values, shape, a,
                        [&](std::size_t j) { return cis(static_cast<double>(j) * src.step * x.origin); });
            out.grid.axis(a) = x;
            out.dual[a] = AxisSpec{};
        }
    }

    const int sign = dir == Direction::Forward ? -1 : +1;
    detail::dft_inplace(out.values.data(), shape, sel, sign);

    for (int a = 0; a < 3; ++a) {
        if (!sel[a]) continue;
        if (dir == Direction::Forward) {
            const AxisSpec k = out.grid.axis(a);
            const double x0 = out.dual[a].origin;
            scale_along(out.values, shape, a, [&](std::size_t j) { return cis(-k.coord(j) * x0); });
            out.spectral[a] = true;
        } else {
            const AxisSpec k = field.grid.axis(a);
            const AxisSpec x = out.grid.axis(a);
            scale_along(out.values, shape, a, [&](std::size_t i) { return cis(k.origin * x.coord(i)); });
            out.spectral[a] = false;
        }
    }
    for (auto& v : out.values) v *= norm;
    return out;
}

std::vector<cdouble> fft2_centered(std::span<const cdouble> data, std::size_t n0, std::size_t n1,
                                   Direction dir) {
    require(data.size() == n0 * n1, "fft2_centered: size mismatch");
    std::vector<cdouble> out(data.begin(), data.end());
    const std::array<std::size_t, 3> shape{n0, n1, 1};
    const double s = dir == Direction::Forward ? -1.0 : 1.0;
    // Centering on both sides: phase (i - c)(j - c) = ij - c i - c j + c^2.
    auto pre = [&](std::size_t n) {
        std::vector<cdouble> w(n);
        const double c = static_cast<double>(n / 2);
        for (std::size_t i = 0; i < n; ++i) w[i] = cis(-s * kTwoPi * c * static_cast<double>(i) / static_cast<double>(n));
        return w;
    };
    const auto w0 = pre(n0);
    const auto w1 = pre(n1);
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j) out[i * n1 + j] *= w0[i] * w1[j];
    detail::dft_inplace(out.data(), shape, {true, true, false}, dir == Direction::Forward ? -1 : 1);
    const double c0 = static_cast<double>(n0 / 2), c1 = static_cast<double>(n1 / 2);
    const cdouble global = cis(s * kTwoPi * (c0 * c0 / static_cast<double>(n0) + c1 * c1 / static_cast<double>(n1)));
    const double norm = 1.0 / std::sqrt(static_cast<double>(n0 * n1));
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j) out[i * n1 + j] *= w0[i] * w1[j] * global * norm;
    return out;
}

double kz_of_time(double t_r, double beta_bar) { return -kTwoPi * beta_bar * t_r; }

double total_power(std::span<const cdouble> values) {
    double p = 0.0;
    for (const auto& v : values) p += std::norm(v);
    return p;
}

} // namespace gemtomo
