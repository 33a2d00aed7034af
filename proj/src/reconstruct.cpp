#include "gemtomo/reconstruct.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "gemtomo/error.hpp"

namespace gemtomo {

namespace {

using RowMatrix = Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

cdouble cis(double phase) { return {std::cos(phase), std::sin(phase)}; }

template <typename F>
KSpaceSignal scale_slices(const KSpaceSignal& sig, F weight) {
    KSpaceSignal out = sig;
    const std::size_t ncol = sig.kx.n * sig.ky.n;
    for (std::size_t j = 0; j < sig.t.n; ++j) {
        const cdouble w = weight(sig.t.coord(j));
        for (std::size_t c = 0; c < ncol; ++c) out.values[c * sig.t.n + j] *= w;
    }
    return out;
}

} // namespace

void CalibParams::validate() const {
    require(eta_floor > 0.0 && eta_floor <= 1.0, "eta_floor must lie in (0, 1]");
    for (double s : axis_scale) require(std::isfinite(s) && s > 0.0, "axis scales must be > 0");
    require(std::isfinite(z0) && std::isfinite(zeta) && std::isfinite(omega_L_bar) &&
                std::isfinite(rotation_xy),
            "calibration parameters must be finite");
}

CalibParams matched_calibration(const PhysicsParams& p, double focus_plane) {
    CalibParams c;
    c.z0 = focus_plane;
    c.zeta = chirp_rate(p);
    c.omega_L_bar = effective_bias(p);
    return c;
}

KSpaceSignal compensate_chirp(const KSpaceSignal& sig, double zeta) {
    return scale_slices(sig, [zeta](double t) { return cis(-zeta * t * t); });
}

KSpaceSignal compensate_decay(const KSpaceSignal& sig, const DecoherenceParams& d, double eta_floor) {
    require(eta_floor > 0.0, "compensate_decay: eta_floor must be > 0");
    d.validate();
    return scale_slices(sig, [&](double t) {
        return cdouble(1.0 / std::max(decoherence_envelope(t, d), eta_floor), 0.0);
    });
}

AxisSpec default_z_axis(const AxisSpec& times, double beta_bar, double z_center) {
    require(beta_bar > 0.0, "beta_bar must be > 0");
    const double span = 1.0 / (beta_bar * times.step);
    return AxisSpec::centered(times.n, span / static_cast<double>(times.n), z_center);
}

ComplexField3D reconstruct_kxy_z(const KSpaceSignal& sig, const PhysicsParams& p,
                                 const CalibParams& c, const ReconstructOptions& opt) {
    sig.validate();
    p.validate();
    c.validate();
    const AxisSpec& t = sig.t;

    KSpaceSignal work = scale_slices(sig, [&](double tr) {
        return cis(-c.omega_L_bar * tr - c.zeta * tr * tr);
    });
    if (opt.decoherence) work = compensate_decay(work, *opt.decoherence, c.eta_floor);

    const AxisSpec z = opt.z_axis ? *opt.z_axis : default_z_axis(t, p.beta0, opt.z_center);
    z.validate("z axis");

    // Adjoint of the forward kernel with the dk_z / 2 pi = beta0 dt weight.
    RowMatrix kernel(t.n, z.n);
    const double weight = p.beta0 * t.step;
    for (std::size_t j = 0; j < t.n; ++j)
        for (std::size_t m = 0; m < z.n; ++m)
            kernel(j, m) = weight * cis(-kTwoPi * p.beta0 * t.coord(j) * z.coord(m));

    const std::size_t ncol = sig.kx.n * sig.ky.n;
    Eigen::Map<const RowMatrix> omega(work.values.data(), ncol, t.n);

    ComplexField3D out(GridSpec{sig.kx, sig.ky, z});
    Eigen::Map<RowMatrix> dest(out.values.data(), ncol, z.n);
    dest.noalias() = omega * kernel;
    out.spectral = {true, true, false};
    out.dual[0] = AxisSpec::centered(sig.kx.n, kTwoPi / (static_cast<double>(sig.kx.n) * sig.kx.step));
    out.dual[1] = AxisSpec::centered(sig.ky.n, kTwoPi / (static_cast<double>(sig.ky.n) * sig.ky.step));
    return out;
}

ComplexField3D finish_reconstruction(const ComplexField3D& kxy_z, const PhysicsParams& p,
                                     const CalibParams& c) {
    require(kxy_z.domain() == DomainTag::KxyZ, "finish_reconstruction: expected a (kx, ky, z) field");
    ComplexField3D work = kxy_z;
    const AxisSpec& kx = work.grid.x;
    const AxisSpec& ky = work.grid.y;
    const AxisSpec& z = work.grid.z;
    for (std::size_t i = 0; i < kx.n; ++i)
        for (std::size_t j = 0; j < ky.n; ++j) {
            const double kxv = kx.coord(i), kyv = ky.coord(j);
            const double rate = (kxv * kxv + kyv * kyv) / (2.0 * p.k0);
            for (std::size_t m = 0; m < z.n; ++m) work.at(i, j, m) *= cis(-(z.coord(m) - c.z0) * rate);
        }

    ComplexField3D out = fft_axes(work, AxisSet::xy(), Direction::Inverse);
    const cdouble inv_g = 1.0 / p.g_omega_c;
    for (auto& v : out.values) v *= inv_g;

    for (int a = 0; a < 3; ++a) {
        AxisSpec& ax = out.grid.axis(a);
        ax.step /= c.axis_scale[a];
        ax.origin /= c.axis_scale[a];
    }
    out.rotation_xy = c.rotation_xy;
    return out;
}

ComplexField3D reconstruct(const KSpaceSignal& sig, const PhysicsParams& p, const CalibParams& c,
                           const ReconstructOptions& opt) {
    return finish_reconstruction(reconstruct_kxy_z(sig, p, c, opt), p, c);
}

std::vector<std::uint8_t> magnitude_mask(const ComplexField3D& s, double threshold) {
    double peak = 0.0;
    for (const auto& v : s.values) peak = std::max(peak, std::abs(v));
    std::vector<std::uint8_t> mask(s.values.size(), 0);
    if (peak == 0.0) return mask;
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = std::abs(s.values[i]) > threshold * peak;
    return mask;
}

MaskedRatio normalize_and_mask(const ComplexField3D& s, const ComplexField3D& s_ref, double threshold) {
    require(s.grid.shape() == s_ref.grid.shape(), "normalize_and_mask: grid mismatch");
    MaskedRatio r;
    r.mask = magnitude_mask(s_ref, threshold);
    r.ratio = ComplexField3D(s.grid);
    r.ratio.rotation_xy = s.rotation_xy;
    for (std::size_t i = 0; i < r.mask.size(); ++i) {
        if (!r.mask[i]) continue;
        r.ratio.values[i] = s.values[i] / s_ref.values[i];
        ++r.count;
    }
    return r;
}

} // namespace gemtomo
