#include "gemtomo/forward.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "gemtomo/error.hpp"

namespace gemtomo {

namespace {

using RowMatrix = Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

cdouble cis(double phase) { return {std::cos(phase), std::sin(phase)}; }

void check_source(const ComplexField3D& s, const PhysicsParams& p, const AxisSpec& times) {
    s.validate();
    p.validate();
    times.validate("t axis");
    require(s.domain() == DomainTag::RealSpace, "forward: spin wave must be in the real-space domain, got " +
                                                    to_string(s.domain()));
}

// Paraxial phase rate k_perp^2 / 2 k0 for every transverse column, kx-major.
std::vector<double> paraxial_rates(const AxisSpec& kx, const AxisSpec& ky, double k0) {
    std::vector<double> a(kx.n * ky.n);
    for (std::size_t i = 0; i < kx.n; ++i)
        for (std::size_t j = 0; j < ky.n; ++j) {
            const double kxv = kx.coord(i), kyv = ky.coord(j);
            a[i * ky.n + j] = (kxv * kxv + kyv * kyv) / (2.0 * k0);
        }
    return a;
}

double envelope_or_one(double t, const ForwardOptions& opt) {
    return opt.include_decay ? decoherence_envelope(t, *opt.decoherence) : 1.0;
}

} // namespace

void ForwardOptions::validate() const {
    require(z_substeps_per_cell >= 1, "z_substeps_per_cell must be >= 1");
    if (include_decay) {
        require(decoherence.has_value(), "include_decay requires decoherence parameters");
        decoherence->validate();
    }
}

ComplexField3D imprint_phase(const ComplexField3D& s, const RealMap3D& phase) {
    require(s.grid == phase.grid, "imprint_phase: phase map grid does not match field grid");
    ComplexField3D out = s;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= cis(phase.values[i]);
    return out;
}

KSpaceSignal forward_fft(const ComplexField3D& s, const PhysicsParams& p, const AxisSpec& times,
                         const ForwardOptions& opt) {
    check_source(s, p, times);
    opt.validate();

    const ComplexField3D sxy = fft_axes(s, AxisSet::xy(), Direction::Forward);
    const AxisSpec& kx = sxy.grid.x;
    const AxisSpec& ky = sxy.grid.y;
    const AxisSpec& z = s.grid.z;
    const std::size_t ncol = kx.n * ky.n;

    RowMatrix src(ncol, z.n);
    const auto rate = paraxial_rates(kx, ky, p.k0);
    for (std::size_t c = 0; c < ncol; ++c)
        for (std::size_t m = 0; m < z.n; ++m) {
            cdouble v = sxy.values[c * z.n + m] * z.step;
            if (opt.include_diffraction) v *= cis((z.coord(m) - opt.focus_plane) * rate[c]);
            src(c, m) = v;
        }

    RowMatrix kernel(times.n, z.n);
    for (std::size_t j = 0; j < times.n; ++j)
        for (std::size_t m = 0; m < z.n; ++m)
            kernel(j, m) = cis(kTwoPi * p.beta0 * times.coord(j) * z.coord(m));

    KSpaceSignal out(kx, ky, times);
    Eigen::Map<RowMatrix> omega(out.values.data(), ncol, times.n);
    omega.noalias() = src * kernel.transpose();

    const double bias = effective_bias(p);
    const double zeta = chirp_rate(p);
    for (std::size_t j = 0; j < times.n; ++j) {
        const double t = times.coord(j);
        const cdouble w = p.g_omega_c * cis(bias * t + zeta * t * t) * envelope_or_one(t, opt);
        omega.col(j) *= w;
    }
    return out;
}

KSpaceSignal forward_splitstep(const ComplexField3D& s, const PhysicsParams& p,
                               const AxisSpec& times, const ForwardOptions& opt) {
    check_source(s, p, times);
    opt.validate();

    const ComplexField3D sxy = fft_axes(s, AxisSet::xy(), Direction::Forward);
    const AxisSpec& kx = sxy.grid.x;
    const AxisSpec& ky = sxy.grid.y;
    const AxisSpec& z = s.grid.z;
    const std::size_t ncol = kx.n * ky.n;
    const auto rate = paraxial_rates(kx, ky, p.k0);

    // Sheet m sits on the boundary between substeps m*n and m*n + 1 and is
    // split evenly between them; the march covers [z_0 - h, z_last + h].
    const std::size_t n = static_cast<std::size_t>(opt.z_substeps_per_cell);
    const double h = z.step / static_cast<double>(n);
    const std::size_t nsub = (z.n - 1) * n + 2;
    const double z_end = z.coord(0) - h + static_cast<double>(nsub) * h;

    KSpaceSignal out(kx, ky, times);
    std::vector<cdouble> sheet_phase(z.n);
    std::vector<cdouble> deposit(nsub);
    for (std::size_t j = 0; j < times.n; ++j) {
        const double t = times.coord(j);
        for (std::size_t m = 0; m < z.n; ++m)
            sheet_phase[m] = cis(p.omega_L_bar * t + gem_phase(z.coord(m), t, p));
        const cdouble scale = p.g_omega_c * envelope_or_one(t, opt);

        for (std::size_t c = 0; c < ncol; ++c) {
            std::fill(deposit.begin(), deposit.end(), cdouble{});
            for (std::size_t m = 0; m < z.n; ++m) {
                const cdouble half = 0.5 * z.step * sheet_phase[m] * sxy.values[c * z.n + m];
                deposit[m * n] += half;
                deposit[m * n + 1] += half;
            }
            const double a = opt.include_diffraction ? rate[c] : 0.0;
            const cdouble half_step = cis(-a * 0.5 * h);
            cdouble field{};
            for (std::size_t k = 0; k < nsub; ++k) {
                field *= half_step;
                field += deposit[k];
                field *= half_step;
            }
            // Refer the exit field back to the detection plane.
            field *= cis(a * (z_end - opt.focus_plane));
            out.at(c / ky.n, c % ky.n, j) = scale * field;
        }
    }
    return out;
}

KSpaceSignal forward(const ComplexField3D& s, const PhysicsParams& p, const AxisSpec& times,
                     const ForwardOptions& opt) {
    return opt.method == ForwardMethod::Fft ? forward_fft(s, p, times, opt)
                                            : forward_splitstep(s, p, times, opt);
}

KSpaceSignal apply_decay(const KSpaceSignal& sig, const DecoherenceParams& d) {
    d.validate();
    KSpaceSignal out = sig;
    const std::size_t ncol = sig.kx.n * sig.ky.n;
    for (std::size_t j = 0; j < sig.t.n; ++j) {
        const double eta = decoherence_envelope(sig.t.coord(j), d);
        for (std::size_t c = 0; c < ncol; ++c) out.values[c * sig.t.n + j] *= eta;
    }
    return out;
}

} // namespace gemtomo
