#include "gemtomo/calibration.hpp"

#include <Eigen/Dense>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_min.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "gemtomo/error.hpp"

namespace gemtomo {

double sharpness(std::span<const cdouble> values) {
    double s2 = 0.0, s4 = 0.0;
    for (const auto& v : values) {
        const double a = std::norm(v);
        s2 += a;
        s4 += a * a;
    }
    if (s2 == 0.0) throw ValidationError("sharpness: field is identically zero");
    return s4 / (s2 * s2);
}

double sharpness(const ComplexField3D& field) { return sharpness(field.values); }

double edge_sharpness(const ComplexField3D& field, const AxisSet& axes) {
    const auto sh = field.grid.shape();
    double log_sum = 0.0;
    int used = 0;
    std::vector<cdouble> diff;
    for (int a = 0; a < 3; ++a) {
        if (!axes.has(a) || sh[a] < 2) continue;
        diff.clear();
        std::array<std::size_t, 3> lim = sh;
        lim[a] -= 1;
        for (std::size_t i = 0; i < lim[0]; ++i)
            for (std::size_t j = 0; j < lim[1]; ++j)
                for (std::size_t k = 0; k < lim[2]; ++k) {
                    const std::size_t next[3] = {i + (a == 0), j + (a == 1), k + (a == 2)};
                    diff.push_back(field.at(next[0], next[1], next[2]) - field.at(i, j, k));
                }
        log_sum += std::log(sharpness(diff));
        ++used;
    }
    return used == 0 ? 1.0 : std::exp(log_sum / used);
}

double edge_sharpness(const ComplexField3D& field) {
    const auto sh = field.grid.shape();
    if (sh[0] < 2 && sh[1] < 2 && sh[2] < 2) return sharpness(field);
    return edge_sharpness(field, AxisSet::xyz());
}

namespace {

/// Nelder-Mead minimization through GSL. Exceptions raised by the objective
/// are captured and rethrown after the minimizer is released.
struct Simplex {
    std::function<double(const std::vector<double>&)> objective;
    std::exception_ptr failure;

    static double trampoline(const gsl_vector* x, void* params) {
        auto* self = static_cast<Simplex*>(params);
        std::vector<double> v(x->size);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = gsl_vector_get(x, i);
        try {
            return self->objective(v);
        } catch (...) {
            if (!self->failure) self->failure = std::current_exception();
            return GSL_POSINF;
        }
    }

    std::vector<double> minimize(std::vector<double> start, const std::vector<double>& step, double size_tol,
                                 int max_iter) {
        gsl_set_error_handler_off();
        const std::size_t n = start.size();
        gsl_multimin_function fn{&Simplex::trampoline, n, this};
        gsl_vector* x = gsl_vector_alloc(n);
        gsl_vector* ss = gsl_vector_alloc(n);
        for (std::size_t i = 0; i < n; ++i) {
            gsl_vector_set(x, i, start[i]);
            gsl_vector_set(ss, i, step[i]);
        }
        gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
        gsl_multimin_fminimizer_set(s, &fn, x, ss);
        for (int it = 0; it < max_iter && !failure; ++it) {
            if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
            if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), size_tol) == GSL_SUCCESS) break;
        }
        for (std::size_t i = 0; i < n; ++i) start[i] = gsl_vector_get(s->x, i);
        gsl_multimin_fminimizer_free(s);
        gsl_vector_free(x);
        gsl_vector_free(ss);
        if (failure) std::rethrow_exception(failure);
        return start;
    }
};

/// Maximizes f on [lo, hi] given an interior point `mid` above both ends,
/// with GSL's Brent minimizer on -f. Objective exceptions are rethrown.
struct Brent {
    std::function<double(double)> objective;
    std::exception_ptr failure;

    static double trampoline(double x, void* params) {
        auto* self = static_cast<Brent*>(params);
        try {
            return -self->objective(x);
        } catch (...) {
            if (!self->failure) self->failure = std::current_exception();
            return GSL_POSINF;
        }
    }

    double maximize(double lo, double mid, double hi, double f_mid, double tol, int max_iter) {
        gsl_set_error_handler_off();
        gsl_function fn{&Brent::trampoline, this};
        gsl_min_fminimizer* s = gsl_min_fminimizer_alloc(gsl_min_fminimizer_brent);
        double x = mid;
        if (gsl_min_fminimizer_set_with_values(s, &fn, mid, -f_mid, lo, trampoline(lo, this), hi,
                                               trampoline(hi, this)) == GSL_SUCCESS) {
            for (int it = 0; it < max_iter && !failure; ++it) {
                if (gsl_min_fminimizer_iterate(s) != GSL_SUCCESS) break;
                x = gsl_min_fminimizer_x_minimum(s);
                if (gsl_min_test_interval(gsl_min_fminimizer_x_lower(s), gsl_min_fminimizer_x_upper(s), tol, 0.0) ==
                    GSL_SUCCESS)
                    break;
            }
        }
        gsl_min_fminimizer_free(s);
        if (failure) std::rethrow_exception(failure);
        return x;
    }
};

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

bool is_flat(const std::vector<double>& values, double tol) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return *hi <= 0.0 || (*hi - *lo) <= tol * std::abs(*hi);
}

} // namespace

FocusResult calibrate_focus(const KSpaceSignal& sig, const PhysicsParams& p, const CalibParams& base,
                            const FocusSearch& search, const ReconstructOptions& recon) {
    require(search.grid_points >= 3, "calibrate_focus: need at least 3 grid points per axis");
    require(search.z0_range[1] > search.z0_range[0] && search.zeta_range[1] > search.zeta_range[0],
            "calibrate_focus: ranges must be increasing");
    const int n = search.grid_points;
    const auto un = static_cast<std::size_t>(n);
    const auto z0s = linspace(search.z0_range[0], search.z0_range[1], n);
    const auto zetas = linspace(search.zeta_range[0], search.zeta_range[1], n);
    const AxisSet along = AxisSet::only(Axis::Z), across = AxisSet::xy();

    FocusResult res;
    // Row iz holds zetas[iz], column i0 holds z0s[i0].
    std::vector<double> tz(un * un), tt(un * un);
    CalibParams c = base;
    for (std::size_t iz = 0; iz < un; ++iz) {
        c.zeta = zetas[iz];
        const ComplexField3D mixed = reconstruct_kxy_z(sig, p, c, recon);
        for (std::size_t i0 = 0; i0 < un; ++i0) {
            c.z0 = z0s[i0];
            const ComplexField3D r = finish_reconstruction(mixed, p, c);
            tz[iz * un + i0] = edge_sharpness(r, along);
            tt[iz * un + i0] = edge_sharpness(r, across);
            ++res.evaluations;
        }
    }
    auto row_of = [&](const std::vector<double>& t, std::size_t iz) {
        return std::vector<double>(t.begin() + static_cast<long>(iz * un), t.begin() + static_cast<long>((iz + 1) * un));
    };
    auto col_of = [&](const std::vector<double>& t, std::size_t i0) {
        std::vector<double> col(un);
        for (std::size_t iz = 0; iz < un; ++iz) col[iz] = t[iz * un + i0];
        return col;
    };
    auto argmax = [](const std::vector<double>& v) {
        return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    };

    // Alternate per-parameter argmaxes from the grid center until they agree.
    std::size_t b0 = un / 2, bz = argmax(col_of(tz, b0));
    for (std::size_t it = 0; it < 2 * un; ++it) {
        const std::size_t n0 = argmax(row_of(tt, bz));
        const std::size_t nz = argmax(col_of(tz, n0));
        if (n0 == b0 && nz == bz) break;
        b0 = n0;
        bz = nz;
    }

    res.z0_identifiable = !is_flat(row_of(tt, bz), search.flat_tolerance);
    res.zeta_identifiable = !is_flat(col_of(tz, b0), search.flat_tolerance);
    if (!res.z0_identifiable) b0 = static_cast<std::size_t>(std::min_element(z0s.begin(), z0s.end(), [&](double a, double b) {
                                      return std::abs(a - base.z0) < std::abs(b - base.z0);
                                  }) - z0s.begin());
    res.z0 = res.z0_identifiable ? z0s[b0] : base.z0;
    res.zeta = res.zeta_identifiable ? zetas[bz] : base.zeta;
    {
        CalibParams q = base;
        q.z0 = z0s[b0];
        q.zeta = zetas[bz];
        res.score = edge_sharpness(reconstruct(sig, p, q, recon));
    }

    auto on_edge = [un](std::size_t i) { return i == 0 || i + 1 == un; };
    if (res.z0_identifiable && on_edge(b0))
        throw NumericalError("calibrate_focus: z0 optimum lies on the range boundary; widen z0_range");
    if (res.zeta_identifiable && on_edge(bz))
        throw NumericalError("calibrate_focus: zeta optimum lies on the range boundary; widen zeta_range");

    if (search.refine && (res.z0_identifiable || res.zeta_identifiable)) {
        const double dz0 = z0s[1] - z0s[0], dzeta = zetas[1] - zetas[0];
        auto score_at = [&](double z0, double zeta, const AxisSet& axes) {
            CalibParams q = base;
            q.z0 = z0;
            q.zeta = zeta;
            ++res.evaluations;
            return edge_sharpness(reconstruct(sig, p, q, recon), axes);
        };
        double z0 = res.z0, zeta = res.zeta;
        for (int sweep = 0; sweep < 2; ++sweep) {
            if (res.zeta_identifiable) {
                Brent b;
                b.objective = [&](double v) { return score_at(z0, v, along); };
                const double f = score_at(z0, zeta, along);
                if (f > score_at(z0, zeta - dzeta, along) && f > score_at(z0, zeta + dzeta, along))
                    zeta = b.maximize(zeta - dzeta, zeta, zeta + dzeta, f, 1e-2 * dzeta, 40);
            }
            if (res.z0_identifiable) {
                Brent b;
                b.objective = [&](double v) { return score_at(v, zeta, across); };
                const double f = score_at(z0, zeta, across);
                if (f > score_at(z0 - dz0, zeta, across) && f > score_at(z0 + dz0, zeta, across))
                    z0 = b.maximize(z0 - dz0, z0, z0 + dz0, f, 1e-2 * dz0, 40);
            }
        }
        res.z0 = z0;
        res.zeta = zeta;
        CalibParams q = base;
        q.z0 = z0;
        q.zeta = zeta;
        res.score = edge_sharpness(reconstruct(sig, p, q, recon));
    }
    return res;
}

namespace {

struct PhasorVolume {
    GridSpec grid;
    std::vector<cdouble> values;

    explicit PhasorVolume(const RealMap3D& phase) : grid(phase.grid), values(phase.values.size()) {
        for (std::size_t i = 0; i < values.size(); ++i)
            values[i] = {std::cos(phase.values[i]), std::sin(phase.values[i])};
    }

    // Trilinear interpolation; zero outside the sampled box.
    cdouble sample(double x, double y, double z) const {
        const double r[3] = {x, y, z};
        std::size_t i0[3];
        double w[3];
        for (int a = 0; a < 3; ++a) {
            const AxisSpec& ax = grid.axis(a);
            const double f = (r[a] - ax.origin) / ax.step;
            if (ax.n == 1) {
                if (std::abs(f) > 0.5) return 0.0;
                i0[a] = 0;
                w[a] = 0.0;
                continue;
            }
            if (f < 0.0 || f > static_cast<double>(ax.n - 1)) return 0.0;
            const auto fl = std::min(static_cast<std::size_t>(f), ax.n - 2);
            i0[a] = fl;
            w[a] = f - static_cast<double>(fl);
        }
        cdouble acc{};
        for (int corner = 0; corner < 8; ++corner) {
            double weight = 1.0;
            std::size_t idx[3];
            for (int a = 0; a < 3; ++a) {
                const bool hi = (corner >> a) & 1;
                if (hi && grid.axis(a).n == 1) {
                    weight = 0.0;
                    break;
                }
                idx[a] = i0[a] + (hi ? 1 : 0);
                weight *= hi ? w[a] : 1.0 - w[a];
            }
            if (weight == 0.0) continue;
            acc += weight * values[grid.index(idx[0], idx[1], idx[2])];
        }
        return acc;
    }
};

double correlate(const ComplexField3D& recon, const std::vector<std::uint8_t>& mask, const PhasorVolume& target,
                 const std::array<double, 3>& scale, double rotation) {
    const double c = std::cos(rotation), s = std::sin(rotation);
    cdouble cross{};
    double na = 0.0, nb = 0.0;
    const GridSpec& g = recon.grid;
    for (std::size_t i = 0; i < g.x.n; ++i)
        for (std::size_t j = 0; j < g.y.n; ++j)
            for (std::size_t k = 0; k < g.z.n; ++k) {
                const std::size_t idx = g.index(i, j, k);
                if (!mask[idx]) continue;
                const double x = g.x.coord(i), y = g.y.coord(j), z = g.z.coord(k);
                const double xr = (c * x + s * y) / scale[0];
                const double yr = (-s * x + c * y) / scale[1];
                const cdouble a = target.sample(xr, yr, z / scale[2]);
                const cdouble b = std::polar(1.0, std::arg(recon.values[idx]));
                cross += std::conj(a) * b;
                na += std::norm(a);
                nb += 1.0;
            }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::abs(cross) / std::sqrt(na * nb);
}

} // namespace

double axis_correlation(const ComplexField3D& recon, const RealMap3D& target, const std::array<double, 3>& scale,
                        double rotation, double mask_threshold) {
    return correlate(recon, magnitude_mask(recon, mask_threshold), PhasorVolume(target), scale, rotation);
}

AxisResult calibrate_axes(const ComplexField3D& recon, const RealMap3D& target, const AxisSearch& search) {
    require(recon.domain() == DomainTag::RealSpace, "calibrate_axes: reconstruction must be in real space");
    require(search.grid_points >= 3, "calibrate_axes: need at least 3 grid points");
    const auto mask = magnitude_mask(recon, search.mask_threshold);
    const PhasorVolume phasors(target);

    // Parameters: scale x, y, z, rotation.
    std::array<double, 4> best{1.0, 1.0, 1.0, 0.0};
    std::array<bool, 4> identifiable{true, true, true, true};
    auto score = [&](const std::array<double, 4>& q) {
        return correlate(recon, mask, phasors, {q[0], q[1], q[2]}, q[3]);
    };
    std::array<double, 4> spacing{};
    for (int sweep = 0; sweep < 2; ++sweep) {
        for (int k = 0; k < 4; ++k) {
            const auto& range = k < 3 ? search.scale_range : search.rotation_range;
            const auto values = linspace(range[0], range[1], search.grid_points);
            spacing[static_cast<std::size_t>(k)] = values[1] - values[0];
            std::vector<double> scores;
            for (double v : values) {
                auto q = best;
                q[static_cast<std::size_t>(k)] = v;
                scores.push_back(score(q));
            }
            if (is_flat(scores, 1e-9)) {
                identifiable[static_cast<std::size_t>(k)] = false;
                continue;
            }
            const auto at = std::max_element(scores.begin(), scores.end()) - scores.begin();
            best[static_cast<std::size_t>(k)] = values[static_cast<std::size_t>(at)];
        }
    }

    std::vector<std::size_t> free;
    for (std::size_t k = 0; k < 4; ++k)
        if (identifiable[k]) free.push_back(k);
    if (!free.empty()) {
        Simplex nm;
        nm.objective = [&](const std::vector<double>& u) {
            auto q = best;
            for (std::size_t i = 0; i < free.size(); ++i) q[free[i]] += spacing[free[i]] * u[i];
            for (std::size_t k = 0; k < 3; ++k)
                if (q[k] <= 0.0) return 0.0;
            return -score(q);
        };
        const auto u = nm.minimize(std::vector<double>(free.size(), 0.0), std::vector<double>(free.size(), 0.25),
                                   1e-4, 400);
        if (-nm.objective(u) >= score(best))
            for (std::size_t i = 0; i < free.size(); ++i) best[free[i]] += spacing[free[i]] * u[i];
    }

    AxisResult res;
    res.scale = {best[0], best[1], best[2]};
    res.rotation_xy = best[3];
    res.correlation = score(best);
    if (res.correlation < search.min_correlation) {
        std::ostringstream msg;
        msg << "calibrate_axes: correlation peak " << res.correlation << " below " << search.min_correlation
            << "; calibration pattern not found";
        throw NumericalError(msg.str());
    }
    return res;
}

std::string to_string(DecayMode m) { return m == DecayMode::GradientOff ? "gradient-off" : "gradient-on"; }

DecayFitResult fit_decay(std::span<const double> times, std::span<const double> amplitudes, DecayMode mode,
                         const DecayFitOptions& opt) {
    require(times.size() == amplitudes.size(), "fit_decay: times and amplitudes differ in length");
    require(times.size() >= 6, "fit_decay: need at least 6 samples");
    for (std::size_t i = 0; i < times.size(); ++i) {
        require(std::isfinite(times[i]), "fit_decay: non-finite time");
        require(std::isfinite(amplitudes[i]) && amplitudes[i] > 0.0, "fit_decay: amplitudes must be > 0");
    }
    const bool fit_k = mode == DecayMode::GradientOff || !opt.fixed_tau_k;
    const bool fit_beta = mode == DecayMode::GradientOn;
    if (mode == DecayMode::GradientOn && opt.fixed_tau_k)
        require(*opt.fixed_tau_k > 0.0, "fit_decay: fixed tau_k must be > 0");

    // Unknowns: log A0, 1/tau_k^2, 1/tau_beta^4 (columns present as fitted).
    const auto n = static_cast<Eigen::Index>(times.size());
    const Eigen::Index k = 1 + fit_k + fit_beta;
    Eigen::MatrixXd x(n, k);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t2 = times[static_cast<std::size_t>(i)] * times[static_cast<std::size_t>(i)];
        Eigen::Index col = 0;
        x(i, col++) = 1.0;
        if (fit_k) x(i, col++) = -0.5 * t2;
        if (fit_beta) x(i, col++) = -0.5 * t2 * t2;
        y(i) = std::log(amplitudes[static_cast<std::size_t>(i)]);
        if (!fit_k) y(i) += 0.5 * t2 / (*opt.fixed_tau_k * *opt.fixed_tau_k);
    }
    const Eigen::VectorXd coef = x.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd resid = y - x * coef;
    const double dof = static_cast<double>(n - k);
    const double sigma2 = dof > 0 ? resid.squaredNorm() / dof : 0.0;
    const Eigen::MatrixXd cov = sigma2 * (x.transpose() * x).inverse();

    DecayFitResult r;
    r.mode = mode;
    r.amplitude = std::exp(coef(0));
    r.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(n));
    Eigen::Index col = 1;
    auto fail = [&](const char* what) {
        std::ostringstream msg;
        msg << "fit_decay: " << what << " (log-domain residual rms " << r.residual_rms << ")";
        throw NumericalError(msg.str());
    };
    if (fit_k) {
        const double p = coef(col);
        if (!(p > 0.0)) fail("no Gaussian decay in the data; tau_k is not positive");
        r.tau_k = 1.0 / std::sqrt(p);
        r.tau_k_err = 0.5 * std::pow(p, -1.5) * std::sqrt(std::max(cov(col, col), 0.0));
        ++col;
    } else {
        r.tau_k = *opt.fixed_tau_k;
    }
    if (fit_beta) {
        const double q = coef(col);
        if (!(q > 0.0)) fail("no quartic decay in the data; tau_beta is not positive");
        r.tau_beta = std::pow(q, -0.25);
        r.tau_beta_err = 0.25 * std::pow(q, -1.25) * std::sqrt(std::max(cov(col, col), 0.0));
    }

    if (mode == DecayMode::GradientOff) {
        if (opt.k_sw > 0.0) {
            r.temperature = temperature_from_tau_k(r.tau_k, opt.k_sw, opt.mass);
            r.temperature_err = 2.0 * r.temperature * r.tau_k_err / r.tau_k;
        }
    } else if (opt.beta_bar > 0.0) {
        r.temperature = temperature_from_tau_beta(r.tau_beta, opt.beta_bar, opt.mass);
        r.temperature_err = 4.0 * r.temperature * r.tau_beta_err / r.tau_beta;
    }
    return r;
}

} // namespace gemtomo
