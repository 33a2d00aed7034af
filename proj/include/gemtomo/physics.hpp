#pragma once

#include <complex>

#include "gemtomo/field.hpp"

namespace gemtomo {

namespace constants {
inline constexpr double kBoltzmann = 1.380649e-23;  // J/K
inline constexpr double kRb87Mass = 1.4431608951e-25; // kg, 86.909180527 u
inline constexpr double kBohrMagneton = 9.2740100783e-24; // J/T
inline constexpr double kHbar = 1.054571817e-34; // J s
inline constexpr double kEpsilon0 = 8.8541878128e-12;
inline constexpr double kMu0 = 1.25663706212e-6;
inline constexpr double kWavelengthD1 = 795e-9; // m
} // namespace constants

/// Gradient echo parameters. Gradients are cyclic Zeeman-splitting
/// gradients (Hz/m); phases carry the 2 pi explicitly.
struct PhysicsParams {
    double beta0 = 1.4e8;            // Hz/m
    double xi = 0.0;                 // Hz/m/s, gradient decay rate
    double z_g = 0.0;                // m, zero-splitting point
    double omega_L_bar = 0.0;        // rad/s, uniform Larmor offset
    double k0 = kTwoPi / constants::kWavelengthD1; // rad/m
    cdouble g_omega_c{1.0, 0.0};     // lumped coupling * control amplitude

    void validate() const;
    /// True when the gradient drift over the window stays below 1% of beta0.
    bool linearization_valid(double window) const;
};

struct CouplingParams {
    double k0 = kTwoPi / constants::kWavelengthD1; // rad/m
    double detuning = 0.0;  // rad/s
    double linewidth = 1.0; // rad/s
    double dipole = 0.0;    // C m
};

struct DecoherenceParams {
    double tau_k = 0.0;
    double tau_beta = 0.0;

    void validate() const;
};

double gradient_at(double t, const PhysicsParams& p);

/// 2 pi (z - z_g) * integral_0^t beta(t') dt'.
double gem_phase(double z, double t, const PhysicsParams& p);

/// Linear-in-time part of the total Larmor phase that does not depend on z
/// (rad/s): the offset plus the -2 pi beta0 z_g term of the GEM phase.
double effective_bias(const PhysicsParams& p);

/// Quadratic-in-time, z-independent part of the GEM phase (rad/s^2), pi xi z_g.
double chirp_rate(const PhysicsParams& p);

cdouble coupling_constant(const CouplingParams& c);

/// exp(-t^2 / 2 tau_k^2 - t^4 / 2 tau_beta^4). Even in t.
double decoherence_envelope(double t, const DecoherenceParams& d);

DecoherenceParams taus_from_temperature(double temperature, double k_sw, double beta_bar,
                                        double mass = constants::kRb87Mass);

double temperature_from_tau_k(double tau_k, double k_sw, double mass = constants::kRb87Mass);
double temperature_from_tau_beta(double tau_beta, double beta_bar,
                                 double mass = constants::kRb87Mass);

/// Spin-wave wavevector for signal/coupling beams crossing at theta.
double k_sw_from_angle(double theta, double k0);

} // namespace gemtomo
