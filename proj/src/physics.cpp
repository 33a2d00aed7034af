#include "gemtomo/physics.hpp"

#include <cmath>
#include <limits>

#include "gemtomo/error.hpp"

namespace gemtomo {

void PhysicsParams::validate() const {
    require(std::isfinite(beta0) && beta0 > 0.0, "beta0 must be > 0");
    require(std::isfinite(k0) && k0 > 0.0, "k0 must be > 0");
    require(std::isfinite(xi) && std::isfinite(z_g) && std::isfinite(omega_L_bar),
            "physics parameters must be finite");
    require(std::isfinite(g_omega_c.real()) && std::isfinite(g_omega_c.imag()) &&
                std::abs(g_omega_c) > 0.0,
            "g_omega_c must be finite and nonzero");
}

bool PhysicsParams::linearization_valid(double window) const {
    return std::abs(xi) * std::abs(window) < 0.01 * beta0;
}

void DecoherenceParams::validate() const {
    require(tau_k > 0.0 && tau_beta > 0.0, "decoherence lifetimes must be > 0");
}

double gradient_at(double t, const PhysicsParams& p) { return p.beta0 - p.xi * t; }

double gem_phase(double z, double t, const PhysicsParams& p) {
    return kTwoPi * (z - p.z_g) * (p.beta0 * t - 0.5 * p.xi * t * t);
}

double effective_bias(const PhysicsParams& p) {
    return p.omega_L_bar - kTwoPi * p.beta0 * p.z_g;
}

double chirp_rate(const PhysicsParams& p) { return kPi * p.xi * p.z_g; }

cdouble coupling_constant(const CouplingParams& c) {
    const cdouble denom(2.0 * c.detuning, c.linewidth);
    if (std::abs(denom) == 0.0) throw ValidationError("coupling_constant: 2*detuning + i*linewidth is zero");
    return (c.k0 / (constants::kHbar * constants::kEpsilon0)) * c.dipole * c.dipole / denom;
}

double decoherence_envelope(double t, const DecoherenceParams& d) {
    const double a = t / d.tau_k;
    const double b = t / d.tau_beta;
    return std::exp(-0.5 * a * a - 0.5 * b * b * b * b);
}

DecoherenceParams taus_from_temperature(double temperature, double k_sw, double beta_bar,
                                        double mass) {
    require(temperature > 0.0 && k_sw > 0.0 && beta_bar > 0.0 && mass > 0.0,
            "taus_from_temperature: all inputs must be > 0");
    const double inv_v = std::sqrt(mass / (constants::kBoltzmann * temperature));
    return {inv_v / k_sw, std::sqrt(2.0 / (kPi * beta_bar) * inv_v)};
}

double temperature_from_tau_k(double tau_k, double k_sw, double mass) {
    require(tau_k > 0.0 && k_sw > 0.0, "temperature_from_tau_k: inputs must be > 0");
    const double inv_v = tau_k * k_sw;
    return mass / (constants::kBoltzmann * inv_v * inv_v);
}

double temperature_from_tau_beta(double tau_beta, double beta_bar, double mass) {
    require(tau_beta > 0.0 && beta_bar > 0.0, "temperature_from_tau_beta: inputs must be > 0");
    const double inv_v = 0.5 * kPi * beta_bar * tau_beta * tau_beta;
    return mass / (constants::kBoltzmann * inv_v * inv_v);
}

double k_sw_from_angle(double theta, double k0) {
    require(k0 > 0.0, "k_sw_from_angle: k0 must be > 0");
    return 2.0 * k0 * std::sin(0.5 * theta);
}

} // namespace gemtomo
