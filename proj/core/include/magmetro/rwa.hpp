#ifndef MAGMETRO_RWA_HPP
#define MAGMETRO_RWA_HPP

#include <cmath>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "magmetro/gaussian.hpp"

namespace magmetro {

// Cavity-magnon model under the rotating-wave coupling g(c^dag b + c b^dag).
// The estimated field B enters the magnon frequency, omega_m = b0 + b
// (gyromagnetic ratio mu = 1). kappa and n_noise are the common damping rate
// and thermal occupation of both baths.
struct RwaModel {
    double omega_c = 2.0;
    double b0 = 2.0;
    double b = 0.0;
    double b_x = 0.0;
    double b_y = 0.0;
    double g = 0.05;
    double kappa = 0.0;
    double n_noise = 0.0;
    double r0 = 0.0;

    double omega_m() const { return b0 + b; }
    double g_crit() const { return std::sqrt(omega_c * omega_m()) / 2.0; }
    bool rwa_valid() const { return g < g_crit(); }
    void validate() const;
};

struct EvolutionFactors {
    double delta = 0.0;  // sqrt(4 g^2 + (omega_c - omega_m)^2)
    double xi = 0.0;     // 4 g^2 sin^2(delta t / 2) / delta^2, in [0, 1]
    double eta = 1.0;    // exp(-kappa t), in (0, 1]
    std::complex<double> lambda_plus{0.0, 0.0};
    std::complex<double> lambda_minus{0.0, 0.0};
};

EvolutionFactors evolution_factors(const RwaModel& m, double t);

struct CavityEvolution {
    GaussianState state;   // single-mode cavity state at time t
    StandardForm params;   // closed-form standard parameters of the same state
};

// Dissipative cavity state: noiseless mixing toward the rotated squeezed
// state followed by exponential relaxation toward (2 n_c + 1) I.
CavityEvolution evolve_cavity(const RwaModel& m, double t);

// Cavity displacement induced by the transverse field components (B_x, B_y);
// independent of r0.
std::complex<double> displacement_nonparallel(const RwaModel& m, double t);

// Joint two-mode covariance under the noiseless dynamics, initial state
// vacuum (x) squeezed-vacuum(r0).
GaussianState joint_evolve_noiseless(const RwaModel& m, double t);

// Entanglement entropy of the cavity-magnon split versus time (noiseless).
std::vector<std::pair<double, double>>
entanglement_vs_time(const RwaModel& m, std::span<const double> t_grid);

// Resonant transfer time pi / (2 g).
double t_star(const RwaModel& m);

namespace detail {

// Closed-form (r, n_th) chain; templated so tests can propagate complex-step
// perturbations through it.
template <typename T>
struct RwaParams {
    T xi, r_in, n_in, r, n_th;
};

template <typename T>
RwaParams<T> rwa_closed_params(T omega_c, T omega_m, double g, double kappa,
                               double n_c, double r0, double t) {
    using std::sqrt; using std::sin; using std::cosh; using std::sinh;
    using std::exp; using std::log;
    RwaParams<T> out;
    const T dw = omega_c - omega_m;
    const T delta = sqrt(T(4.0 * g * g) + dw * dw);
    const T sd = sin(delta * T(t / 2.0));
    out.xi = delta == T(0.0) ? T(0.0) : T(4.0 * g * g) * sd * sd / (delta * delta);

    const double s0 = std::sinh(r0) * std::sinh(r0);
    const T disc_in = sqrt(T(1.0) + T(4.0 * s0) * out.xi * (T(1.0) - out.xi));
    out.n_in = (disc_in - T(1.0)) / T(2.0);
    out.r_in = T(0.5) * log((T(1.0) - out.xi + out.xi * T(std::exp(2.0 * r0))) / disc_in);

    const double eta = std::exp(-kappa * t);
    const T c0 = T(eta) * disc_in * cosh(T(2.0) * out.r_in) +
                 T((1.0 - eta) * (2.0 * n_c + 1.0));
    const T c1 = T(eta) * disc_in * sinh(T(2.0) * out.r_in);
    const T disc = sqrt(c0 * c0 - c1 * c1);
    out.n_th = (disc - T(1.0)) / T(2.0);
    out.r = T(0.5) * log((c0 + c1) / disc);
    return out;
}

} // namespace detail

} // namespace magmetro

#endif
