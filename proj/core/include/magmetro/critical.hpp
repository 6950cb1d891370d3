#ifndef MAGMETRO_CRITICAL_HPP
#define MAGMETRO_CRITICAL_HPP

#include <cmath>

#include "magmetro/fisher.hpp"
#include "magmetro/gaussian.hpp"

namespace magmetro {

// Cavity-magnon model with the full (c + c^dag)(b + b^dag) coupling, normal
// phase only: g < g_c = sqrt(omega_c omega_m) / 2.
struct CriticalModel {
    double omega_c = 2.0;
    double omega_m = 2.0;
    double g = 0.0;

    double g_crit() const { return std::sqrt(omega_c * omega_m) / 2.0; }
    void validate() const;
};

struct BogoliubovData {
    double eps_minus = 0.0;
    double eps_plus = 0.0;
    double delta_angle = 0.0;  // pi/4 at resonance
};

BogoliubovData bogoliubov(const CriticalModel& m);

// Cavity covariance from the closed-form normal-mode solution; joint vacuum
// initial state, zero displacement.
GaussianState gamma_c_closed(const CriticalModel& m, double t);

// n-th recurrence time n pi / eps_minus.
double t_star_critical(const CriticalModel& m, int n);

// Quadrature propagator M(t) = T1 T2 T3(t) T2^{-1} T1^{-1}; symplectic.
Eigen::Matrix4d critical_propagator(const CriticalModel& m, double t);

// Joint two-mode covariance M(t) M(t)^T from the vacuum initial state.
GaussianState joint_evolve_critical(const CriticalModel& m, double t);

// Fisher information of the cavity state for the field family
// omega_m -> omega_m + B, evaluated at a frozen laboratory time.
FisherResult critical_fisher_at(const CriticalModel& m, double frozen_t);

struct CriticalFisher {
    FisherResult at_t_star;
    FisherResult at_quarter;
    double t_star = 0.0;
};

// Evaluates the B-family at t* and t*/4; the times are frozen at the actual
// model before differentiating.
CriticalFisher fisher_at_special_times(const CriticalModel& m);

} // namespace magmetro

#endif
