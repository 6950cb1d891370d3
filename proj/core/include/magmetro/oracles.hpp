#ifndef MAGMETRO_ORACLES_HPP
#define MAGMETRO_ORACLES_HPP

#include <variant>

#include "magmetro/critical.hpp"
#include "magmetro/gaussian.hpp"
#include "magmetro/rwa.hpp"

namespace magmetro {

// Truncated two-mode Fock-space evolution. `cutoff` is the number of levels
// kept per mode. The initial state is cavity vacuum (x) magnon squeezed
// vacuum r0 for RWA models, joint vacuum for critical models.
struct FockConfig {
    std::variant<RwaModel, CriticalModel> model;
    int cutoff = 40;
    double tail_tol = 1e-10;  // allowed population leak into the top shell
};

// Unitary evolution of the truncated state followed by moment extraction.
// Noiseless models only.
GaussianState fock_evolve(const FockConfig& cfg, double t);

// Largest deviation of fourth-order quadrature moments from their Gaussian
// (Wick) factorization; quadratic dynamics must keep this at rounding level.
double fock_wick_residual(const FockConfig& cfg, double t);

// Direct integration of the first- and second-moment ODEs induced by the
// dissipative quantum Langevin equation, Dormand-Prince 5(4) stepper.
GaussianState lyapunov_integrate(const RwaModel& m, double t,
                                 double rtol = 1e-10);

} // namespace magmetro

#endif
