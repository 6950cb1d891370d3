#ifndef MAGMETRO_FISHER_HPP
#define MAGMETRO_FISHER_HPP

#include <complex>
#include <functional>

#include "magmetro/gaussian.hpp"

namespace magmetro {

// Derivatives of the standard-form parameters with respect to the estimated
// field B.
struct ParamDerivatives {
    std::complex<double> d_alpha{0.0, 0.0};
    double d_r = 0.0;
    double d_phi = 0.0;
    double d_nth = 0.0;
};

struct FisherResult {
    double f_q = 0.0;
    double f_c = 0.0;
};

// Quantum Fisher information of the (alpha, r, phi, n_th) family.
double qfi(const StandardForm& p, const ParamDerivatives& dp);

// Classical Fisher information of the measurement matched to the state
// (psi = phi, s = r). Zero-displacement families only.
double cfi_optimal(const StandardForm& p, const ParamDerivatives& dp);

// Classical Fisher information of a general squeezed-vacuum Gaussian
// measurement with covariance R^T(psi) diag(e^{-2s}, e^{2s}) R(psi).
double cfi_general(const StandardForm& p, const ParamDerivatives& dp,
                   double psi, double s);

using StateFamily = std::function<StandardForm(double)>;

struct FdOptions {
    double step = 0.0;                // 0 -> 1e-5 * max(1, |B|)
    double consistency_tol = 1e-4;    // Richardson disagreement bound
};

// Five-point central differences with one Richardson refinement and phase
// unwrapping for phi. Evaluates the family at B and B +- step, B +- 2*step.
ParamDerivatives derivatives_fd(const StateFamily& family, double at_B,
                                const FdOptions& opts = {});

inline ParamDerivatives derivatives_fd(const StateFamily& family, double at_B,
                                       double step) {
    return derivatives_fd(family, at_B, FdOptions{step, 1e-4});
}

} // namespace magmetro

#endif
