#ifndef MAGMETRO_GAUSSIAN_HPP
#define MAGMETRO_GAUSSIAN_HPP

#include <complex>

#include <Eigen/Dense>

#include "magmetro/errors.hpp"

namespace magmetro {

// Quadrature ordering is X1,P1[,X2,P2]; vacuum covariance is the identity.
struct GaussianState {
    int n_modes = 1;
    Eigen::VectorXd d;      // length 2*n_modes
    Eigen::MatrixXd gamma;  // 2n x 2n, symmetric

    static GaussianState vacuum(int n_modes);
};

// Displaced squeezed thermal state parameters (alpha, r, phi, n_th).
struct StandardForm {
    std::complex<double> alpha{0.0, 0.0};
    double r = 0.0;
    double phi = 0.0;   // principal branch (-pi, pi]
    double n_th = 0.0;
};

// Smallest symplectic eigenvalue; >= 1 for physical states.
double min_symplectic_eigenvalue(const Eigen::MatrixXd& gamma);

// Throws NonPhysicalState / WrongModeCount when the state is unusable.
void check_physical(const GaussianState& state);

StandardForm to_standard_form(const GaussianState& state);
GaussianState from_standard_form(const StandardForm& p);

// N_c = |alpha|^2 + n_th + (2 n_th + 1) sinh^2 r
double photon_number(const StandardForm& p);

// Von Neumann entropy of a single Gaussian mode, in bits; S(0) = 0.
double entanglement_entropy(double n_th);

// Partial trace of a two-mode state down to mode `keep` (0 or 1).
GaussianState reduce(const GaussianState& state, int keep);

double wrap_angle(double phi);  // maps to (-pi, pi]

} // namespace magmetro

#endif
