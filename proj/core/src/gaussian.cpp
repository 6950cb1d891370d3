#include "magmetro/gaussian.hpp"

#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>

namespace magmetro {

namespace {

constexpr double kSymTol = 1e-12;
constexpr double kPhysTol = 1e-9;
constexpr double kIsotropicTol = 1e-12;  // threshold on sinh(2r)

void check_shape(const GaussianState& state) {
    const int n = state.n_modes;
    if (n != 1 && n != 2)
        throw WrongModeCount("GaussianState: n_modes must be 1 or 2, got " +
                             std::to_string(n));
    if (state.d.size() != 2 * n || state.gamma.rows() != 2 * n ||
        state.gamma.cols() != 2 * n)
        throw InvalidParameter("GaussianState: d/gamma dimensions do not match n_modes");
    for (int i = 0; i < 2 * n; ++i)
        for (int j = i + 1; j < 2 * n; ++j) {
            const double a = state.gamma(i, j), b = state.gamma(j, i);
            if (std::abs(a - b) > kSymTol * std::max(1.0, std::abs(a)))
                throw InvalidParameter("GaussianState: covariance matrix not symmetric");
        }
}

} // namespace

GaussianState GaussianState::vacuum(int n_modes) {
    GaussianState s;
    s.n_modes = n_modes;
    s.d = Eigen::VectorXd::Zero(2 * n_modes);
    s.gamma = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
    return s;
}

double wrap_angle(double phi) {
    const double two_pi = 2.0 * M_PI;
    phi = std::fmod(phi, two_pi);
    if (phi <= -M_PI) phi += two_pi;
    if (phi > M_PI) phi -= two_pi;
    return phi;
}

double min_symplectic_eigenvalue(const Eigen::MatrixXd& gamma) {
    const int n2 = static_cast<int>(gamma.rows());
    if (n2 == 2) {
        const double det = gamma(0, 0) * gamma(1, 1) - gamma(0, 1) * gamma(1, 0);
        return det > 0.0 ? std::sqrt(det) : 0.0;
    }
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n2, n2);
    for (int k = 0; k < n2 / 2; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    // Symplectic eigenvalues are the moduli of the eigenvalues of i*Omega*gamma.
    Eigen::MatrixXcd m = std::complex<double>(0.0, 1.0) * (omega * gamma);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, /*computeEigenvectors=*/false);
    double nu_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n2; ++i) {
        const double re = es.eigenvalues()(i).real();
        if (re > 0.0) nu_min = std::min(nu_min, re);
    }
    return std::isfinite(nu_min) ? nu_min : 0.0;
}

void check_physical(const GaussianState& state) {
    check_shape(state);
    if (min_symplectic_eigenvalue(state.gamma) < 1.0 - kPhysTol)
        throw NonPhysicalState("GaussianState: symplectic eigenvalue below 1");
}

StandardForm to_standard_form(const GaussianState& state) {
    if (state.n_modes != 1)
        throw WrongModeCount("to_standard_form: expected a single-mode state");
    check_shape(state);
    const double g11 = state.gamma(0, 0), g22 = state.gamma(1, 1);
    const double g12 = 0.5 * (state.gamma(0, 1) + state.gamma(1, 0));
    const double det = g11 * g22 - g12 * g12;
    if (det < (1.0 - kPhysTol) * (1.0 - kPhysTol))
        throw NonPhysicalState("to_standard_form: det(gamma) < 1");
    const double sqrt_det = std::sqrt(det);

    StandardForm p;
    p.alpha = {state.d(0) / std::sqrt(2.0), state.d(1) / std::sqrt(2.0)};
    p.n_th = std::max(0.5 * (sqrt_det - 1.0), 0.0);  // clamp float noise at purity
    const double tr_ratio = (g11 + g22) / (2.0 * sqrt_det);
    p.r = tr_ratio > 1.0 ? 0.5 * std::acosh(tr_ratio) : 0.0;
    // Argument signs chosen so that from_standard_form inverts this map.
    if (std::sinh(2.0 * p.r) < kIsotropicTol)
        p.phi = 0.0;
    else
        p.phi = std::atan2(-2.0 * g12, g22 - g11);
    return p;
}

GaussianState from_standard_form(const StandardForm& p) {
    if (p.r < 0.0 || p.n_th < 0.0 || !std::isfinite(p.r) || !std::isfinite(p.n_th))
        throw InvalidParameter("from_standard_form: r and n_th must be >= 0");
    GaussianState s = GaussianState::vacuum(1);
    s.d(0) = std::sqrt(2.0) * p.alpha.real();
    s.d(1) = std::sqrt(2.0) * p.alpha.imag();
    const double w = 2.0 * p.n_th + 1.0;
    const double ch = std::cosh(2.0 * p.r), sh = std::sinh(2.0 * p.r);
    s.gamma(0, 0) = w * (ch - sh * std::cos(p.phi));
    s.gamma(1, 1) = w * (ch + sh * std::cos(p.phi));
    s.gamma(0, 1) = s.gamma(1, 0) = -w * sh * std::sin(p.phi);
    return s;
}

double photon_number(const StandardForm& p) {
    const double sh = std::sinh(p.r);
    return std::norm(p.alpha) + p.n_th + (2.0 * p.n_th + 1.0) * sh * sh;
}

double entanglement_entropy(double n_th) {
    if (n_th < -kPhysTol)
        throw InvalidParameter("entanglement_entropy: n_th must be >= 0");
    if (n_th <= 0.0) return 0.0;
    return std::log2(n_th + 1.0) + n_th * std::log2((n_th + 1.0) / n_th);
}

GaussianState reduce(const GaussianState& state, int keep) {
    if (state.n_modes != 2)
        throw WrongModeCount("reduce: expected a two-mode state");
    check_shape(state);
    if (keep != 0 && keep != 1)
        throw InvalidParameter("reduce: keep must be 0 or 1");
    GaussianState out = GaussianState::vacuum(1);
    const int o = 2 * keep;
    out.d = state.d.segment(o, 2);
    out.gamma = state.gamma.block(o, o, 2, 2);
    return out;
}

} // namespace magmetro
