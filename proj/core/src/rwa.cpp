#include "magmetro/rwa.hpp"

#include <cmath>

namespace magmetro {

namespace {

using cplx = std::complex<double>;

// Heisenberg-picture mode map (c, b)(t) = U(t) (c, b)(0) for the noiseless
// beam-splitter dynamics; U is unitary.
Eigen::Matrix2cd mode_map(const RwaModel& m, double t) {
    Eigen::Matrix2cd u;
    const double wc = m.omega_c, wm = m.omega_m(), g = m.g;
    if (g == 0.0) {
        u.setZero();
        u(0, 0) = std::polar(1.0, -wc * t);
        u(1, 1) = std::polar(1.0, -wm * t);
        return u;
    }
    const double delta = std::sqrt(4.0 * g * g + (wc - wm) * (wc - wm));
    const double nu_p = 0.5 * (wc - wm + delta);
    const double nu_m = 0.5 * (wc - wm - delta);
    const cplx ep = std::polar(1.0, 0.5 * (-wc - wm + delta) * t);  // e^{lambda_+ t}
    const cplx em = std::polar(1.0, 0.5 * (-wc - wm - delta) * t);  // e^{lambda_- t}
    const cplx t11 = (nu_p * em - nu_m * ep) / delta;
    const cplx t12 = cplx(0.0, -1.0) * g * (em - ep) / delta;
    const cplx t22 = (nu_p * ep - nu_m * em) / delta;
    u(0, 0) = t11;
    u(0, 1) = cplx(0.0, 1.0) * t12;   // (c, ib) basis to (c, b)
    u(1, 0) = cplx(0.0, 1.0) * t12;
    u(1, 1) = t22;
    return u;
}

// Quadrature (symplectic) representation of a passive mode map.
Eigen::Matrix4d quadrature_map(const Eigen::Matrix2cd& u) {
    Eigen::Matrix4d s;
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            s(2 * j, 2 * k) = u(j, k).real();
            s(2 * j, 2 * k + 1) = -u(j, k).imag();
            s(2 * j + 1, 2 * k) = u(j, k).imag();
            s(2 * j + 1, 2 * k + 1) = u(j, k).real();
        }
    return s;
}

} // namespace

void RwaModel::validate() const {
    if (!(omega_c > 0.0) || !(omega_m() > 0.0))
        throw InvalidModel("RwaModel: omega_c and omega_m must be positive");
    if (g < 0.0 || kappa < 0.0 || n_noise < 0.0 || r0 < 0.0)
        throw InvalidModel("RwaModel: g, kappa, n_noise, r0 must be >= 0");
}

EvolutionFactors evolution_factors(const RwaModel& m, double t) {
    m.validate();
    EvolutionFactors f;
    const double wc = m.omega_c, wm = m.omega_m();
    f.delta = std::sqrt(4.0 * m.g * m.g + (wc - wm) * (wc - wm));
    if (f.delta > 0.0) {
        const double s = std::sin(0.5 * f.delta * t);
        f.xi = 4.0 * m.g * m.g * s * s / (f.delta * f.delta);
    }
    f.eta = std::exp(-m.kappa * t);
    f.lambda_plus = cplx(-0.5 * m.kappa, 0.5 * (-wc - wm + f.delta));
    f.lambda_minus = cplx(-0.5 * m.kappa, 0.5 * (-wc - wm - f.delta));
    return f;
}

CavityEvolution evolve_cavity(const RwaModel& m, double t) {
    m.validate();
    if (t < 0.0) throw InvalidModel("evolve_cavity: t must be >= 0");
    const EvolutionFactors f = evolution_factors(m, t);
    const double wc = m.omega_c, wm = m.omega_m();

    const double e2p = std::exp(2.0 * m.r0) - 1.0;
    const double e2m = std::exp(-2.0 * m.r0) - 1.0;
    const double half = 0.5 * (wc + wm) * t;
    const double s2 = std::sin(half) * std::sin(half);
    const double c2 = std::cos(half) * std::cos(half);

    Eigen::Matrix2d gin;
    gin(0, 0) = 1.0 + e2m * f.xi * s2 + e2p * f.xi * c2;
    gin(1, 1) = 1.0 + e2p * f.xi * s2 + e2m * f.xi * c2;
    gin(0, 1) = gin(1, 0) = -std::sinh(2.0 * m.r0) * f.xi * std::sin((wc + wm) * t);

    const double floor = (1.0 - f.eta) * (2.0 * m.n_noise + 1.0);
    GaussianState state = GaussianState::vacuum(1);
    state.gamma = f.eta * gin + floor * Eigen::Matrix2d::Identity();

    StandardForm p;
    const auto closed = detail::rwa_closed_params<double>(
        wc, wm, m.g, m.kappa, m.n_noise, m.r0, t);
    p.r = std::max(closed.r, 0.0);
    p.n_th = std::max(closed.n_th, 0.0);
    p.phi = std::sinh(2.0 * p.r) < 1e-12 ? 0.0 : wrap_angle(M_PI - (wc + wm) * t);
    if (m.b_x != 0.0 || m.b_y != 0.0) {
        p.alpha = displacement_nonparallel(m, t);
        state.d(0) = std::sqrt(2.0) * p.alpha.real();
        state.d(1) = std::sqrt(2.0) * p.alpha.imag();
    }
    return {std::move(state), p};
}

std::complex<double> displacement_nonparallel(const RwaModel& m, double t) {
    m.validate();
    if (m.b_x == 0.0 && m.b_y == 0.0) return {0.0, 0.0};
    const EvolutionFactors f = evolution_factors(m, t);
    const auto ramp = [t](cplx lambda) {
        return (std::exp(lambda * t) - 1.0) / lambda;
    };
    // The transverse drive enters the magnon Langevin equation as
    // +i mu (B_x + i B_y)/2; solving for <c>(t) gives an extra factor i
    // relative to the bare T-matrix convolution.
    return cplx(0.0, 1.0) * m.g * cplx(m.b_x, m.b_y) / (2.0 * f.delta) *
           (ramp(f.lambda_minus) - ramp(f.lambda_plus));
}

GaussianState joint_evolve_noiseless(const RwaModel& m, double t) {
    m.validate();
    if (m.kappa != 0.0)
        throw UnsupportedNoise("joint_evolve_noiseless: kappa must be 0 "
                               "(use oracles::lyapunov_integrate)");
    if (m.b_x != 0.0 || m.b_y != 0.0)
        throw InvalidModel("joint_evolve_noiseless: transverse field not supported");
    const Eigen::Matrix4d s = quadrature_map(mode_map(m, t));
    Eigen::Vector4d diag(1.0, 1.0, std::exp(-2.0 * m.r0), std::exp(2.0 * m.r0));
    GaussianState out = GaussianState::vacuum(2);
    out.gamma = s * diag.asDiagonal() * s.transpose();
    return out;
}

std::vector<std::pair<double, double>>
entanglement_vs_time(const RwaModel& m, std::span<const double> t_grid) {
    std::vector<std::pair<double, double>> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        const GaussianState cavity = reduce(joint_evolve_noiseless(m, t), 0);
        out.emplace_back(t, entanglement_entropy(to_standard_form(cavity).n_th));
    }
    return out;
}

double t_star(const RwaModel& m) {
    if (m.g <= 0.0) throw ZeroCoupling("t_star: g must be positive");
    return M_PI / (2.0 * m.g);
}

} // namespace magmetro
