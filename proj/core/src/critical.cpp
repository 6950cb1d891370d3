#include "magmetro/critical.hpp"

#include <cmath>
#include <complex>

namespace magmetro {

namespace {

using cplx = std::complex<double>;

Eigen::Matrix4cd bogoliubov_matrix(const CriticalModel& m, const BogoliubovData& b) {
    const double wc = m.omega_c, wm = m.omega_m;
    const double cd = std::cos(b.delta_angle), sd = std::sin(b.delta_angle);
    const double em = b.eps_minus, ep = b.eps_plus;
    const double fc_m = cd / std::sqrt(wc * em), fc_p = sd / std::sqrt(wc * ep);
    const double fm_m = -sd / std::sqrt(wm * em), fm_p = cd / std::sqrt(wm * ep);
    Eigen::Matrix4cd t2;
    // rows (c, c^dag, b, b^dag), columns (c1, c1^dag, c2, c2^dag)
    t2 << fc_m * (wc + em), fc_m * (wc - em), fc_p * (wc + ep), fc_p * (wc - ep),
          fc_m * (wc - em), fc_m * (wc + em), fc_p * (wc - ep), fc_p * (wc + ep),
          fm_m * (wm + em), fm_m * (wm - em), fm_p * (wm + ep), fm_p * (wm - ep),
          fm_m * (wm - em), fm_m * (wm + em), fm_p * (wm - ep), fm_p * (wm + ep);
    return 0.5 * t2;
}

} // namespace

void CriticalModel::validate() const {
    if (!(omega_c > 0.0) || !(omega_m > 0.0))
        throw InvalidModel("CriticalModel: omega_c and omega_m must be positive");
    if (g < 0.0)
        throw InvalidModel("CriticalModel: g must be >= 0");
    if (g >= g_crit())
        throw SuperradiantPhase("CriticalModel: g >= g_c, normal phase only");
}

BogoliubovData bogoliubov(const CriticalModel& m) {
    m.validate();
    const double wc = m.omega_c, wm = m.omega_m, g = m.g, gc = m.g_crit();
    const double s = wc * wc + wm * wm;
    const double root = std::sqrt((wc * wc - wm * wm) * (wc * wc - wm * wm) +
                                  16.0 * g * g * wc * wm);
    BogoliubovData b;
    // eps_-^2 = (s - root)/2 rewritten without the near-critical cancellation.
    b.eps_minus = std::sqrt(8.0 * wc * wm * (gc - g) * (gc + g) / (s + root));
    b.eps_plus = std::sqrt(0.5 * (s + root));
    b.delta_angle = g == 0.0 && wm >= wc
                        ? 0.0
                        : 0.5 * std::atan2(4.0 * g * std::sqrt(wc * wm),
                                           wm * wm - wc * wc);
    return b;
}

GaussianState gamma_c_closed(const CriticalModel& m, double t) {
    m.validate();
    if (t < 0.0) throw InvalidModel("gamma_c_closed: t must be >= 0");
    const BogoliubovData b = bogoliubov(m);
    const double wc = m.omega_c, wm = m.omega_m;
    const double em = b.eps_minus, ep = b.eps_plus;
    const double c2 = std::cos(b.delta_angle) * std::cos(b.delta_angle);
    const double cm = std::cos(em * t), cp = std::cos(ep * t);
    const double sm = std::sin(em * t), sp = std::sin(ep * t);
    const double c2m1 = c2 - 1.0;
    const double dw = wc - wm;

    const double g11 =
        1.0 +
        c2 * c2m1 * dw * ((2.0 / wm) * (cp * cm - 1.0) - (2.0 * wc / (ep * em)) * sp * sm) -
        (c2m1 / (2.0 * ep * ep * wm)) *
            ((wc * wm + ep * ep) * dw * c2 + (ep * ep - wc * wc) * wm) *
            (std::cos(2.0 * ep * t) - 1.0) -
        (c2 / (2.0 * em * em * wm)) *
            ((wc * wm + em * em) * dw * c2 + (wm * wm - em * em) * wc) *
            (std::cos(2.0 * em * t) - 1.0);

    const double g22 =
        1.0 -
        c2 * c2m1 * dw * ((2.0 / wc) * (cp * cm - 1.0) -
                          (2.0 * ep * em / (wc * wc * wm)) * sp * sm) +
        (c2m1 / (2.0 * wc * wc * wm)) *
            (dw * (wc * wm + ep * ep) * c2 + (ep * ep - wc * wc) * wm) *
            (std::cos(2.0 * ep * t) - 1.0) +
        (c2 / (2.0 * wc * wc * wm)) *
            (dw * (wc * wm + em * em) * c2 - (em * em - wm * wm) * wc) *
            (std::cos(2.0 * em * t) - 1.0);

    const double g12 =
        -c2 * c2m1 * dw * (((ep * ep + wc * wm) / (ep * wc * wm)) * sp * cm +
                           ((em * em + wc * wm) / (em * wc * wm)) * cp * sm) +
        (c2m1 / (2.0 * ep * wc * wm)) *
            (c2 * dw * (ep * ep + wc * wm) + (ep * ep - wc * wc) * wm) *
            std::sin(2.0 * ep * t) +
        (c2 / (2.0 * em * wc * wm)) *
            (c2 * dw * (em * em + wc * wm) - (em * em - wm * wm) * wc) *
            std::sin(2.0 * em * t);

    GaussianState out = GaussianState::vacuum(1);
    out.gamma(0, 0) = g11;
    out.gamma(1, 1) = g22;
    out.gamma(0, 1) = out.gamma(1, 0) = g12;
    return out;
}

double t_star_critical(const CriticalModel& m, int n) {
    if (n < 1) throw InvalidParameter("t_star_critical: n must be positive");
    return n * M_PI / bogoliubov(m).eps_minus;
}

Eigen::Matrix4d critical_propagator(const CriticalModel& m, double t) {
    m.validate();
    const BogoliubovData b = bogoliubov(m);
    const cplx i{0.0, 1.0};

    Eigen::Matrix4cd t1;
    t1 << 1, 1, 0, 0,
          -i, i, 0, 0,
          0, 0, 1, 1,
          0, 0, -i, i;
    t1 /= std::sqrt(2.0);

    const Eigen::Matrix4cd t2 = bogoliubov_matrix(m, b);

    Eigen::Vector4cd phases(std::polar(1.0, -b.eps_minus * t),
                            std::polar(1.0, b.eps_minus * t),
                            std::polar(1.0, -b.eps_plus * t),
                            std::polar(1.0, b.eps_plus * t));

    const Eigen::Matrix4cd mt =
        t1 * t2 * phases.asDiagonal() * t2.inverse() * t1.inverse();
    if (mt.imag().cwiseAbs().maxCoeff() > 1e-8)
        throw Error("critical_propagator: propagator is not real");
    return mt.real();
}

GaussianState joint_evolve_critical(const CriticalModel& m, double t) {
    const Eigen::Matrix4d s = critical_propagator(m, t);
    GaussianState out = GaussianState::vacuum(2);
    out.gamma = s * s.transpose();
    return out;
}

namespace {

// Step size for differentiating near-critical families: stay well inside the
// distance to g_c and keep the phase advance across the stencil resolvable.
double critical_fd_step(const CriticalModel& m, double frozen_t) {
    const double gc = m.g_crit();
    const double headroom = 2.0 * m.omega_m * (gc - m.g) / gc;
    double h = 1e-3 * headroom;
    const auto phi_at = [&](double bb) {
        CriticalModel shifted = m;
        shifted.omega_m = m.omega_m + bb;
        return to_standard_form(gamma_c_closed(shifted, frozen_t)).phi;
    };
    const double phi0 = phi_at(0.0);
    for (int iter = 0; iter < 4; ++iter) {
        const double rate = std::abs(wrap_angle(phi_at(h) - phi0)) / h;
        if (rate * 2.0 * h <= 0.4 || rate == 0.0) break;
        h = std::min(0.25 * h, 0.2 / rate);
    }
    return h;
}

FisherResult fisher_of_family(const CriticalModel& m, double frozen_t) {
    const StateFamily family = [&m, frozen_t](double bb) {
        CriticalModel shifted = m;
        shifted.omega_m = m.omega_m + bb;
        return to_standard_form(gamma_c_closed(shifted, frozen_t));
    };
    double h = critical_fd_step(m, frozen_t);
    for (int attempt = 0;; ++attempt) {
        try {
            const ParamDerivatives dp = derivatives_fd(family, 0.0, h);
            const StandardForm p = family(0.0);
            return {qfi(p, dp), cfi_optimal(p, dp)};
        } catch (const StepTooSmall&) {
            if (attempt >= 3) throw;
            h *= 0.25;
        }
    }
}

} // namespace

FisherResult critical_fisher_at(const CriticalModel& m, double frozen_t) {
    m.validate();
    if (m.g == 0.0) return {0.0, 0.0};  // cavity never acquires B-dependence
    return fisher_of_family(m, frozen_t);
}

CriticalFisher fisher_at_special_times(const CriticalModel& m) {
    const double ts = t_star_critical(m, 1);
    CriticalFisher out;
    out.t_star = ts;
    out.at_t_star = critical_fisher_at(m, ts);
    out.at_quarter = critical_fisher_at(m, 0.25 * ts);
    return out;
}

} // namespace magmetro
