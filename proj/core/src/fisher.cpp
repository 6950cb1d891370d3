#include "magmetro/fisher.hpp"

#include <array>
#include <cmath>

namespace magmetro {

namespace {

constexpr double kPureNth = 1e-12;
constexpr double kPureDnth = 1e-6;

void check_finite(const ParamDerivatives& dp) {
    if (!std::isfinite(dp.d_alpha.real()) || !std::isfinite(dp.d_alpha.imag()) ||
        !std::isfinite(dp.d_r) || !std::isfinite(dp.d_phi) || !std::isfinite(dp.d_nth))
        throw InvalidParameter("fisher: derivatives must be finite");
}

void check_zero_displacement(const StandardForm& p, const ParamDerivatives& dp,
                             const char* op) {
    if (p.alpha != std::complex<double>(0.0, 0.0) ||
        dp.d_alpha != std::complex<double>(0.0, 0.0))
        throw DisplacementNotSupported(std::string(op) +
                                       ": zero-displacement families only");
}

} // namespace

double qfi(const StandardForm& p, const ParamDerivatives& dp) {
    check_finite(dp);
    if (p.r < 0.0 || p.n_th < 0.0)
        throw InvalidParameter("qfi: invalid standard form");
    const double n = p.n_th;
    const double ch = std::cosh(2.0 * p.r), sh = std::sinh(2.0 * p.r);

    const std::complex<double> da_bar = std::conj(dp.d_alpha);
    const std::complex<double> phase{std::cos(p.phi), std::sin(p.phi)};
    const double disp = 4.0 / (2.0 * n + 1.0) *
        (std::norm(dp.d_alpha) * ch + (da_bar * da_bar * phase).real() * sh);

    double thermal = 0.0;
    if (n < kPureNth) {
        if (std::abs(dp.d_nth) >= kPureDnth)
            throw SingularPureState("qfi: n_th' != 0 on a pure-state family");
    } else {
        thermal = dp.d_nth * dp.d_nth / (n * (1.0 + n));
    }

    const double w = 1.0 + 2.0 * n;
    const double squeeze = w * w / (2.0 * (1.0 + 2.0 * n + 2.0 * n * n)) *
        (sh * sh * dp.d_phi * dp.d_phi + 4.0 * dp.d_r * dp.d_r);

    return disp + thermal + squeeze;
}

double cfi_optimal(const StandardForm& p, const ParamDerivatives& dp) {
    check_finite(dp);
    check_zero_displacement(p, dp, "cfi_optimal");
    const double n = p.n_th, w = 2.0 * n + 1.0;
    const double sh = std::sinh(2.0 * p.r);
    const double den = (n + 1.0) * (n + 1.0);
    const double a = dp.d_nth - w * dp.d_r;
    const double b = dp.d_nth + w * dp.d_r;
    return a * a / (2.0 * den) + b * b / (2.0 * den) +
           w * w * dp.d_phi * dp.d_phi * sh * sh / (4.0 * den);
}

double cfi_general(const StandardForm& p, const ParamDerivatives& dp,
                   double psi, double s) {
    check_finite(dp);
    check_zero_displacement(p, dp, "cfi_general");
    if (s < 0.0) throw InvalidParameter("cfi_general: s must be >= 0");

    const double n = p.n_th, w = 2.0 * n + 1.0;
    const double ch = std::cosh(2.0 * p.r), sh = std::sinh(2.0 * p.r);
    const double rel = p.phi - psi;

    // Pauli components of Gamma = R(phi)(gamma0 + gamma_c)R^T(phi) and of its
    // B-derivative Sigma, in the frame of the state's squeezing axis.
    const double gx = std::sinh(2.0 * s) * std::sin(rel);
    const double gz = -(w * sh + std::cos(rel) * std::sinh(2.0 * s));
    const double g0 = w * ch + std::cosh(2.0 * s);

    const double sx = -w * dp.d_phi * sh;
    const double sz = -2.0 * (dp.d_nth * sh + w * dp.d_r * ch);
    const double s0 = 2.0 * (dp.d_nth * ch + w * dp.d_r * sh);

    const double num =
        std::pow(gx * sx + gz * sz - g0 * s0, 2) +
        std::pow(gx * s0 - g0 * sx, 2) +
        std::pow(gz * s0 - g0 * sz, 2) -
        std::pow(gz * sx - gx * sz, 2);
    const double den = std::pow(gx * gx + gz * gz - g0 * g0, 2);
    return num / den;
}

ParamDerivatives derivatives_fd(const StateFamily& family, double at_B,
                                const FdOptions& opts) {
    double h = opts.step;
    if (h <= 0.0) h = 1e-5 * std::max(1.0, std::abs(at_B));

    const StandardForm center = family(at_B);
    std::array<StandardForm, 4> f = {family(at_B - 2.0 * h), family(at_B - h),
                                     family(at_B + h), family(at_B + 2.0 * h)};

    // Richardson pair: D1 from the 2h stencil, D2 from the h stencil.
    const auto richardson = [&](double m2, double m1, double p1, double p2,
                                const char* what) {
        const double d1 = (p2 - m2) / (4.0 * h);
        const double d2 = (p1 - m1) / (2.0 * h);
        const double refined = (4.0 * d2 - d1) / 3.0;
        if (std::abs(d2 - refined) >
            opts.consistency_tol * std::max(1.0, std::abs(refined)))
            throw StepTooSmall(std::string("derivatives_fd: Richardson estimates "
                                           "disagree for ") + what);
        return refined;
    };

    ParamDerivatives dp;
    dp.d_alpha = {richardson(f[0].alpha.real(), f[1].alpha.real(),
                             f[2].alpha.real(), f[3].alpha.real(), "Re(alpha)"),
                  richardson(f[0].alpha.imag(), f[1].alpha.imag(),
                             f[2].alpha.imag(), f[3].alpha.imag(), "Im(alpha)")};
    dp.d_r = richardson(f[0].r, f[1].r, f[2].r, f[3].r, "r");
    dp.d_nth = richardson(f[0].n_th, f[1].n_th, f[2].n_th, f[3].n_th, "n_th");

    if (center.r < 1e-8) {
        dp.d_phi = 0.0;  // phase is undefined on the isotropic axis
    } else {
        // Unwrap each sample against the center so branch jumps cancel.
        std::array<double, 4> phi;
        for (int i = 0; i < 4; ++i)
            phi[i] = center.phi + wrap_angle(f[i].phi - center.phi);
        dp.d_phi = richardson(phi[0], phi[1], phi[2], phi[3], "phi");
    }
    return dp;
}

} // namespace magmetro
