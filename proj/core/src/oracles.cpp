#include "magmetro/oracles.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

namespace magmetro {

namespace {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;

// ---------------------------------------------------------------------------
// Initial states
// ---------------------------------------------------------------------------

// Amplitudes of S(r)|0> on the even Fock levels, renormalized after
// truncation; throws when the truncated weight exceeds tail_tol.
std::vector<double> squeezed_vacuum_amplitudes(double r, int levels,
                                               double tail_tol) {
    std::vector<double> amp(levels, 0.0);
    const double th = std::tanh(r);
    double a = 1.0 / std::sqrt(std::cosh(r));
    double norm2 = 0.0;
    for (int m = 0; 2 * m < levels; ++m) {
        if (m > 0) a *= -th * std::sqrt((2.0 * m - 1.0) / (2.0 * m));
        amp[2 * m] = a;
        norm2 += a * a;
    }
    if (1.0 - norm2 > tail_tol)
        throw CutoffTooSmall("fock_evolve: initial squeezed state does not "
                             "fit at this cutoff");
    const double scale = 1.0 / std::sqrt(norm2);
    for (double& v : amp) v *= scale;
    return amp;
}

// ---------------------------------------------------------------------------
// Number-block path (RWA, parallel field, noiseless)
// ---------------------------------------------------------------------------

struct BlockState {
    int total = 0;       // conserved c^dag c + b^dag b; basis index is n_c
    CVec amp;            // length total + 1
};

struct BlockMoments {
    cplx cc{0, 0}, bb{0, 0}, cb{0, 0}, cbdag{0, 0};
    double nc = 0.0, nb = 0.0;
};

// The beam-splitter coupling conserves the total excitation number, so each
// block evolves exactly; the only truncation is on the total, at
// n_max = 2 (cutoff - 1), the largest total the product space can hold.
std::vector<BlockState> evolve_blocks(const RwaModel& m, int levels, double t,
                                      double tail_tol) {
    const int n_max = 2 * (levels - 1);
    const auto init = squeezed_vacuum_amplitudes(m.r0, n_max + 1, tail_tol);
    std::vector<BlockState> blocks;
    for (int n = 0; n <= n_max; n += 2) {
        if (init[n] == 0.0) continue;
        BlockState blk;
        blk.total = n;
        blk.amp = CVec::Zero(n + 1);
        blk.amp(0) = init[n];  // n_c = 0, n_b = n

        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n + 1, n + 1);
        for (int nc = 0; nc <= n; ++nc) {
            h(nc, nc) = m.omega_c * nc + m.omega_m() * (n - nc);
            if (nc < n) {
                const double v = m.g * std::sqrt((nc + 1.0) * (n - nc));
                h(nc, nc + 1) = h(nc + 1, nc) = v;
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        CVec phases(n + 1);
        for (int k = 0; k <= n; ++k)
            phases(k) = std::polar(1.0, -es.eigenvalues()(k) * t);
        blk.amp = es.eigenvectors() *
                  (phases.asDiagonal() * (es.eigenvectors().transpose() * blk.amp));
        blocks.push_back(std::move(blk));
    }
    return blocks;
}

BlockMoments block_moments(const std::vector<BlockState>& blocks) {
    BlockMoments mo;
    for (size_t i = 0; i < blocks.size(); ++i) {
        const auto& blk = blocks[i];
        const int n = blk.total;
        for (int nc = 0; nc <= n; ++nc) {
            const double p = std::norm(blk.amp(nc));
            mo.nc += p * nc;
            mo.nb += p * (n - nc);
            if (nc >= 1)  // c b^dag stays inside the block
                mo.cbdag += std::conj(blk.amp(nc - 1)) *
                            std::sqrt(nc * (n - nc + 1.0)) * blk.amp(nc);
        }
        // pair moments couple block n to block n-2
        const BlockState* lower = nullptr;
        if (i > 0 && blocks[i - 1].total == n - 2) lower = &blocks[i - 1];
        if (!lower) continue;
        for (int nc = 0; nc <= n; ++nc) {
            const int nb = n - nc;
            const cplx a = blk.amp(nc);
            if (nc >= 2)
                mo.cc += std::conj(lower->amp(nc - 2)) *
                         std::sqrt(nc * (nc - 1.0)) * a;
            if (nb >= 2 && nc <= n - 2)
                mo.bb += std::conj(lower->amp(nc)) *
                         std::sqrt(nb * (nb - 1.0)) * a;
            if (nc >= 1 && nb >= 1)
                mo.cb += std::conj(lower->amp(nc - 1)) *
                         std::sqrt(static_cast<double>(nc) * nb) * a;
        }
    }
    return mo;
}


// ---------------------------------------------------------------------------
// Full-space path (critical coupling or transverse field), Lanczos propagator
// ---------------------------------------------------------------------------

struct FullSpace {
    int levels = 0;
    Eigen::SparseMatrix<cplx> h;
    double h_scale = 1.0;

    int idx(int nc, int nb) const { return nc * levels + nb; }
};

FullSpace build_full_space(const FockConfig& cfg) {
    FullSpace fs;
    fs.levels = cfg.cutoff;
    const int L = fs.levels, dim = L * L;
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(static_cast<size_t>(dim) * 6);

    const bool critical = std::holds_alternative<CriticalModel>(cfg.model);
    double wc, wm, g, bx = 0.0, by = 0.0;
    if (critical) {
        const auto& m = std::get<CriticalModel>(cfg.model);
        m.validate();
        wc = m.omega_c; wm = m.omega_m; g = m.g;
    } else {
        const auto& m = std::get<RwaModel>(cfg.model);
        m.validate();
        wc = m.omega_c; wm = m.omega_m(); g = m.g; bx = m.b_x; by = m.b_y;
    }

    for (int nc = 0; nc < L; ++nc)
        for (int nb = 0; nb < L; ++nb) {
            const int row = fs.idx(nc, nb);
            trip.emplace_back(row, row, cplx(wc * nc + wm * nb, 0.0));
            // g c^dag b (+ h.c. via the mirrored entry below)
            if (nc + 1 < L && nb >= 1) {
                const double v = g * std::sqrt((nc + 1.0) * nb);
                trip.emplace_back(fs.idx(nc + 1, nb - 1), row, cplx(v, 0.0));
                trip.emplace_back(row, fs.idx(nc + 1, nb - 1), cplx(v, 0.0));
            }
            if (critical && nc + 1 < L && nb + 1 < L) {
                // counter-rotating g c^dag b^dag + h.c.
                const double v = g * std::sqrt((nc + 1.0) * (nb + 1.0));
                trip.emplace_back(fs.idx(nc + 1, nb + 1), row, cplx(v, 0.0));
                trip.emplace_back(row, fs.idx(nc + 1, nb + 1), cplx(v, 0.0));
            }
            if ((bx != 0.0 || by != 0.0) && nb + 1 < L) {
                // -mu (B_x + i B_y) b^dag / 2 + h.c.
                const cplx v = -0.5 * cplx(bx, by) * std::sqrt(nb + 1.0);
                trip.emplace_back(fs.idx(nc, nb + 1), row, v);
                trip.emplace_back(row, fs.idx(nc, nb + 1), std::conj(v));
            }
        }
    fs.h.resize(dim, dim);
    fs.h.setFromTriplets(trip.begin(), trip.end());
    fs.h_scale = (wc + wm) * (L - 1) + 4.0 * std::abs(g) * (L - 1);
    return fs;
}

// One Lanczos step psi -> exp(-i tau H) psi with full reorthogonalization.
void lanczos_step(const Eigen::SparseMatrix<cplx>& h, double tau, CVec& psi,
                  int krylov_dim) {
    const double nrm = psi.norm();
    const int dim = static_cast<int>(psi.size());
    const int m = std::min(krylov_dim, dim);

    Eigen::MatrixXcd v(dim, m);
    Eigen::VectorXd alpha(m), beta(m);
    v.col(0) = psi / nrm;
    int built = m;
    for (int j = 0; j < m; ++j) {
        CVec w = h * v.col(j);
        alpha(j) = w.dot(v.col(j)).real();
        w -= alpha(j) * v.col(j);
        if (j > 0) w -= beta(j - 1) * v.col(j - 1);
        for (int k = 0; k <= j; ++k)  // reorthogonalize
            w -= v.col(k).dot(w) * v.col(k);
        beta(j) = w.norm();
        if (j + 1 < m) {
            if (beta(j) < 1e-14) { built = j + 1; break; }
            v.col(j + 1) = w / beta(j);
        }
    }

    Eigen::MatrixXd tmat = Eigen::MatrixXd::Zero(built, built);
    for (int j = 0; j < built; ++j) {
        tmat(j, j) = alpha(j);
        if (j + 1 < built) tmat(j, j + 1) = tmat(j + 1, j) = beta(j);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tmat);
    Eigen::VectorXcd small = Eigen::VectorXcd::Zero(built);
    for (int k = 0; k < built; ++k) {
        cplx acc{0.0, 0.0};
        for (int l = 0; l < built; ++l)
            acc += es.eigenvectors()(k, l) *
                   std::polar(1.0, -es.eigenvalues()(l) * tau) *
                   es.eigenvectors()(0, l);
        small(k) = acc;
    }
    psi = nrm * (v.leftCols(built) * small);
}

CVec full_initial_state(const FockConfig& cfg) {
    const int L = cfg.cutoff;
    CVec psi = CVec::Zero(static_cast<Eigen::Index>(L) * L);
    if (std::holds_alternative<CriticalModel>(cfg.model)) {
        psi(0) = 1.0;  // joint vacuum
    } else {
        const auto amp = squeezed_vacuum_amplitudes(
            std::get<RwaModel>(cfg.model).r0, L, cfg.tail_tol);
        for (int nb = 0; nb < L; ++nb) psi(nb) = amp[nb];  // n_c = 0 slice
    }
    return psi;
}

CVec evolve_full(const FockConfig& cfg, double t) {
    const FullSpace fs = build_full_space(cfg);
    CVec psi = full_initial_state(cfg);
    const double tau0 = 9.0 / fs.h_scale;
    double done = 0.0;
    while (done < t) {
        const double tau = std::min(tau0, t - done);
        lanczos_step(fs.h, tau, psi, 52);
        done += tau;
    }
    if (std::abs(psi.squaredNorm() - 1.0) > 1e-10)
        throw Error("fock_evolve: propagator lost unitarity");
    return psi;
}

struct FullMoments {
    cplx c{0, 0}, b{0, 0}, cc{0, 0}, bb{0, 0}, cb{0, 0}, cbdag{0, 0};
    double nc = 0.0, nb = 0.0;
};

FullMoments full_moments(const CVec& psi, int L) {
    FullMoments mo;
    const auto idx = [L](int nc, int nb) { return nc * L + nb; };
    for (int nc = 0; nc < L; ++nc)
        for (int nb = 0; nb < L; ++nb) {
            const cplx a = psi(idx(nc, nb));
            if (a == cplx(0.0, 0.0)) continue;
            mo.nc += std::norm(a) * nc;
            mo.nb += std::norm(a) * nb;
            if (nc >= 1)
                mo.c += std::conj(psi(idx(nc - 1, nb))) * std::sqrt(1.0 * nc) * a;
            if (nb >= 1)
                mo.b += std::conj(psi(idx(nc, nb - 1))) * std::sqrt(1.0 * nb) * a;
            if (nc >= 2)
                mo.cc += std::conj(psi(idx(nc - 2, nb))) *
                         std::sqrt(nc * (nc - 1.0)) * a;
            if (nb >= 2)
                mo.bb += std::conj(psi(idx(nc, nb - 2))) *
                         std::sqrt(nb * (nb - 1.0)) * a;
            if (nc >= 1 && nb >= 1)
                mo.cb += std::conj(psi(idx(nc - 1, nb - 1))) *
                         std::sqrt(static_cast<double>(nc) * nb) * a;
            if (nc >= 1 && nb + 1 < L)
                mo.cbdag += std::conj(psi(idx(nc - 1, nb + 1))) *
                            std::sqrt(nc * (nb + 1.0)) * a;
        }
    return mo;
}

double full_shell_population(const CVec& psi, int L) {
    double pop = 0.0;
    for (int nc = 0; nc < L; ++nc)
        for (int nb = 0; nb < L; ++nb)
            if (nc >= L - 2 || nb >= L - 2) pop += std::norm(psi(nc * L + nb));
    return pop;
}

// Covariance assembly from central ladder moments; ordering Xc,Pc,Xm,Pm.
GaussianState assemble_state(cplx c, cplx b, cplx cc, cplx bb, cplx cb,
                             cplx cbdag, double nc, double nb) {
    const cplx ccc = cc - c * c;
    const cplx cbb = bb - b * b;
    const cplx ccb = cb - c * b;
    const cplx ccbd = cbdag - c * std::conj(b);
    const double cnc = nc - std::norm(c);
    const double cnb = nb - std::norm(b);

    GaussianState s = GaussianState::vacuum(2);
    s.d(0) = std::sqrt(2.0) * c.real();
    s.d(1) = std::sqrt(2.0) * c.imag();
    s.d(2) = std::sqrt(2.0) * b.real();
    s.d(3) = std::sqrt(2.0) * b.imag();

    s.gamma(0, 0) = 1.0 + 2.0 * cnc + 2.0 * ccc.real();
    s.gamma(1, 1) = 1.0 + 2.0 * cnc - 2.0 * ccc.real();
    s.gamma(0, 1) = s.gamma(1, 0) = 2.0 * ccc.imag();
    s.gamma(2, 2) = 1.0 + 2.0 * cnb + 2.0 * cbb.real();
    s.gamma(3, 3) = 1.0 + 2.0 * cnb - 2.0 * cbb.real();
    s.gamma(2, 3) = s.gamma(3, 2) = 2.0 * cbb.imag();

    s.gamma(0, 2) = s.gamma(2, 0) = 2.0 * (ccb.real() + ccbd.real());
    s.gamma(0, 3) = s.gamma(3, 0) = 2.0 * (ccb.imag() - ccbd.imag());
    s.gamma(1, 2) = s.gamma(2, 1) = 2.0 * (ccb.imag() + ccbd.imag());
    s.gamma(1, 3) = s.gamma(3, 1) = 2.0 * (ccbd.real() - ccb.real());
    return s;
}

bool block_path_applies(const FockConfig& cfg) {
    if (!std::holds_alternative<RwaModel>(cfg.model)) return false;
    const auto& m = std::get<RwaModel>(cfg.model);
    return m.b_x == 0.0 && m.b_y == 0.0;
}

void require_noiseless(const FockConfig& cfg) {
    if (std::holds_alternative<RwaModel>(cfg.model) &&
        std::get<RwaModel>(cfg.model).kappa != 0.0)
        throw UnsupportedNoise("fock_evolve: dissipative models are handled by "
                               "lyapunov_integrate");
    if (cfg.cutoff < 2)
        throw InvalidParameter("fock_evolve: cutoff must be >= 2");
}

} // namespace

GaussianState fock_evolve(const FockConfig& cfg, double t) {
    require_noiseless(cfg);
    if (block_path_applies(cfg)) {
        const auto& m = std::get<RwaModel>(cfg.model);
        const auto blocks = evolve_blocks(m, cfg.cutoff, t, cfg.tail_tol);
        const BlockMoments mo = block_moments(blocks);
        return assemble_state({0, 0}, {0, 0}, mo.cc, mo.bb, mo.cb, mo.cbdag,
                              mo.nc, mo.nb);
    }
    const CVec psi0 = full_initial_state(cfg);
    const CVec psi = evolve_full(cfg, t);
    const double leak = full_shell_population(psi, cfg.cutoff) -
                        full_shell_population(psi0, cfg.cutoff);
    if (leak > cfg.tail_tol)
        throw CutoffTooSmall("fock_evolve: population leaked into the "
                             "truncation shell");
    const FullMoments mo = full_moments(psi, cfg.cutoff);
    return assemble_state(mo.c, mo.b, mo.cc, mo.bb, mo.cb, mo.cbdag, mo.nc,
                          mo.nb);
}

double fock_wick_residual(const FockConfig& cfg, double t) {
    require_noiseless(cfg);
    const int L = cfg.cutoff;
    const CVec psi = evolve_full(cfg, t);

    // sparse quadrature operators in the product basis
    const auto make_quad = [L](int mode, bool momentum) {
        std::vector<Eigen::Triplet<cplx>> trip;
        for (int nc = 0; nc < L; ++nc)
            for (int nb = 0; nb < L; ++nb) {
                const int n = mode == 0 ? nc : nb;
                if (n + 1 >= L) continue;
                const int row = nc * L + nb;
                const int up = mode == 0 ? (nc + 1) * L + nb : nc * L + nb + 1;
                // X = (a + a^dag)/sqrt2, P = i(a^dag - a)/sqrt2
                const cplx raise = momentum ? cplx(0.0, 1.0) : cplx(1.0, 0.0);
                const double v = std::sqrt((n + 1.0) / 2.0);
                trip.emplace_back(up, row, raise * v);
                trip.emplace_back(row, up, std::conj(raise) * v);
            }
        Eigen::SparseMatrix<cplx> op(L * L, L * L);
        op.setFromTriplets(trip.begin(), trip.end());
        return op;
    };

    const auto xc = make_quad(0, false);
    const auto xm = make_quad(1, false);
    const CVec xc_psi = xc * psi;
    const CVec xm_psi = xm * psi;
    const CVec xc2_psi = xc * xc_psi;
    const CVec xm2_psi = xm * xm_psi;

    const double m_xc = psi.dot(xc_psi).real();
    const double m_xm = psi.dot(xm_psi).real();
    const double xc2 = xc_psi.squaredNorm() - m_xc * m_xc;
    const double xm2 = xm_psi.squaredNorm() - m_xm * m_xm;
    const double xcxm = xc_psi.dot(xm_psi).real() - m_xc * m_xm;
    const double xc4 = xc2_psi.squaredNorm();
    const double xc2xm2 = xc2_psi.dot(xm2_psi).real();

    if (std::abs(m_xc) > 1e-10 || std::abs(m_xm) > 1e-10)
        throw InvalidParameter("fock_wick_residual: zero-mean states only");
    const double res4 = std::abs(xc4 - 3.0 * xc2 * xc2);
    const double res22 = std::abs(xc2xm2 - (xc2 * xm2 + 2.0 * xcxm * xcxm));
    return std::max(res4, res22);
}

// ---------------------------------------------------------------------------
// Lyapunov moment integration
// ---------------------------------------------------------------------------

namespace {

struct MomentOde {
    Eigen::Matrix4d a;
    Eigen::Matrix4d diffusion;
    Eigen::Vector4d drive;

    static MomentOde from_model(const RwaModel& m) {
        MomentOde ode;
        const double wc = m.omega_c, wm = m.omega_m(), g = m.g, k = m.kappa;
        ode.a << -k / 2, wc, 0, g,
                 -wc, -k / 2, -g, 0,
                 0, g, -k / 2, wm,
                 -g, 0, -wm, -k / 2;
        ode.diffusion =
            k * (2.0 * m.n_noise + 1.0) * Eigen::Matrix4d::Identity();
        ode.drive << 0.0, 0.0, -m.b_y / std::sqrt(2.0), m.b_x / std::sqrt(2.0);
        return ode;
    }
};

struct MomentState {
    Eigen::Vector4d mean;
    Eigen::Matrix4d cov;

    MomentState operator+(const MomentState& o) const {
        return {mean + o.mean, cov + o.cov};
    }
    MomentState operator*(double s) const { return {s * mean, s * cov}; }
};

MomentState derivative(const MomentOde& ode, const MomentState& y) {
    return {ode.a * y.mean + ode.drive,
            ode.a * y.cov + y.cov * ode.a.transpose() + ode.diffusion};
}

double error_ratio(const MomentState& err, const MomentState& y, double atol,
                   double rtol) {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
        worst = std::max(worst, std::abs(err.mean(i)) /
                                    (atol + rtol * std::abs(y.mean(i))));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            worst = std::max(worst, std::abs(err.cov(i, j)) /
                                        (atol + rtol * std::abs(y.cov(i, j))));
    return worst;
}

} // namespace

GaussianState lyapunov_integrate(const RwaModel& m, double t, double rtol) {
    m.validate();
    if (t < 0.0) throw InvalidModel("lyapunov_integrate: t must be >= 0");
    const MomentOde ode = MomentOde::from_model(m);

    MomentState y{Eigen::Vector4d::Zero(), Eigen::Matrix4d::Identity()};
    y.cov(2, 2) = std::exp(-2.0 * m.r0);
    y.cov(3, 3) = std::exp(2.0 * m.r0);

    // Dormand-Prince 5(4) coefficients (autonomous system, nodes unused)
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double atol = 1e-14;
    const double freq = std::max({m.omega_c, m.omega_m(), 1.0});
    double h = std::min(t > 0.0 ? t : 1.0, 0.1 / freq);
    double done = 0.0;
    while (done < t) {
        h = std::min(h, t - done);
        const MomentState k1 = derivative(ode, y);
        const MomentState k2 = derivative(ode, y + k1 * (a21 * h));
        const MomentState k3 = derivative(ode, y + k1 * (a31 * h) + k2 * (a32 * h));
        const MomentState k4 =
            derivative(ode, y + k1 * (a41 * h) + k2 * (a42 * h) + k3 * (a43 * h));
        const MomentState k5 =
            derivative(ode, y + k1 * (a51 * h) + k2 * (a52 * h) +
                                k3 * (a53 * h) + k4 * (a54 * h));
        const MomentState k6 =
            derivative(ode, y + k1 * (a61 * h) + k2 * (a62 * h) +
                                k3 * (a63 * h) + k4 * (a64 * h) + k5 * (a65 * h));
        const MomentState y5 = y + (k1 * b1 + k3 * b3 + k4 * b4 + k5 * b5 +
                                    k6 * b6) * h;
        const MomentState k7 = derivative(ode, y5);
        const MomentState err = (k1 * e1 + k3 * e3 + k4 * e4 + k5 * e5 +
                                 k6 * e6 + k7 * e7) * h;

        // error-per-unit-step keeps the accumulated drift ~ rtol * t
        const double ratio = error_ratio(err, y5, atol, rtol) / std::max(h, 1e-300);
        if (ratio <= 1.0) {
            y = y5;
            done += h;
        }
        const double grow = ratio > 0.0 ? 0.9 * std::pow(ratio, -0.2) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
        if (h < 1e-14 * std::max(t, 1.0))
            throw Error("lyapunov_integrate: step size underflow");
    }

    GaussianState out = GaussianState::vacuum(2);
    out.d = y.mean;  // quadrature means are the displacement vector
    out.gamma = 0.5 * (y.cov + y.cov.transpose());
    return out;
}

} // namespace magmetro
