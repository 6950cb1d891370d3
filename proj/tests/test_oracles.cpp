#include <cmath>

#include <doctest.h>

#include "magmetro/oracles.hpp"

using namespace magmetro;

namespace {

RwaModel resonant(double g = 0.05, double r0 = 0.6) {
    RwaModel m;
    m.omega_c = 2.0;
    m.b0 = 2.0;
    m.g = g;
    m.r0 = r0;
    return m;
}

double max_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("fock: vacuum input with g = 0 stays vacuum") {
    FockConfig cfg;
    cfg.model = resonant(0.0, 0.0);
    cfg.cutoff = 8;
    for (double t : {0.0, 2.0, 9.0}) {
        const auto s = fock_evolve(cfg, t);
        CHECK(s.gamma.isIdentity(1e-12));
        CHECK(s.d.isZero(1e-12));
    }
}

TEST_CASE("fock vs closed form: resonant transfer of the squeezing") {
    FockConfig cfg;
    cfg.model = resonant(0.05, 0.6);
    cfg.cutoff = 40;
    const double ts = t_star(resonant());
    const auto fock = fock_evolve(cfg, ts);
    const auto closed = evolve_cavity(resonant(0.05, 0.6), ts);
    CHECK(max_diff(reduce(fock, 0).gamma, closed.state.gamma) < 1e-6);
}

TEST_CASE("fock vs symplectic propagator: generic off-resonant joint state") {
    RwaModel m = resonant(0.05, 1.0);
    m.b0 = 2.5;  // omega_m = 2.5
    FockConfig cfg;
    cfg.model = m;
    cfg.cutoff = 60;
    const auto fock = fock_evolve(cfg, 7.0);
    const auto prop = joint_evolve_noiseless(m, 7.0);
    CHECK(max_diff(fock.gamma, prop.gamma) < 1e-6);
}

TEST_CASE("fock vs closed form: critical model at moderate coupling") {
    CriticalModel m{2.0, 2.0, 0.0};
    m.g = 0.1 * m.g_crit();
    FockConfig cfg;
    cfg.model = m;
    cfg.cutoff = 60;
    const auto fock = fock_evolve(cfg, 3.0);
    const auto closed = gamma_c_closed(m, 3.0);
    CHECK(max_diff(reduce(fock, 0).gamma, closed.gamma) < 1e-5);
    // the magnon side and the cross block come from the composition
    const auto joint = joint_evolve_critical(m, 3.0);
    CHECK(max_diff(fock.gamma, joint.gamma) < 1e-5);
}

TEST_CASE("fock arbitrates the transverse displacement phase") {
    RwaModel m = resonant(0.05, 0.0);
    m.b_x = 0.01;
    FockConfig cfg;
    cfg.model = m;
    cfg.cutoff = 40;
    const auto fock = fock_evolve(cfg, 5.0);
    const std::complex<double> alpha_fock{fock.d(0) / std::sqrt(2.0),
                                          fock.d(1) / std::sqrt(2.0)};
    const auto alpha_closed = displacement_nonparallel(m, 5.0);
    CHECK(std::abs(alpha_fock - alpha_closed) < 1e-6);
    CHECK(std::abs(alpha_closed) > 1e-4);  // the comparison is not trivial
}

TEST_CASE("fock cutoff convergence: doubling changes moments below 1e-8") {
    FockConfig small;
    small.model = resonant(0.07, 0.8);
    small.cutoff = 40;
    FockConfig big = small;
    big.cutoff = 80;
    const double t = 0.4 * M_PI / (2.0 * 0.07);
    const auto a = fock_evolve(small, t);
    const auto b = fock_evolve(big, t);
    CHECK(max_diff(a.gamma, b.gamma) < 1e-8);
}

TEST_CASE("fock: deliberately tiny cutoff is rejected") {
    CriticalModel m{2.0, 2.0, 0.0};
    m.g = 0.4 * m.g_crit();
    FockConfig cfg;
    cfg.model = m;
    cfg.cutoff = 6;
    CHECK_THROWS_AS(fock_evolve(cfg, 8.0), CutoffTooSmall);
    // squeezed preparation that does not fit is also rejected
    FockConfig prep;
    prep.model = resonant(0.05, 1.0);
    prep.cutoff = 8;
    CHECK_THROWS_AS(fock_evolve(prep, 1.0), CutoffTooSmall);
}

TEST_CASE("fock states satisfy Wick factorization of fourth moments") {
    FockConfig rwa_cfg;
    rwa_cfg.model = resonant(0.2, 0.4);
    rwa_cfg.cutoff = 28;
    CHECK(fock_wick_residual(rwa_cfg, M_PI / 0.4) < 1e-6);

    CriticalModel m{2.0, 2.0, 0.0};
    m.g = 0.3 * m.g_crit();
    FockConfig crit_cfg;
    crit_cfg.model = m;
    crit_cfg.cutoff = 28;
    CHECK(fock_wick_residual(crit_cfg, 2.5) < 1e-6);
}

TEST_CASE("fock rejects dissipative models") {
    RwaModel m = resonant();
    m.kappa = 0.01;
    FockConfig cfg;
    cfg.model = m;
    CHECK_THROWS_AS(fock_evolve(cfg, 1.0), UnsupportedNoise);
}

TEST_CASE("lyapunov vs symplectic propagator in the noiseless case") {
    RwaModel m = resonant(0.05, 1.0);
    m.b0 = 2.3;
    for (double t : {1.0, 8.0, 20.0}) {
        const auto ode = lyapunov_integrate(m, t, 1e-12);
        const auto prop = joint_evolve_noiseless(m, t);
        CHECK(max_diff(ode.gamma, prop.gamma) < 1e-9);
    }
}

TEST_CASE("lyapunov relaxes to the thermal floor") {
    RwaModel m = resonant(0.05, 1.0);
    m.kappa = 0.05;
    m.n_noise = 30.0;
    const auto s = lyapunov_integrate(m, 1500.0);
    CHECK(max_diff(s.gamma, 61.0 * Eigen::Matrix4d::Identity()) < 1e-6);
}

TEST_CASE("lyapunov cavity block matches the two-process closed form") {
    RwaModel m = resonant(0.05, 1.0);
    m.kappa = 0.001;
    m.n_noise = 30.0;
    const double ts = t_star(m);
    double worst = 0.0;
    for (double t : {0.3 * ts, ts, 1.7 * ts}) {
        const auto ode = reduce(lyapunov_integrate(m, t), 0);
        const auto closed = evolve_cavity(m, t).state;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                worst = std::max(worst,
                                 std::abs(ode.gamma(i, j) - closed.gamma(i, j)) /
                                     (1.0 + std::abs(closed.gamma(i, j))));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("lyapunov preserves physicality along the way") {
    RwaModel m = resonant(0.08, 1.2);
    m.kappa = 0.01;
    m.n_noise = 5.0;
    for (double t : {0.5, 5.0, 25.0, 60.0}) {
        const auto s = lyapunov_integrate(m, t);
        CHECK(min_symplectic_eigenvalue(s.gamma) >= 1.0 - 1e-9);
    }
}

TEST_CASE("lyapunov mean reproduces the transverse displacement closed form") {
    RwaModel m = resonant(0.05, 0.0);
    m.b_x = 0.01;
    m.b_y = 0.003;
    SUBCASE("noiseless") {}
    SUBCASE("dissipative") { m.kappa = 0.02; }
    for (double t : {2.0, 5.0, 15.0}) {
        const auto s = lyapunov_integrate(m, t, 1e-12);
        const std::complex<double> alpha_ode{s.d(0) / std::sqrt(2.0),
                                             s.d(1) / std::sqrt(2.0)};
        CHECK(std::abs(alpha_ode - displacement_nonparallel(m, t)) < 1e-9);
    }
}
