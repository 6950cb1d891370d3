#include <cmath>
#include <random>

#include <doctest.h>

#include "magmetro/gaussian.hpp"

using namespace magmetro;

namespace {

StandardForm random_params(std::mt19937& rng) {
    std::uniform_real_distribution<double> re(-2.0, 2.0);
    std::uniform_real_distribution<double> rr(0.0, 2.0);
    std::uniform_real_distribution<double> rphi(-M_PI, M_PI);
    std::uniform_real_distribution<double> rn(0.0, 4.0);
    StandardForm p;
    p.alpha = {re(rng), re(rng)};
    p.r = rr(rng);
    p.phi = rphi(rng);
    p.n_th = rn(rng);
    return p;
}

} // namespace

TEST_CASE("vacuum maps to the trivial standard form and back") {
    const auto p = to_standard_form(GaussianState::vacuum(1));
    CHECK(p.alpha == std::complex<double>(0.0, 0.0));
    CHECK(p.r == 0.0);
    CHECK(p.phi == 0.0);
    CHECK(p.n_th == 0.0);

    const auto s = from_standard_form(StandardForm{});
    CHECK(s.gamma.isIdentity(1e-15));
    CHECK(s.d.isZero(0.0));
}

TEST_CASE("pure squeezed state: gamma = diag(e^{-2r}, e^{2r})") {
    GaussianState s = GaussianState::vacuum(1);
    s.gamma(0, 0) = std::exp(-1.2);
    s.gamma(1, 1) = std::exp(1.2);
    const auto p = to_standard_form(s);
    CHECK(p.r == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(p.phi == doctest::Approx(0.0));
    CHECK(p.n_th == doctest::Approx(0.0));

    const auto back = from_standard_form(StandardForm{{0, 0}, 0.6, 0.0, 0.0});
    CHECK(back.gamma(0, 0) == doctest::Approx(std::exp(-1.2)).epsilon(1e-14));
    CHECK(back.gamma(1, 1) == doctest::Approx(std::exp(1.2)).epsilon(1e-14));
    CHECK(back.gamma(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("isotropic thermal state with displacement") {
    GaussianState s = GaussianState::vacuum(1);
    s.gamma *= 3.0;
    s.d << std::sqrt(2.0), 0.0;
    const auto p = to_standard_form(s);
    CHECK(p.alpha.real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.alpha.imag() == doctest::Approx(0.0));
    CHECK(p.r == doctest::Approx(0.0));
    CHECK(p.n_th == doctest::Approx(1.0).epsilon(1e-14));

    const auto back = from_standard_form(StandardForm{{1.0, 0.0}, 0.0, 0.0, 1.0});
    CHECK((back.gamma - 3.0 * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff()
          < 1e-14);
    CHECK(back.d(0) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("round trip preserves (|alpha|, r, n_th, phi mod 2pi) on 1000 draws") {
    std::mt19937 rng(20240811);
    for (int i = 0; i < 1000; ++i) {
        StandardForm p = random_params(rng);
        if (p.r <= 1e-8) p.r += 0.1;
        const auto q = to_standard_form(from_standard_form(p));
        CHECK(std::abs(q.alpha - p.alpha) < 1e-10);
        CHECK(std::abs(q.r - p.r) < 1e-10);
        CHECK(std::abs(q.n_th - p.n_th) < 1e-10 * (1.0 + p.n_th));
        CHECK(std::abs(wrap_angle(q.phi - p.phi)) < 1e-10);
    }
}

TEST_CASE("det(gamma) = (2 n_th + 1)^2") {
    std::mt19937 rng(7);
    for (int i = 0; i < 200; ++i) {
        const StandardForm p = random_params(rng);
        const auto s = from_standard_form(p);
        const double det = s.gamma.determinant();
        const double expected = (2.0 * p.n_th + 1.0) * (2.0 * p.n_th + 1.0);
        CHECK(det == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("photon number") {
    CHECK(photon_number(StandardForm{}) == 0.0);
    // pure squeezed vacuum: N = sinh^2 r for any phase
    for (double phi : {0.0, 1.0, -2.5}) {
        const StandardForm p{{0, 0}, 0.8, phi, 0.0};
        CHECK(photon_number(p) ==
              doctest::Approx(std::sinh(0.8) * std::sinh(0.8)).epsilon(1e-14));
    }
    // frozen high-precision evaluation of the N_c formula
    const StandardForm p{{1.0, 0.0}, 0.5, 0.0, 0.2};
    CHECK(photon_number(p) ==
          doctest::Approx(1.5801564443706706).epsilon(1e-14));
}

TEST_CASE("photon number is zero iff vacuum") {
    std::mt19937 rng(99);
    for (int i = 0; i < 200; ++i) {
        const StandardForm p = random_params(rng);
        const double n = photon_number(p);
        CHECK(n >= 0.0);
        if (std::abs(p.alpha) > 1e-6 || p.r > 1e-6 || p.n_th > 1e-6)
            CHECK(n > 0.0);
    }
}

TEST_CASE("entanglement entropy values and monotonicity") {
    CHECK(entanglement_entropy(0.0) == 0.0);
    CHECK(entanglement_entropy(1.0) == doctest::Approx(2.0).epsilon(1e-14));
    // frozen arbitrary-precision evaluation
    CHECK(entanglement_entropy(0.5) ==
          doctest::Approx(1.3774437510817343).epsilon(1e-14));
    double prev = entanglement_entropy(0.01);
    for (double n = 0.05; n <= 10.0; n += 0.05) {
        const double s = entanglement_entropy(n);
        CHECK(s > prev);
        prev = s;
    }
    CHECK_THROWS_AS(entanglement_entropy(-0.1), InvalidParameter);
}

TEST_CASE("reduce picks the requested mode and preserves physicality") {
    GaussianState two = GaussianState::vacuum(2);
    two.gamma(2, 2) = std::exp(-1.0);
    two.gamma(3, 3) = std::exp(1.0);

    const auto cavity = reduce(two, 0);
    CHECK(cavity.gamma.isIdentity(1e-15));
    const auto magnon = reduce(two, 1);
    CHECK(magnon.gamma(0, 0) == doctest::Approx(std::exp(-1.0)));
    CHECK(magnon.gamma(1, 1) == doctest::Approx(std::exp(1.0)));

    CHECK_THROWS_AS(reduce(GaussianState::vacuum(1), 0), WrongModeCount);
}

TEST_CASE("reduce of a random physical two-mode state is physical") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    for (int i = 0; i < 100; ++i) {
        // random symplectic-ish state: gamma = S S^T + small thermal floor
        Eigen::Matrix4d a;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) a(r, c) = u(rng);
        GaussianState s = GaussianState::vacuum(2);
        s.gamma = Eigen::Matrix4d::Identity() + a * a.transpose();
        CHECK_NOTHROW(check_physical(s));
        for (int keep : {0, 1})
            CHECK(min_symplectic_eigenvalue(reduce(s, keep).gamma) >= 1.0 - 1e-9);
    }
}

TEST_CASE("non-physical covariance is rejected") {
    GaussianState s = GaussianState::vacuum(1);
    s.gamma *= 0.9;  // det < 1
    CHECK_THROWS_AS(to_standard_form(s), NonPhysicalState);
    CHECK_THROWS_AS(check_physical(s), NonPhysicalState);

    CHECK_THROWS_AS(from_standard_form(StandardForm{{0, 0}, -0.1, 0.0, 0.0}),
                    InvalidParameter);
    CHECK_THROWS_AS(from_standard_form(StandardForm{{0, 0}, 0.1, 0.0, -1.0}),
                    InvalidParameter);
}

TEST_CASE("floating point noise at purity is clamped, not rejected") {
    GaussianState s = GaussianState::vacuum(1);
    s.gamma *= 1.0 - 1e-10;  // sqrt(det) inside the tolerance band
    const auto p = to_standard_form(s);
    CHECK(p.n_th == 0.0);
}

TEST_CASE("two-mode state with wrong shape is rejected") {
    GaussianState s = GaussianState::vacuum(2);
    CHECK_THROWS_AS(to_standard_form(s), WrongModeCount);
}
