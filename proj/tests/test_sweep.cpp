#include <cmath>

#include <doctest.h>

#include "magmetro/sweep.hpp"

using namespace magmetro;

namespace {

std::vector<double> geometric(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = lo * std::pow(hi / lo, i / (n - 1.0));
    return g;
}

RwaModel resonant(double g = 0.05) {
    RwaModel m;
    m.omega_c = 2.0;
    m.b0 = 2.0;
    m.g = g;
    return m;
}

} // namespace

TEST_CASE("loglog_fit recovers exact power laws") {
    const std::vector<double> x = {1.0, 2.0, 4.0, 8.0};
    std::vector<double> y;
    for (double v : x) y.push_back(v * v);
    auto fit = loglog_fit(x, y);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fit.n_points == 4);

    y.clear();
    for (double v : x) y.push_back(3.7 / v);
    fit = loglog_fit(x, y);
    CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(std::exp(fit.intercept) == doctest::Approx(3.7).epsilon(1e-12));
}

TEST_CASE("loglog_fit input validation") {
    const std::vector<double> two = {1.0, 2.0};
    CHECK_THROWS_AS(loglog_fit(two, two), TooFewPoints);
    const std::vector<double> x = {1.0, 2.0, 3.0};
    const std::vector<double> bad = {1.0, -2.0, 3.0};
    CHECK_THROWS_AS(loglog_fit(x, bad), NonPositiveData);
    const std::vector<double> zero = {1.0, 0.0, 3.0};
    CHECK_THROWS_AS(loglog_fit(x, zero), NonPositiveData);
}

TEST_CASE("peak_find locates a smooth maximum") {
    const auto f = [](double t) { return -(t - 3.0) * (t - 3.0); };
    const auto peak = peak_find(f, 0.0, 10.0, 64);
    CHECK(std::abs(peak.t_peak - 3.0) < 1e-6);
    CHECK(peak.f_peak == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
}

TEST_CASE("peak_find rejects flat functions") {
    CHECK_THROWS_AS(peak_find([](double) { return 4.2; }, 0.0, 1.0, 32),
                    FlatFunction);
    CHECK_THROWS_AS(peak_find([](double) { return 4.2; }, 0.0, 1.0, 8),
                    InvalidParameter);
}

TEST_CASE("rescaled CFI peaks at the transfer time in the noiseless case") {
    RwaModel m = resonant();
    m.r0 = 1.0;
    const double ts = t_star(m);
    const int grid_n = 200;
    const auto rescaled = [&m](double t) {
        const auto p = evolve_cavity(m, t).params;
        const double w = 2.0 * p.n_th + 1.0, sh = std::sinh(2.0 * p.r);
        return w * w * sh * sh / (4.0 * (p.n_th + 1.0) * (p.n_th + 1.0));
    };
    const auto peak = peak_find(rescaled, 0.5 * ts, 1.5 * ts, grid_n);
    CHECK(std::abs(peak.t_peak - ts) < 0.01 * (ts / grid_n));
}

TEST_CASE("dissipative rescaled CFI peak: frozen regression point") {
    RwaModel m = resonant();
    m.r0 = 1.0;
    m.kappa = 0.001;
    m.n_noise = 30.0;
    const double ts = t_star(m);
    const auto rescaled = [&m](double t) {
        const auto p = evolve_cavity(m, t).params;
        const double w = 2.0 * p.n_th + 1.0, sh = std::sinh(2.0 * p.r);
        return w * w * sh * sh / (4.0 * (p.n_th + 1.0) * (p.n_th + 1.0));
    };
    const auto peak = peak_find(rescaled, 0.5 * ts, 1.5 * ts, 2000);
    // frozen from an arbitrary-precision scan of the same closed form
    CHECK(peak.t_peak == doctest::Approx(27.828348938401842).epsilon(1e-7));
    CHECK(peak.f_peak == doctest::Approx(0.46944941750647067).epsilon(1e-9));
}

TEST_CASE("noiseless HL experiment reproduces the exact analytic records") {
    RwaModel m = resonant();
    const auto grid = geometric(0.5, 3.0, 12);
    const auto ex = snl_hl_experiment(m, grid);
    const double ts = t_star(m);
    for (int i = 0; i < 12; ++i) {
        const double r0 = grid[i];
        const double sh = std::sinh(2.0 * r0);
        CHECK(ex.records[i].f_c ==
              doctest::Approx(0.25 * sh * sh * ts * ts).epsilon(1e-9));
        CHECK(ex.records[i].n_c ==
              doctest::Approx(std::sinh(r0) * std::sinh(r0)).epsilon(1e-9));
        CHECK(ex.records[i].n_th == doctest::Approx(0.0).scale(1.0));
    }
    // the exact relation F = N (N+1) t*^2 fitted on this grid
    // (frozen OLS value; the asymptotic slope 2 needs larger r0)
    CHECK(ex.fit.slope == doctest::Approx(1.7502903608).epsilon(1e-7));
    CHECK(ex.fit.r_squared == doctest::Approx(0.9951970453).epsilon(1e-7));
}

TEST_CASE("noiseless HL experiment reaches slope 2 on an asymptotic grid") {
    const auto ex = snl_hl_experiment(resonant(), geometric(3.0, 6.0, 12));
    CHECK(ex.fit.slope == doctest::Approx(2.0).epsilon(0.005));
    CHECK(ex.fit.r_squared > 0.999);
}

TEST_CASE("HL experiment input validation") {
    const auto short_grid = geometric(0.5, 3.0, 5);
    CHECK_THROWS_AS(snl_hl_experiment(resonant(), short_grid), TooFewPoints);
    std::vector<double> bad = geometric(0.5, 3.0, 8);
    std::swap(bad[2], bad[3]);
    CHECK_THROWS_AS(snl_hl_experiment(resonant(), bad), InvalidParameter);
}

TEST_CASE("sweeps are deterministic across thread counts") {
    const auto grid = geometric(0.5, 2.0, 9);
    RwaModel m = resonant();
    m.kappa = 0.001;
    m.n_noise = 30.0;
    const auto a = snl_hl_experiment(m, grid, 1);
    const auto b = snl_hl_experiment(m, grid, 2);
    for (int i = 0; i < 9; ++i) {
        CHECK(a.records[i].f_c == b.records[i].f_c);
        CHECK(a.records[i].n_c == b.records[i].n_c);
        CHECK(a.records[i].t == b.records[i].t);
    }
}

TEST_CASE("nu scaling check approaches 4/(2+nu)") {
    struct Case { double nu, lo, hi; };
    for (const Case c : {Case{0.0, 2.0, 4.0}, Case{1.0, 2.0, 4.0},
                         Case{2.0, 2.0, 4.0}, Case{4.0, 1.5, 3.0}}) {
        std::vector<double> grid(12);
        for (int i = 0; i < 12; ++i)
            grid[i] = c.lo + (c.hi - c.lo) * i / 11.0;
        const auto res = nu_scaling_check(c.nu, grid);
        CHECK(res.expected_slope == doctest::Approx(4.0 / (2.0 + c.nu)));
        CHECK(std::abs(res.fit.slope - res.expected_slope) < 0.1);
        CHECK(res.fit.r_squared > 0.99);
    }
}

TEST_CASE("nu scaling check needs a wide enough grid") {
    std::vector<double> narrow = {1.0, 1.1, 1.2, 1.3};
    CHECK_THROWS_AS(nu_scaling_check(0.0, narrow), InvalidParameter);
}

TEST_CASE("critical scaling experiment recovers the -2 and -1 exponents") {
    const auto grid = geometric(1e-5, 1e-3, 10);
    const auto ex = critical_scaling_experiment(2.0, 2.0, grid);
    CHECK(ex.fit_fc_t_star.slope == doctest::Approx(-2.0).epsilon(0.025));
    CHECK(ex.fit_fc_quarter.slope == doctest::Approx(-1.0).epsilon(0.05));
    CHECK(ex.fit_fc_t_star.r_squared > 0.99);
    CHECK(ex.fit_fc_quarter.r_squared > 0.99);
    // QFI scales the same way
    CHECK(ex.fit_fq_t_star.slope == doctest::Approx(-2.0).epsilon(0.075));
    CHECK(ex.fit_fq_quarter.slope == doctest::Approx(-1.0).epsilon(0.075));
}
