#include <benchmark/benchmark.h>

#include "magmetro/critical.hpp"
#include "magmetro/oracles.hpp"
#include "magmetro/rwa.hpp"
#include "magmetro/sweep.hpp"

namespace {

magmetro::RwaModel resonant_model() {
    magmetro::RwaModel m;
    m.omega_c = 2.0;
    m.b0 = 2.0;
    m.g = 0.05;
    m.r0 = 1.0;
    return m;
}

void BM_EvolveCavity(benchmark::State& state) {
    const auto m = resonant_model();
    double t = 1.0;
    for (auto _ : state) {
        auto ev = magmetro::evolve_cavity(m, t);
        benchmark::DoNotOptimize(ev.params.n_th);
        t += 1e-3;
    }
}
BENCHMARK(BM_EvolveCavity);

void BM_RwaFisherRecord(benchmark::State& state) {
    const auto m = resonant_model();
    for (auto _ : state) {
        auto rec = magmetro::rwa_record(m, 10.0);
        benchmark::DoNotOptimize(rec.f_c);
    }
}
BENCHMARK(BM_RwaFisherRecord);

void BM_GammaCClosed(benchmark::State& state) {
    const magmetro::CriticalModel m{2.0, 2.0, 0.999};
    double t = 1.0;
    for (auto _ : state) {
        auto g = magmetro::gamma_c_closed(m, t);
        benchmark::DoNotOptimize(g.gamma(0, 0));
        t += 1e-3;
    }
}
BENCHMARK(BM_GammaCClosed);

void BM_CriticalFisher(benchmark::State& state) {
    const magmetro::CriticalModel m{2.0, 2.0, 0.9999};
    const double ts = magmetro::t_star_critical(m, 1);
    for (auto _ : state) {
        auto fi = magmetro::critical_fisher_at(m, ts);
        benchmark::DoNotOptimize(fi.f_c);
    }
}
BENCHMARK(BM_CriticalFisher);

void BM_FockOracleRwa(benchmark::State& state) {
    auto m = resonant_model();
    m.r0 = 0.6;
    magmetro::FockConfig cfg;
    cfg.model = m;
    cfg.cutoff = static_cast<int>(state.range(0));
    const double ts = magmetro::t_star(m);
    for (auto _ : state) {
        auto s = magmetro::fock_evolve(cfg, ts);
        benchmark::DoNotOptimize(s.gamma(0, 0));
    }
}
BENCHMARK(BM_FockOracleRwa)->Arg(20)->Arg(40)->Arg(80);

void BM_LyapunovIntegrate(benchmark::State& state) {
    auto m = resonant_model();
    m.kappa = 0.001;
    m.n_noise = 30.0;
    const double ts = magmetro::t_star(m);
    for (auto _ : state) {
        auto s = magmetro::lyapunov_integrate(m, 2.0 * ts);
        benchmark::DoNotOptimize(s.gamma(0, 0));
    }
}
BENCHMARK(BM_LyapunovIntegrate);

} // namespace

BENCHMARK_MAIN();
