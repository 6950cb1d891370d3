#ifndef MAGMETRO_SWEEP_HPP
#define MAGMETRO_SWEEP_HPP

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "magmetro/critical.hpp"
#include "magmetro/rwa.hpp"

namespace magmetro {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;   // of log y vs log x (natural logs)
    double r_squared = 0.0;
    int n_points = 0;
};

// Ordinary least squares on (log x, log y); inputs must be positive.
FitResult loglog_fit(std::span<const double> x, std::span<const double> y);

struct PeakResult {
    double t_peak = 0.0;
    double f_peak = 0.0;
};

// Coarse grid scan followed by parabolic refinement of the best triple.
PeakResult peak_find(const std::function<double(double)>& f, double t_lo,
                     double t_hi, int grid_n);

struct SweepRecord {
    double t = 0.0;
    double f_q = 0.0;
    double f_c = 0.0;
    double entropy = 0.0;  // cavity von Neumann entropy, bits
    double n_th = 0.0;
    double r = 0.0;
    double phi = 0.0;
    double n_c = 0.0;
};

// Full record (Fisher information via finite differences over the B-family)
// at one evaluation time.
SweepRecord rwa_record(const RwaModel& m, double t);
SweepRecord critical_record(const CriticalModel& m, double t);

struct HlExperiment {
    std::vector<SweepRecord> records;  // one per r0, in input order
    FitResult fit;                     // log F_C vs log N_c
};

// Fisher information of the cavity at the transfer time versus photon
// number, swept over the initial magnon squeezing. With damping the
// evaluation time is refined to the peak of F_C/t^2 near pi/(2g).
HlExperiment snl_hl_experiment(const RwaModel& base,
                               std::span<const double> r0_grid,
                               int threads = 0);

struct NuCheckResult {
    std::vector<SweepRecord> records;
    FitResult fit;
    double expected_slope = 0.0;  // 4 / (2 + nu)
};

// Synthetic family r(B) = B, phi(B) = B, n_th = exp(nu r): the QFI slope
// against N_c must approach 4/(2+nu).
NuCheckResult nu_scaling_check(double nu, std::span<const double> r_grid);

struct CriticalSweepRow {
    double g = 0.0;
    double gc_minus_g = 0.0;
    double t_star = 0.0;
    double f_q = 0.0;   // at the evaluation time (t_star or t_star/4)
    double f_c = 0.0;
};

struct CriticalSweepResult {
    std::vector<CriticalSweepRow> at_t_star;
    std::vector<CriticalSweepRow> at_quarter;
    // slopes of the time-rescaled F/t^2 against (g_c - g)
    FitResult fit_fc_t_star, fit_fq_t_star;
    FitResult fit_fc_quarter, fit_fq_quarter;
};

// Sweeps the closest approach to criticality over a geometric grid of
// (g_c - g)/g_c and fits the scaling exponents at t* and t*/4.
CriticalSweepResult critical_scaling_experiment(double omega_c, double omega_m,
                                                std::span<const double> eps_grid,
                                                int threads = 0);

// Deterministic parallel map: f(i) is evaluated for i in [0, n) on up to
// `threads` workers (0 = hardware concurrency); results land in input order.
void parallel_for_index(int n, int threads,
                        const std::function<void(int)>& f);

} // namespace magmetro

#endif
