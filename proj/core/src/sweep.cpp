#include "magmetro/sweep.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace magmetro {

FitResult loglog_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw InvalidParameter("loglog_fit: x and y sizes differ");
    const int n = static_cast<int>(x.size());
    if (n < 3) throw TooFewPoints("loglog_fit: need at least 3 points");
    std::vector<double> lx(n), ly(n);
    for (int i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw NonPositiveData("loglog_fit: all points must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) { mx += lx[i]; my += ly[i]; }
    mx /= n; my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) throw NonPositiveData("loglog_fit: x values are all equal");
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssres = 0.0;
    for (int i = 0; i < n; ++i) {
        const double e = ly[i] - (fit.intercept + fit.slope * lx[i]);
        ssres += e * e;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ssres / syy : 1.0;
    fit.n_points = n;
    return fit;
}

PeakResult peak_find(const std::function<double(double)>& f, double t_lo,
                     double t_hi, int grid_n) {
    if (!(t_lo < t_hi)) throw InvalidParameter("peak_find: need t_lo < t_hi");
    if (grid_n < 16) throw InvalidParameter("peak_find: grid_n must be >= 16");

    const double step = (t_hi - t_lo) / grid_n;
    std::vector<double> vals(grid_n + 1);
    int best = 0;
    double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
    for (int i = 0; i <= grid_n; ++i) {
        const double t = t_lo + i * step;
        vals[i] = f(t);
        vmin = std::min(vmin, vals[i]);
        vmax = std::max(vmax, vals[i]);
        if (vals[i] > vals[best]) best = i;
    }
    if (vmax - vmin <= 1e-12 * std::max({1.0, std::abs(vmax), std::abs(vmin)}))
        throw FlatFunction("peak_find: function is flat on the window");

    double tp = t_lo + best * step, fp = vals[best];
    if (best > 0 && best < grid_n) {
        // parabola through the best triple, then two shrink-refit rounds
        double h = step, tc = tp;
        for (int round = 0; round < 3; ++round) {
            const double fm = f(tc - h), f0 = f(tc), fpv = f(tc + h);
            const double denom = fm - 2.0 * f0 + fpv;
            if (denom < 0.0) {
                const double shift = 0.5 * h * (fm - fpv) / denom;
                tc += std::clamp(shift, -h, h);
            }
            h *= 0.125;
        }
        const double fc = f(tc);
        if (fc > fp) { tp = tc; fp = fc; }
    }
    return {tp, fp};
}

void parallel_for_index(int n, int threads, const std::function<void(int)>& f) {
    if (threads <= 0) {
        const unsigned hc = std::thread::hardware_concurrency();
        threads = hc > 0 ? static_cast<int>(hc) : 2;
    }
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    f(i);
                } catch (...) {
                    std::scoped_lock lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

SweepRecord rwa_record(const RwaModel& m, double t) {
    const StateFamily family = [&m, t](double b) {
        RwaModel shifted = m;
        shifted.b = b;
        return evolve_cavity(shifted, t).params;
    };
    const StandardForm p = family(m.b);
    const ParamDerivatives dp = derivatives_fd(family, m.b);
    SweepRecord rec;
    rec.t = t;
    rec.f_q = qfi(p, dp);
    rec.f_c = cfi_optimal(p, dp);
    rec.entropy = entanglement_entropy(p.n_th);
    rec.n_th = p.n_th;
    rec.r = p.r;
    rec.phi = p.phi;
    rec.n_c = photon_number(p);
    return rec;
}

SweepRecord critical_record(const CriticalModel& m, double t) {
    const StandardForm p = to_standard_form(gamma_c_closed(m, t));
    const FisherResult fi = critical_fisher_at(m, t);
    SweepRecord rec;
    rec.t = t;
    rec.f_q = fi.f_q;
    rec.f_c = fi.f_c;
    rec.entropy = entanglement_entropy(p.n_th);
    rec.n_th = p.n_th;
    rec.r = p.r;
    rec.phi = p.phi;
    rec.n_c = photon_number(p);
    return rec;
}

HlExperiment snl_hl_experiment(const RwaModel& base,
                               std::span<const double> r0_grid, int threads) {
    base.validate();
    if (r0_grid.size() < 8)
        throw TooFewPoints("snl_hl_experiment: need at least 8 r0 values");
    for (size_t i = 1; i < r0_grid.size(); ++i)
        if (!(r0_grid[i] > r0_grid[i - 1]))
            throw InvalidParameter("snl_hl_experiment: r0 grid must be strictly "
                                   "increasing");

    const double ts = t_star(base);
    const int n = static_cast<int>(r0_grid.size());
    HlExperiment out;
    out.records.resize(n);
    parallel_for_index(n, threads, [&](int i) {
        RwaModel m = base;
        m.r0 = r0_grid[i];
        double t_eval = ts;
        if (m.kappa > 0.0) {
            // dissipation shifts the peak of the rescaled CFI slightly
            const auto rescaled = [&m](double t) {
                const auto p = evolve_cavity(m, t).params;
                const double w = 2.0 * p.n_th + 1.0, sh = std::sinh(2.0 * p.r);
                return w * w * sh * sh / (4.0 * (p.n_th + 1.0) * (p.n_th + 1.0));
            };
            t_eval = peak_find(rescaled, 0.5 * ts, 1.5 * ts, 400).t_peak;
        }
        out.records[i] = rwa_record(m, t_eval);
    });

    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = out.records[i].n_c;
        ys[i] = out.records[i].f_c;
    }
    out.fit = loglog_fit(xs, ys);
    return out;
}

NuCheckResult nu_scaling_check(double nu, std::span<const double> r_grid) {
    if (nu < 0.0) throw InvalidParameter("nu_scaling_check: nu must be >= 0");
    if (r_grid.size() < 3)
        throw TooFewPoints("nu_scaling_check: need at least 3 grid points");

    NuCheckResult out;
    out.expected_slope = 4.0 / (2.0 + nu);
    const StateFamily family = [nu](double b) {
        StandardForm p;
        p.r = b;
        p.phi = wrap_angle(b);
        p.n_th = std::exp(nu * b);
        return p;
    };
    std::vector<double> xs, ys;
    for (double b : r_grid) {
        const StandardForm p = family(b);
        const ParamDerivatives dp = derivatives_fd(family, b);
        SweepRecord rec;
        rec.f_q = qfi(p, dp);
        rec.f_c = cfi_optimal(p, dp);
        rec.entropy = entanglement_entropy(p.n_th);
        rec.n_th = p.n_th;
        rec.r = p.r;
        rec.phi = p.phi;
        rec.n_c = photon_number(p);
        out.records.push_back(rec);
        xs.push_back(rec.n_c);
        ys.push_back(rec.f_q);
    }
    const double span = std::log10(xs.back() / xs.front());
    if (span < 1.5)
        throw InvalidParameter("nu_scaling_check: r grid must span at least "
                               "1.5 decades of N_c");
    out.fit = loglog_fit(xs, ys);
    return out;
}

CriticalSweepResult critical_scaling_experiment(double omega_c, double omega_m,
                                                std::span<const double> eps_grid,
                                                int threads) {
    if (eps_grid.size() < 3)
        throw TooFewPoints("critical_scaling_experiment: need >= 3 grid points");
    const double gc = std::sqrt(omega_c * omega_m) / 2.0;
    const int n = static_cast<int>(eps_grid.size());

    CriticalSweepResult out;
    out.at_t_star.resize(n);
    out.at_quarter.resize(n);
    parallel_for_index(n, threads, [&](int i) {
        const double eps = eps_grid[i];
        if (!(eps > 0.0) || !(eps < 1.0))
            throw InvalidParameter("critical_scaling_experiment: grid values "
                                   "must lie in (0, 1)");
        CriticalModel m{omega_c, omega_m, gc * (1.0 - eps)};
        const CriticalFisher fi = fisher_at_special_times(m);
        out.at_t_star[i] = {m.g, gc - m.g, fi.t_star, fi.at_t_star.f_q,
                            fi.at_t_star.f_c};
        out.at_quarter[i] = {m.g, gc - m.g, fi.t_star, fi.at_quarter.f_q,
                             fi.at_quarter.f_c};
    });

    const auto fit_rescaled = [&](const std::vector<CriticalSweepRow>& rows,
                                  bool use_fc, double frac) {
        std::vector<double> xs(n), ys(n);
        for (int i = 0; i < n; ++i) {
            const double t_eval = frac * rows[i].t_star;
            xs[i] = rows[i].gc_minus_g;
            ys[i] = (use_fc ? rows[i].f_c : rows[i].f_q) / (t_eval * t_eval);
        }
        return loglog_fit(xs, ys);
    };
    out.fit_fc_t_star = fit_rescaled(out.at_t_star, true, 1.0);
    out.fit_fq_t_star = fit_rescaled(out.at_t_star, false, 1.0);
    out.fit_fc_quarter = fit_rescaled(out.at_quarter, true, 0.25);
    out.fit_fq_quarter = fit_rescaled(out.at_quarter, false, 0.25);
    return out;
}

} // namespace magmetro
