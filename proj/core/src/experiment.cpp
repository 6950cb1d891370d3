#include "magmetro/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "magmetro/oracles.hpp"

namespace magmetro {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

// --- config parsing helpers ------------------------------------------------

[[noreturn]] void bad_config(const std::string& msg) {
    throw ConfigInvalid("config: " + msg);
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) bad_config("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        bad_config(std::string("parse error: ") + e.what());
    }
    if (!j.is_object()) bad_config("top level must be an object");
    return j;
}

void check_known_fields(const json& j, const std::set<std::string>& allowed,
                        const std::string& where) {
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key))
            bad_config("unknown field '" + key + "' in " + where);
}

double need_number(const json& j, const std::string& field) {
    if (!j.contains(field)) bad_config("missing field '" + field + "'");
    if (!j[field].is_number()) bad_config("field '" + field + "' must be a number");
    return j[field].get<double>();
}

double opt_number(const json& j, const std::string& field, double fallback) {
    if (!j.contains(field)) return fallback;
    if (!j[field].is_number()) bad_config("field '" + field + "' must be a number");
    return j[field].get<double>();
}

std::vector<double> parse_grid(const json& j, const std::string& field) {
    if (!j.contains(field)) bad_config("missing field '" + field + "'");
    const json& g = j[field];
    if (!g.is_object()) bad_config("field '" + field + "' must be a grid object");
    check_known_fields(g, {"start", "stop", "count", "spacing"}, field);
    const double start = need_number(g, "start");
    const double stop = need_number(g, "stop");
    if (!g.contains("count") || !g["count"].is_number_integer())
        bad_config(field + ".count must be an integer");
    const int count = g["count"].get<int>();
    if (count < 1) bad_config(field + ".count must be >= 1");
    std::string spacing = "linear";
    if (g.contains("spacing")) {
        if (!g["spacing"].is_string()) bad_config(field + ".spacing must be a string");
        spacing = g["spacing"].get<std::string>();
    }
    std::vector<double> pts(count);
    if (count == 1) {
        pts[0] = start;
    } else if (spacing == "linear") {
        for (int i = 0; i < count; ++i)
            pts[i] = start + (stop - start) * i / (count - 1.0);
    } else if (spacing == "geometric") {
        if (!(start > 0.0) || !(stop > 0.0))
            bad_config(field + ": geometric spacing needs positive bounds");
        const double ratio = std::pow(stop / start, 1.0 / (count - 1.0));
        for (int i = 0; i < count; ++i) pts[i] = start * std::pow(ratio, i);
    } else {
        bad_config(field + ".spacing must be 'linear' or 'geometric'");
    }
    return pts;
}

RwaModel parse_rwa_model(const json& j, bool allow_transverse) {
    RwaModel m;
    m.omega_c = need_number(j, "omega_c");
    m.b0 = need_number(j, "b0");
    m.b = opt_number(j, "b", 0.0);
    m.g = need_number(j, "g");
    m.kappa = opt_number(j, "kappa", 0.0);
    m.n_noise = opt_number(j, "n_noise", 0.0);
    m.r0 = opt_number(j, "r0", 0.0);
    if (allow_transverse) {
        m.b_x = opt_number(j, "b_x", 0.0);
        m.b_y = opt_number(j, "b_y", 0.0);
    }
    try {
        m.validate();
    } catch (const InvalidModel& e) {
        bad_config(e.what());
    }
    return m;
}

CriticalModel parse_critical_model(const json& j) {
    CriticalModel m;
    m.omega_c = need_number(j, "omega_c");
    m.omega_m = need_number(j, "omega_m");
    const bool has_g = j.contains("g");
    const bool has_eps = j.contains("gc_minus_g_over_gc");
    if (has_g == has_eps)
        bad_config("critical model needs exactly one of 'g' or "
                   "'gc_minus_g_over_gc'");
    const double gc = std::sqrt(m.omega_c * m.omega_m) / 2.0;
    m.g = has_g ? need_number(j, "g")
                : gc * (1.0 - need_number(j, "gc_minus_g_over_gc"));
    try {
        m.validate();
    } catch (const Error& e) {
        bad_config(e.what());
    }
    return m;
}

std::string need_output(const json& j) {
    if (!j.contains("output") || !j["output"].is_string())
        bad_config("missing field 'output'");
    return j["output"].get<std::string>();
}

// --- CSV / sidecar emission -------------------------------------------------

void write_record_csv(const std::filesystem::path& path,
                      const std::vector<SweepRecord>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("run: cannot write " + path.string());
    out << "t,F_Q,F_C,S,n_th,r,phi,N_c\n";
    for (const auto& r : rows)
        out << format_double(r.t) << ',' << format_double(r.f_q) << ','
            << format_double(r.f_c) << ',' << format_double(r.entropy) << ','
            << format_double(r.n_th) << ',' << format_double(r.r) << ','
            << format_double(r.phi) << ',' << format_double(r.n_c) << '\n';
}

void write_critical_csv(const std::filesystem::path& path,
                        const std::vector<CriticalSweepRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("run: cannot write " + path.string());
    out << "g,gc_minus_g,t_star,F_Q,F_C\n";
    for (const auto& r : rows)
        out << format_double(r.g) << ',' << format_double(r.gc_minus_g) << ','
            << format_double(r.t_star) << ',' << format_double(r.f_q) << ','
            << format_double(r.f_c) << '\n';
}

json fit_to_json(const FitResult& fit) {
    return json{{"slope", fit.slope},
                {"intercept", fit.intercept},
                {"r_squared", fit.r_squared},
                {"n_points", fit.n_points}};
}

void write_sidecar(const std::filesystem::path& path, const json& sidecar) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("run: cannot write " + path.string());
    out << sidecar.dump(2) << '\n';
}

int resolve_threads(const json& j, int override_threads) {
    if (override_threads >= 0) return override_threads;
    if (j.contains("threads")) {
        if (!j["threads"].is_number_integer() || j["threads"].get<int>() < 0)
            bad_config("field 'threads' must be a non-negative integer");
        return j["threads"].get<int>();
    }
    return 0;
}

OracleReport oracle_check_impl(const json& j);

} // namespace

json resolved_rwa(const RwaModel& m) {
    return json{{"omega_c", m.omega_c}, {"b0", m.b0},       {"b", m.b},
                {"b_x", m.b_x},         {"b_y", m.b_y},     {"g", m.g},
                {"kappa", m.kappa},     {"n_noise", m.n_noise}, {"r0", m.r0}};
}

json resolved_grid(const std::vector<double>& pts) {
    return json{{"points", pts}};
}

RunOutcome run_experiment(const std::filesystem::path& config_path,
                          int threads_override) {
    const json j = load_json(config_path);
    if (!j.contains("mode") || !j["mode"].is_string())
        bad_config("missing field 'mode'");
    const std::string mode = j["mode"].get<std::string>();

    RunOutcome outcome;
    json sidecar;
    sidecar["config"] = j;

    if (mode == "rwa") {
        check_known_fields(j, {"mode", "output", "threads", "omega_c", "b0", "b",
                               "g", "kappa", "n_noise", "r0", "t_grid"},
                           "rwa config");
        const RwaModel m = parse_rwa_model(j, /*allow_transverse=*/false);
        const auto grid = parse_grid(j, "t_grid");
        const auto out_path = std::filesystem::path(need_output(j));
        std::vector<SweepRecord> rows(grid.size());
        parallel_for_index(static_cast<int>(grid.size()),
                           resolve_threads(j, threads_override),
                           [&](int i) { rows[i] = rwa_record(m, grid[i]); });
        write_record_csv(out_path, rows);
        sidecar["resolved"] = {{"model", resolved_rwa(m)},
                               {"t_grid", resolved_grid(grid)}};
        sidecar["n_rows"] = rows.size();
        if (!m.rwa_valid())
            sidecar["warning"] = "g exceeds sqrt(omega_c*omega_m)/2; the "
                                 "rotating-wave model is outside its validity "
                                 "region";
        outcome.outputs = {out_path};
        outcome.summary = "rwa time scan, " + std::to_string(rows.size()) + " rows";
    } else if (mode == "critical") {
        check_known_fields(j, {"mode", "output", "threads", "omega_c", "omega_m",
                               "g", "gc_minus_g_over_gc", "t_grid"},
                           "critical config");
        const CriticalModel m = parse_critical_model(j);
        const auto grid = parse_grid(j, "t_grid");
        const auto out_path = std::filesystem::path(need_output(j));
        std::vector<SweepRecord> rows(grid.size());
        parallel_for_index(static_cast<int>(grid.size()),
                           resolve_threads(j, threads_override),
                           [&](int i) { rows[i] = critical_record(m, grid[i]); });
        write_record_csv(out_path, rows);
        sidecar["resolved"] = {{"omega_c", m.omega_c},
                               {"omega_m", m.omega_m},
                               {"g", m.g},
                               {"t_grid", resolved_grid(grid)}};
        sidecar["n_rows"] = rows.size();
        sidecar["t_star"] = t_star_critical(m, 1);
        outcome.outputs = {out_path};
        outcome.summary = "critical time scan, " + std::to_string(rows.size()) +
                          " rows";
    } else if (mode == "sweep-hl") {
        check_known_fields(j, {"mode", "output", "threads", "omega_c", "b0", "b",
                               "g", "kappa", "n_noise", "r0_grid"},
                           "sweep-hl config");
        RwaModel m = parse_rwa_model(j, false);
        const auto grid = parse_grid(j, "r0_grid");
        const auto out_path = std::filesystem::path(need_output(j));
        const HlExperiment ex =
            snl_hl_experiment(m, grid, resolve_threads(j, threads_override));
        write_record_csv(out_path, ex.records);
        sidecar["resolved"] = {{"model", resolved_rwa(m)},
                               {"r0_grid", resolved_grid(grid)}};
        sidecar["fit"] = fit_to_json(ex.fit);
        outcome.outputs = {out_path};
        outcome.summary = "slope " + format_double(ex.fit.slope) +
                          " (R^2 " + format_double(ex.fit.r_squared) + ")";
    } else if (mode == "sweep-critical") {
        check_known_fields(j, {"mode", "output", "threads", "omega_c", "omega_m",
                               "eps_grid"},
                           "sweep-critical config");
        const double wc = need_number(j, "omega_c");
        const double wm = need_number(j, "omega_m");
        const auto grid = parse_grid(j, "eps_grid");
        const auto out_path = std::filesystem::path(need_output(j));
        const CriticalSweepResult ex = critical_scaling_experiment(
            wc, wm, grid, resolve_threads(j, threads_override));
        std::filesystem::path quarter = out_path;
        quarter.replace_extension("");
        quarter += "-quarter.csv";
        write_critical_csv(out_path, ex.at_t_star);
        write_critical_csv(quarter, ex.at_quarter);
        sidecar["resolved"] = {{"omega_c", wc},
                               {"omega_m", wm},
                               {"eps_grid", resolved_grid(grid)}};
        sidecar["rescaling"] = "fits are of F/t_eval^2 vs (g_c - g)";
        sidecar["fit_fc_t_star"] = fit_to_json(ex.fit_fc_t_star);
        sidecar["fit_fq_t_star"] = fit_to_json(ex.fit_fq_t_star);
        sidecar["fit_fc_quarter"] = fit_to_json(ex.fit_fc_quarter);
        sidecar["fit_fq_quarter"] = fit_to_json(ex.fit_fq_quarter);
        sidecar["quarter_output"] = quarter.string();
        outcome.outputs = {out_path, quarter};
        outcome.summary = "F_C/t^2 slopes " +
                          format_double(ex.fit_fc_t_star.slope) + " (t*), " +
                          format_double(ex.fit_fc_quarter.slope) + " (t*/4)";
    } else if (mode == "nu-check") {
        check_known_fields(j, {"mode", "output", "threads", "nu", "r_grid"},
                           "nu-check config");
        const double nu = need_number(j, "nu");
        const auto grid = parse_grid(j, "r_grid");
        const auto out_path = std::filesystem::path(need_output(j));
        const NuCheckResult ex = nu_scaling_check(nu, grid);
        write_record_csv(out_path, ex.records);
        sidecar["resolved"] = {{"nu", nu}, {"r_grid", resolved_grid(grid)}};
        sidecar["fit"] = fit_to_json(ex.fit);
        sidecar["expected_slope"] = ex.expected_slope;
        outcome.outputs = {out_path};
        outcome.summary = "slope " + format_double(ex.fit.slope) +
                          ", expected " + format_double(ex.expected_slope);
    } else if (mode == "oracle-check") {
        const OracleReport rep = oracle_check_impl(j);
        if (!rep.pass)
            throw Error("oracle_check: discrepancy " +
                        format_double(rep.discrepancy) + " exceeds threshold " +
                        format_double(rep.threshold));
        outcome.summary = rep.detail;
        return outcome;  // no CSV surface for oracle checks
    } else {
        bad_config("unknown mode '" + mode + "'");
    }

    outcome.sidecar = outcome.outputs.front();
    outcome.sidecar += ".json";
    write_sidecar(outcome.sidecar, sidecar);
    return outcome;
}

namespace {

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

OracleReport oracle_check_impl(const json& j) {
    check_known_fields(j, {"mode", "oracle", "model", "t", "cutoff", "omega_c",
                           "omega_m", "b0", "b", "g", "gc_minus_g_over_gc",
                           "kappa", "n_noise", "r0", "b_x", "b_y"},
                       "oracle-check config");
    if (!j.contains("oracle") || !j["oracle"].is_string())
        bad_config("missing field 'oracle'");
    if (!j.contains("model") || !j["model"].is_string())
        bad_config("missing field 'model'");
    const std::string oracle = j["oracle"].get<std::string>();
    const std::string model_kind = j["model"].get<std::string>();
    const double t = need_number(j, "t");

    OracleReport rep;
    rep.oracle = oracle;
    if (oracle == "fock") {
        rep.threshold = 1e-6;
        FockConfig cfg;
        cfg.cutoff = static_cast<int>(opt_number(j, "cutoff", 40));
        GaussianState closed = GaussianState::vacuum(1);
        if (model_kind == "rwa") {
            const RwaModel m = parse_rwa_model(j, /*allow_transverse=*/true);
            if (m.kappa != 0.0)
                bad_config("fock oracle requires kappa = 0");
            cfg.model = m;
            closed = evolve_cavity(m, t).state;
        } else if (model_kind == "critical") {
            const CriticalModel m = parse_critical_model(j);
            cfg.model = m;
            closed = gamma_c_closed(m, t);
        } else {
            bad_config("field 'model' must be 'rwa' or 'critical'");
        }
        const GaussianState fock = fock_evolve(cfg, t);
        rep.discrepancy = max_abs_diff(reduce(fock, 0).gamma, closed.gamma);
        rep.detail = "fock vs closed-form cavity covariance";
    } else if (oracle == "lyapunov") {
        if (model_kind != "rwa")
            bad_config("lyapunov oracle supports the rwa model only");
        const RwaModel m = parse_rwa_model(j, true);
        const GaussianState joint = lyapunov_integrate(m, t);
        if (m.kappa == 0.0 && m.b_x == 0.0 && m.b_y == 0.0) {
            rep.threshold = 1e-9;
            rep.discrepancy =
                max_abs_diff(joint.gamma, joint_evolve_noiseless(m, t).gamma);
            rep.detail = "lyapunov vs symplectic propagator, joint covariance";
        } else {
            rep.threshold = 1e-8;
            const GaussianState closed = evolve_cavity(m, t).state;
            rep.discrepancy =
                max_abs_diff(reduce(joint, 0).gamma, closed.gamma);
            rep.detail = "lyapunov vs closed-form cavity covariance";
        }
    } else {
        bad_config("field 'oracle' must be 'fock' or 'lyapunov'");
    }
    rep.pass = rep.discrepancy < rep.threshold;
    return rep;
}

} // namespace

OracleReport oracle_check(const std::filesystem::path& config_path) {
    const json j = load_json(config_path);
    if (!j.contains("mode") || !j["mode"].is_string() ||
        j["mode"].get<std::string>() != "oracle-check")
        bad_config("oracle-check requires mode 'oracle-check'");
    return oracle_check_impl(j);
}

FitResult fit_csv_columns(const std::filesystem::path& csv_path,
                          const std::string& x_col, const std::string& y_col) {
    std::ifstream in(csv_path);
    if (!in) throw ConfigInvalid("fit: cannot open " + csv_path.string());
    std::string line;
    if (!std::getline(in, line)) throw ConfigInvalid("fit: empty CSV");

    const auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) parts.push_back(item);
        return parts;
    };
    const auto header = split(line);
    int xi = -1, yi = -1;
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == x_col) xi = static_cast<int>(i);
        if (header[i] == y_col) yi = static_cast<int>(i);
    }
    if (xi < 0) throw ConfigInvalid("fit: column '" + x_col + "' not found");
    if (yi < 0) throw ConfigInvalid("fit: column '" + y_col + "' not found");

    std::vector<double> xs, ys;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto parts = split(line);
        if (static_cast<int>(parts.size()) <= std::max(xi, yi))
            throw ConfigInvalid("fit: short row in CSV");
        xs.push_back(std::stod(parts[xi]));
        ys.push_back(std::stod(parts[yi]));
    }
    return loglog_fit(xs, ys);
}

} // namespace magmetro
