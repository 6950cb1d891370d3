#ifndef MAGMETRO_EXPERIMENT_HPP
#define MAGMETRO_EXPERIMENT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "magmetro/sweep.hpp"

namespace magmetro {

// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

struct OracleReport {
    std::string oracle;       // "fock" or "lyapunov"
    double discrepancy = 0.0; // max-abs covariance entry difference
    double threshold = 0.0;
    bool pass = false;
    std::string detail;
};

struct RunOutcome {
    std::vector<std::filesystem::path> outputs;  // CSV files written
    std::filesystem::path sidecar;               // JSON echo of the run
    std::string summary;                         // one-line result description
};

// Executes the experiment described by a JSON config. Throws ConfigInvalid
// for malformed configs and module errors for numerical failures.
RunOutcome run_experiment(const std::filesystem::path& config_path,
                          int threads_override = -1);

// Closed form versus the matching brute-force oracle.
OracleReport oracle_check(const std::filesystem::path& config_path);

// Log-log fit of two named columns of a CSV file produced by run_experiment.
FitResult fit_csv_columns(const std::filesystem::path& csv_path,
                          const std::string& x_col, const std::string& y_col);

} // namespace magmetro

#endif
