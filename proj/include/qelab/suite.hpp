#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qelab/experiments.hpp"
#include "qelab/spectral.hpp"

namespace qelab {

enum class RPolicy { MinRho, EiirLog, Fixed };
enum class DeltaMode { Power, Fixed };

struct ExperimentConfig {
    int q = 2;
    std::vector<int> n_list;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    bool bipartite = false;
    // window centres in units of tau
    std::vector<double> s0_tau{0.5};
    DeltaMode delta_mode = DeltaMode::Power;
    double epsilon = 0.5;      // delta_n = r_n^{-1+epsilon}
    double delta_fixed = 0.2;
    RPolicy r_policy = RPolicy::MinRho;
    double r_fixed = 4.0;
    double eiir_delta = 0.6;   // EiirLog: r_n = (1 - eiir_delta) log_q n - 2
    double r_min = 1.0;
    ObservableKind observable = ObservableKind::Rademacher;
    int observables = 1;
    int T = 4;                 // ergodic-average length reported per row
    int control_k = 2;         // S_k control case
    BasisMode basis = BasisMode::Solver;
    int n_cap = 4096;
    int threads = 1;           // parallel (n, seed) jobs
    std::string csv_path;
    std::string json_path;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
// "section.key=value"; a bare key is accepted when its name is unambiguous.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);
void validate(const ExperimentConfig& cfg);

// Canonical key = value text; equal configs give equal text.
std::string canonical_text(const ExperimentConfig& cfg);
std::uint64_t fnv1a(const std::string& text);
std::string config_hash(const ExperimentConfig& cfg);

double choose_r(const ExperimentConfig& cfg, const std::vector<int>& rho, int n);
double choose_delta(const ExperimentConfig& cfg, double r);

struct VarianceRow {
    int n = 0;
    std::uint64_t seed = 0;
    double s0 = 0.0;
    int observable = 0;
    double r = 0.0;
    double delta = 0.0;
    int stride = 1;
    std::size_t window_count = 0;
    double variance = 0.0;
    double control_variance = 0.0;  // S_k against phi_{s0}(k)
    double control_mean = 0.0;
    double ergodic_form = 0.0;
    double beta = 0.0;
    double eiir_fraction = 0.0;     // fraction with rho < r + 2
    double benchmark = 0.0;         // r^{-2/9}
    std::string status = "ok";
};

struct VarianceReport {
    std::vector<VarianceRow> rows;
    std::string config_hash;
};

VarianceReport run_suite(const ExperimentConfig& cfg);

void write_report_csv(std::ostream& os, const VarianceReport& report);
void write_report_json(std::ostream& os, const VarianceReport& report);
// Writes to cfg.csv_path / cfg.json_path when set.
void save_report(const ExperimentConfig& cfg, const VarianceReport& report);

// `git describe` of the source tree at build time.
std::string git_describe();

// Median of a row field over seeds and observables per (s0, n), ok rows only; ordered by n.
std::map<double, std::vector<std::pair<int, double>>> seed_medians(const VarianceReport& report,
                                                                    double VarianceRow::*field);

}  // namespace qelab
