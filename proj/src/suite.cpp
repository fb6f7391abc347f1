#include "qelab/suite.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "qelab/errors.hpp"
#include "qelab/rng.hpp"
#include "qelab/tree.hpp"

#ifndef QELAB_GIT_DESCRIBE
#define QELAB_GIT_DESCRIBE "unknown"
#endif

namespace qelab {

std::string git_describe() { return QELAB_GIT_DESCRIBE; }

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || v.empty()) throw std::invalid_argument(key + ": expected a number, got '" + v + "'");
    return x;
}

long long to_integer(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    long long x = 0;
    try {
        x = std::stoll(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || v.empty()) throw std::invalid_argument(key + ": expected an integer, got '" + v + "'");
    return x;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument(key + ": expected a boolean, got '" + v + "'");
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys{
        "graph.q",          "graph.n",         "graph.seeds",      "graph.bipartite", "window.s0",
        "window.delta_mode", "window.epsilon", "window.delta",     "cutoff.policy",   "cutoff.r",
        "cutoff.eiir_delta", "cutoff.r_min",   "observable.kind",  "observable.count", "averaging.T",
        "averaging.k",      "spectrum.basis",  "limits.n_cap",     "limits.threads",  "output.csv",
        "output.json"};
    return keys;
}

std::string resolve_key(const std::string& key) {
    if (key.find('.') != std::string::npos) return key;
    std::string hit;
    for (const auto& k : known_keys()) {
        if (k.substr(k.find('.') + 1) != key) continue;
        if (!hit.empty()) throw std::invalid_argument("ambiguous key '" + key + "'");
        hit = k;
    }
    return hit.empty() ? key : hit;
}

std::string fmt_double(double x) { return fmt::format("{:.17g}", x); }

template <class T>
std::string join(const std::vector<T>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        if constexpr (std::is_floating_point_v<T>)
            out += fmt_double(v[i]);
        else
            out += std::to_string(v[i]);
    }
    return out;
}

std::string policy_name(RPolicy p) {
    switch (p) {
        case RPolicy::MinRho: return "min_rho";
        case RPolicy::EiirLog: return "eiir_log";
        case RPolicy::Fixed: return "fixed";
    }
    return "?";
}

}  // namespace

void set_config_value(ExperimentConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
    const std::string key = resolve_key(trim(raw_key));
    const std::string v = trim(raw_value);
    if (key == "graph.q") {
        cfg.q = static_cast<int>(to_integer(key, v));
    } else if (key == "graph.n") {
        cfg.n_list.clear();
        for (const auto& item : split_list(v)) cfg.n_list.push_back(static_cast<int>(to_integer(key, item)));
    } else if (key == "graph.seeds") {
        cfg.seeds.clear();
        for (const auto& item : split_list(v)) {
            const auto s = to_integer(key, item);
            if (s < 0) throw std::invalid_argument("graph.seeds: seeds are non-negative");
            cfg.seeds.push_back(static_cast<std::uint64_t>(s));
        }
    } else if (key == "graph.bipartite") {
        cfg.bipartite = to_bool(key, v);
    } else if (key == "window.s0") {
        cfg.s0_tau.clear();
        for (const auto& item : split_list(v)) cfg.s0_tau.push_back(to_double(key, item));
    } else if (key == "window.delta_mode") {
        if (v == "power")
            cfg.delta_mode = DeltaMode::Power;
        else if (v == "fixed")
            cfg.delta_mode = DeltaMode::Fixed;
        else
            throw std::invalid_argument("window.delta_mode: power or fixed");
    } else if (key == "window.epsilon") {
        cfg.epsilon = to_double(key, v);
    } else if (key == "window.delta") {
        cfg.delta_fixed = to_double(key, v);
    } else if (key == "cutoff.policy") {
        if (v == "min_rho")
            cfg.r_policy = RPolicy::MinRho;
        else if (v == "eiir_log")
            cfg.r_policy = RPolicy::EiirLog;
        else if (v == "fixed")
            cfg.r_policy = RPolicy::Fixed;
        else
            throw std::invalid_argument("cutoff.policy: min_rho, eiir_log or fixed");
    } else if (key == "cutoff.r") {
        cfg.r_fixed = to_double(key, v);
    } else if (key == "cutoff.eiir_delta") {
        cfg.eiir_delta = to_double(key, v);
    } else if (key == "cutoff.r_min") {
        cfg.r_min = to_double(key, v);
    } else if (key == "observable.kind") {
        cfg.observable = parse_observable(v);
    } else if (key == "observable.count") {
        cfg.observables = static_cast<int>(to_integer(key, v));
    } else if (key == "averaging.T") {
        cfg.T = static_cast<int>(to_integer(key, v));
    } else if (key == "averaging.k") {
        cfg.control_k = static_cast<int>(to_integer(key, v));
    } else if (key == "spectrum.basis") {
        if (v == "solver")
            cfg.basis = BasisMode::Solver;
        else if (v == "randomized")
            cfg.basis = BasisMode::Randomized;
        else
            throw std::invalid_argument("spectrum.basis: solver or randomized");
    } else if (key == "limits.n_cap") {
        cfg.n_cap = static_cast<int>(to_integer(key, v));
    } else if (key == "limits.threads") {
        cfg.threads = static_cast<int>(to_integer(key, v));
    } else if (key == "output.csv") {
        cfg.csv_path = v;
    } else if (key == "output.json") {
        cfg.json_path = v;
    } else {
        throw std::invalid_argument("unknown config key '" + raw_key + "'");
    }
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw std::invalid_argument(fmt::format("line {}: unterminated section", lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument(fmt::format("line {}: expected key = value", lineno));
        std::string key = trim(line.substr(0, eq));
        if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
        try {
            set_config_value(cfg, key, line.substr(eq + 1));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(fmt::format("line {}: {}", lineno, e.what()));
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    return parse_config(in);
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("override '" + assignment + "' is not key=value");
    set_config_value(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.q < 1) throw std::invalid_argument("q must be at least 1");
    for (int n : cfg.n_list) {
        if (n < 2) throw std::invalid_argument("n must be at least 2");
        if (n > cfg.n_cap) throw std::invalid_argument(fmt::format("n = {} exceeds the cap {}", n, cfg.n_cap));
        if (cfg.bipartite && n % 2) throw std::invalid_argument("bipartite mode needs even n");
        if (!cfg.bipartite && (static_cast<long long>(n) * (cfg.q + 1)) % 2)
            throw std::invalid_argument("n (q+1) must be even");
    }
    if (cfg.seeds.empty()) throw std::invalid_argument("at least one seed is required");
    if (cfg.s0_tau.empty()) throw std::invalid_argument("at least one window centre is required");
    for (double s : cfg.s0_tau)
        if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("window centres must lie in (0, 1) tau");
    if (cfg.delta_mode == DeltaMode::Fixed && !(cfg.delta_fixed > 0.0))
        throw std::invalid_argument("delta must be positive");
    if (cfg.delta_mode == DeltaMode::Power && !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0))
        throw std::invalid_argument("epsilon must lie in (0, 1)");
    if (cfg.r_policy == RPolicy::Fixed && !(cfg.r_fixed >= 1.0)) throw std::invalid_argument("r must be at least 1");
    if (!(cfg.eiir_delta > 0.0 && cfg.eiir_delta < 1.0)) throw std::invalid_argument("eiir_delta must lie in (0, 1)");
    if (!(cfg.r_min > 0.0)) throw std::invalid_argument("r_min must be positive");
    if (cfg.observables < 1) throw std::invalid_argument("observable count must be at least 1");
    if (cfg.T < 1) throw std::invalid_argument("T must be at least 1");
    if (cfg.control_k < 0) throw std::invalid_argument("control k must be non-negative");
    if (cfg.threads < 1) throw std::invalid_argument("threads must be at least 1");
    if (cfg.bipartite && cfg.observable != ObservableKind::BipartiteBalanced)
        throw std::invalid_argument("bipartite mode needs observable.kind = bipartite_balanced");
    if (!cfg.bipartite && cfg.observable == ObservableKind::BipartiteBalanced)
        throw std::invalid_argument("bipartite_balanced observables need graph.bipartite = true");
}

std::string canonical_text(const ExperimentConfig& cfg) {
    // Output paths and thread count do not change the results, so they stay out of the hash.
    std::string t;
    t += fmt::format("graph.q = {}\n", cfg.q);
    t += "graph.n = " + join(cfg.n_list) + "\n";
    t += "graph.seeds = " + join(cfg.seeds) + "\n";
    t += fmt::format("graph.bipartite = {}\n", cfg.bipartite ? "true" : "false");
    t += "window.s0 = " + join(cfg.s0_tau) + "\n";
    t += fmt::format("window.delta_mode = {}\n", cfg.delta_mode == DeltaMode::Power ? "power" : "fixed");
    t += "window.epsilon = " + fmt_double(cfg.epsilon) + "\n";
    t += "window.delta = " + fmt_double(cfg.delta_fixed) + "\n";
    t += "cutoff.policy = " + policy_name(cfg.r_policy) + "\n";
    t += "cutoff.r = " + fmt_double(cfg.r_fixed) + "\n";
    t += "cutoff.eiir_delta = " + fmt_double(cfg.eiir_delta) + "\n";
    t += "cutoff.r_min = " + fmt_double(cfg.r_min) + "\n";
    t += "observable.kind = " + observable_name(cfg.observable) + "\n";
    t += fmt::format("observable.count = {}\n", cfg.observables);
    t += fmt::format("averaging.T = {}\n", cfg.T);
    t += fmt::format("averaging.k = {}\n", cfg.control_k);
    t += fmt::format("spectrum.basis = {}\n", cfg.basis == BasisMode::Solver ? "solver" : "randomized");
    t += fmt::format("limits.n_cap = {}\n", cfg.n_cap);
    return t;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string config_hash(const ExperimentConfig& cfg) { return fmt::format("{:016x}", fnv1a(canonical_text(cfg))); }

double choose_r(const ExperimentConfig& cfg, const std::vector<int>& rho, int n) {
    switch (cfg.r_policy) {
        case RPolicy::Fixed: return cfg.r_fixed;
        case RPolicy::MinRho: {
            const int m = rho.empty() ? 0 : *std::min_element(rho.begin(), rho.end());
            return std::max(cfg.r_min, static_cast<double>(m));
        }
        case RPolicy::EiirLog: {
            const double r = (1.0 - cfg.eiir_delta) * std::log(static_cast<double>(n)) / std::log(cfg.q) - 2.0;
            return std::max(cfg.r_min, r);
        }
    }
    return cfg.r_min;
}

double choose_delta(const ExperimentConfig& cfg, double r) {
    if (cfg.delta_mode == DeltaMode::Fixed) return cfg.delta_fixed;
    return std::pow(r, -1.0 + cfg.epsilon);
}

namespace {

struct Job {
    int n;
    std::uint64_t seed;
};

std::vector<VarianceRow> run_job(const ExperimentConfig& cfg, const Job& job) {
    std::vector<VarianceRow> rows;
    auto error_rows = [&](const std::string& status) {
        rows.clear();
        for (double s0t : cfg.s0_tau) {
            for (int i = 0; i < cfg.observables; ++i) {
                VarianceRow row;
                row.n = job.n;
                row.seed = job.seed;
                row.s0 = s0t;
                row.observable = i;
                row.status = status;
                rows.push_back(row);
            }
        }
    };
    try {
        const auto graph_seed = derive_seed(job.seed, static_cast<std::uint64_t>(job.n));
        const RegularGraph g = cfg.bipartite ? generate_bipartite_regular(job.n / 2, cfg.q, graph_seed, true)
                                             : generate_random_regular(job.n, cfg.q, graph_seed, true);
        EigOptions eo;
        eo.basis = cfg.basis;
        eo.seed = derive_seed(job.seed, static_cast<std::uint64_t>(job.n) + 1);
        const SpectralData sd = eig(adjacency_operator(g), cfg.q, eo);
        const GapReport gap = spectral_gap(sd, cfg.bipartite);
        const auto rho = injectivity_radii(g);
        const double r = choose_r(cfg, rho, job.n);
        const double delta = choose_delta(cfg, r);
        double short_count = 0;
        for (int v : rho) short_count += v < r + 2.0;
        const double eiir = short_count / job.n;

        std::vector<Eigen::VectorXd> observables;
        for (int i = 0; i < cfg.observables; ++i)
            observables.push_back(make_observable(g, cfg.observable, derive_seed(job.seed, 7919 + i)));

        for (double s0t : cfg.s0_tau) {
            const double s0 = s0t * tau(cfg.q);
            const int stride = std::abs(s0t - 0.5) < 1e-12 ? 2 : 1;
            const SpectralWindow w = window(sd, s0, delta);
            double control_variance = 0.0, control_mean = 0.0;
            if (!w.empty()) {
                const Eigen::VectorXd diag = sk_diagonal(g, sd, w, cfg.control_k);
                const double predicted = spherical(s0, cfg.control_k, cfg.q);
                control_mean = diag.mean();
                control_variance = (diag.array() - predicted).square().mean();
            }
            for (int i = 0; i < cfg.observables; ++i) {
                VarianceRow row;
                row.n = job.n;
                row.seed = job.seed;
                row.s0 = s0t;
                row.observable = i;
                row.r = r;
                row.delta = delta;
                row.stride = stride;
                row.window_count = w.count();
                row.beta = gap.beta;
                row.eiir_fraction = eiir;
                row.benchmark = std::pow(r, -2.0 / 9.0);
                row.ergodic_form = ergodic_quadratic_form(g, cfg.T, stride, observables[i]);
                if (w.empty()) {
                    row.status = "empty_window";
                } else {
                    row.variance = quantum_variance(sd, w, observables[i]);
                    row.control_variance = control_variance;
                    row.control_mean = control_mean;
                }
                rows.push_back(row);
            }
        }
    } catch (const BudgetError& e) {
        error_rows(std::string("budget: ") + e.what());
    } catch (const std::exception& e) {
        error_rows(std::string("error: ") + e.what());
    }
    return rows;
}

}  // namespace

VarianceReport run_suite(const ExperimentConfig& cfg) {
    validate(cfg);
    VarianceReport report;
    report.config_hash = config_hash(cfg);
    std::vector<Job> jobs;
    for (int n : cfg.n_list)
        for (auto seed : cfg.seeds) jobs.push_back({n, seed});

    // Results are collected by job index, so the thread count never changes the output.
    std::vector<std::vector<VarianceRow>> results(jobs.size());
    if (cfg.threads <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) results[i] = run_job(cfg, jobs[i]);
    } else {
        std::size_t next = 0;
        while (next < jobs.size()) {
            std::vector<std::future<std::vector<VarianceRow>>> batch;
            const std::size_t begin = next;
            for (; next < jobs.size() && next - begin < static_cast<std::size_t>(cfg.threads); ++next)
                batch.push_back(std::async(std::launch::async, run_job, std::cref(cfg), jobs[next]));
            for (std::size_t i = 0; i < batch.size(); ++i) results[begin + i] = batch[i].get();
        }
    }
    for (auto& rs : results)
        for (auto& row : rs) report.rows.push_back(std::move(row));
    return report;
}

void write_report_csv(std::ostream& os, const VarianceReport& report) {
    os << "n,seed,s0_tau,observable,r,delta,stride,window_count,variance,control_variance,control_mean,"
          "ergodic_form,beta,eiir_fraction,benchmark,status\n";
    for (const auto& r : report.rows) {
        os << fmt::format("{},{},{:.17g},{},{:.17g},{:.17g},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},", r.n,
                          r.seed, r.s0, r.observable, r.r, r.delta, r.stride, r.window_count, r.variance,
                          r.control_variance, r.control_mean, r.ergodic_form, r.beta, r.eiir_fraction, r.benchmark);
        // statuses may carry messages with commas
        if (r.status.find_first_of(",\"\n") == std::string::npos) {
            os << r.status << '\n';
        } else {
            std::string quoted;
            for (char c : r.status) {
                if (c == '"') quoted += '"';
                quoted += c == '\n' ? ' ' : c;
            }
            os << '"' << quoted << "\"\n";
        }
    }
}

void write_report_json(std::ostream& os, const VarianceReport& report) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"n", r.n},
                        {"seed", r.seed},
                        {"s0_tau", r.s0},
                        {"observable", r.observable},
                        {"r", r.r},
                        {"delta", r.delta},
                        {"stride", r.stride},
                        {"window_count", r.window_count},
                        {"variance", r.variance},
                        {"control_variance", r.control_variance},
                        {"control_mean", r.control_mean},
                        {"ergodic_form", r.ergodic_form},
                        {"beta", r.beta},
                        {"eiir_fraction", r.eiir_fraction},
                        {"benchmark", r.benchmark},
                        {"status", r.status}});
    }
    nlohmann::ordered_json doc{{"config_hash", report.config_hash}, {"rows", rows}, {"git_describe", git_describe()}};
    os << doc.dump(2) << '\n';
}

void save_report(const ExperimentConfig& cfg, const VarianceReport& report) {
    if (!cfg.csv_path.empty()) {
        std::ofstream out(cfg.csv_path);
        if (!out) throw std::runtime_error("cannot write '" + cfg.csv_path + "'");
        write_report_csv(out, report);
    }
    if (!cfg.json_path.empty()) {
        std::ofstream out(cfg.json_path);
        if (!out) throw std::runtime_error("cannot write '" + cfg.json_path + "'");
        write_report_json(out, report);
    }
}

std::map<double, std::vector<std::pair<int, double>>> seed_medians(const VarianceReport& report,
                                                                    double VarianceRow::*field) {
    std::map<double, std::map<int, std::vector<double>>> groups;
    for (const auto& r : report.rows)
        if (r.status == "ok") groups[r.s0][r.n].push_back(r.*field);
    std::map<double, std::vector<std::pair<int, double>>> out;
    for (auto& [s0, by_n] : groups) {
        for (auto& [n, values] : by_n) {
            std::sort(values.begin(), values.end());
            const std::size_t m = values.size();
            const double med = m % 2 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
            out[s0].emplace_back(n, med);
        }
    }
    return out;
}

}  // namespace qelab
