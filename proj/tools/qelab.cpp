#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qelab/averaging.hpp"
#include "qelab/experiments.hpp"
#include "qelab/nonbacktracking.hpp"
#include "qelab/rng.hpp"
#include "qelab/spectral.hpp"
#include "qelab/suite.hpp"
#include "qelab/tree.hpp"

using namespace qelab;

namespace {

struct GraphSource {
    std::string path;
    int n = 200;
    int q = 2;
    std::uint64_t seed = 1;
    bool multigraph = false;
    bool bipartite = false;

    void attach(CLI::App* app) {
        app->add_option("--graph", path, "read the graph from an edge-list file");
        app->add_option("-n,--n", n, "number of vertices (per side with --bipartite)");
        app->add_option("-q,--q", q, "branching number; degree is q+1");
        app->add_option("--seed", seed, "generator seed");
        app->add_flag("--multigraph", multigraph, "allow loops and multiple edges");
        app->add_flag("--bipartite", bipartite, "bipartite configuration model");
    }

    std::shared_ptr<const RegularGraph> load() const {
        if (!path.empty()) {
            std::ifstream in(path);
            if (!in) throw std::runtime_error("cannot open graph '" + path + "'");
            return std::make_shared<const RegularGraph>(read_graph(in));
        }
        if (bipartite) return std::make_shared<const RegularGraph>(generate_bipartite_regular(n, q, seed, !multigraph));
        return std::make_shared<const RegularGraph>(generate_random_regular(n, q, seed, !multigraph));
    }
};

// Writes to the file when a path is given, stdout otherwise.
template <class F>
void emit(const std::string& path, F&& write) {
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write(out);
}

Eigen::VectorXd random_values(int n, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b(i) = 2.0 * rng.uniform() - 1.0;
    return b;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum ergodicity experiments on regular graphs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", git_describe());

    // gen
    GraphSource gen_src;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "generate a random regular graph");
    gen_src.attach(gen);
    gen->add_option("-o,--out", gen_out, "output edge list (stdout if omitted)");

    // spectrum
    GraphSource spec_src;
    std::string spec_out;
    double spec_s0 = -1, spec_delta = 0.1;
    bool spec_randomized = false;
    auto* spec = app.add_subcommand("spectrum", "eigendecomposition, spectral gap and window membership");
    spec_src.attach(spec);
    spec->add_option("--s0", spec_s0, "window centre in units of tau (no window if omitted)");
    spec->add_option("--delta", spec_delta, "window half-width");
    spec->add_flag("--randomized", spec_randomized, "randomize the basis inside eigenvalue clusters");
    spec->add_option("--csv", spec_out, "spectrum CSV (stdout if omitted)");

    // variance
    GraphSource var_src;
    double var_s0 = 0.5, var_delta = 0.3;
    std::string var_kind = "rademacher";
    int var_count = 1, var_k = 2;
    auto* var = app.add_subcommand("variance", "quantum variance of random observables in one window");
    var_src.attach(var);
    var->add_option("--s0", var_s0, "window centre in units of tau");
    var->add_option("--delta", var_delta, "window half-width");
    var->add_option("--observable", var_kind, "rademacher, set_indicator or bipartite_balanced");
    var->add_option("--count", var_count, "number of observables");
    var->add_option("--k", var_k, "sphere radius for the S_k control case");

    // nb
    GraphSource nb_src;
    std::string nb_bonds;
    std::vector<int> nb_N{8, 16, 32, 64};
    double nb_s = 0.5;
    auto* nb = app.add_subcommand("nb", "non-backtracking operator spectrum against the prediction");
    nb_src.attach(nb);
    nb->add_option("--bonds", nb_bonds, "write the bond table to this CSV");
    nb->add_option("--cesaro", nb_N, "Cesaro lengths for the resolvent norm");
    nb->add_option("--s", nb_s, "spectral parameter of the Cesaro resolvent, in units of tau");

    // egorov
    GraphSource eg_src;
    std::vector<double> eg_r{2, 4, 6, 8};
    double eg_s0 = 0.4, eg_delta = 0.3;
    std::uint64_t eg_symbol_seed = 5;
    bool eg_product = false;
    auto* eg = app.add_subcommand("egorov", "Egorov and product residuals of a random vertex symbol");
    eg_src.attach(eg);
    eg->add_option("--r", eg_r, "cutoff radii");
    eg->add_option("--s0", eg_s0, "profile centre in units of tau");
    eg->add_option("--delta", eg_delta, "profile half-width");
    eg->add_option("--symbol-seed", eg_symbol_seed, "seed of the vertex values");
    eg->add_flag("--product", eg_product, "report the product residual for c = [A, b] instead");

    // chin
    GraphSource chin_src;
    std::vector<double> chin_r{10, 20, 40, 80};
    double chin_s0 = 0.5, chin_delta = 0.2;
    auto* chin = app.add_subcommand("chin", "window operator residual on tempered eigenvectors");
    chin_src.attach(chin);
    chin->add_option("--r", chin_r, "cutoff radii");
    chin->add_option("--s0", chin_s0, "window centre in units of tau");
    chin->add_option("--delta", chin_delta, "window half-width");

    // kesten
    GraphSource km_src;
    std::vector<double> km_s0{0.3, 0.5, 0.7};
    double km_delta = 0.05;
    auto* km = app.add_subcommand("kesten", "empirical spectral law against Kesten-McKay");
    km_src.attach(km);
    km->add_option("--s0", km_s0, "window centres in units of tau");
    km->add_option("--delta", km_delta, "window half-width in units of tau");

    // suite
    std::string suite_config, suite_csv, suite_json;
    std::vector<std::string> suite_set;
    int suite_threads = 0;
    auto* suite = app.add_subcommand("suite", "run a configured variance sweep");
    suite->add_option("-c,--config", suite_config, "config file (key = value with [sections])");
    suite->add_option("--set", suite_set, "override, e.g. --set graph.n=500,1000")->take_all()->expected(1)->allow_extra_args(false);
    suite->add_option("--csv", suite_csv, "CSV output path");
    suite->add_option("--json", suite_json, "JSON summary path");
    suite->add_option("--threads", suite_threads, "parallel (n, seed) jobs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            auto g = gen_src.load();
            emit(gen_out, [&](std::ostream& os) { write_graph(os, *g); });
        } else if (*spec) {
            auto g = spec_src.load();
            EigOptions eo;
            eo.basis = spec_randomized ? BasisMode::Randomized : BasisMode::Solver;
            eo.seed = spec_src.seed;
            auto sd = eig(adjacency_operator(*g), g->q(), eo);
            std::unique_ptr<SpectralWindow> w;
            if (spec_s0 >= 0) w = std::make_unique<SpectralWindow>(window(sd, spec_s0 * tau(g->q()), spec_delta));
            emit(spec_out, [&](std::ostream& os) { write_spectrum_csv(os, sd, w.get()); });
            if (g->connected()) {
                auto gap = spectral_gap(sd, sd.bipartite);
                std::cerr << fmt::format("beta {:.6g} (benchmark {:.6g}), bipartite {}\n", gap.beta, gap.benchmark,
                                         sd.bipartite);
            }
        } else if (*var) {
            auto g = var_src.load();
            auto sd = eig(adjacency_operator(*g), g->q());
            const double s0 = var_s0 * tau(g->q());
            auto w = window(sd, s0, var_delta);
            const auto kind = parse_observable(var_kind);
            std::cout << "observable,window_count,variance\n";
            for (int i = 0; i < var_count; ++i) {
                auto a = make_observable(*g, kind, derive_seed(var_src.seed, 7919 + i));
                std::cout << fmt::format("{},{},{:.17g}\n", i, w.count(), quantum_variance(sd, w, a));
            }
            std::cerr << fmt::format("S_{} control variance {:.6g}\n", var_k, sk_variance_spherical(sd, w, var_k, s0));
        } else if (*nb) {
            auto g = nb_src.load();
            BondSpace bs(*g);
            auto sd = eig(adjacency_operator(*g), g->q());
            const double dist = multiset_distance(msharp_eigenvalues(bs), predicted_msharp_spectrum(sd, *g));
            std::cout << fmt::format("bonds {}, cycle rank {}, spectrum distance {:.3e}\n", bs.size(), cycle_rank(*g),
                                     dist);
            std::cout << "N,cesaro_norm\n";
            for (int N : nb_N) {
                auto c = cesaro_resolvent_norm(bs, N, nb_s * tau(g->q()));
                std::cout << fmt::format("{},{:.17g}{}\n", N, c.norm, c.flagged ? ",flagged" : "");
            }
            if (!nb_bonds.empty()) emit(nb_bonds, [&](std::ostream& os) { bs.write_csv(os); });
        } else if (*eg) {
            auto g = eg_src.load();
            WindowProfile w{eg_s0 * tau(g->q()), eg_delta};
            QuantizeOptions base;
            base.breakpoints = w.breakpoints();
            auto a = CylinderSymbol::vertex_function(g, random_values(g->n(), eg_symbol_seed));
            if (eg_product) {
                std::cout << "r,residual_sq,profile_mass,short_count,bound_shape,ratio\n";
                for (const auto& row : product_experiment(egorov_symbol(a), 1, w, eg_r, base))
                    std::cout << fmt::format("{:.17g},{:.17g},{:.17g},{},{:.17g},{:.17g}\n", row.r, row.residual_sq,
                                             row.profile_mass, row.short_count, row.bound_shape, row.ratio);
            } else {
                std::cout << "r,residual_sq,mass,short_mass,bound_shape,ratio\n";
                for (const auto& row : egorov_experiment(a, w, eg_r, base))
                    std::cout << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", row.r,
                                             row.residual_sq, row.mass, row.short_mass, row.bound_shape, row.ratio);
            }
        } else if (*chin) {
            auto g = chin_src.load();
            auto sd = eig(adjacency_operator(*g), g->q());
            std::cout << "r,delta,r_delta,residual\n";
            for (const auto& row : chin_experiment(*g, sd, chin_s0 * tau(g->q()), chin_delta, chin_r, {}))
                std::cout << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", row.r, row.delta, row.r * row.delta,
                                         row.residual);
        } else if (*km) {
            auto g = km_src.load();
            auto sd = spectrum_only(eig(adjacency_operator(*g), g->q()).eigenvalues, g->q());
            std::cout << fmt::format("ks_distance {:.6g}\n", ks_distance_km(sd.eigenvalues, g->q()));
            std::cout << "s0_tau,count,prediction,ratio,clipped\n";
            const double t = tau(g->q());
            for (double s : km_s0) {
                auto c = kesten_mckay_window_check(sd, s * t, km_delta * t);
                std::cout << fmt::format("{:.17g},{},{:.17g},{:.17g},{}\n", s, c.count,
                                         c.clipped ? c.integral_prediction : c.linear_prediction, c.ratio(),
                                         c.clipped);
            }
        } else if (*suite) {
            ExperimentConfig cfg = suite_config.empty() ? ExperimentConfig{} : load_config(suite_config);
            for (const auto& s : suite_set) apply_override(cfg, s);
            if (!suite_csv.empty()) cfg.csv_path = suite_csv;
            if (!suite_json.empty()) cfg.json_path = suite_json;
            if (suite_threads > 0) cfg.threads = suite_threads;
            auto report = run_suite(cfg);
            if (cfg.csv_path.empty())
                write_report_csv(std::cout, report);
            save_report(cfg, report);
            std::size_t bad = 0;
            for (const auto& row : report.rows) bad += row.status != "ok";
            std::cerr << fmt::format("{} rows, {} not ok, config {}\n", report.rows.size(), bad, report.config_hash);
        }
    } catch (const std::exception& e) {
        std::cerr << "qelab: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
