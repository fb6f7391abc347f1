#include "doctest.h"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "qelab/suite.hpp"
#include "qelab/tree.hpp"

using namespace qelab;

namespace {

ExperimentConfig small_config() {
    std::istringstream in(R"(
# small sweep
[graph]
q = 2
n = 60, 100
seeds = 1, 2

[window]
s0 = 0.5, 0.35
delta_mode = fixed
delta = 0.6

[cutoff]
policy = eiir_log   # r from log n
r_min = 1.5

[observable]
kind = rademacher
count = 2
)");
    return parse_config(in);
}

std::string csv_of(const VarianceReport& r) {
    std::ostringstream os;
    write_report_csv(os, r);
    return os.str();
}

}  // namespace

TEST_CASE("config parsing") {
    auto cfg = small_config();
    CHECK(cfg.q == 2);
    CHECK(cfg.n_list == std::vector<int>{60, 100});
    CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2});
    CHECK(cfg.s0_tau == std::vector<double>{0.5, 0.35});
    CHECK(cfg.delta_mode == DeltaMode::Fixed);
    CHECK(cfg.delta_fixed == 0.6);
    CHECK(cfg.r_policy == RPolicy::EiirLog);
    CHECK(cfg.r_min == 1.5);
    CHECK(cfg.observables == 2);
    CHECK(cfg.T == 4);  // default kept

    apply_override(cfg, "averaging.T=8");
    apply_override(cfg, "basis = randomized");
    apply_override(cfg, "graph.n=");
    CHECK(cfg.T == 8);
    CHECK(cfg.basis == BasisMode::Randomized);
    CHECK(cfg.n_list.empty());

    CHECK_THROWS_AS(apply_override(cfg, "graph.colour=red"), std::invalid_argument);
    CHECK_THROWS_AS(apply_override(cfg, "graph.q"), std::invalid_argument);
    CHECK_THROWS_AS(apply_override(cfg, "graph.q=two"), std::invalid_argument);
    CHECK_THROWS_AS(apply_override(cfg, "cutoff.policy=largest"), std::invalid_argument);
    std::istringstream bad("[graph\nq = 2\n");
    CHECK_THROWS_AS(parse_config(bad), std::invalid_argument);
    std::istringstream no_eq("q 2\n");
    CHECK_THROWS_AS(parse_config(no_eq), std::invalid_argument);
}

TEST_CASE("config validation") {
    auto cfg = small_config();
    CHECK_NOTHROW(validate(cfg));
    auto c = cfg;
    c.s0_tau = {1.0};
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = cfg;
    c.delta_mode = DeltaMode::Fixed;
    c.delta_fixed = 0.0;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = cfg;
    c.n_list = {5000};
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = cfg;
    c.n_list = {61};  // n (q + 1) odd
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = cfg;
    c.bipartite = true;  // observable kind mismatch
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
}

TEST_CASE("config hash and cutoff schedules") {
    auto a = small_config();
    auto b = small_config();
    b.csv_path = "elsewhere.csv";
    b.threads = 3;
    CHECK(config_hash(a) == config_hash(b));
    b.seeds.push_back(3);
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash(a).size() == 16);
    CHECK(fnv1a("") == 14695981039346656037ull);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);

    ExperimentConfig cfg;
    std::vector<int> rho{3, 4, 2, 5};
    CHECK(choose_r(cfg, rho, 1000) == 2.0);
    cfg.r_min = 2.5;
    CHECK(choose_r(cfg, rho, 1000) == 2.5);
    cfg.r_policy = RPolicy::Fixed;
    cfg.r_fixed = 7;
    CHECK(choose_r(cfg, rho, 1000) == 7.0);
    cfg.r_policy = RPolicy::EiirLog;
    cfg.r_min = 1;
    CHECK(choose_r(cfg, rho, 4096) == doctest::Approx(0.4 * 12 - 2));
    CHECK(choose_r(cfg, rho, 8) == 1.0);
    CHECK(choose_delta(cfg, 4.0) == doctest::Approx(0.5));
    cfg.delta_mode = DeltaMode::Fixed;
    CHECK(choose_delta(cfg, 4.0) == cfg.delta_fixed);
}

TEST_CASE("suite runs deterministically") {
    auto cfg = small_config();
    const auto first = run_suite(cfg);
    REQUIRE(first.rows.size() == 2 * 2 * 2 * 2);
    for (const auto& row : first.rows) {
        CHECK(row.status == "ok");
        CHECK(row.variance >= 0.0);
        CHECK(row.control_variance >= 0.0);
        CHECK(row.window_count > 0);
        CHECK(row.stride == (row.s0 == 0.5 ? 2 : 1));
        CHECK(row.benchmark == doctest::Approx(std::pow(row.r, -2.0 / 9.0)));
        CHECK(row.eiir_fraction >= 0.0);
        CHECK(row.eiir_fraction <= 1.0);
    }
    const std::string csv = csv_of(first);
    CHECK(csv == csv_of(run_suite(cfg)));
    cfg.threads = 2;
    CHECK(csv == csv_of(run_suite(cfg)));
    CHECK(csv.substr(0, csv.find('\n')) ==
          "n,seed,s0_tau,observable,r,delta,stride,window_count,variance,control_variance,control_mean,"
          "ergodic_form,beta,eiir_fraction,benchmark,status");

    std::ostringstream js;
    write_report_json(js, first);
    auto doc = nlohmann::json::parse(js.str());
    CHECK(doc["config_hash"] == config_hash(cfg));
    CHECK(doc["rows"].size() == first.rows.size());
    CHECK(doc["git_describe"].get<std::string>() == git_describe());

    auto medians = seed_medians(first, &VarianceRow::variance);
    REQUIRE(medians.size() == 2);
    for (auto& [s0, series] : medians) {
        REQUIRE(series.size() == 2);
        CHECK(series[0].first == 60);
        CHECK(series[1].first == 100);
    }
}

TEST_CASE("suite edge cases") {
    auto cfg = small_config();
    cfg.n_list.clear();
    auto empty = run_suite(cfg);
    CHECK(empty.rows.empty());
    CHECK(csv_of(empty).find('\n') == csv_of(empty).size() - 1);

    // a tiny window that catches nothing is reported, not fatal
    cfg = small_config();
    cfg.n_list = {20};
    cfg.delta_fixed = 1e-9;
    auto thin = run_suite(cfg);
    for (const auto& row : thin.rows) CHECK(row.status == "empty_window");

    // generation failure becomes an error row and the suite continues
    cfg = small_config();
    cfg.q = 6;
    cfg.n_list = {400};
    cfg.seeds = {1};
    auto failed = run_suite(cfg);
    REQUIRE(!failed.rows.empty());
    for (const auto& row : failed.rows) CHECK(row.status.rfind("budget", 0) == 0);
    CHECK(seed_medians(failed, &VarianceRow::variance).empty());

    cfg = small_config();
    cfg.bipartite = true;
    cfg.observable = ObservableKind::BipartiteBalanced;
    cfg.n_list = {80};
    auto bip = run_suite(cfg);
    for (const auto& row : bip.rows) {
        CHECK(row.status == "ok");
        CHECK(row.beta > 0.0);
    }
}
