#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "matjack/matjack.hpp"

using namespace matjack;

namespace {

MatrixSource rank5_psd(Index d, std::uint64_t seed) {
    const MatrixXd g = gaussian_sketch(d, 5, seed).values;
    return MatrixSource::symmetric_dense(g * g.transpose());
}

}  // namespace

TEST_CASE("exact-rank input drives every metric to zero") {
    const MatrixSource a = rank5_psd(60, 3);
    for (const std::string& algorithm : {std::string("rsvd"), std::string("nystrom")}) {
        ExperimentConfig cfg;
        cfg.algorithm = algorithm;
        cfg.trials = 3;
        cfg.base_seed = 17;
        const MetricsRow row = monte_carlo_metrics(cfg, a, 20);
        REQUIRE(row.err <= 1e-6);
        REQUIRE(row.bias <= 1e-6);
        REQUIRE(row.sd <= 1e-6);
        REQUIRE(row.jack_mean <= 1e-6);
    }
}

TEST_CASE("a single trial has zero SD and Bias equal to Err") {
    const MatrixSource a = exp_decay(40, 3, 0.3);
    ExperimentConfig cfg;
    cfg.trials = 1;
    cfg.q = 1;
    const MetricsRow row = monte_carlo_metrics(cfg, a, 6);
    REQUIRE(row.sd == 0.0);
    REQUIRE(row.bias == Catch::Approx(row.err).epsilon(1e-14));
    REQUIRE(row.jack_std == 0.0);
}

TEST_CASE("sample bias-variance identity holds on the reference configuration") {
    const MatrixSource a = exp_decay(200, 5, 0.25);
    ExperimentConfig cfg;
    cfg.trials = 200;
    cfg.q = 2;
    cfg.base_seed = 5;
    const MetricsRow row = monte_carlo_metrics(cfg, a, 20);
    const double lhs = row.err * row.err;
    const double rhs = row.bias * row.bias + row.sd * row.sd;
    REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-8));
    // The jackknife should track the SD within an order of magnitude here.
    REQUIRE(row.jack_mean / row.sd >= 0.1);
    REQUIRE(row.jack_mean / row.sd <= 10.0);
}

TEST_CASE("sweep writes one row per sketch size plus a header") {
    const MatrixSource a = exp_decay(50, 3, 0.3);
    ExperimentConfig cfg;
    cfg.matrix_id = "expdecay-small";
    cfg.trials = 5;
    cfg.q = 1;
    cfg.s_values = {4, 6, 8};
    std::ostringstream out;
    const auto rows = sweep_experiment(cfg, a, out);
    REQUIRE(rows.size() == 3);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    REQUIRE(line ==
            "matrix_id,algorithm,d1,d2,s,q,trials,err,bias,sd,jack_mean,jack_std,"
            "derived_target,error");
    int count = 0;
    while (std::getline(in, line)) {
        REQUIRE(line.rfind("expdecay-small,rsvd,50,50,", 0) == 0);
        ++count;
    }
    REQUIRE(count == 3);
}

TEST_CASE("identical configs produce byte-identical CSVs") {
    const MatrixSource a = exp_decay(40, 3, 0.3);
    ExperimentConfig cfg;
    cfg.trials = 4;
    cfg.q = 1;
    cfg.s_values = {4, 8};
    cfg.base_seed = 99;
    std::ostringstream first, second;
    sweep_experiment(cfg, a, first);
    sweep_experiment(cfg, a, second);
    REQUIRE(first.str() == second.str());
    REQUIRE(!first.str().empty());
}

TEST_CASE("fast and baseline cores give matching sweep statistics") {
    const MatrixSource a = exp_decay(60, 4, 0.3);
    ExperimentConfig cfg;
    cfg.trials = 3;
    cfg.q = 1;
    const MetricsRow fast = monte_carlo_metrics(cfg, a, 10);
    cfg.use_fast_cores = false;
    const MetricsRow base = monte_carlo_metrics(cfg, a, 10);
    REQUIRE(fast.jack_mean == Catch::Approx(base.jack_mean).epsilon(1e-8));
    REQUIRE(fast.err == Catch::Approx(base.err).epsilon(1e-12));
}

TEST_CASE("the memory cap refuses oversized accumulations") {
    const MatrixSource a = exp_decay(100, 3, 0.3);
    ExperimentConfig cfg;
    cfg.trials = 2;
    cfg.memory_cap_bytes = 1024;  // 100x100 doubles need 80 kB
    REQUIRE_THROWS_AS(monte_carlo_metrics(cfg, a, 5), ParameterError);

    // Inside a sweep the refusal lands in the error column.
    cfg.s_values = {5};
    std::ostringstream out;
    const auto rows = sweep_experiment(cfg, a, out);
    REQUIRE(rows.size() == 1);
    REQUIRE(!rows[0].error.empty());
    REQUIRE(out.str().find(rows[0].error) != std::string::npos);
}

TEST_CASE("metric values survive a CSV round trip at full precision") {
    MetricsRow row;
    row.matrix_id = "m";
    row.algorithm = "rsvd";
    row.err = 0.1234567890123456789;
    row.jack_mean = 3.0000000000000004e-7;
    std::ostringstream out;
    write_metrics_row(out, row);
    std::istringstream in(out.str());
    std::string cell;
    for (int i = 0; i < 8; ++i) std::getline(in, cell, ',');
    REQUIRE(std::stod(cell) == row.err);
    for (int i = 0; i < 3; ++i) std::getline(in, cell, ',');
    REQUIRE(std::stod(cell) == row.jack_mean);
}

TEST_CASE("projector targets use unit normalization and stay bounded") {
    const MatrixSource a = poly_decay(40, 1, 1.0);  // well-separated spectrum
    ExperimentConfig cfg;
    cfg.trials = 4;
    cfg.q = 2;
    cfg.target.kind = DerivedTarget::Kind::Projector;
    cfg.target.index = 2;
    const MetricsRow row = monte_carlo_metrics(cfg, a, 8);
    REQUIRE(row.derived_target == "projector-2-left");
    // Projectors differ by at most sqrt(2) in Frobenius norm.
    REQUIRE(row.err <= std::sqrt(2.0) + 1e-12);
    REQUIRE(row.jack_mean > 0.0);
}

TEST_CASE("truncation target of an exactly low-rank matrix is exact") {
    const MatrixSource a = rank5_psd(50, 21);
    ExperimentConfig cfg;
    cfg.trials = 3;
    cfg.target.kind = DerivedTarget::Kind::Truncation;
    cfg.target.index = 5;
    const MetricsRow row = monte_carlo_metrics(cfg, a, 15);
    REQUIRE(row.derived_target == "truncation-5");
    REQUIRE(row.err <= 1e-6);
    REQUIRE(row.jack_mean <= 1e-6);
}

TEST_CASE("orthoprojector check matches the closed forms") {
    const OrthoprojectorCheck check = orthoprojector_check(20, 5, 500, 7);
    REQUIRE(check.bias_sq_formula == Catch::Approx(11.25).epsilon(1e-14));
    REQUIRE(check.var_formula == Catch::Approx(3.75).epsilon(1e-14));
    const double se_scale = check.var_formula / std::sqrt(500.0);
    REQUIRE(std::abs(check.bias_sq_mc - check.bias_sq_formula) <= 3.0 * se_scale);
    REQUIRE(std::abs(check.var_mc - check.var_formula) <= 3.0 * se_scale);
    REQUIRE_THROWS_AS(orthoprojector_check(5, 6, 10, 0), ParameterError);
    REQUIRE_THROWS_AS(orthoprojector_check(5, 3, 0, 0), ParameterError);
}

TEST_CASE("entry map reports per-row deviation estimates") {
    const MatrixSource a = rank5_psd(30, 8);
    const RsvdResult res = rsvd(a, 10, 0, 2);
    const CoreReplicates cores = rsvd_cores_fast(res);
    const auto map = entry_map(res, cores, 1);
    REQUIRE(map.size() == 30);
    for (const auto& r : map) {
        REQUIRE(r.value == Catch::Approx(std::abs(res.u(r.row, 0))).margin(1e-14));
        // Exact-rank input: the top singular vector is identical across
        // replicates, so the estimate collapses.
        REQUIRE(r.estimate <= 1e-6);
    }
    REQUIRE_THROWS_AS(entry_map(res, cores, 0), ParameterError);
    REQUIRE_THROWS_AS(entry_map(res, cores, 11), ParameterError);
}

TEST_CASE("experiment configs reject bad parameters") {
    const MatrixSource a = exp_decay(20, 2, 0.5);
    ExperimentConfig cfg;
    cfg.trials = 0;
    REQUIRE_THROWS_AS(monte_carlo_metrics(cfg, a, 5), ParameterError);
    cfg.trials = 2;
    REQUIRE_THROWS_AS(monte_carlo_metrics(cfg, a, 1), ParameterError);
    cfg.algorithm = "other";
    REQUIRE_THROWS_AS(monte_carlo_metrics(cfg, a, 5), ParameterError);
}
