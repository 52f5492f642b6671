#include "selfaffine/config.hpp"
#include "selfaffine/errors.hpp"
#include "selfaffine/run.hpp"

#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace selfaffine;

namespace {

std::string cantor_json(const std::string& task, const std::string& params = "{}") {
    return R"({
      "dimension": 1,
      "maps": [
        {"matrix": 0.3333333333333333, "translation": [0.0], "probability": 0.5},
        {"matrix": 0.3333333333333333, "translation": [0.6666666666666666], "probability": 0.5}
      ],
      "task": ")" + task + R"(",
      "params": )" + params + "}";
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string temp_dir(const std::string& tag) {
    auto p = std::filesystem::temp_directory_path() / ("safm_test_" + tag);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p.string();
}

} // namespace

TEST_CASE("parse_config: minimal valid spec") {
    auto cfg = parse_config(cantor_json("tau"));
    CHECK(cfg.has_spec);
    CHECK(cfg.spec.map_count() == 2);
    CHECK(cfg.spec.dim == 1);
    CHECK(cfg.task == "tau");
}

TEST_CASE("parse_config: probability sum error names the sum") {
    std::string bad = R"({
      "dimension": 1,
      "maps": [
        {"matrix": 0.3, "probability": 0.6},
        {"matrix": 0.3, "probability": 0.6}
      ],
      "task": "tau"})";
    CHECK_THROWS_WITH_AS(parse_config(bad), doctest::Contains("sum to 1.2"), ValidationError);
}

TEST_CASE("parse_config: non-contractive map names the index and singular value") {
    std::string bad = R"({
      "dimension": 2,
      "maps": [
        {"matrix": [[0.3, 0.0], [0.0, 0.2]], "probability": 0.5},
        {"matrix": [[1.1, 0.0], [0.0, 0.2]], "probability": 0.5}
      ],
      "task": "tau"})";
    try {
        parse_config(bad);
        FAIL("expected rejection");
    } catch (const ValidationError& e) {
        std::string what = e.what();
        CHECK(what.find("map 2") != std::string::npos);
        CHECK(what.find("1.1") != std::string::npos);
    }
}

TEST_CASE("parse_config: malformed JSON and structural errors") {
    CHECK_THROWS_AS(parse_config("{"), ValidationError);
    CHECK_THROWS_AS(parse_config("[]"), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"task": "fly"})"), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"task": "tau"})"), ValidationError); // needs maps
    // covering runs without maps
    auto cfg = parse_config(R"({"task": "covering", "params": {"families": 2}})");
    CHECK(!cfg.has_spec);
}

TEST_CASE("parse_config: shape errors name the offending field") {
    // ragged matrix
    CHECK_THROWS_WITH_AS(parse_config(R"({"dimension": 2, "task": "tau",
        "maps": [{"matrix": [[0.3, 0.0], [0.2]], "probability": 1.0}]})"),
                         doctest::Contains("maps[0].matrix"), ValidationError);
    // diagonal of the wrong length
    CHECK_THROWS_AS(parse_config(R"({"dimension": 2, "task": "tau",
        "maps": [{"matrix": [0.3, 0.2, 0.1], "probability": 1.0}]})"),
                    ValidationError);
    // scalar matrix in dimension 2
    CHECK_THROWS_AS(parse_config(R"({"dimension": 2, "task": "tau",
        "maps": [{"matrix": 0.3, "probability": 1.0}]})"),
                    ValidationError);
    // non-positive dimension
    CHECK_THROWS_AS(parse_config(R"({"dimension": 0, "task": "tau",
        "maps": [{"matrix": 0.3, "probability": 1.0}]})"),
                    ValidationError);
    // translations on only one map
    CHECK_THROWS_AS(parse_config(R"({"dimension": 1, "task": "tau", "maps": [
        {"matrix": 0.3, "translation": [0.0], "probability": 0.5},
        {"matrix": 0.3, "probability": 0.5}]})"),
                    ValidationError);
    // translation of the wrong arity
    CHECK_THROWS_AS(parse_config(R"({"dimension": 2, "task": "tau", "maps": [
        {"matrix": [0.3, 0.2], "translation": [0.0], "probability": 1.0}]})"),
                    ValidationError);
}

TEST_CASE("config round-trip: emit then parse reproduces the run") {
    auto cfg = parse_config(cantor_json("dq", R"({"q_grid": [0.5, 1.5, 2.5], "seed": 7})"));
    auto text = emit_config(cfg);
    auto cfg2 = parse_config(text);
    CHECK(cfg2.task == cfg.task);
    CHECK(cfg2.params == cfg.params);
    CHECK(cfg2.spec.hash() == cfg.spec.hash());
    CHECK(emit_config(cfg2) == text);
}

TEST_CASE("overrides: scalars, task retarget, rejects junk") {
    auto cfg = parse_config(cantor_json("tau"));
    apply_override(cfg, "seed=42");
    CHECK(cfg.params["seed"].get<long long>() == 42);
    apply_override(cfg, "tol=1e-7");
    CHECK(cfg.params["tol"].get<double>() == doctest::Approx(1e-7));
    apply_override(cfg, "task=dq");
    CHECK(cfg.task == "dq");
    apply_override(cfg, "method=exact");
    CHECK(cfg.params["method"] == "exact");
    CHECK_THROWS_AS(apply_override(cfg, "novalue"), ValidationError);
    CHECK_THROWS_AS(apply_override(cfg, "task=fly"), ValidationError);
}

TEST_CASE("run: tau task emits csv + meta, reproducibly") {
    auto dir = temp_dir("tau");
    auto cfg = parse_config(cantor_json("tau", R"({"q_grid": {"from": 0.5, "to": 2.5, "count": 9}})"));
    cfg.out_dir = dir;
    auto res = run(cfg);
    CHECK(res.exit_code == 0);
    REQUIRE(res.outputs.size() == 2);
    auto first = slurp(dir + "/tau.csv");
    CHECK(first.find("q,D,tau,method") == 0);

    auto res2 = run(cfg);
    CHECK(slurp(dir + "/tau.csv") == first); // byte-identical data
}

TEST_CASE("run: lyapunov exact and sample determinism") {
    auto dir = temp_dir("lyap");
    auto cfg = parse_config(cantor_json("lyapunov", R"({"method": "exact"})"));
    cfg.out_dir = dir;
    auto res = run(cfg);
    CHECK(res.exit_code == 0);
    auto text = slurp(dir + "/lyapunov.csv");
    CHECK(text.find("lambda_1") != std::string::npos);
    CHECK(text.find("dim_ly") != std::string::npos);

    auto scfg = parse_config(cantor_json("sample", R"({"n": 500, "seed": 3})"));
    scfg.out_dir = dir;
    run(scfg);
    auto s1 = slurp(dir + "/sample.csv");
    run(scfg);
    CHECK(slurp(dir + "/sample.csv") == s1);
    CHECK(s1.find("spec_hash=") != std::string::npos);
}

TEST_CASE("run: verify passes on the cantor system") {
    auto dir = temp_dir("verify");
    auto cfg = parse_config(
        cantor_json("verify", R"({"q_grid": {"from": 0.2, "to": 3.0, "count": 29}})"));
    cfg.out_dir = dir;
    auto res = run(cfg);
    CHECK(res.exit_code == 0);
    CHECK(res.failures.empty());
}

TEST_CASE("run: covering task emits certified rows") {
    auto dir = temp_dir("cover");
    auto cfg = parse_config(R"({"task": "covering",
                                "params": {"families": 5, "rects": 25, "seed": 9}})");
    cfg.out_dir = dir;
    auto res = run(cfg);
    CHECK(res.exit_code == 0);
    auto text = slurp(dir + "/covering.csv");
    CHECK(text.find("rectangles") != std::string::npos);
    CHECK(text.find("translates") != std::string::npos);
}

TEST_CASE("run: empirical-tau writes per-seed moments and the aggregate") {
    auto dir = temp_dir("emp");
    auto cfg = parse_config(cantor_json(
        "empirical-tau",
        R"({"seeds": 2, "n": 40000, "qs": [0.5, 2.0], "r_hi_exp": -3, "r_lo_exp": -7})"));
    cfg.out_dir = dir;
    auto res = run(cfg);
    CHECK(res.exit_code == 0);
    CHECK(std::filesystem::exists(dir + "/empirical-tau.csv"));
    CHECK(std::filesystem::exists(dir + "/empirical-tau_seed0.csv"));
    CHECK(std::filesystem::exists(dir + "/empirical-tau_moments_seed1.csv"));
    auto agg = slurp(dir + "/empirical-tau.csv");
    CHECK(agg.find("q,mean,stddev,n_seeds") == 0);
    auto mom = slurp(dir + "/empirical-tau_moments_seed1.csv");
    CHECK(mom.find("r,q,log_moment,cells_occupied") == 0);
}

TEST_CASE("run: closed-form task with jump metadata") {
    std::string text = R"({
      "dimension": 2,
      "maps": [
        {"matrix": [0.6, 0.01], "probability": 0.9},
        {"matrix": [0.6, 0.01], "probability": 0.1}
      ],
      "task": "closed-form",
      "params": {"q_grid": {"from": 0.1, "to": 2.0, "count": 20}}})";
    auto dir = temp_dir("closed");
    auto cfg = parse_config(text);
    cfg.out_dir = dir;
    auto res = run(cfg);
    CHECK(res.exit_code == 0);
    auto meta = slurp(dir + "/closed-form.meta");
    CHECK(meta.find("branch_crossings") != std::string::npos);
    CHECK(meta.find("q_cross") != std::string::npos);
}

TEST_CASE("run: regimes task on a similitude spec") {
    auto dir = temp_dir("regimes");
    auto cfg = parse_config(cantor_json("regimes"));
    cfg.out_dir = dir;
    auto res = run(cfg);
    CHECK(res.exit_code == 0);
    auto meta = slurp(dir + "/regimes.meta");
    CHECK(meta.find("q_max") != std::string::npos);
    CHECK(meta.find("validity_interval") != std::string::npos);
}
