#include <catch_amalgamated.hpp>

#include "mslab/experiments.hpp"

#include <cstdlib>

using namespace mslab;

namespace {

ExperimentConfig smoke_config(const std::string& id, int trials, std::uint64_t seed = 11) {
    ExperimentConfig cfg;
    cfg.experiment_id = id;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.window = 80;  // lighter than the acceptance default, same tolerances
    return cfg;
}

} // namespace

TEST_CASE("registry lists the eleven experiments") {
    REQUIRE(experiment_registry().size() == 11);
    for (int i = 1; i <= 11; ++i) {
        const Experiment& e = find_experiment("E" + std::to_string(i));
        REQUIRE_FALSE(e.description.empty());
        REQUIRE(e.default_trials >= 1);
    }
    REQUIRE_THROWS_AS(find_experiment("E12"), std::invalid_argument);
}

TEST_CASE("trial count and config validation") {
    ExperimentConfig cfg = smoke_config("E1", 0);
    REQUIRE_THROWS_AS(run_experiment(cfg), std::invalid_argument);

    cfg.trials = 1;
    cfg.grid_size = 100;
    REQUIRE_THROWS_AS(run_experiment(cfg), std::invalid_argument);

    cfg.grid_size = 0;
    cfg.tolerances["bogus"] = 1.0;
    REQUIRE_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("identical config gives byte-identical reports") {
    const Report r1 = run_experiment(smoke_config("E2", 6, 7));
    const Report r2 = run_experiment(smoke_config("E2", 6, 7));
    REQUIRE(report_to_string(r1) == report_to_string(r2));
    REQUIRE(r1.summary.fail == 0);
}

TEST_CASE("thread count does not change the report") {
    setenv("MSLAB_THREADS", "1", 1);
    const Report r1 = run_experiment(smoke_config("E4", 8, 3));
    setenv("MSLAB_THREADS", "4", 1);
    const Report r2 = run_experiment(smoke_config("E4", 8, 3));
    unsetenv("MSLAB_THREADS");
    REQUIRE(report_to_string(r1) == report_to_string(r2));
}

TEST_CASE("report schema") {
    const Report r = run_experiment(smoke_config("E6", 4, 9));
    const auto j = nlohmann::json::parse(report_to_string(r));
    REQUIRE(j.at("schema_version") == "1");
    REQUIRE(j.at("experiment") == "E6");
    REQUIRE(j.at("config").at("trials") == 4);
    REQUIRE(j.at("config").at("seed") == 9);
    REQUIRE(j.at("trials").size() == 4);
    for (const auto& t : j.at("trials")) {
        REQUIRE(t.contains("seed"));  // every record carries its regeneration seed
        REQUIRE(t.contains("verdict"));
        REQUIRE(t.contains("margin"));
        REQUIRE(t.contains("inputs"));
        REQUIRE(t.contains("values"));
    }
    const auto& s = j.at("summary");
    REQUIRE(s.at("pass").get<int>() + s.at("fail").get<int>() + s.at("skip").get<int>() == 4);
    REQUIRE(s.at("wall_ms") == 0);
}

TEST_CASE("smoke run of every experiment") {
    for (const Experiment& e : experiment_registry()) {
        const Report r = run_experiment(smoke_config(e.id, 3, 21));
        INFO(e.id << ": " << report_to_string(r));
        REQUIRE(r.summary.fail == 0);
    }
}

TEST_CASE("skip rate stays below twenty percent") {
    for (const std::string id : {"E2", "E4", "E5"}) {
        const Report r = run_experiment(smoke_config(id, 20, 5));
        REQUIRE(r.summary.skip * 5 < 20);  // < 20%
    }
}
