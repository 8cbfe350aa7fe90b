#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "gridflow/config.hpp"
#include "gridflow/eval.hpp"
#include "gridflow/output.hpp"

using namespace gridflow;
namespace fs = std::filesystem;

namespace {

struct EnvGuard {
    EnvGuard() { unsetenv("GRIDFLOW_OUT"); }
    ~EnvGuard() { unsetenv("GRIDFLOW_OUT"); }
};

}  // namespace

TEST_CASE("basic flag parsing") {
    EnvGuard env;
    ExperimentConfig cfg =
        parse_config({"--model", "henon", "--filter", "lgbf", "--grid", "31,31"});
    CHECK(cfg.model_id == "henon");
    REQUIRE(cfg.filters.size() == 1);
    CHECK(cfg.filters[0] == "lgbf");
    CHECK(cfg.grid_counts == std::vector<int>{31, 31});
    CHECK(cfg.effective_particles() == 961);
    // defaults
    CHECK(cfg.kappa == 5.0);
    CHECK(cfg.mc_runs == 100);
    CHECK(cfg.steps == 10);
    CHECK(cfg.seed == 1);
    CHECK(cfg.out_dir == ".");
}

TEST_CASE("filter lists, particles, model overrides") {
    EnvGuard env;
    ExperimentConfig cfg = parse_config({"--model", "henon", "--filter", "lgbf,egbf,pf",
                                         "--particles", "500", "--kappa", "4",
                                         "--mc-runs", "7", "--steps", "3", "--seed", "99",
                                         "--set", "model.r=0.25", "--debug-dump"});
    CHECK(cfg.filters == std::vector<std::string>{"lgbf", "egbf", "pf"});
    CHECK(cfg.particles == 500);
    CHECK(cfg.effective_particles() == 500);
    CHECK(cfg.kappa == 4.0);
    CHECK(cfg.mc_runs == 7);
    CHECK(cfg.steps == 3);
    CHECK(cfg.seed == 99);
    CHECK(cfg.debug_dump);
    REQUIRE(cfg.model_params.count("r"));
    CHECK(cfg.model_params.at("r") == std::vector<double>{0.25});
    // model default grid filled in
    CHECK(cfg.grid_counts == std::vector<int>{31, 31});
}

TEST_CASE("validation errors name the offending input") {
    EnvGuard env;
    CHECK_THROWS_WITH_AS(parse_config({"--grid", "30,31"}),
                         doctest::Contains("dimension 1"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config({"--model", "lorenz"}),
                         doctest::Contains("lorenz"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config({"--filter", "ukf"}), doctest::Contains("ukf"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config({"--steps", "ten"}), doctest::Contains("steps"),
                         std::invalid_argument);
    CHECK_THROWS_AS(parse_config({"--kappa", "0.5"}), std::invalid_argument);
    CHECK_THROWS_AS(parse_config({"--kappa", "11"}), std::invalid_argument);
    CHECK_THROWS_AS(parse_config({"--mc-runs", "0"}), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config({"--unknown-flag"}), doctest::Contains("--unknown-flag"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config({"--set", "color=red"}), doctest::Contains("color"),
                         std::invalid_argument);
    CHECK_THROWS_AS(parse_config({"--seed"}), std::invalid_argument);
}

TEST_CASE("config file parsing and flag precedence") {
    EnvGuard env;
    const std::string path = "test_cli_config.txt";
    {
        std::ofstream out(path);
        out << "# comment line\n";
        out << "model=henon\n";
        out << "seed=7  # trailing comment\n";
        out << "kappa=6\n";
        out << "\n";
    }
    ExperimentConfig from_file = parse_config({"--config", path});
    CHECK(from_file.seed == 7);
    CHECK(from_file.kappa == 6.0);

    ExperimentConfig overridden = parse_config({"--config", path, "--seed", "9"});
    CHECK(overridden.seed == 9);  // flags win
    CHECK(overridden.kappa == 6.0);

    {
        std::ofstream out(path);
        out << "nonsense_key=1\n";
    }
    CHECK_THROWS_WITH_AS(parse_config({"--config", path}),
                         doctest::Contains("nonsense_key"), std::invalid_argument);
    fs::remove(path);
    CHECK_THROWS_AS(parse_config({"--config", "does_not_exist.cfg"}), std::invalid_argument);
}

TEST_CASE("GRIDFLOW_OUT supplies the output directory default") {
    EnvGuard env;
    setenv("GRIDFLOW_OUT", "env_out_dir", 1);
    ExperimentConfig cfg = parse_config({"--model", "henon"});
    CHECK(cfg.out_dir == "env_out_dir");
    ExperimentConfig flag = parse_config({"--model", "henon", "--out", "flag_dir"});
    CHECK(flag.out_dir == "flag_dir");  // explicit flag wins
}

TEST_CASE("config echo round trip") {
    EnvGuard env;
    ExperimentConfig cfg = parse_config({"--model", "ct5d", "--filter", "lgbf,pf",
                                         "--grid", "11,11,11,11,11", "--particles", "1234",
                                         "--kappa", "4.5", "--mc-runs", "20", "--steps",
                                         "20", "--seed", "3", "--out", "somewhere",
                                         "--set", "model.q1=0.2", "--debug-dump"});
    const std::string path = "test_cli_echo.cfg";
    {
        std::ofstream out(path);
        out << config_echo(cfg);
    }
    ExperimentConfig rt = parse_config({"--config", path});
    fs::remove(path);
    CHECK(rt.model_id == cfg.model_id);
    CHECK(rt.filters == cfg.filters);
    CHECK(rt.grid_counts == cfg.grid_counts);
    CHECK(rt.particles == cfg.particles);
    CHECK(rt.kappa == cfg.kappa);
    CHECK(rt.mc_runs == cfg.mc_runs);
    CHECK(rt.steps == cfg.steps);
    CHECK(rt.seed == cfg.seed);
    CHECK(rt.out_dir == cfg.out_dir);
    CHECK(rt.debug_dump == cfg.debug_dump);
    CHECK(rt.model_params == cfg.model_params);
}

TEST_CASE("emit_outputs writes one summary and one records file per filter") {
    EnvGuard env;
    ExperimentConfig cfg;
    cfg.model_id = "henon";
    cfg.filters = {"lgbf", "pf"};
    cfg.grid_counts = {11, 11};
    cfg.mc_runs = 2;
    cfg.steps = 2;
    cfg.out_dir = "test_cli_out";
    validate_config(cfg);

    std::map<std::string, ExperimentResult> results;
    for (const std::string& f : cfg.filters) results[f] = run_experiment(cfg, f);
    const std::vector<std::string> written = emit_outputs(results, cfg);

    for (const std::string& f : cfg.filters) {
        CHECK(fs::exists(fs::path(cfg.out_dir) / (f + "_summary.json")));
        CHECK(fs::exists(fs::path(cfg.out_dir) / (f + "_records.csv")));
        CHECK(fs::exists(fs::path(cfg.out_dir) / (f + "_trajectory_run0.csv")));
    }
    CHECK(fs::exists(fs::path(cfg.out_dir) / "table.txt"));
    CHECK(written.size() == 3 * cfg.filters.size() + 1);

    // one table row per filter plus the header
    std::ifstream table(fs::path(cfg.out_dir) / "table.txt");
    int lines = 0;
    std::string line;
    while (std::getline(table, line))
        if (!line.empty()) ++lines;
    CHECK(lines == static_cast<int>(cfg.filters.size()) + 1);
    fs::remove_all(cfg.out_dir);
}
