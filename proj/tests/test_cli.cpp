#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "qhchain/report.hpp"

using namespace qhchain;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    static int counter = 0;
    const fs::path p = fs::temp_directory_path()
        / ("qhchain_test_" + tag + "_" + std::to_string(::getpid()) + "_"
           + std::to_string(counter++));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const json& doc) {
    const fs::path p = dir / "config.json";
    std::ofstream out(p);
    out << doc.dump(2);
    return p;
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::vector<std::string>* header) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    if (header) {
        header->clear();
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header->push_back(cell);
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

TEST_CASE("config parsing") {
    SECTION("defaults") {
        const RunConfig c = parse_config(json{{"scenario", "baseline"}});
        REQUIRE(c.scenario == "baseline");
        REQUIRE_FALSE(c.n.has_value());
        REQUIRE(c.dt == 0.01);
        REQUIRE(c.residual_tol == 1e-10);
    }
    SECTION("unknown keys are rejected at every level") {
        REQUIRE_THROWS_AS(parse_config(json{{"scenario", "baseline"}, {"bogus", 1}}), ConfigError);
        REQUIRE_THROWS_AS(parse_config(json{{"scenario", "baseline"},
                                            {"overrides", {{"zetas", 0.1}}}}),
                          ConfigError);
    }
    SECTION("unknown scenario and mode") {
        REQUIRE_THROWS_AS(parse_config(json{{"scenario", "caseX"}}), ConfigError);
        REQUIRE_THROWS_AS(parse_config(json{{"scenario", "baseline"}, {"mode", "dance"}}),
                          ConfigError);
    }
    SECTION("time grid must increase") {
        REQUIRE_THROWS_AS(parse_config(json{{"scenario", "baseline"},
                                            {"evolve", {{"t_samples", {2.0, 1.0}}}}}),
                          ConfigError);
    }
    SECTION("overrides reach the preset") {
        RunConfig c = parse_config(json{{"scenario", "baseline"},
                                        {"n", 4},
                                        {"overrides", {{"zeta", 0.2}, {"nbar_A", 7.0}}}});
        const ScenarioPreset p = resolve_preset(c);
        REQUIRE(p.chain.n == 4);
        REQUIRE(p.bank.thermal.front().zeta == 0.2);
        REQUIRE(p.bank.diffusive_A->nbar == 7.0);
    }
    SECTION("physics violations surface as config errors") {
        RunConfig c = parse_config(json{{"scenario", "baseline"},
                                        {"overrides", {{"zeta", -0.1}}}});
        REQUIRE_THROWS_AS(resolve_preset(c), ConfigError);
    }
}

TEST_CASE("config validation diagnostics") {
    SECTION("clean baseline") {
        REQUIRE(validate_config(json{{"scenario", "baseline"}, {"n", 5}}).empty());
    }
    SECTION("negative rate names the physics") {
        const auto diags = validate_config(json{{"scenario", "baseline"},
                                                {"n", 4},
                                                {"overrides", {{"zeta", -0.1}}}});
        REQUIRE(diags.size() == 1);
        REQUIRE(diags.front().severity == "error");
        REQUIRE(diags.front().field == "physics");
    }
    SECTION("undamped chain warns about the missing steady state") {
        const auto diags = validate_config(json{{"scenario", "caseII"}, {"n", 4}});
        REQUIRE(diags.size() == 1);
        REQUIRE(diags.front().severity == "warning");
        REQUIRE(diags.front().field == "stability");
        REQUIRE(diags.front().message.find("no steady state") != std::string::npos);
    }
}

TEST_CASE("steady run writes consistent tables") {
    const fs::path dir = fresh_dir("steady");
    RunConfig c = parse_config(json{{"scenario", "baseline"}, {"n", 25}});
    const RunResult r = run_steady(c, dir, "both");
    REQUIRE(r.exit_code == exit_ok);
    REQUIRE(fs::exists(dir / "steady.csv"));
    REQUIRE(fs::exists(dir / "report.json"));

    std::vector<std::string> header;
    const auto rows = read_csv(dir / "steady.csv", &header);
    REQUIRE(header == std::vector<std::string>{"site", "occupation", "current"});
    REQUIRE(rows.size() == 25);
    REQUIRE(rows.front()[0] == 1.0);
    REQUIRE(rows.back()[0] == 25.0);

    // CSV and JSON agree cell for cell
    std::ifstream in(dir / "report.json");
    json report;
    in >> report;
    const auto& jrows = report["table"]["rows"];
    REQUIRE(jrows.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            REQUIRE(rows[i][j] == jrows[i][j].get<double>());

    REQUIRE(report["diagnostics"]["residual_ok"].get<bool>());
    REQUIRE(report["observables"]["mean_energy"].get<double>()
            == Catch::Approx(412.5).epsilon(1e-10));
    fs::remove_all(dir);
}

TEST_CASE("steady run on the undamped chain reports the missing fixed point") {
    const fs::path dir = fresh_dir("nosteady");
    RunConfig c = parse_config(json{{"scenario", "caseII"}, {"n", 4}});
    const RunResult r = run_steady(c, dir, "both");
    REQUIRE(r.exit_code == exit_no_steady_state);
    REQUIRE(r.report.contains("error"));
    REQUIRE(r.report["error"]["code"] == exit_no_steady_state);
    fs::remove_all(dir);
}

TEST_CASE("evolve run reproduces the linear energy growth") {
    const fs::path dir = fresh_dir("evolve");
    RunConfig c = parse_config(json{{"scenario", "caseII"},
                                    {"n", 25},
                                    {"evolve", {{"t_samples", {1.0, 10.0, 20.0, 30.0}}}}});
    const RunResult r = run_evolve(c, dir, "both");
    REQUIRE(r.exit_code == exit_ok);
    REQUIRE(r.report["diagnostics"]["engine"] == "closed-form-diffusive");

    std::vector<std::string> header;
    const auto rows = read_csv(dir / "evolve.csv", &header);
    REQUIRE(header.size() == 1 + 25 + 2);
    REQUIRE(rows.size() == 4);
    const auto energy_col = header.size() - 2;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double t = rows[i][0];
        REQUIRE(rows[i][energy_col] == Catch::Approx(12.5 + 15.0 * t).epsilon(1e-10));
        REQUIRE(rows[i].back() == Catch::Approx(15.0).epsilon(1e-10));
    }
    fs::remove_all(dir);
}

TEST_CASE("evolve run integrates general banks") {
    const fs::path dir = fresh_dir("evolve_rk4");
    RunConfig c = parse_config(json{{"scenario", "caseIV"},
                                    {"n", 3},
                                    {"evolve", {{"t_samples", {0.5, 1.0}}, {"dt", 0.01}}}});
    const RunResult r = run_evolve(c, dir, "json");
    REQUIRE(r.exit_code == exit_ok);
    REQUIRE(r.report["diagnostics"]["engine"] == "rk4");
    REQUIRE(r.table.rows.size() == 2);
    fs::remove_all(dir);
}

TEST_CASE("sweep run endpoints coincide with the closed forms") {
    const fs::path dir = fresh_dir("sweep");
    RunConfig c = parse_config(json{{"scenario", "caseIII"},
                                    {"n", 4},
                                    {"sweep", {{"n_values", {4}}, {"gamma", 0.5}}}});
    const RunResult r = run_sweep(c, dir, "both");
    REQUIRE(r.exit_code == exit_ok);
    REQUIRE(r.table.rows.size() == 5);  // dephaser counts 0..4
    const auto c3 = case3_closed_forms(100.0, 50.0, 0.1, 0.5, 1.0, 4);
    const auto c4 = case4_closed_forms(100.0, 50.0, 0.1, 0.5, 0.5, 1.0, 4);
    REQUIRE(r.table.rows.front()[2] == Catch::Approx(c3.j_first).margin(1e-8));
    REQUIRE(r.table.rows.back()[2] == Catch::Approx(c4.j_first).margin(1e-8));
    fs::remove_all(dir);
}

TEST_CASE("spectrum run checks the mode law") {
    const fs::path dir = fresh_dir("spectrum");
    RunConfig c = parse_config(json{{"scenario", "baseline"}, {"n", 25}});
    const RunResult r = run_spectrum(c, dir, "both");
    REQUIRE(r.exit_code == exit_ok);
    REQUIRE(r.table.rows.size() == 50);
    REQUIRE(r.report["diagnostics"]["stable"].get<bool>());
    REQUIRE(r.report["diagnostics"]["mode_law_max_dev"].get<double>() <= 1e-12);
    fs::remove_all(dir);
}

TEST_CASE("provenance block re-runs bit-identically") {
    const fs::path dir1 = fresh_dir("prov1");
    const fs::path dir2 = fresh_dir("prov2");
    RunConfig c = parse_config(json{{"scenario", "caseV"}, {"n", 8}, {"seed", 42}});
    const RunResult r1 = run_steady(c, dir1, "both");
    REQUIRE(r1.exit_code == exit_ok);

    std::ifstream in(dir1 / "report.json");
    json report;
    in >> report;
    RunConfig c2 = parse_config(report["config"]);
    const RunResult r2 = run_steady(c2, dir2, "both");
    REQUIRE(r2.exit_code == exit_ok);

    std::ifstream a(dir1 / "steady.csv"), b(dir2 / "steady.csv");
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    REQUIRE(sa.str() == sb.str());
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("run_command maps failures to exit codes") {
    const fs::path dir = fresh_dir("cmd");
    SECTION("missing config file") {
        const RunResult r = run_command("steady", dir / "none.json", dir, {}, "both");
        REQUIRE(r.exit_code == exit_config_error);
    }
    SECTION("mode mismatch") {
        const fs::path cfg = write_config(dir, json{{"scenario", "baseline"}, {"mode", "evolve"}});
        const RunResult r = run_command("steady", cfg, dir, {}, "both");
        REQUIRE(r.exit_code == exit_config_error);
    }
    SECTION("validate never fails hard") {
        const fs::path cfg = write_config(dir, json{{"scenario", "caseII"}, {"n", 4}});
        const RunResult r = run_command("validate", cfg, dir, {}, "both");
        REQUIRE(r.exit_code == exit_ok);
        REQUIRE_FALSE(r.report["clean"].get<bool>());
    }
    SECTION("seed flag overrides the config") {
        const fs::path cfg = write_config(dir, json{{"scenario", "caseV"}, {"n", 6}, {"seed", 1}});
        const RunResult r1 = run_command("steady", cfg, dir / "a", 9, "json");
        const RunResult r2 = run_command("steady", cfg, dir / "b", 9, "json");
        const RunResult r3 = run_command("steady", cfg, dir / "c", {}, "json");
        REQUIRE(r1.table.rows == r2.table.rows);
        REQUIRE(r1.table.rows != r3.table.rows);
    }
    fs::remove_all(dir);
}

#ifdef QHCHAIN_CLI_BIN
TEST_CASE("command-line binary") {
    const fs::path dir = fresh_dir("bin");
    const fs::path cfg = write_config(dir, json{{"scenario", "baseline"}, {"n", 6}});
    auto run = [&](const std::string& args) {
        const std::string cmd = std::string(QHCHAIN_CLI_BIN) + " " + args + " > /dev/null 2>&1";
        const int rc = std::system(cmd.c_str());
        return WEXITSTATUS(rc);
    };
    REQUIRE(run("steady --config " + cfg.string() + " --out " + (dir / "out").string()) == 0);
    REQUIRE(fs::exists(dir / "out" / "steady.csv"));
    REQUIRE(fs::exists(dir / "out" / "report.json"));
    REQUIRE(run("validate --config " + cfg.string()) == 0);
    REQUIRE(run("steady --config " + (dir / "missing.json").string()) == 2);

    // undamped chain: documented no-steady-state exit code
    const fs::path cfg2 = write_config(dir, json{{"scenario", "caseII"}, {"n", 4}});
    REQUIRE(run("steady --config " + cfg2.string() + " --out " + (dir / "out2").string()) == 3);
    fs::remove_all(dir);
}
#endif
