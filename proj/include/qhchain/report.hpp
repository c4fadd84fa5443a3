// report.hpp — result tables, atomic CSV/JSON writers, and the batch run
// drivers behind the command-line front end.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qhchain/config.hpp"

namespace qhchain {

namespace fs = std::filesystem;

enum ExitCode : int {
    exit_ok = 0,
    exit_config_error = 2,
    exit_no_steady_state = 3,
    exit_solver_failure = 4,
};

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Round-trippable decimal rendering of a double (17 significant digits).
inline std::string format_cell(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_file_atomic(const fs::path& path, const std::string& contents) {
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << contents;
    }
    fs::rename(tmp, path);
}

inline void write_csv_atomic(const fs::path& path, const ResultTable& table) {
    std::string s;
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        s += (i ? "," : "") + table.columns[i];
    s += "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            s += (i ? "," : "") + format_cell(row[i]);
        s += "\n";
    }
    write_file_atomic(path, s);
}

inline json table_to_json(const ResultTable& table) {
    return json{{"columns", table.columns}, {"rows", table.rows}};
}

struct RunResult {
    int exit_code{exit_ok};
    json report;                 // full machine-readable report
    std::vector<fs::path> files; // everything written
    ResultTable table;
};

namespace detail {

inline json provenance(const RunConfig& c, const std::string& mode) {
    json cfg = c.raw;
    cfg["mode"] = mode;
    if (c.seed) cfg["seed"] = *c.seed;  // echo a seed applied via the command line
    return cfg;
}

inline void emit(RunResult& r, const RunConfig& c, const std::string& mode,
                 const ScenarioPreset& p, const fs::path& out_dir, const std::string& format) {
    for (const auto& row : r.table.rows)
        for (double v : row)
            if (!std::isfinite(v)) throw std::runtime_error("non-finite result cell");
    r.report["mode"] = mode;
    r.report["config"] = provenance(c, mode);
    r.report["scenario"] = p.name;
    r.report["description"] = p.tag;
    r.report["table"] = table_to_json(r.table);
    if (format == "csv" || format == "both") {
        const fs::path csv = out_dir / (mode + ".csv");
        write_csv_atomic(csv, r.table);
        r.files.push_back(csv);
    }
    if (format == "json" || format == "both") {
        const fs::path jp = out_dir / "report.json";
        write_file_atomic(jp, r.report.dump(2) + "\n");
        r.files.push_back(jp);
    }
}

inline json structured_error(int code, const std::string& kind, const std::string& message) {
    return json{{"error", {{"code", code}, {"kind", kind}, {"message", message}}}};
}

// Per-site thermal currents keyed "1".."n"; absent sites report zero.
inline Vec site_currents(const CurrentReport& rep, int n) {
    Vec cur = Vec::Zero(n);
    for (const auto& [label, value] : rep.per_reservoir) {
        if (label == "A" || label == "B" || label.rfind("deph", 0) == 0) continue;
        cur(std::stoi(label) - 1) = value;
    }
    return cur;
}

inline json currents_json(const CurrentReport& rep) {
    json per = json::object();
    for (const auto& [label, value] : rep.per_reservoir) per[label] = value;
    return json{{"per_reservoir", per},
                {"total", rep.total},
                {"diffusive_part", rep.diffusive_part}};
}

} // namespace detail

inline RunResult run_steady(const RunConfig& c, const fs::path& out_dir,
                            const std::string& format) {
    RunResult r;
    const ScenarioPreset p = resolve_preset(c);
    const ScenarioRun run = instantiate(p);

    const StabilityReport stab = stability_check(run.gen.Gamma);
    if (!stab.stable && !run.gen.has_quadratic()) {
        r.exit_code = exit_no_steady_state;
        r.report = detail::structured_error(r.exit_code, "no-steady-state",
                                            "drift spectrum is not strictly decaying");
        return r;
    }
    SteadyState steady;
    try {
        steady = solve_steady(run.gen);
    } catch (const NoSteadyStateError& e) {
        r.exit_code = exit_no_steady_state;
        r.report = detail::structured_error(r.exit_code, "no-steady-state", e.what());
        return r;
    } catch (const std::exception& e) {
        r.exit_code = exit_solver_failure;
        r.report = detail::structured_error(r.exit_code, "solver-failure", e.what());
        return r;
    }

    const TransportReport rep = transport_report(run.gen, run.ham, steady.V, steady.x);
    const Vec site_cur = detail::site_currents(rep.currents, p.chain.n);
    r.table.columns = {"site", "occupation", "current"};
    for (int k = 1; k <= p.chain.n; ++k)
        r.table.rows.push_back({static_cast<double>(k), rep.occupations(k - 1), site_cur(k - 1)});

    r.report["diagnostics"] = {
        {"solver", steady.solver},
        {"residual", steady.residual},
        {"residual_tolerance", c.residual_tol * run.gen.D.norm()},
        {"residual_ok", steady.residual <= c.residual_tol * run.gen.D.norm()},
        {"spectral_gap", stab.spectral_gap},
        {"physicality_min_eigenvalue", min_physicality_eigenvalue(steady.V, p.chain.layout())},
    };
    r.report["observables"] = {
        {"mean_energy", rep.mean_energy},
        {"currents", detail::currents_json(rep.currents)},
    };
    if (p.chain.coupling == Coupling::DisorderedRwa)
        r.report["couplings"] = p.chain.bond_Omegas;
    detail::emit(r, c, "steady", p, out_dir, format);
    return r;
}

inline RunResult run_evolve(const RunConfig& c, const fs::path& out_dir,
                            const std::string& format) {
    RunResult r;
    const ScenarioPreset p = resolve_preset(c);
    const ScenarioRun run = instantiate(p);
    const PhaseSpaceLayout layout = p.chain.layout();
    const GaussianState init = c.initial_nbar > 0.0
        ? GaussianState::thermal(layout, c.initial_nbar)
        : GaussianState::vacuum(layout);

    // closed forms cover the uniform chain; everything else integrates
    std::string engine = "rk4";
    double zeta = 0.0;
    const bool all_detached = std::all_of(p.bank.thermal.begin(), p.bank.thermal.end(),
                                          [](const BathAttachment& b) { return b.zeta == 0.0; });
    if (p.chain.coupling == Coupling::UniformRwa && !p.bank.has_dephasing()) {
        if (p.bank.uniform_thermal_zeta(&zeta)) engine = "closed-form";
        else if (all_detached) engine = "closed-form-diffusive";
    }

    std::vector<GaussianState> states;
    try {
        if (engine == "rk4") {
            Trajectory traj = evolve_ode(init.cov, init.mean, run.gen, c.t_samples, c.dt);
            states = std::move(traj.states);
        } else {
            for (double t : c.t_samples) {
                GaussianState s;
                s.cov = engine == "closed-form"
                    ? evolve_cm_closed(init.cov, p.chain, p.bank, t)
                    : evolve_all_diffusive(init.cov, p.chain, p.bank, t);
                s.mean = evolve_mean_exact(init.mean, run.gen.Gamma, run.ham.xi, run.gen.eta, t);
                states.push_back(std::move(s));
            }
        }
    } catch (const std::exception& e) {
        r.exit_code = exit_solver_failure;
        r.report = detail::structured_error(r.exit_code, "solver-failure", e.what());
        return r;
    }

    r.table.columns = {"t"};
    for (int k = 1; k <= p.chain.n; ++k)
        r.table.columns.push_back("occupation_" + std::to_string(k));
    r.table.columns.push_back("energy");
    r.table.columns.push_back("current");

    for (std::size_t i = 0; i < c.t_samples.size(); ++i) {
        const GaussianState& s = states[i];
        const Vec occ = occupations(s.cov, layout);
        const CurrentReport cur = total_current(run.gen, run.ham.H, run.ham.xi, s.cov, s.mean);
        std::vector<double> row{c.t_samples[i]};
        for (int k = 0; k < p.chain.n; ++k) row.push_back(occ(k));
        row.push_back(mean_energy(run.ham.H, run.ham.xi, run.ham.H0, s.cov, s.mean));
        row.push_back(cur.total);
        r.table.rows.push_back(std::move(row));
    }

    r.report["diagnostics"] = {{"engine", engine}, {"dt", c.dt}};
    detail::emit(r, c, "evolve", p, out_dir, format);
    return r;
}

inline RunResult run_sweep(const RunConfig& c, const fs::path& out_dir,
                           const std::string& format) {
    RunResult r;
    const ScenarioPreset p = resolve_preset(c);

    // the sweep wants an end-bath chain: effective end occupations fold the
    // diffusive weights into the attached thermal baths
    double zeta = p.bank.thermal.front().zeta;
    if (!(zeta > 0.0)) {
        r.exit_code = exit_config_error;
        r.report = detail::structured_error(r.exit_code, "config",
                                            "sweep requires a thermal bath on site 1");
        return r;
    }
    for (int k = 1; k + 1 < p.chain.n; ++k)
        if (p.bank.thermal[k].zeta != 0.0) {
            r.exit_code = exit_config_error;
            r.report = detail::structured_error(
                r.exit_code, "config", "sweep requires end-site thermal baths only");
            return r;
        }
    double N1 = p.bank.thermal.front().nbar;
    double Nn = p.bank.thermal.back().nbar;
    if (p.bank.diffusive_A) N1 += p.bank.diffusive_A->zeta * p.bank.diffusive_A->nbar / zeta;
    if (p.bank.diffusive_B) Nn += p.bank.diffusive_B->zeta * p.bank.diffusive_B->nbar / zeta;

    SweepResult sweep;
    try {
        sweep = fourier_crossover_scan(c.sweep_n, c.sweep_counts, c.sweep_gamma, zeta, N1, Nn,
                                       p.chain.Omega, p.chain.omega, p.chain.hbar);
    } catch (const NoSteadyStateError& e) {
        r.exit_code = exit_no_steady_state;
        r.report = detail::structured_error(r.exit_code, "no-steady-state", e.what());
        return r;
    } catch (const std::exception& e) {
        r.exit_code = exit_solver_failure;
        r.report = detail::structured_error(r.exit_code, "solver-failure", e.what());
        return r;
    }
    r.table.columns = sweep.columns;
    r.table.rows = sweep.rows;
    r.report["diagnostics"] = {{"gamma", c.sweep_gamma},
                               {"zeta", zeta},
                               {"N1_effective", N1},
                               {"Nn_effective", Nn}};
    detail::emit(r, c, "sweep", p, out_dir, format);
    return r;
}

inline RunResult run_spectrum(const RunConfig& c, const fs::path& out_dir,
                              const std::string& format) {
    RunResult r;
    const ScenarioPreset p = resolve_preset(c);
    const ScenarioRun run = instantiate(p);
    const StabilityReport stab = stability_check(run.gen.Gamma);

    std::vector<cplx> eigs(stab.eigenvalues.begin(), stab.eigenvalues.end());
    std::sort(eigs.begin(), eigs.end(), [](cplx a, cplx b) {
        return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
    });
    r.table.columns = {"index", "real", "imag"};
    for (std::size_t i = 0; i < eigs.size(); ++i)
        r.table.rows.push_back({static_cast<double>(i + 1), eigs[i].real(), eigs[i].imag()});

    r.report["diagnostics"] = {{"stable", stab.stable}, {"spectral_gap", stab.spectral_gap}};

    // compare against the mode law where one applies
    double zeta = 0.0;
    if (p.bank.uniform_thermal_zeta(&zeta) && !p.bank.has_dephasing() &&
        p.chain.coupling != Coupling::DisorderedRwa) {
        const Vec nu = p.chain.coupling == Coupling::UniformRwa
            ? toeplitz_mode_frequencies(p.chain.n, p.chain.omega, p.chain.Omega)
            : smc_mode_frequencies(p.chain.n, p.chain.omega, p.chain.kappa);
        std::vector<cplx> predicted;
        for (int m = 0; m < p.chain.n; ++m) {
            predicted.emplace_back(-zeta / 2.0, nu(m));
            predicted.emplace_back(-zeta / 2.0, -nu(m));
        }
        std::sort(predicted.begin(), predicted.end(), [](cplx a, cplx b) {
            return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
        });
        double dev = 0.0;
        for (std::size_t i = 0; i < eigs.size(); ++i)
            dev = std::max(dev, std::abs(eigs[i] - predicted[i]));
        r.report["diagnostics"]["mode_law_max_dev"] = dev;
    }
    detail::emit(r, c, "spectrum", p, out_dir, format);
    return r;
}

inline RunResult run_validate(const json& config) {
    RunResult r;
    const std::vector<Diagnostic> diags = validate_config(config);
    json items = json::array();
    for (const auto& d : diags)
        items.push_back({{"severity", d.severity}, {"field", d.field}, {"message", d.message}});
    r.report = {{"mode", "validate"}, {"diagnostics", items}, {"clean", diags.empty()}};
    return r;
}

/// Dispatch a command against a config file. Prints nothing; the caller owns
/// all I/O except the output files themselves.
inline RunResult run_command(const std::string& mode, const fs::path& config_path,
                             const fs::path& out_dir, std::optional<std::uint64_t> seed_flag,
                             const std::string& format) {
    RunResult r;
    json doc;
    {
        std::ifstream in(config_path);
        if (!in) {
            r.exit_code = exit_config_error;
            r.report = detail::structured_error(r.exit_code, "config",
                                                "cannot read config file " + config_path.string());
            return r;
        }
        try {
            in >> doc;
        } catch (const json::exception& e) {
            if (mode == "validate") {
                r.report = {{"mode", "validate"},
                            {"diagnostics", json::array({{{"severity", "error"},
                                                          {"field", "schema"},
                                                          {"message", e.what()}}})},
                            {"clean", false}};
                return r;
            }
            r.exit_code = exit_config_error;
            r.report = detail::structured_error(r.exit_code, "config", e.what());
            return r;
        }
    }
    if (seed_flag) doc["seed"] = *seed_flag;
    if (mode == "validate") return run_validate(doc);

    RunConfig cfg;
    try {
        cfg = parse_config(doc);
        if (cfg.mode && *cfg.mode != mode)
            throw ConfigError("config mode '" + *cfg.mode + "' does not match command '" + mode + "'");
    } catch (const ConfigError& e) {
        r.exit_code = exit_config_error;
        r.report = detail::structured_error(r.exit_code, "config", e.what());
        return r;
    }

    try {
        if (mode == "steady") return run_steady(cfg, out_dir, format);
        if (mode == "evolve") return run_evolve(cfg, out_dir, format);
        if (mode == "sweep") return run_sweep(cfg, out_dir, format);
        if (mode == "spectrum") return run_spectrum(cfg, out_dir, format);
    } catch (const ConfigError& e) {
        r.exit_code = exit_config_error;
        r.report = detail::structured_error(r.exit_code, "config", e.what());
        return r;
    } catch (const std::exception& e) {
        r.exit_code = exit_solver_failure;
        r.report = detail::structured_error(r.exit_code, "solver-failure", e.what());
        return r;
    }
    r.exit_code = exit_config_error;
    r.report = detail::structured_error(r.exit_code, "config", "unknown command " + mode);
    return r;
}

} // namespace qhchain
