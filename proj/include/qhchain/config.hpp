// config.hpp — run configuration: schema-checked JSON parsing and resolution
// into a scenario preset. Units are the omega-normalized ones used throughout
// (hbar defaults to 1, k_B = 1).

#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "qhchain/scenarios.hpp"

namespace qhchain {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string scenario{"baseline"};
    std::optional<std::string> mode;  // must match the invoked command when present
    std::optional<int> n;
    std::optional<std::uint64_t> seed;

    // chain/bank overrides, applied after the preset is built
    std::optional<double> omega, Omega, kappa, hbar;
    std::optional<std::vector<double>> couplings;  // per-bond, switches to the disordered chain
    std::optional<double> zeta, nbar;              // uniform thermal attachment
    std::optional<std::vector<double>> zeta_sites, nbar_sites;
    std::optional<double> zeta_A, nbar_A, zeta_B, nbar_B;
    std::optional<double> gamma;                   // uniform dephasing
    std::optional<std::vector<double>> gamma_sites;

    // evolve mode
    std::vector<double> t_samples{1.0, 10.0, 20.0, 30.0};
    double dt{0.01};
    double initial_nbar{0.0};

    // sweep mode
    std::vector<int> sweep_n{4, 6, 8};
    std::vector<int> sweep_counts;  // empty = 0..n
    double sweep_gamma{0.5};

    // tolerance overrides
    double residual_tol{1e-10};

    json raw;  // resolved document, sufficient to re-run
};

namespace detail {

inline void require_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key))
            throw ConfigError(where + ": unknown key '" + key + "'");
}

template <typename T>
std::optional<T> opt_get(const json& j, const char* key) {
    if (!j.contains(key)) return std::nullopt;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("invalid value for '") + key + "'");
    }
}

} // namespace detail

inline RunConfig parse_config(const json& j) {
    detail::require_keys(j, {"scenario", "mode", "n", "seed", "overrides", "evolve", "sweep",
                             "tolerances"},
                         "config");
    RunConfig c;
    c.raw = j;
    if (auto v = detail::opt_get<std::string>(j, "scenario")) c.scenario = *v;
    try {
        case_from_name(c.scenario);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    c.mode = detail::opt_get<std::string>(j, "mode");
    if (c.mode) {
        static const std::set<std::string> modes{"steady", "evolve", "sweep", "spectrum"};
        if (!modes.count(*c.mode)) throw ConfigError("unknown mode '" + *c.mode + "'");
    }
    c.n = detail::opt_get<int>(j, "n");
    if (c.n && *c.n < 2) throw ConfigError("'n' must be >= 2");
    c.seed = detail::opt_get<std::uint64_t>(j, "seed");

    if (j.contains("overrides")) {
        const json& o = j.at("overrides");
        detail::require_keys(o, {"omega", "Omega", "kappa", "hbar", "couplings", "zeta", "nbar",
                                 "zeta_sites", "nbar_sites", "zeta_A", "nbar_A", "zeta_B",
                                 "nbar_B", "gamma", "gamma_sites"},
                             "overrides");
        c.omega = detail::opt_get<double>(o, "omega");
        c.Omega = detail::opt_get<double>(o, "Omega");
        c.kappa = detail::opt_get<double>(o, "kappa");
        c.hbar = detail::opt_get<double>(o, "hbar");
        c.couplings = detail::opt_get<std::vector<double>>(o, "couplings");
        c.zeta = detail::opt_get<double>(o, "zeta");
        c.nbar = detail::opt_get<double>(o, "nbar");
        c.zeta_sites = detail::opt_get<std::vector<double>>(o, "zeta_sites");
        c.nbar_sites = detail::opt_get<std::vector<double>>(o, "nbar_sites");
        c.zeta_A = detail::opt_get<double>(o, "zeta_A");
        c.nbar_A = detail::opt_get<double>(o, "nbar_A");
        c.zeta_B = detail::opt_get<double>(o, "zeta_B");
        c.nbar_B = detail::opt_get<double>(o, "nbar_B");
        c.gamma = detail::opt_get<double>(o, "gamma");
        c.gamma_sites = detail::opt_get<std::vector<double>>(o, "gamma_sites");
    }
    if (j.contains("evolve")) {
        const json& e = j.at("evolve");
        detail::require_keys(e, {"t_samples", "dt", "initial_nbar"}, "evolve");
        if (auto v = detail::opt_get<std::vector<double>>(e, "t_samples")) c.t_samples = *v;
        if (auto v = detail::opt_get<double>(e, "dt")) c.dt = *v;
        if (auto v = detail::opt_get<double>(e, "initial_nbar")) c.initial_nbar = *v;
        if (c.t_samples.empty()) throw ConfigError("evolve.t_samples must not be empty");
        for (std::size_t i = 0; i < c.t_samples.size(); ++i) {
            if (c.t_samples[i] < 0.0) throw ConfigError("evolve.t_samples must be non-negative");
            if (i > 0 && c.t_samples[i] <= c.t_samples[i - 1])
                throw ConfigError("evolve.t_samples must be strictly increasing");
        }
        if (!(c.dt > 0.0)) throw ConfigError("evolve.dt must be > 0");
        if (c.initial_nbar < 0.0) throw ConfigError("evolve.initial_nbar must be >= 0");
    }
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        detail::require_keys(s, {"n_values", "dephaser_counts", "gamma"}, "sweep");
        if (auto v = detail::opt_get<std::vector<int>>(s, "n_values")) c.sweep_n = *v;
        if (auto v = detail::opt_get<std::vector<int>>(s, "dephaser_counts")) c.sweep_counts = *v;
        if (auto v = detail::opt_get<double>(s, "gamma")) c.sweep_gamma = *v;
        for (int nn : c.sweep_n)
            if (nn < 3) throw ConfigError("sweep.n_values entries must be >= 3");
        if (c.sweep_gamma < 0.0) throw ConfigError("sweep.gamma must be >= 0");
    }
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        detail::require_keys(t, {"residual"}, "tolerances");
        if (auto v = detail::opt_get<double>(t, "residual")) c.residual_tol = *v;
        if (!(c.residual_tol > 0.0)) throw ConfigError("tolerances.residual must be > 0");
    }
    return c;
}

/// Build the preset named by the config and apply every override. Physics
/// validation (negative rates, list lengths) surfaces as ConfigError.
inline ScenarioPreset resolve_preset(const RunConfig& c) {
    PresetOptions opt;
    opt.n = c.n;
    opt.seed = c.seed;
    ScenarioPreset p = preset(case_from_name(c.scenario), opt);
    const int n = p.chain.n;

    try {
        if (c.omega) p.chain.omega = *c.omega;
        if (c.hbar) p.chain.hbar = *c.hbar;
        if (c.Omega) {
            p.chain.coupling = Coupling::UniformRwa;
            p.chain.Omega = *c.Omega;
            p.chain.bond_Omegas.clear();
        }
        if (c.kappa) {
            p.chain.coupling = Coupling::SpringMass;
            p.chain.kappa = *c.kappa;
        }
        if (c.couplings) {
            p.chain.coupling = Coupling::DisorderedRwa;
            p.chain.bond_Omegas = *c.couplings;
        }
        p.chain.validate();

        if (c.zeta)
            for (auto& b : p.bank.thermal) b.zeta = *c.zeta;
        if (c.nbar)
            for (auto& b : p.bank.thermal) b.nbar = *c.nbar;
        auto per_site = [&](const std::vector<double>& v, const char* key) {
            if (static_cast<int>(v.size()) != n)
                throw ConfigError(std::string(key) + " must have one entry per site");
            return v;
        };
        if (c.zeta_sites) {
            const auto v = per_site(*c.zeta_sites, "zeta_sites");
            for (int k = 0; k < n; ++k) p.bank.thermal[k].zeta = v[k];
        }
        if (c.nbar_sites) {
            const auto v = per_site(*c.nbar_sites, "nbar_sites");
            for (int k = 0; k < n; ++k) p.bank.thermal[k].nbar = v[k];
        }
        if (c.zeta_A || c.nbar_A) {
            BathAttachment a = p.bank.diffusive_A.value_or(BathAttachment{});
            if (c.zeta_A) a.zeta = *c.zeta_A;
            if (c.nbar_A) a.nbar = *c.nbar_A;
            p.bank.diffusive_A = a;
        }
        if (c.zeta_B || c.nbar_B) {
            BathAttachment b = p.bank.diffusive_B.value_or(BathAttachment{});
            if (c.zeta_B) b.zeta = *c.zeta_B;
            if (c.nbar_B) b.nbar = *c.nbar_B;
            p.bank.diffusive_B = b;
        }
        if (c.gamma) p.bank.dephasing.assign(n, *c.gamma);
        if (c.gamma_sites) p.bank.dephasing = per_site(*c.gamma_sites, "gamma_sites");
        p.bank.validate(n);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return p;
}

struct Diagnostic {
    std::string severity;  // "error" or "warning"
    std::string field;
    std::string message;
};

/// Pre-flight diagnostics: schema and physics errors plus a stability check,
/// without solving anything. Never throws.
inline std::vector<Diagnostic> validate_config(const json& j) {
    std::vector<Diagnostic> out;
    RunConfig c;
    try {
        c = parse_config(j);
    } catch (const ConfigError& e) {
        out.push_back({"error", "schema", e.what()});
        return out;
    }
    ScenarioPreset p;
    try {
        p = resolve_preset(c);
    } catch (const ConfigError& e) {
        out.push_back({"error", "physics", e.what()});
        return out;
    }
    try {
        const ScenarioRun run = instantiate(p);
        const StabilityReport stab = stability_check(run.gen.Gamma);
        if (!stab.stable)
            out.push_back({"warning", "stability",
                           "drift spectrum is not strictly decaying: no steady state exists"});
    } catch (const std::exception& e) {
        out.push_back({"error", "assembly", e.what()});
    }
    return out;
}

} // namespace qhchain
