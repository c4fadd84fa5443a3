// scenarios.hpp — preset configurations, closed-form cross-checks for the
// end-bath and dephasing chains, the dephaser-count sweep, and the disorder
// and spring-mass studies.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qhchain/propagator.hpp"
#include "qhchain/thermo.hpp"

namespace qhchain {

enum class Case { Baseline, CaseI, CaseII, CaseIII, CaseIV, CaseV, CaseVI };

inline const char* to_string(Case c) {
    switch (c) {
    case Case::Baseline: return "baseline";
    case Case::CaseI:    return "caseI";
    case Case::CaseII:   return "caseII";
    case Case::CaseIII:  return "caseIII";
    case Case::CaseIV:   return "caseIV";
    case Case::CaseV:    return "caseV";
    case Case::CaseVI:   return "caseVI";
    }
    return "?";
}

inline Case case_from_name(const std::string& name) {
    for (Case c : {Case::Baseline, Case::CaseI, Case::CaseII, Case::CaseIII,
                   Case::CaseIV, Case::CaseV, Case::CaseVI})
        if (name == to_string(c)) return c;
    throw std::invalid_argument("unknown scenario name: " + name);
}

struct ScenarioPreset {
    std::string name;
    ChainSpec chain;
    ReservoirBank bank;
    std::string tag;  // short description of the configuration
};

struct PresetOptions {
    std::optional<int> n;
    std::optional<std::uint64_t> seed;  // disorder draw
};

/// Uniform draw on (0,1] from a seeded mt19937_64 (top 53 bits, shifted off
/// zero), fixed here so disorder runs reproduce bit-identically.
inline std::vector<double> sample_bond_couplings(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> bonds(n - 1);
    for (auto& b : bonds)
        b = static_cast<double>((rng() >> 11) + 1) * 0x1p-53;
    return bonds;
}

inline ScenarioPreset preset(Case c, const PresetOptions& opt = {}) {
    const int n = opt.n.value_or(25);
    const double w = 1.0, Om = 0.5, z = 0.1;
    ScenarioPreset p;
    p.name = to_string(c);
    p.bank.thermal.assign(n, {});

    switch (c) {
    case Case::Baseline:
        p.chain = ChainSpec::uniform_rwa(n, w, Om);
        p.bank.thermal.assign(n, {z, 10.0});
        p.bank.diffusive_A = BathAttachment{z, 100.0};
        p.bank.diffusive_B = BathAttachment{z, 50.0};
        p.tag = "thermal baths on every site, diffusive baths at both ends";
        break;
    case Case::CaseI:
        p.chain = ChainSpec::uniform_rwa(n, w, Om);
        p.bank.thermal.assign(n, {z, 30.0});
        p.bank.thermal.front() = {z, 100.0};
        p.bank.thermal.back() = {z, 50.0};
        p.tag = "ordinary thermal baths only, hot and cold ends";
        break;
    case Case::CaseII:
        p.chain = ChainSpec::uniform_rwa(n, w, Om);
        p.bank.diffusive_A = BathAttachment{z, 100.0};
        p.bank.diffusive_B = BathAttachment{z, 50.0};
        p.tag = "all-diffusive end baths, no thermal damping (unstable)";
        break;
    case Case::CaseIII:
        p.chain = ChainSpec::uniform_rwa(n, w, Om);
        p.bank.thermal.front() = {z, 50.0};
        p.bank.thermal.back() = {z, 25.0};
        p.bank.diffusive_A = BathAttachment{z, 50.0};
        p.bank.diffusive_B = BathAttachment{z, 25.0};
        p.tag = "end-site thermal baths plus diffusive ends (effective 100/50)";
        break;
    case Case::CaseIV:
        p = preset(Case::CaseIII, opt);
        p.name = to_string(c);
        p.bank.dephasing.assign(n, 0.5);
        p.tag = "end baths plus uniform dephasing on every site";
        break;
    case Case::CaseV:
        p.chain = ChainSpec::disordered_rwa(
            n, w, sample_bond_couplings(n, opt.seed.value_or(1)));
        p.bank.thermal.assign(n, {z, 10.0});
        p.bank.diffusive_A = BathAttachment{z, 100.0};
        p.bank.diffusive_B = BathAttachment{z, 50.0};
        p.tag = "disordered bond couplings drawn on (0,1]";
        break;
    case Case::CaseVI:
        p.chain = ChainSpec::spring_mass(n, w, 0.5);
        p.bank.thermal.assign(n, {z, 10.0});
        p.bank.diffusive_A = BathAttachment{z, 100.0};
        p.bank.diffusive_B = BathAttachment{z, 50.0};
        p.tag = "spring-mass coupling, baseline reservoirs";
        break;
    }
    return p;
}

struct ScenarioRun {
    ScenarioPreset preset;
    HamiltonianSpec ham;
    GeneratorSet gen;
};

inline ScenarioRun instantiate(const ScenarioPreset& p) {
    ScenarioRun run{p, build_adjacency(p.chain), {}};
    run.gen = assemble_generators(run.ham, p.bank, p.chain.layout());
    return run;
}

/// Steady state of a preset plus its transport observables.
inline TransportReport steady_transport(const ScenarioPreset& p, SteadyState* steady_out = nullptr) {
    const ScenarioRun run = instantiate(p);
    const SteadyState steady = solve_steady(run.gen);
    TransportReport rep = transport_report(run.gen, run.ham, steady.V, steady.x);
    rep.residual = steady.residual;
    rep.solver = steady.solver;
    if (steady_out) *steady_out = steady;
    return rep;
}

struct ClosedFormResult {
    Vec occupations;
    double j_first{0.0};  // current of the site-1 end reservoir
    double j_last{0.0};   // current of the site-n end reservoir
};

/// Two end thermal baths (occupations N1, Nn), no dephasing: flat interior
/// occupation profile and equal-and-opposite end currents.
inline ClosedFormResult case3_closed_forms(double N1, double Nn, double zeta, double Omega,
                                           double omega, int n, double hbar = 1.0) {
    if (n < 3) throw std::invalid_argument("case3_closed_forms: n must be >= 3");
    if (!(zeta > 0.0)) throw std::invalid_argument("case3_closed_forms: zeta must be > 0");
    ClosedFormResult r;
    const double mean = 0.5 * (N1 + Nn);
    const double shift = zeta * zeta * (N1 - Nn) / (8.0 * Omega * Omega + 2.0 * zeta * zeta);
    r.occupations = Vec::Constant(n, mean);
    r.occupations(0) = mean + shift;
    r.occupations(n - 1) = mean - shift;
    r.j_first = 2.0 * hbar * omega * Omega * Omega * zeta * (N1 - Nn)
              / (4.0 * Omega * Omega + zeta * zeta);
    r.j_last = -r.j_first;
    return r;
}

/// End baths plus uniform dephasing gamma: linear interior occupation profile
/// and end currents suppressed by the (n-1) gamma zeta term, restoring the
/// 1/n scaling for long chains.
inline ClosedFormResult case4_closed_forms(double N1, double Nn, double zeta, double gamma,
                                           double Omega, double omega, int n, double hbar = 1.0) {
    if (n < 3) throw std::invalid_argument("case4_closed_forms: n must be >= 3");
    if (!(zeta > 0.0)) throw std::invalid_argument("case4_closed_forms: zeta must be > 0");
    if (gamma < 0.0) throw std::invalid_argument("case4_closed_forms: gamma must be >= 0");
    ClosedFormResult r;
    const double mean = 0.5 * (N1 + Nn);
    const double diff = N1 - Nn;
    const double den = 8.0 * Omega * Omega + 2.0 * zeta * zeta + 2.0 * (n - 1) * gamma * zeta;
    r.occupations = Vec(n);
    r.occupations(0) = mean + (zeta * zeta + (n - 1) * gamma * zeta) * diff / den;
    for (int k = 2; k < n; ++k)
        r.occupations(k - 1) = mean + (n - 2 * k + 1) * gamma * zeta * diff / den;
    r.occupations(n - 1) = mean - (zeta * zeta + (n - 1) * gamma * zeta) * diff / den;
    r.j_first = 2.0 * hbar * omega * Omega * Omega * zeta * diff
              / (4.0 * Omega * Omega + zeta * zeta + (n - 1) * gamma * zeta);
    r.j_last = -r.j_first;
    return r;
}

struct SweepResult {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Current through the site-1 reservoir as dephasing is attached to the first
/// k sites, k = 0..n, solved via the vectorized route. The k = 0 and k = n
/// rows coincide with the closed forms above.
inline SweepResult fourier_crossover_scan(const std::vector<int>& n_values,
                                          const std::vector<int>& dephaser_counts,
                                          double gamma, double zeta, double N1, double Nn,
                                          double Omega, double omega, double hbar = 1.0) {
    SweepResult out;
    out.columns = {"n", "dephasers", "current_site1"};
    for (int n : n_values) {
        const ChainSpec chain = ChainSpec::uniform_rwa(n, omega, Omega, hbar);
        const HamiltonianSpec ham = build_adjacency(chain);
        std::vector<int> counts = dephaser_counts;
        if (counts.empty())
            for (int k = 0; k <= n; ++k) counts.push_back(k);
        for (int k : counts) {
            if (k < 0 || k > n)
                throw std::invalid_argument("fourier_crossover_scan: dephaser count out of range");
            ReservoirBank bank;
            bank.thermal.assign(n, {});
            bank.thermal.front() = {zeta, N1};
            bank.thermal.back() = {zeta, Nn};
            if (k > 0) {
                bank.dephasing.assign(n, 0.0);
                std::fill_n(bank.dephasing.begin(), k, gamma);
            }
            const GeneratorSet gen = assemble_generators(ham, bank, chain.layout());
            const SteadyState steady = solve_lyapunov_vectorized(gen);
            const CurrentReport rep = total_current(gen, ham.H, ham.xi, steady.V, steady.x);
            double j1 = 0.0;
            for (const auto& [lab, v] : rep.per_reservoir)
                if (lab == "1") j1 = v;
            out.rows.push_back({static_cast<double>(n), static_cast<double>(k), j1});
        }
    }
    return out;
}

/// Steady transport of a chain with seeded random bond couplings.
inline TransportReport disorder_study(std::uint64_t seed, int n, const ReservoirBank& bank,
                                      double omega = 1.0, double hbar = 1.0,
                                      SteadyState* steady_out = nullptr) {
    ScenarioPreset p;
    p.name = "caseV";
    p.chain = ChainSpec::disordered_rwa(n, omega, sample_bond_couplings(n, seed), hbar);
    p.bank = bank;
    return steady_transport(p, steady_out);
}

/// Mode frequencies of the spring-mass chain,
/// nu'_m = sqrt(omega (omega + kappa) - omega kappa cos((m-1) pi / n)).
inline Vec smc_mode_frequencies(int n, double omega, double kappa) {
    Vec nu(n);
    for (int m = 1; m <= n; ++m)
        nu(m - 1) = std::sqrt(omega * (omega + kappa)
                              - omega * kappa * std::cos((m - 1) * pi / n));
    return nu;
}

/// Steady transport of the spring-mass chain.
inline TransportReport smc_study(int n, double kappa, const ReservoirBank& bank,
                                 double omega = 1.0, double hbar = 1.0,
                                 SteadyState* steady_out = nullptr) {
    ScenarioPreset p;
    p.name = "caseVI";
    p.chain = ChainSpec::spring_mass(n, omega, kappa, hbar);
    p.bank = bank;
    return steady_transport(p, steady_out);
}

} // namespace qhchain
