#include <catch2/catch_amalgamated.hpp>

#include "qhchain/scenarios.hpp"

using namespace qhchain;

namespace {

double current_of(const CurrentReport& rep, const std::string& label) {
    for (const auto& [lab, v] : rep.per_reservoir)
        if (lab == label) return v;
    throw std::runtime_error("no reservoir " + label);
}

// realize the two-end-bath chain directly with the effective occupations
ScenarioPreset end_bath_chain(int n, double N1, double Nn, double zeta = 0.1, double gamma = 0.0) {
    ScenarioPreset p;
    p.name = "end-baths";
    p.chain = ChainSpec::uniform_rwa(n, 1.0, 0.5);
    p.bank.thermal.assign(n, {});
    p.bank.thermal.front() = {zeta, N1};
    p.bank.thermal.back() = {zeta, Nn};
    if (gamma > 0.0) p.bank.dephasing.assign(n, gamma);
    return p;
}

} // namespace

TEST_CASE("presets") {
    SECTION("baseline assembles the documented diffusion corner") {
        const auto run = instantiate(preset(Case::Baseline, {.n = 25}));
        REQUIRE(run.gen.D(0, 0) == Catch::Approx(11.05).epsilon(1e-14));
    }
    SECTION("ordinary-bath preset has no diffusive attachments") {
        const auto p = preset(Case::CaseI, {.n = 10});
        REQUIRE_FALSE(p.bank.diffusive_A.has_value());
        REQUIRE_FALSE(p.bank.diffusive_B.has_value());
        REQUIRE(p.bank.thermal.front().nbar == 100.0);
        REQUIRE(p.bank.thermal.back().nbar == 50.0);
        REQUIRE(p.bank.thermal[4].nbar == 30.0);
    }
    SECTION("disorder draw is reproducible and bounded") {
        const auto a = preset(Case::CaseV, {.n = 25, .seed = 7});
        const auto b = preset(Case::CaseV, {.n = 25, .seed = 7});
        const auto c = preset(Case::CaseV, {.n = 25, .seed = 8});
        REQUIRE(a.chain.bond_Omegas == b.chain.bond_Omegas);
        REQUIRE(a.chain.bond_Omegas != c.chain.bond_Omegas);
        for (double w : a.chain.bond_Omegas) {
            REQUIRE(w > 0.0);
            REQUIRE(w <= 1.0);
        }
    }
    SECTION("unknown scenario names are rejected") {
        REQUIRE_THROWS_AS(case_from_name("caseVII"), std::invalid_argument);
    }
}

TEST_CASE("end-bath closed forms") {
    SECTION("equilibrium is flat and currentless") {
        const auto r = case3_closed_forms(40.0, 40.0, 0.1, 0.5, 1.0, 6);
        REQUIRE(r.j_first == 0.0);
        REQUIRE((r.occupations.array() - 40.0).abs().maxCoeff() == 0.0);
    }
    SECTION("documented values at the 100/50 gradient") {
        const auto r = case3_closed_forms(100.0, 50.0, 0.1, 0.5, 1.0, 8);
        REQUIRE(r.j_first == Catch::Approx(2.5 / 1.01).epsilon(1e-14));
        REQUIRE(r.j_last == Catch::Approx(-2.5 / 1.01).epsilon(1e-14));
        REQUIRE(r.occupations(3) == Catch::Approx(75.0).epsilon(1e-14));
        REQUIRE(r.occupations(0) == Catch::Approx(75.0 + 0.5 / 2.02).epsilon(1e-14));
        REQUIRE(r.occupations(7) == Catch::Approx(75.0 - 0.5 / 2.02).epsilon(1e-14));
    }
    SECTION("solver agreement for n = 3..10") {
        for (int n = 3; n <= 10; ++n) {
            const auto closed = case3_closed_forms(100.0, 50.0, 0.1, 0.5, 1.0, n);
            SteadyState s;
            const TransportReport rep = steady_transport(end_bath_chain(n, 100.0, 50.0), &s);
            REQUIRE((rep.occupations - closed.occupations).cwiseAbs().maxCoeff()
                    <= 1e-9 * closed.occupations.maxCoeff());
            REQUIRE(current_of(rep.currents, "1") == Catch::Approx(closed.j_first).epsilon(1e-9));
            REQUIRE(current_of(rep.currents, std::to_string(n))
                    == Catch::Approx(closed.j_last).epsilon(1e-9));
        }
    }
    SECTION("diffusive ends only shift the effective occupations") {
        const int n = 6;
        const auto p = preset(Case::CaseIII, {.n = n});  // thermal 50/25 plus diffusive 50/25
        SteadyState s;
        const TransportReport rep = steady_transport(p, &s);
        const auto closed = case3_closed_forms(100.0, 50.0, 0.1, 0.5, 1.0, n);
        REQUIRE((rep.occupations - closed.occupations).cwiseAbs().maxCoeff() <= 1e-9 * 100.0);
        // the closed-form end current is the lumped thermal-plus-diffusive one
        const double j1 = current_of(rep.currents, "1") + current_of(rep.currents, "A");
        REQUIRE(j1 == Catch::Approx(closed.j_first).epsilon(1e-9));
    }
    SECTION("classical limit: current linear in the temperature difference") {
        const double hbar = 1e-5, omega = 1.0, Tn = 0.5;
        auto slope = [&](double T1) {
            const double N1 = nbar_from_beta(1.0 / T1, omega, hbar);
            const double Nn = nbar_from_beta(1.0 / Tn, omega, hbar);
            const auto r = case3_closed_forms(N1, Nn, 0.1, 0.5, omega, 5, hbar);
            return r.j_first / (T1 - Tn);
        };
        REQUIRE(slope(1.0) == Catch::Approx(slope(3.0)).epsilon(1e-3));
    }
}

TEST_CASE("dephasing closed forms") {
    SECTION("equal ends thermalize the whole chain") {
        const auto r = case4_closed_forms(30.0, 30.0, 0.1, 0.5, 0.5, 1.0, 7);
        REQUIRE(r.j_first == 0.0);
        REQUIRE((r.occupations.array() - 30.0).abs().maxCoeff() == 0.0);
    }
    SECTION("vanishing dephasing reduces to the end-bath forms") {
        const auto a = case4_closed_forms(100.0, 50.0, 0.1, 0.0, 0.5, 1.0, 9);
        const auto b = case3_closed_forms(100.0, 50.0, 0.1, 0.5, 1.0, 9);
        REQUIRE((a.occupations - b.occupations).cwiseAbs().maxCoeff() <= 1e-13);
        REQUIRE(a.j_first == Catch::Approx(b.j_first).epsilon(1e-14));
    }
    SECTION("solver agreement for n = 3..10") {
        for (int n = 3; n <= 10; ++n) {
            const auto closed = case4_closed_forms(100.0, 50.0, 0.1, 0.5, 0.5, 1.0, n);
            SteadyState s;
            const TransportReport rep =
                steady_transport(end_bath_chain(n, 100.0, 50.0, 0.1, 0.5), &s);
            REQUIRE((rep.occupations - closed.occupations).cwiseAbs().maxCoeff()
                    <= 1e-9 * closed.occupations.maxCoeff());
            REQUIRE(current_of(rep.currents, "1") == Catch::Approx(closed.j_first).epsilon(1e-8));
        }
    }
    SECTION("long-chain scaling halves the current when the length doubles") {
        const auto a = case4_closed_forms(100.0, 50.0, 0.1, 0.5, 0.5, 1.0, 200);
        const auto b = case4_closed_forms(100.0, 50.0, 0.1, 0.5, 0.5, 1.0, 400);
        REQUIRE(std::abs(b.j_first / a.j_first - 0.5) <= 0.03);
    }
    SECTION("rescaled current is exactly length-independent") {
        auto rescaled = [](int n) {
            const auto r = case4_closed_forms(100.0, 50.0, 0.1, 0.5, 0.5, 1.0, n);
            return r.j_first * (4.0 * 0.25 + 0.01 + (n - 1) * 0.5 * 0.1);
        };
        const double ref = rescaled(3);
        for (int n : {4, 7, 10, 50, 200})
            REQUIRE(rescaled(n) == Catch::Approx(ref).epsilon(1e-10));
    }
}

TEST_CASE("dephaser-count sweep") {
    const double gamma = 0.5, zeta = 0.1, N1 = 100.0, Nn = 50.0;
    const SweepResult sweep =
        fourier_crossover_scan({4, 8, 12}, {}, gamma, zeta, N1, Nn, 0.5, 1.0);
    REQUIRE(sweep.columns == std::vector<std::string>{"n", "dephasers", "current_site1"});

    double prev = 0.0;
    int prev_n = 0;
    for (const auto& row : sweep.rows) {
        const int n = static_cast<int>(row[0]);
        const int k = static_cast<int>(row[1]);
        const double j = row[2];
        if (k == 0) {
            const auto closed = case3_closed_forms(N1, Nn, zeta, 0.5, 1.0, n);
            REQUIRE(std::abs(j - closed.j_first) <= 1e-8);
        }
        if (k == n) {
            const auto closed = case4_closed_forms(N1, Nn, zeta, gamma, 0.5, 1.0, n);
            REQUIRE(std::abs(j - closed.j_first) <= 1e-8);
        }
        // monotone non-increasing in the dephaser count at fixed n
        if (n == prev_n && k > 0) REQUIRE(j <= prev + 1e-9);
        prev = j;
        prev_n = n;
    }
}

TEST_CASE("disorder study") {
    ReservoirBank bank;
    const int n = 25;
    bank.thermal.assign(n, {0.1, 10.0});
    bank.diffusive_A = BathAttachment{0.1, 100.0};
    bank.diffusive_B = BathAttachment{0.1, 50.0};

    SECTION("equal couplings reduce to the uniform chain") {
        ScenarioPreset uniform;
        uniform.name = "uniform";
        uniform.chain = ChainSpec::uniform_rwa(8, 1.0, 0.5);
        uniform.bank = bank;
        uniform.bank.thermal.resize(8);
        ScenarioPreset equal;
        equal.name = "equal-bonds";
        equal.chain = ChainSpec::disordered_rwa(8, 1.0, std::vector<double>(7, 0.5));
        equal.bank = uniform.bank;
        SteadyState su, se;
        steady_transport(uniform, &su);
        steady_transport(equal, &se);
        REQUIRE((su.V - se.V).norm() <= 1e-9 * su.V.norm());
    }
    SECTION("steady nullity and current identities across seeds") {
        for (std::uint64_t seed : {3u, 11u}) {
            SteadyState s;
            const TransportReport rep = disorder_study(seed, n, bank, 1.0, 1.0, &s);
            REQUIRE(std::abs(rep.currents.total) <= 1e-10 * 15.0);
            ScenarioPreset p;
            p.chain = ChainSpec::disordered_rwa(n, 1.0, sample_bond_couplings(n, seed));
            p.bank = bank;
            const auto run = instantiate(p);
            const auto id = steady_current_identity_check(s, run.gen, run.ham, p.chain, p.bank);
            INFO("seed " << seed << ": reconstruction dev " << id.max_reconstruction_dev
                         << ", sum dev " << id.sum_identity_dev);
            REQUIRE(id.ok);
        }
    }
    SECTION("bulk trends survive the disorder") {
        const TransportReport rep = disorder_study(5, n, bank);
        REQUIRE(rep.occupations(0) > rep.occupations(12));  // hot end stays elevated
        REQUIRE(rep.occupations(12) > 10.0);                // bulk above its local bath
    }
}

TEST_CASE("spring-mass study") {
    SECTION("mode law collapses without coupling") {
        const Vec nu = smc_mode_frequencies(8, 1.0, 1e-12);
        for (int m = 0; m < 8; ++m) REQUIRE(nu(m) == Catch::Approx(1.0).margin(1e-9));
    }
    SECTION("drift spectrum follows the mode law") {
        const int n = 10;
        const auto run = instantiate(preset(Case::CaseVI, {.n = n}));
        const StabilityReport stab = stability_check(run.gen.Gamma);
        Vec im_parts(n);
        std::vector<double> ims;
        for (auto ev : stab.eigenvalues) {
            REQUIRE(ev.real() == Catch::Approx(-0.05).margin(1e-12));
            if (ev.imag() > 0.0) ims.push_back(ev.imag());
        }
        REQUIRE(ims.size() == static_cast<std::size_t>(n));
        std::sort(ims.begin(), ims.end());
        Vec predicted = smc_mode_frequencies(n, 1.0, 0.5);
        std::sort(predicted.begin(), predicted.end());
        for (int m = 0; m < n; ++m)
            REQUIRE(std::abs(ims[m] - predicted(m)) <= 1e-9);
    }
    SECTION("occupation profile keeps the elevated ends") {
        const TransportReport rep = smc_study(25, 0.5, preset(Case::CaseVI, {.n = 25}).bank);
        REQUIRE(rep.occupations(0) > rep.occupations(12));
        REQUIRE(rep.occupations(24) > rep.occupations(12));
        REQUIRE(std::abs(rep.occupations(12) - 10.0) <= 0.2 * 10.0);
        REQUIRE(std::abs(rep.currents.total) <= 1e-10 * 15.0);
    }
}

TEST_CASE("scale invariance of the injected current") {
    // the internal currents absorb exactly the diffusive injection at any n
    for (int n : {5, 25, 50}) {
        const TransportReport rep = steady_transport(preset(Case::Baseline, {.n = n}));
        double internal = 0.0;
        for (const auto& [lab, v] : rep.currents.per_reservoir)
            if (lab != "A" && lab != "B") internal += v;
        REQUIRE(internal == Catch::Approx(-15.0).epsilon(1e-9));
    }
}

TEST_CASE("mirror symmetry of the steady currents") {
    const int n = 7;
    const auto p = preset(Case::Baseline, {.n = n});
    ScenarioPreset mirrored = p;
    std::reverse(mirrored.bank.thermal.begin(), mirrored.bank.thermal.end());
    std::swap(mirrored.bank.diffusive_A, mirrored.bank.diffusive_B);

    const TransportReport a = steady_transport(p);
    const TransportReport b = steady_transport(mirrored);
    for (int k = 1; k <= n; ++k) {
        const double ja = current_of(a.currents, std::to_string(k));
        const double jb = current_of(b.currents, std::to_string(n + 1 - k));
        REQUIRE(ja == Catch::Approx(jb).margin(1e-10));
    }
    REQUIRE(current_of(a.currents, "A") == Catch::Approx(current_of(b.currents, "B")).margin(1e-12));
}
