// thermo.hpp — heat currents, internal energy, and occupation numbers.
//
// Sign convention: a positive current means energy flowing from the reservoir
// into the chain.

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qhchain/model.hpp"

namespace qhchain {

/// Heat current of one linear Lindblad vector:
/// (hbar/2) Tr[H Re(ll^dag)] - Tr[H Im(ll^dag) J S] + Jxi . Im(ll^dag) J x
/// + Im(mu^* l) . (J xi - H x), with S = V + x x^T.
inline double reservoir_current(const LindbladLinear& L, const Mat& H, const Vec& xi,
                                const Mat& V, const Vec& x, double hbar) {
    const auto d = H.rows();
    if (L.lambda.size() != d || V.rows() != d || x.size() != d)
        throw std::invalid_argument("reservoir_current: dimension mismatch");
    const Mat J = symplectic_form(static_cast<int>(d) / 2);
    const CMat ll = L.lambda * L.lambda.adjoint();
    const Mat re = ll.real(), im = ll.imag();
    const Mat S = V + x * x.transpose();

    double cur = (hbar / 2.0) * (H * re).trace();
    cur -= (H * im * J * S).trace();
    if (xi.size() == d && xi.norm() > 0.0)
        cur += (J * xi).dot(im * J * x);
    const Vec imu = (std::conj(L.mu) * L.lambda).imag();
    if (imu.norm() > 0.0)
        cur += imu.dot(J * xi - H * x);
    return cur;
}

/// Heat current of one quadratic (dephasing) Lindblad:
/// (hbar/2) Tr[H (J Delta) V (J Delta)^T] + (hbar/2) Tr[H (J Delta)^2 S]
/// + hbar Jxi . (J Delta) V (J Delta)^T x.
inline double reservoir_current(const LindbladQuadratic& L, const Mat& H, const Vec& xi,
                                const Mat& V, const Vec& x, double hbar) {
    const auto d = H.rows();
    if (L.Delta.rows() != d || V.rows() != d || x.size() != d)
        throw std::invalid_argument("reservoir_current: dimension mismatch");
    const Mat J = symplectic_form(static_cast<int>(d) / 2);
    const Mat JD = J * L.Delta;
    const Mat S = V + x * x.transpose();
    const Mat M = JD * V * JD.transpose();

    double cur = (hbar / 2.0) * (H * M).trace();
    cur += (hbar / 2.0) * (H * JD * JD * S).trace();
    if (xi.size() == d && xi.norm() > 0.0)
        cur += hbar * (J * xi).dot(M * x);
    return cur;
}

struct CurrentReport {
    std::vector<std::pair<std::string, double>> per_reservoir;
    double total{0.0};
    double diffusive_part{0.0};      // (1/2) Tr[H D]
    std::optional<double> time;      // empty = steady state
};

/// Total heat current,
/// (1/2) Tr[H (D + Delta_V)] + Tr[H Gt S] + (xi - eta) . H x - Jxi . Gt x,
/// together with the per-reservoir breakdown. Thermal pairs are reported as
/// one current per reservoir label.
inline CurrentReport total_current(const GeneratorSet& gen, const Mat& H, const Vec& xi,
                                   const Mat& V, const Vec& x) {
    const int d = gen.layout.dim();
    if (H.rows() != d || V.rows() != d || x.size() != d)
        throw std::invalid_argument("total_current: dimension mismatch");
    const double hbar = gen.layout.hbar;
    const Mat J = symplectic_form(gen.layout.n);
    const Mat Gt = gen.gamma_tilde();
    const Mat S = V + x * x.transpose();
    const Vec xiv = xi.size() == d ? xi : Vec::Zero(d);

    CurrentReport rep;
    rep.diffusive_part = 0.5 * (H * gen.D).trace();
    rep.total = 0.5 * (H * (gen.D + gen.delta_v(V))).trace() + (H * Gt * S).trace()
              + (xiv - gen.eta).dot(H * x) - (J * xiv).dot(Gt * x);

    auto accumulate = [&](const std::string& label, double value) {
        for (auto& [lab, v] : rep.per_reservoir)
            if (lab == label) { v += value; return; }
        rep.per_reservoir.emplace_back(label, value);
    };
    for (const auto& L : gen.linear)
        accumulate(L.label, reservoir_current(L, H, xiv, V, x, hbar));
    for (const auto& L : gen.quadratic)
        accumulate(L.label, reservoir_current(L, H, xiv, V, x, hbar));
    return rep;
}

/// Internal energy (1/2) Tr[H V + H x x^T] + xi . J x + H0.
inline double mean_energy(const Mat& H, const Vec& xi, double H0, const Mat& V, const Vec& x) {
    const auto d = H.rows();
    if (V.rows() != d || x.size() != d)
        throw std::invalid_argument("mean_energy: dimension mismatch");
    double e = 0.5 * ((H * V).trace() + x.dot(H * x)) + H0;
    if (xi.size() == d)
        e += xi.dot(symplectic_form(static_cast<int>(d) / 2) * x);
    return e;
}

/// Explicit exponential-decay forms of the transient energy and total current
/// for the uniform chain with uniform thermal coupling.
inline std::pair<double, double>
transient_energy_and_current(const ChainSpec& spec, const ReservoirBank& bank,
                             const Mat& V0, const Vec& x0, double t) {
    spec.validate();
    bank.validate(spec.n);
    if (spec.coupling != Coupling::UniformRwa)
        throw std::invalid_argument("transient_energy_and_current: uniform RWA chain required");
    double zeta = 0.0;
    if (!bank.uniform_thermal_zeta(&zeta))
        throw std::invalid_argument("transient_energy_and_current: uniform thermal coupling required");

    const Mat H = build_adjacency(spec).H;
    const double e0 = 0.5 * ((H * V0).trace() + x0.dot(H * x0));
    double nbar_sum = 0.0;
    for (const auto& b : bank.thermal) nbar_sum += b.nbar;
    const double za_na = bank.diffusive_A ? bank.diffusive_A->zeta * bank.diffusive_A->nbar : 0.0;
    const double zb_nb = bank.diffusive_B ? bank.diffusive_B->zeta * bank.diffusive_B->nbar : 0.0;
    const double w = spec.omega, hbar = spec.hbar;
    const double decay = std::exp(-zeta * t);

    const double energy = e0 * decay
        + hbar * w * (spec.n / 2.0 + nbar_sum + za_na / zeta + zb_nb / zeta) * (1.0 - decay);
    const double current = -zeta * e0 * decay
        + hbar * w * (zeta * spec.n / 2.0 + zeta * nbar_sum + za_na + zb_nb) * decay;
    return {energy, current};
}

/// Mean occupation per site, (V_qq + V_pp) / (2 hbar) - 1/2. An occupation
/// below -1e-10 means the covariance is not physical.
inline Vec occupations(const Mat& V, const PhaseSpaceLayout& layout) {
    const int n = layout.n;
    if (V.rows() != 2 * n || V.cols() != 2 * n)
        throw std::invalid_argument("occupations: dimension mismatch");
    Vec occ(n);
    for (int k = 1; k <= n; ++k) {
        occ(k - 1) = (V(layout.q_index(k), layout.q_index(k))
                    + V(layout.p_index(k), layout.p_index(k))) / (2.0 * layout.hbar) - 0.5;
        if (occ(k - 1) < -1e-10)
            throw std::domain_error("occupations: negative occupation at site "
                                    + std::to_string(k) + " (unphysical covariance)");
    }
    return occ;
}

struct CurrentIdentityReport {
    double max_reconstruction_dev{0.0};  // direct vs occupation-difference form
    double sum_identity_dev{0.0};        // internal sum vs -(end/diffusive currents)
    double total_dev{0.0};               // total current at the steady state
    double scale{1.0};
    bool ok{false};
};

/// Steady-state current identities for RWA chains: every thermal current
/// reduces to -hbar omega zeta (occupation difference) plus vanishing bond
/// covariances, and the internal currents balance the injected ones.
inline CurrentIdentityReport
steady_current_identity_check(const SteadyState& steady, const GeneratorSet& gen,
                              const HamiltonianSpec& ham, const ChainSpec& spec,
                              const ReservoirBank& bank, double rel_tol = 1e-9) {
    const PhaseSpaceLayout layout = spec.layout();
    const CurrentReport rep = total_current(gen, ham.H, ham.xi, steady.V, steady.x);
    const Vec occ = occupations(steady.V, layout);

    CurrentIdentityReport out;
    double internal_sum = 0.0, injected = 0.0, abs_sum = 0.0;
    for (const auto& [label, value] : rep.per_reservoir) {
        abs_sum += std::abs(value);
        if (label == "A" || label == "B")
            injected += value;
        else if (label.rfind("deph", 0) != 0)
            internal_sum += value;
    }
    out.scale = std::max(abs_sum, 1e-300);

    // direct trace evaluation vs the occupation-difference reconstruction
    if (spec.coupling != Coupling::SpringMass) {
        for (const auto& [label, value] : rep.per_reservoir) {
            if (label == "A" || label == "B" || label.rfind("deph", 0) == 0) continue;
            const int k = std::stoi(label);
            const auto& b = bank.thermal[k - 1];
            double recon = -spec.hbar * spec.omega * b.zeta * (occ(k - 1) - b.nbar);
            const auto bond = [&](int j) {  // coupling of bond (j, j+1), 1-based
                return spec.coupling == Coupling::UniformRwa ? spec.Omega : spec.bond_Omegas[j - 1];
            };
            if (k > 1) recon -= bond(k - 1) * b.zeta * steady.V(k - 2, k - 1);
            if (k < spec.n) recon -= bond(k) * b.zeta * steady.V(k - 1, k);
            out.max_reconstruction_dev = std::max(out.max_reconstruction_dev, std::abs(value - recon));
        }
    }

    out.sum_identity_dev = std::abs(internal_sum + injected);
    out.total_dev = std::abs(rep.total);
    out.ok = out.max_reconstruction_dev <= rel_tol * out.scale
          && out.sum_identity_dev <= rel_tol * out.scale
          && out.total_dev <= rel_tol * out.scale;
    return out;
}

struct TransportReport {
    CurrentReport currents;
    double mean_energy{0.0};
    Vec occupations;
    std::optional<double> time;  // empty = steady state
    double residual{0.0};
    std::string solver;
};

inline TransportReport transport_report(const GeneratorSet& gen, const HamiltonianSpec& ham,
                                        const Mat& V, const Vec& x,
                                        std::optional<double> time = std::nullopt) {
    TransportReport rep;
    rep.currents = total_current(gen, ham.H, ham.xi, V, x);
    rep.currents.time = time;
    rep.mean_energy = mean_energy(ham.H, ham.xi, ham.H0, V, x);
    rep.occupations = occupations(V, gen.layout);
    rep.time = time;
    return rep;
}

} // namespace qhchain
