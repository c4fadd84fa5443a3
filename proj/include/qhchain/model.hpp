// model.hpp — chain and reservoir specifications and their translation into
// the drift/diffusion generator set.
//
// A chain is n harmonic oscillators with nearest-neighbour coupling, either
// excitation-conserving (RWA, uniform or per-bond) or position-position
// (spring-mass). Reservoirs attach as linear Lindblad vectors (thermal and
// end-chain all-diffusive baths) or quadratic dephasing matrices.

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qhchain/state.hpp"

namespace qhchain {

enum class Coupling { UniformRwa, DisorderedRwa, SpringMass };

struct ChainSpec {
    int n{2};
    double omega{1.0};
    double hbar{1.0};
    Coupling coupling{Coupling::UniformRwa};
    double Omega{0.0};                // uniform RWA hopping rate
    std::vector<double> bond_Omegas;  // per-bond hopping, size n-1
    double kappa{0.0};                // spring constant

    static ChainSpec uniform_rwa(int n, double omega, double Omega, double hbar = 1.0) {
        ChainSpec s;
        s.n = n; s.omega = omega; s.Omega = Omega; s.hbar = hbar;
        s.coupling = Coupling::UniformRwa;
        s.validate();
        return s;
    }
    static ChainSpec disordered_rwa(int n, double omega, std::vector<double> bonds, double hbar = 1.0) {
        ChainSpec s;
        s.n = n; s.omega = omega; s.bond_Omegas = std::move(bonds); s.hbar = hbar;
        s.coupling = Coupling::DisorderedRwa;
        s.validate();
        return s;
    }
    static ChainSpec spring_mass(int n, double omega, double kappa, double hbar = 1.0) {
        ChainSpec s;
        s.n = n; s.omega = omega; s.kappa = kappa; s.hbar = hbar;
        s.coupling = Coupling::SpringMass;
        s.validate();
        return s;
    }

    PhaseSpaceLayout layout() const { return PhaseSpaceLayout(n, hbar); }

    void validate() const {
        if (n < 2) throw std::invalid_argument("ChainSpec: n must be >= 2");
        if (!(omega > 0.0)) throw std::invalid_argument("ChainSpec: omega must be > 0");
        if (!(hbar > 0.0)) throw std::invalid_argument("ChainSpec: hbar must be > 0");
        if (coupling == Coupling::DisorderedRwa) {
            if (static_cast<int>(bond_Omegas.size()) != n - 1)
                throw std::invalid_argument("ChainSpec: per-bond coupling list must have n-1 entries");
            for (double b : bond_Omegas)
                if (!std::isfinite(b)) throw std::invalid_argument("ChainSpec: non-finite bond coupling");
        }
        if (!std::isfinite(Omega) || !std::isfinite(kappa))
            throw std::invalid_argument("ChainSpec: non-finite coupling rate");
    }
};

struct BathAttachment {
    double zeta{0.0};  // bath-oscillator coupling rate, >= 0
    double nbar{0.0};  // mean occupation of the bath, >= 0
};

enum class End { A, B };  // A attaches to site 1, B to site n

struct ReservoirBank {
    std::vector<BathAttachment> thermal;        // per site; zeta = 0 means detached
    std::optional<BathAttachment> diffusive_A;  // all-diffusive bath on site 1
    std::optional<BathAttachment> diffusive_B;  // all-diffusive bath on site n
    std::vector<double> dephasing;              // per-site rates; empty means none

    void validate(int n) const {
        if (static_cast<int>(thermal.size()) != n)
            throw std::invalid_argument("ReservoirBank: thermal list must have one entry per site");
        for (const auto& b : thermal)
            if (b.zeta < 0.0 || b.nbar < 0.0)
                throw std::invalid_argument("ReservoirBank: negative thermal rate or occupation");
        for (const auto& d : {diffusive_A, diffusive_B})
            if (d && (d->zeta < 0.0 || d->nbar < 0.0))
                throw std::invalid_argument("ReservoirBank: negative diffusive rate or occupation");
        if (!dephasing.empty()) {
            if (static_cast<int>(dephasing.size()) != n)
                throw std::invalid_argument("ReservoirBank: dephasing list must have one entry per site");
            for (double g : dephasing)
                if (g < 0.0) throw std::invalid_argument("ReservoirBank: negative dephasing rate");
        }
    }

    bool has_dephasing() const {
        for (double g : dephasing)
            if (g > 0.0) return true;
        return false;
    }

    // true when every site carries the same zeta > 0
    bool uniform_thermal_zeta(double* zeta_out = nullptr) const {
        if (thermal.empty()) return false;
        const double z = thermal.front().zeta;
        if (!(z > 0.0)) return false;
        for (const auto& b : thermal)
            if (b.zeta != z) return false;
        if (zeta_out) *zeta_out = z;
        return true;
    }
};

struct HamiltonianSpec {
    Mat H;          // 2n x 2n symmetric adjacency
    Vec xi;         // displacement vector, zero by default
    double H0{0.0}; // energy offset
};

struct LindbladLinear {
    CVec lambda;          // coupling vector, length 2n
    cplx mu{0.0, 0.0};
    std::string label;    // reservoir identity: "1".."n", "A", "B"
};

struct LindbladQuadratic {
    Mat Delta;            // 2n x 2n symmetric, two entries sqrt(gamma)
    double gamma{0.0};
    int site{0};          // 1-based
    std::string label;
};

struct GeneratorSet {
    PhaseSpaceLayout layout;
    Mat Gamma;     // drift
    Mat D;         // diffusion
    CMat Upsilon;  // decoherence matrix, sum of lambda lambda^dag
    Vec eta;       // sum Im(mu^* lambda)
    std::vector<LindbladLinear> linear;
    std::vector<LindbladQuadratic> quadratic;

    bool has_quadratic() const { return !quadratic.empty(); }

    // Drift corrected by the quadratic Lindblads: Gamma + (hbar/2) sum (J Delta)^2
    Mat gamma_tilde() const {
        Mat G = Gamma;
        if (!quadratic.empty()) {
            const Mat J = symplectic_form(layout.n);
            for (const auto& q : quadratic) {
                Mat JD = J * q.Delta;
                G += (layout.hbar / 2.0) * JD * JD;
            }
        }
        return G;
    }

    // Covariance source from the quadratic Lindblads: hbar sum (J Delta) V (J Delta)^T
    Mat delta_v(const Mat& V) const {
        Mat S = Mat::Zero(layout.dim(), layout.dim());
        if (!quadratic.empty()) {
            const Mat J = symplectic_form(layout.n);
            for (const auto& q : quadratic) {
                Mat JD = J * q.Delta;
                S += layout.hbar * JD * V * JD.transpose();
            }
        }
        return S;
    }
};

/// Hamiltonian adjacency for the chain. RWA chains give blkdiag(Hb, Hb) with
/// Hb tridiagonal; the spring-mass chain gives blkdiag(Hb', omega I) with the
/// end-site corrections in Hb'.
inline HamiltonianSpec build_adjacency(const ChainSpec& spec) {
    spec.validate();
    const int n = spec.n;
    HamiltonianSpec ham;
    ham.xi = Vec::Zero(2 * n);

    Mat Hb = spec.omega * Mat::Identity(n, n);
    switch (spec.coupling) {
    case Coupling::UniformRwa:
        for (int j = 0; j + 1 < n; ++j)
            Hb(j, j + 1) = Hb(j + 1, j) = spec.Omega;
        ham.H = block_doubled(Hb);
        break;
    case Coupling::DisorderedRwa:
        for (int j = 0; j + 1 < n; ++j)
            Hb(j, j + 1) = Hb(j + 1, j) = spec.bond_Omegas[j];
        ham.H = block_doubled(Hb);
        break;
    case Coupling::SpringMass: {
        Hb = (spec.omega + spec.kappa) * Mat::Identity(n, n);
        for (int j = 0; j + 1 < n; ++j)
            Hb(j, j + 1) = Hb(j + 1, j) = -spec.kappa / 2.0;
        Hb(0, 0) -= spec.kappa / 2.0;
        Hb(n - 1, n - 1) -= spec.kappa / 2.0;
        ham.H = Mat::Zero(2 * n, 2 * n);
        ham.H.topLeftCorner(n, n) = Hb;
        ham.H.bottomRightCorner(n, n) = spec.omega * Mat::Identity(n, n);
        break;
    }
    }
    return ham;
}

/// Lindblad pair of a thermal bath on one site: the downward vector carries
/// sqrt(zeta (nbar+1)/2) on (i q_k, -p_k), the upward one sqrt(zeta nbar/2)
/// on (-i q_k, -p_k).
inline std::pair<LindbladLinear, LindbladLinear>
thermal_lindblad_pair(int site, double zeta, double nbar, const PhaseSpaceLayout& layout) {
    if (zeta < 0.0 || nbar < 0.0)
        throw std::invalid_argument("thermal_lindblad_pair: rates must be non-negative");
    const int qi = layout.q_index(site), pi = layout.p_index(site);
    LindbladLinear down, up;
    down.lambda = CVec::Zero(layout.dim());
    up.lambda = CVec::Zero(layout.dim());
    const double c_down = std::sqrt(zeta * (nbar + 1.0) / 2.0);
    const double c_up = std::sqrt(zeta * nbar / 2.0);
    down.lambda(qi) = cplx(0.0, c_down);
    down.lambda(pi) = -c_down;
    up.lambda(qi) = cplx(0.0, -c_up);
    up.lambda(pi) = -c_up;
    down.label = up.label = std::to_string(site);
    return {down, up};
}

/// Lindblad pair of an end-chain all-diffusive bath (high-occupation limit
/// nbar+1 ~ nbar): the two vectors are complex conjugates, so the pair is
/// purely diffusive and never contributes drift.
inline std::pair<LindbladLinear, LindbladLinear>
diffusive_lindblad(End end, double zeta, double nbar, const PhaseSpaceLayout& layout) {
    if (zeta < 0.0 || nbar < 0.0)
        throw std::invalid_argument("diffusive_lindblad: rates must be non-negative");
    const int site = (end == End::A) ? 1 : layout.n;
    const int qi = layout.q_index(site), pi = layout.p_index(site);
    LindbladLinear lam, lam_conj;
    lam.lambda = CVec::Zero(layout.dim());
    const double c = std::sqrt(zeta * nbar / 2.0);
    lam.lambda(qi) = cplx(0.0, c);
    lam.lambda(pi) = -c;
    lam_conj.lambda = lam.lambda.conjugate();
    lam.label = lam_conj.label = (end == End::A) ? "A" : "B";
    return {lam, lam_conj};
}

/// Quadratic dephasing Lindblad on one site: Delta has sqrt(gamma) at the
/// (q_m, q_m) and (p_m, p_m) entries.
inline LindbladQuadratic dephasing_quadratic(int site, double gamma, const PhaseSpaceLayout& layout) {
    if (gamma < 0.0) throw std::invalid_argument("dephasing_quadratic: gamma must be >= 0");
    LindbladQuadratic q;
    q.Delta = Mat::Zero(layout.dim(), layout.dim());
    const double c = std::sqrt(gamma);
    q.Delta(layout.q_index(site), layout.q_index(site)) = c;
    q.Delta(layout.p_index(site), layout.p_index(site)) = c;
    q.gamma = gamma;
    q.site = site;
    q.label = "deph" + std::to_string(site);
    return q;
}

/// Assemble the full generator set: Upsilon = sum lambda lambda^dag over all
/// linear Lindblads, Gamma = J H - Im(Upsilon) J, D = hbar Re(Upsilon),
/// eta = sum Im(mu^* lambda). Dephasing matrices are stored for the extended
/// dynamics.
inline GeneratorSet assemble_generators(const HamiltonianSpec& ham, const ReservoirBank& bank,
                                        const PhaseSpaceLayout& layout) {
    const int d = layout.dim();
    if (ham.H.rows() != d || ham.H.cols() != d)
        throw std::invalid_argument("assemble_generators: Hamiltonian dimension mismatch");
    bank.validate(layout.n);

    GeneratorSet gen;
    gen.layout = layout;
    gen.Upsilon = CMat::Zero(d, d);
    gen.eta = Vec::Zero(d);

    auto add_pair = [&](std::pair<LindbladLinear, LindbladLinear> pr) {
        for (auto* L : {&pr.first, &pr.second}) {
            gen.Upsilon += L->lambda * L->lambda.adjoint();
            gen.eta += (std::conj(L->mu) * L->lambda).imag();
            gen.linear.push_back(std::move(*L));
        }
    };
    // a conjugate pair sums to 2 Re(lambda lambda^dag); adding the real form
    // keeps the drift exactly untouched
    auto add_diffusive_pair = [&](std::pair<LindbladLinear, LindbladLinear> pr) {
        gen.Upsilon += (2.0 * (pr.first.lambda * pr.first.lambda.adjoint()).real())
                           .cast<cplx>();
        gen.linear.push_back(std::move(pr.first));
        gen.linear.push_back(std::move(pr.second));
    };

    for (int k = 1; k <= layout.n; ++k) {
        const auto& b = bank.thermal[k - 1];
        if (b.zeta > 0.0) add_pair(thermal_lindblad_pair(k, b.zeta, b.nbar, layout));
    }
    if (bank.diffusive_A && bank.diffusive_A->zeta > 0.0)
        add_diffusive_pair(
            diffusive_lindblad(End::A, bank.diffusive_A->zeta, bank.diffusive_A->nbar, layout));
    if (bank.diffusive_B && bank.diffusive_B->zeta > 0.0)
        add_diffusive_pair(
            diffusive_lindblad(End::B, bank.diffusive_B->zeta, bank.diffusive_B->nbar, layout));

    for (int m = 1; m <= static_cast<int>(bank.dephasing.size()); ++m)
        if (bank.dephasing[m - 1] > 0.0)
            gen.quadratic.push_back(dephasing_quadratic(m, bank.dephasing[m - 1], layout));

    const Mat J = symplectic_form(layout.n);
    gen.Gamma = J * ham.H - gen.Upsilon.imag() * J;
    gen.D = layout.hbar * gen.Upsilon.real();
    return gen;
}

/// Bose-Einstein occupation at inverse temperature beta (k_B = 1).
inline double nbar_from_beta(double beta, double omega, double hbar) {
    if (!(beta > 0.0)) throw std::invalid_argument("nbar_from_beta: beta must be > 0");
    if (!(omega > 0.0)) throw std::invalid_argument("nbar_from_beta: omega must be > 0");
    return 1.0 / std::expm1(hbar * beta * omega);
}

} // namespace qhchain
