// propagator.hpp — transient dynamics: exact mean evolution, closed-form
// covariance propagation for the uniform chain (with and without thermal
// damping), and a fixed-step RK4 oracle for the general moment equations.

#pragma once

#include <string>
#include <vector>

#include "qhchain/steady.hpp"

namespace qhchain {

/// Finite-time mode-space kernel with entries
/// (1 - exp(-[zeta + i(nu_j - nu_k)] t)) / (zeta + i(nu_j - nu_k)).
/// At zeta = 0 the diagonal (and any pair with |nu_j - nu_k| < freq_tol)
/// takes the limiting value t.
inline CMat l_matrix(const Vec& nu, double zeta, double t, double freq_tol = 0.0) {
    const auto n = nu.size();
    CMat L(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const double dnu = nu(j) - nu(k);
            if (zeta == 0.0 && std::abs(dnu) <= freq_tol) {
                L(j, k) = t;
            } else {
                const cplx a(zeta, dnu);
                L(j, k) = (1.0 - std::exp(-a * t)) / a;
            }
        }
    }
    return L;
}

/// x(t) = e^{Gamma t} x0 + Gamma^-1 (e^{Gamma t} - I)(xi - eta).
inline Vec evolve_mean_exact(const Vec& x0, const Mat& Gamma, const Vec& xi, const Vec& eta,
                             double t) {
    const Mat E = matrix_exp(Gamma, t);
    Vec x = E * x0;
    const Vec drive = xi - eta;
    if (drive.norm() > 0.0) {
        Eigen::FullPivLU<Mat> lu(Gamma);
        if (!lu.isInvertible())
            throw std::invalid_argument("evolve_mean_exact: singular drift with nonzero drive");
        x += lu.solve((E - Mat::Identity(Gamma.rows(), Gamma.cols())) * drive);
    }
    return x;
}

namespace detail {

// e^{J H t} of the uniform RWA chain: sine-transform-conjugated block rotation
// with the mode frequencies.
inline Mat rwa_rotation(const Mat& O, const Vec& nu, double t) {
    const auto n = nu.size();
    const Vec c = (nu.array() * t).cos();
    const Vec s = (nu.array() * t).sin();
    Mat R(2 * n, 2 * n);
    R.topLeftCorner(n, n) = O * c.asDiagonal() * O;
    R.topRightCorner(n, n) = O * s.asDiagonal() * O;
    R.bottomLeftCorner(n, n) = -R.topRightCorner(n, n);
    R.bottomRightCorner(n, n) = R.topLeftCorner(n, n);
    return R;
}

// Hadamard-block correction (O+O) [[M.Re L, -M.Im L], [M.Im L, M.Re L]] (O+O)
inline Mat kernel_correction(const Mat& O, const Mat& M, const CMat& L) {
    const auto n = O.rows();
    const Mat ReB = O * hadamard(M, L.real()) * O;
    const Mat ImB = O * hadamard(M, L.imag()) * O;
    Mat C(2 * n, 2 * n);
    C.topLeftCorner(n, n) = ReB;
    C.bottomRightCorner(n, n) = ReB;
    C.topRightCorner(n, n) = -ImB;
    C.bottomLeftCorner(n, n) = ImB;
    return C;
}

// Diagonal of the n x n diffusion block beyond the hbar*zeta/2 vacuum part.
inline Vec diffusion_block_diagonal(const ChainSpec& spec, const ReservoirBank& bank) {
    Vec db = Vec::Zero(spec.n);
    for (int k = 0; k < spec.n; ++k)
        db(k) = spec.hbar * bank.thermal[k].zeta * bank.thermal[k].nbar;
    if (bank.diffusive_A) db(0) += spec.hbar * bank.diffusive_A->zeta * bank.diffusive_A->nbar;
    if (bank.diffusive_B) db(spec.n - 1) += spec.hbar * bank.diffusive_B->zeta * bank.diffusive_B->nbar;
    return db;
}

} // namespace detail

/// Closed-form covariance at time t for the uniform RWA chain with uniform
/// thermal coupling zeta > 0:
/// V(t) = e^{Gamma t} V0 e^{Gamma^T t} + (hbar/2)(1 - e^{-zeta t}) I + kernel term.
inline Mat evolve_cm_closed(const Mat& V0, const ChainSpec& spec, const ReservoirBank& bank,
                            double t) {
    spec.validate();
    bank.validate(spec.n);
    if (spec.coupling != Coupling::UniformRwa)
        throw std::invalid_argument("evolve_cm_closed: uniform RWA chain required");
    double zeta = 0.0;
    if (!bank.uniform_thermal_zeta(&zeta))
        throw std::invalid_argument("evolve_cm_closed: uniform thermal coupling required");
    if (bank.has_dephasing())
        throw std::invalid_argument("evolve_cm_closed: dephasing not covered by the closed form");

    const int n = spec.n;
    const Mat O = sine_transform(n);
    const Vec nu = toeplitz_mode_frequencies(n, spec.omega, spec.Omega);

    // e^{Gamma t} = e^{-zeta t / 2} e^{J H t}
    const Mat E = std::exp(-zeta * t / 2.0) * detail::rwa_rotation(O, nu, t);
    const Mat M = O * detail::diffusion_block_diagonal(spec, bank).asDiagonal() * O;
    const CMat L = l_matrix(nu, zeta, t);

    Mat V = E * V0 * E.transpose();
    V += (spec.hbar / 2.0) * (1.0 - std::exp(-zeta * t)) * Mat::Identity(2 * n, 2 * n);
    V += detail::kernel_correction(O, M, L);
    return V;
}

/// Covariance at time t when every thermal coupling vanishes and only the
/// end-chain diffusive baths drive the chain. The kernel diagonal grows
/// linearly (no steady state); frequency coincidences within
/// 1e-9 * omega take the limiting value t.
inline Mat evolve_all_diffusive(const Mat& V0, const ChainSpec& spec, const ReservoirBank& bank,
                                double t) {
    spec.validate();
    bank.validate(spec.n);
    if (spec.coupling != Coupling::UniformRwa)
        throw std::invalid_argument("evolve_all_diffusive: uniform RWA chain required");
    for (const auto& b : bank.thermal)
        if (b.zeta != 0.0)
            throw std::invalid_argument("evolve_all_diffusive: thermal couplings must vanish");
    if (bank.has_dephasing())
        throw std::invalid_argument("evolve_all_diffusive: dephasing not covered by the closed form");

    const int n = spec.n;
    const Mat O = sine_transform(n);
    const Vec nu = toeplitz_mode_frequencies(n, spec.omega, spec.Omega);
    const Mat E = detail::rwa_rotation(O, nu, t);
    const Mat M = O * detail::diffusion_block_diagonal(spec, bank).asDiagonal() * O;
    const CMat L0 = l_matrix(nu, 0.0, t, 1e-9 * std::abs(spec.omega));

    return E * V0 * E.transpose() + detail::kernel_correction(O, M, L0);
}

struct Trajectory {
    std::vector<double> times;
    std::vector<GaussianState> states;
    std::string provenance;
};

/// Fixed-step RK4 on the moment equations
///   dV/dt = Gt V + V Gt^T + D + Delta_V(V),  dx/dt = xi - eta + Gt x,
/// with per-step symmetrization of V. Samples are recorded at the requested
/// times (each interval is subdivided so steps land on them exactly).
inline Trajectory evolve_ode(const Mat& V0, const Vec& x0, const GeneratorSet& gen,
                             const std::vector<double>& sample_times, double dt,
                             const Vec& xi_in = Vec()) {
    if (!(dt > 0.0)) throw std::invalid_argument("evolve_ode: dt must be > 0");
    const int d = gen.layout.dim();
    if (V0.rows() != d || V0.cols() != d || x0.size() != d)
        throw std::invalid_argument("evolve_ode: dimension mismatch");
    const Vec xi = xi_in.size() == 0 ? Vec::Zero(d) : xi_in;

    const Mat Gt = gen.gamma_tilde();
    std::vector<Mat> JDs;
    if (gen.has_quadratic()) {
        const Mat J = symplectic_form(gen.layout.n);
        for (const auto& q : gen.quadratic) JDs.push_back(J * q.Delta);
    }
    const Vec drive = xi - gen.eta;

    auto dV = [&](const Mat& V) {
        Mat R = Gt * V + V * Gt.transpose() + gen.D;
        for (const auto& JD : JDs) R += gen.layout.hbar * JD * V * JD.transpose();
        return R;
    };
    auto dx = [&](const Vec& x) { return (drive + Gt * x).eval(); };

    Trajectory traj;
    traj.provenance = "rk4";
    Mat V = V0;
    Vec x = x0;
    double t = 0.0;
    long step_count = 0;

    auto record = [&](double time) {
        traj.times.push_back(time);
        traj.states.push_back({x, V});
    };
    if (!sample_times.empty() && sample_times.front() == 0.0) record(0.0);

    for (double target : sample_times) {
        if (target < t) throw std::invalid_argument("evolve_ode: sample times must be increasing");
        if (target == t) continue;
        const long steps = std::max<long>(1, static_cast<long>(std::ceil((target - t) / dt)));
        const double h = (target - t) / static_cast<double>(steps);
        for (long i = 0; i < steps; ++i, ++step_count) {
            const Mat k1 = dV(V);
            const Mat k2 = dV(V + (h / 2.0) * k1);
            const Mat k3 = dV(V + (h / 2.0) * k2);
            const Mat k4 = dV(V + h * k3);
            V += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            V = ((V + V.transpose()) / 2.0).eval();
            const Vec j1 = dx(x);
            const Vec j2 = dx(x + (h / 2.0) * j1);
            const Vec j3 = dx(x + (h / 2.0) * j2);
            const Vec j4 = dx(x + h * j3);
            x += (h / 6.0) * (j1 + 2.0 * j2 + 2.0 * j3 + j4);
            if (!all_finite(V) || !x.allFinite())
                throw std::runtime_error("evolve_ode: non-finite state at step "
                                         + std::to_string(step_count) + ", t = "
                                         + std::to_string(t + (i + 1) * h));
        }
        t = target;
        record(t);
    }
    return traj;
}

} // namespace qhchain
