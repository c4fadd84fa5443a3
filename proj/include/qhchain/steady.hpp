// steady.hpp — drift stability and stationary covariance solvers.
//
// Three independent routes to the steady state:
//   * spectral: diagonalize Gamma and divide by eigenvalue sums,
//   * vectorized: flatten the (2n)^2-dimensional linear system (the only
//     route that handles quadratic dephasing terms),
//   * closed form: sine-transform/Hadamard solution for the uniform chain.

#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "qhchain/model.hpp"

namespace qhchain {

struct NoSteadyStateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NearDefectiveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StabilityReport {
    CVec eigenvalues;
    bool stable{false};        // all real parts strictly negative
    double spectral_gap{0.0};  // -max real part
};

inline StabilityReport stability_check(const Mat& Gamma) {
    if (Gamma.rows() != Gamma.cols() || !all_finite(Gamma))
        throw std::invalid_argument("stability_check: square finite matrix required");
    Eigen::EigenSolver<Mat> es(Gamma, /*computeEigenvectors=*/false);
    StabilityReport r;
    r.eigenvalues = es.eigenvalues();
    const double max_re = r.eigenvalues.real().maxCoeff();
    // marginal spectra (purely imaginary up to eigensolver roundoff) count as
    // unstable: the decay convention requires a strictly negative real part
    r.stable = max_re < -1e-12 * std::max(1.0, Gamma.norm());
    r.spectral_gap = -max_re;
    return r;
}

struct SteadyState {
    Mat V;
    Vec x;
    double residual{0.0};  // Frobenius norm of the stationarity defect
    std::string solver;
};

inline double lyapunov_residual(const Mat& Gamma, const Mat& D, const Mat& V) {
    return (Gamma * V + V * Gamma.transpose() + D).norm();
}

inline double lyapunov_residual(const GeneratorSet& gen, const Mat& V) {
    const Mat Gt = gen.gamma_tilde();
    return (Gt * V + V * Gt.transpose() + gen.D + gen.delta_v(V)).norm();
}

/// Stationary limit of the mode-space kernel, entries 1/(zeta + i(nu_j - nu_k)).
inline CMat l_star_matrix(const Vec& nu, double zeta) {
    if (!(zeta > 0.0)) throw std::invalid_argument("l_star_matrix: zeta must be > 0");
    const auto n = nu.size();
    CMat L(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k)
            L(j, k) = 1.0 / cplx(zeta, nu(j) - nu(k));
    return L;
}

/// Solve Gamma V + V Gamma^T + D = 0 by diagonalizing Gamma = S diag(l) S^-1:
/// W_jk = -(S^-1 D S^-T)_jk / (l_j + l_k), V = Re(S W S^T).
/// Throws NearDefectiveError when an eigenvalue pair nearly cancels; callers
/// fall back to the vectorized route.
inline SteadyState solve_lyapunov_spectral(const Mat& Gamma, const Mat& D) {
    if (Gamma.rows() != Gamma.cols() || Gamma.rows() != D.rows() || D.rows() != D.cols())
        throw std::invalid_argument("solve_lyapunov_spectral: dimension mismatch");
    Eigen::EigenSolver<Mat> es(Gamma);
    const CVec lam = es.eigenvalues();
    const double scale = std::max(Gamma.norm(), 1e-300);
    if (lam.real().maxCoeff() >= 0.0)
        throw NoSteadyStateError("solve_lyapunov_spectral: drift is not stable");
    // marginal-by-roundoff spectra land in the near-defective guard below and
    // route to the vectorized solver, whose residual check has the last word
    for (Eigen::Index j = 0; j < lam.size(); ++j)
        for (Eigen::Index k = j; k < lam.size(); ++k)
            if (std::abs(lam(j) + lam(k)) < 1e-12 * scale)
                throw NearDefectiveError("solve_lyapunov_spectral: near-defective eigenvalue pair");

    const CMat S = es.eigenvectors();
    Eigen::PartialPivLU<CMat> lu(S);
    const CMat C = lu.solve(lu.solve(D.cast<cplx>()).transpose()).transpose();  // S^-1 D S^-T
    CMat W(lam.size(), lam.size());
    for (Eigen::Index j = 0; j < lam.size(); ++j)
        for (Eigen::Index k = 0; k < lam.size(); ++k)
            W(j, k) = -C(j, k) / (lam(j) + lam(k));

    SteadyState s;
    s.V = (S * W * S.transpose()).real();
    s.V = ((s.V + s.V.transpose()) / 2.0).eval();
    s.x = Vec::Zero(Gamma.rows());
    s.residual = lyapunov_residual(Gamma, D, s.V);
    s.solver = "spectral";
    return s;
}

/// Solve the stationarity condition by flattening to a (2n)^2 linear system;
/// handles the quadratic dephasing source terms. Exact up to linear-solver
/// conditioning.
inline SteadyState solve_lyapunov_vectorized(const Mat& Gamma, const Mat& D,
                                             const std::vector<LindbladQuadratic>& quadratic,
                                             double hbar) {
    const auto d = Gamma.rows();
    if (Gamma.cols() != d || D.rows() != d || D.cols() != d)
        throw std::invalid_argument("solve_lyapunov_vectorized: dimension mismatch");

    Mat Gt = Gamma;
    std::vector<Mat> JDs;
    if (!quadratic.empty()) {
        const Mat J = symplectic_form(static_cast<int>(d) / 2);
        for (const auto& q : quadratic) {
            JDs.push_back(J * q.Delta);
            Gt += (hbar / 2.0) * JDs.back() * JDs.back();
        }
    }

    const Mat I = Mat::Identity(d, d);
    Mat M = kron(I, Gt) + kron(Gt, I);
    for (const auto& JD : JDs) M += hbar * kron(JD, JD);

    Eigen::PartialPivLU<Mat> lu(M);
    Vec rhs = -Eigen::Map<const Vec>(D.data(), d * d);
    Vec v = lu.solve(rhs);
    if (!v.allFinite())
        throw NoSteadyStateError("solve_lyapunov_vectorized: singular stationarity system");

    SteadyState s;
    s.V = Eigen::Map<Mat>(v.data(), d, d);
    s.V = ((s.V + s.V.transpose()) / 2.0).eval();
    s.x = Vec::Zero(d);
    Mat defect = Gt * s.V + s.V * Gt.transpose() + D;
    if (!JDs.empty()) {
        const Mat J = symplectic_form(static_cast<int>(d) / 2);
        for (const auto& JD : JDs) defect += hbar * JD * s.V * JD.transpose();
    }
    s.residual = defect.norm();
    if (!(s.residual <= 1e-6 * std::max(1.0, D.norm())))
        throw NoSteadyStateError("solve_lyapunov_vectorized: no stationary solution (residual "
                                 + std::to_string(s.residual) + ")");
    s.solver = "vectorized";
    return s;
}

inline SteadyState solve_lyapunov_vectorized(const GeneratorSet& gen) {
    return solve_lyapunov_vectorized(gen.Gamma, gen.D, gen.quadratic, gen.layout.hbar);
}

/// Closed-form stationary covariance of the uniform RWA chain with uniform
/// thermal coupling: vacuum plus sine-transform-conjugated Hadamard blocks of
/// O Db O with the stationary kernel.
inline SteadyState closed_form_vstar(const ChainSpec& spec, const ReservoirBank& bank) {
    spec.validate();
    bank.validate(spec.n);
    if (spec.coupling != Coupling::UniformRwa)
        throw std::invalid_argument("closed_form_vstar: uniform RWA chain required");
    double zeta = 0.0;
    if (!bank.uniform_thermal_zeta(&zeta))
        throw std::invalid_argument("closed_form_vstar: uniform thermal coupling required");
    if (bank.has_dephasing())
        throw std::invalid_argument("closed_form_vstar: dephasing not covered by the closed form");

    const int n = spec.n;
    const double hbar = spec.hbar;
    const Mat O = sine_transform(n);
    const Vec nu = toeplitz_mode_frequencies(n, spec.omega, spec.Omega);
    const CMat Lstar = l_star_matrix(nu, zeta);

    // thermal occupations plus end-chain diffusive weights on the diagonal
    Vec db(n);
    for (int k = 0; k < n; ++k) db(k) = hbar * zeta * bank.thermal[k].nbar;
    if (bank.diffusive_A) db(0) += hbar * bank.diffusive_A->zeta * bank.diffusive_A->nbar;
    if (bank.diffusive_B) db(n - 1) += hbar * bank.diffusive_B->zeta * bank.diffusive_B->nbar;

    const Mat M = O * db.asDiagonal() * O;
    const Mat ReB = hadamard(M, Lstar.real());
    const Mat ImB = hadamard(M, Lstar.imag());

    SteadyState s;
    s.V = (hbar / 2.0) * Mat::Identity(2 * n, 2 * n);
    s.V.topLeftCorner(n, n) += O * ReB * O;
    s.V.bottomRightCorner(n, n) += O * ReB * O;
    s.V.topRightCorner(n, n) += -O * ImB * O;
    s.V.bottomLeftCorner(n, n) += O * ImB * O;
    s.x = Vec::Zero(2 * n);
    s.solver = "closed-form";

    const GeneratorSet gen = assemble_generators(build_adjacency(spec), bank, spec.layout());
    s.residual = lyapunov_residual(gen.Gamma, gen.D, s.V);
    return s;
}

/// Stationary mean: the solution of Gamma x = -(xi - eta).
inline Vec steady_mean(const Mat& Gamma, const Vec& xi, const Vec& eta) {
    Eigen::FullPivLU<Mat> lu(Gamma);
    if (!lu.isInvertible())
        throw NoSteadyStateError("steady_mean: singular drift matrix");
    return lu.solve(-(xi - eta));
}

struct CheckerboardViolation {
    int j{0}, k{0};       // 1-based site labels
    std::string block;    // "qq", "pp", or "qp"
    double value{0.0};
};

struct CheckerboardReport {
    bool ok{true};
    double max_violation{0.0};
    double tolerance{0.0};
    std::vector<CheckerboardViolation> violations;
};

/// Parity structure of the uniform-chain stationary covariance: qq and pp
/// entries with odd j+k vanish, qp entries with even j+k vanish. Implies in
/// particular that nearest-neighbour qq covariances are zero.
inline CheckerboardReport checkerboard_validate(const Mat& V, const PhaseSpaceLayout& layout,
                                                double rel_tol = 1e-10) {
    const int n = layout.n;
    if (V.rows() != 2 * n || V.cols() != 2 * n)
        throw std::invalid_argument("checkerboard_validate: dimension mismatch");
    CheckerboardReport r;
    r.tolerance = rel_tol * V.cwiseAbs().maxCoeff();
    auto check = [&](int j, int k, double value, const char* block) {
        if (std::abs(value) > r.tolerance) {
            r.ok = false;
            r.violations.push_back({j, k, block, value});
        }
        r.max_violation = std::max(r.max_violation, std::abs(value));
    };
    for (int j = 1; j <= n; ++j) {
        for (int k = 1; k <= n; ++k) {
            const bool odd = ((j + k) % 2) != 0;
            if (odd) {
                check(j, k, V(j - 1, k - 1), "qq");
                check(j, k, V(n + j - 1, n + k - 1), "pp");
            } else {
                check(j, k, V(j - 1, n + k - 1), "qp");
            }
        }
    }
    return r;
}

/// Steady-state driver: vectorized when dephasing is present, otherwise the
/// spectral route with a vectorized fallback on near-defective spectra.
inline SteadyState solve_steady(const GeneratorSet& gen) {
    if (gen.has_quadratic()) return solve_lyapunov_vectorized(gen);
    try {
        return solve_lyapunov_spectral(gen.Gamma, gen.D);
    } catch (const NearDefectiveError&) {
        return solve_lyapunov_vectorized(gen);
    }
}

} // namespace qhchain
