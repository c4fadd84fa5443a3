// state.hpp — phase-space layout and Gaussian states.
//
// Quadratures are ordered x = (q_1..q_n, p_1..p_n). Site labels in the public
// API are 1-based; index helpers map them onto 0-based storage.

#pragma once

#include <stdexcept>

#include "qhchain/linalg.hpp"

namespace qhchain {

struct PhaseSpaceLayout {
    int n{1};
    double hbar{1.0};

    PhaseSpaceLayout() = default;
    PhaseSpaceLayout(int n_, double hbar_ = 1.0) : n(n_), hbar(hbar_) {
        if (n < 1) throw std::invalid_argument("PhaseSpaceLayout: n must be >= 1");
        if (!(hbar > 0.0)) throw std::invalid_argument("PhaseSpaceLayout: hbar must be > 0");
    }

    int dim() const { return 2 * n; }

    // 1-based site label -> 0-based row of the q (resp. p) quadrature
    int q_index(int site) const {
        if (site < 1 || site > n) throw std::out_of_range("q_index: site out of range");
        return site - 1;
    }
    int p_index(int site) const {
        if (site < 1 || site > n) throw std::out_of_range("p_index: site out of range");
        return n + site - 1;
    }
};

struct GaussianState {
    Vec mean;  // 2n
    Mat cov;   // 2n x 2n, symmetric

    static GaussianState vacuum(const PhaseSpaceLayout& layout) {
        GaussianState s;
        s.mean = Vec::Zero(layout.dim());
        s.cov = (layout.hbar / 2.0) * Mat::Identity(layout.dim(), layout.dim());
        return s;
    }

    // All modes in a thermal state with the given occupation
    static GaussianState thermal(const PhaseSpaceLayout& layout, double nbar) {
        GaussianState s = vacuum(layout);
        s.cov *= (2.0 * nbar + 1.0);
        return s;
    }
};

/// Smallest eigenvalue of V + i(hbar/2)J; a state is physical when this is
/// non-negative up to numerical slack.
inline double min_physicality_eigenvalue(const Mat& V, const PhaseSpaceLayout& layout) {
    const int d = layout.dim();
    if (V.rows() != d || V.cols() != d)
        throw std::invalid_argument("min_physicality_eigenvalue: dimension mismatch");
    CMat M = V.cast<cplx>() + cplx(0.0, layout.hbar / 2.0) * symplectic_form(layout.n).cast<cplx>();
    Eigen::SelfAdjointEigenSolver<CMat> es(M, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

inline bool is_physical(const Mat& V, const PhaseSpaceLayout& layout, double slack = 1e-10) {
    return min_physicality_eigenvalue(V, layout) >= -slack * std::max(1.0, V.norm());
}

} // namespace qhchain
