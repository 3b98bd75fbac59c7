// common.hpp — Shared scalar/matrix aliases, tolerances, and error types

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bplus {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealMat = Eigen::MatrixXd;
using RealVec = Eigen::VectorXd;

namespace tol {
// Structural checks: Hermiticity, trace, unitarity, POVM completeness.
inline constexpr double structural = 1e-10;
// Derived physics checks (map equalities, tomography closures).
inline constexpr double physics = 1e-8;
// Relative singular-value cutoff for pseudo-inverses and rank decisions.
inline constexpr double spectral_cut = 1e-12;
// Weights below this are treated as absent components.
inline constexpr double weight_floor = 1e-12;
}  // namespace tol

// Raised when an input violates a numerical contract (non-Hermitian state,
// rank-deficient frame, inadequate truncation, ...).
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised by the tomography solvers when the linear system leaves columns
// unconstrained; carries the labels of the unidentifiable unknowns.
struct unidentifiable_error : numeric_error {
    std::vector<std::string> columns;
    explicit unidentifiable_error(std::string what, std::vector<std::string> cols)
        : numeric_error(std::move(what)), columns(std::move(cols)) {}
};

inline double frob(const Mat& a) { return a.norm(); }
inline double frob_diff(const Mat& a, const Mat& b) { return (a - b).norm(); }

}  // namespace bplus
