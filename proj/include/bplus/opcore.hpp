// opcore.hpp — Dense complex operator algebra on small Hilbert spaces:
// tensor products, partial traces, orthonormal Hermitian bases, exact
// piecewise-constant evolution, PSD projection, fidelity, span ranks.

#pragma once

#include <functional>
#include <vector>

#include "bplus/common.hpp"

namespace bplus {

// A density operator with validated contracts: Hermitian, PSD and unit trace
// within structural tolerance. Construct through checked().
struct DensityOperator {
    Mat rho;

    int dim() const { return static_cast<int>(rho.rows()); }

    // Validates Hermiticity (1e-10), eigenvalue floor (-1e-10) and unit trace.
    // Eigenvalues in [-slack, 0) are clipped silently and the trace renormalised.
    static DensityOperator checked(Mat m, double slack = tol::structural);
};

struct HermitianBasis {
    int d = 0;
    std::vector<Mat> elements;  // d*d operators, Tr[G_j G_k] = delta_jk
};

struct PiecewiseHamiltonian {
    struct Segment {
        double duration;
        Mat h;  // Hermitian, units of angular frequency (hbar = 1)
    };
    std::vector<Segment> segments;

    double total_duration() const;
};

// Pauli matrices; a = 0 is the identity.
const Mat& pauli(int a);

Mat tensor_product(const Mat& a, const Mat& b);

enum class Keep { system, bath };
Mat partial_trace(const Mat& x, int d_sys, int d_bath, Keep keep);

// Identity-first generalized Gell-Mann construction; for d = 2 this is the
// normalized Pauli set {1, sx, sy, sz}/sqrt(2).
HermitianBasis hermitian_basis(int d);

// Propagator U(t) of a piecewise-constant Hamiltonian, t in [0, T_total].
// Negative t returns the adjoint of the forward propagator U(|t|).
Mat evolve_piecewise(const PiecewiseHamiltonian& h, double t);

// Frobenius-nearest PSD matrix of the Hermitian part (eigenvalue clipping),
// then trace renormalisation. Throws numeric_error if everything clips to zero.
DensityOperator closest_psd(const Mat& x);

// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 in [0, 1].
double fidelity(const DensityOperator& rho, const DensityOperator& sigma);

// Numerical rank of the span of the vectorised operators at relative
// tolerance tol (singular values > tol * sigma_max count).
int rank_of_span(const std::vector<Mat>& ops, double tol = tol::structural);

// --- shared dense-matrix helpers -------------------------------------------

bool is_hermitian(const Mat& m, double tolerance = tol::structural);
Mat herm_part(const Mat& m);

// exp(scale * H) for Hermitian H via eigendecomposition.
Mat expm_hermitian(const Mat& h, cplx scale);

// Hermitian square root with negative-eigenvalue clipping.
Mat sqrtm_psd(const Mat& h);

// Column-major vectorisation and its inverse.
Vec vec_op(const Mat& x);
Mat unvec_op(const Vec& v, int rows, int cols);

// Moore-Penrose pseudo-inverse with relative cutoff rcond * sigma_max.
Mat pinv(const Mat& m, double rcond = tol::spectral_cut);

}  // namespace bplus
