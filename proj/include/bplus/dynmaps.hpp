// dynmaps.hpp — Superoperators, Choi matrices and CPTP validation; the
// per-component dynamical maps induced by joint unitaries; evolution of
// correlated states through local operations, superchannels, process-tensor
// chains, and map tomography.

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bplus/bplus.hpp"

namespace bplus {

// Linear map on d x d operators, stored as a d^2 x d^2 matrix acting on
// column-vectorised operators: vec(phi(X)) = m * vec(X).
struct SuperOperator {
    int d = 0;
    Mat m;

    Mat apply(const Mat& x) const;
    static SuperOperator identity(int d);
    static SuperOperator from_action(int d, const std::function<Mat(const Mat&)>& action);
    // Conjugation X -> V X V^dag.
    static SuperOperator conjugation(const Mat& v);
};

// Choi matrix C = sum_ij |i><j| (x) phi(|i><j|); Tr[C] = d for TP maps,
// positivity of C is complete positivity.
Mat choi_matrix(const SuperOperator& op);

struct CptpReport {
    double choi_min_eig = 0.0;
    double tp_residual = 0.0;
    bool pass = false;
};

CptpReport validate_cptp(const SuperOperator& op, double cp_slack = tol::structural,
                         double tp_slack = tol::structural);

// A completely positive (possibly trace-decreasing) operation on the system.
struct LocalOperation {
    SuperOperator op;
    bool trace_preserving = false;

    Mat apply(const Mat& x) const { return op.apply(x); }
    static LocalOperation from_kraus(int d, const std::vector<Mat>& kraus);
    static LocalOperation from_superoperator(SuperOperator op);  // validates CP
    static LocalOperation identity(int d);
    // Replacement map X -> tau Tr[X].
    static LocalOperation replacement(const Mat& tau);
    // Projective filter X -> |psi><psi| X |psi><psi|.
    static LocalOperation projection(const Vec& psi);
};

// phi(X) = Tr_B[U (X (x) rho_bath) U^dag]; CPTP by construction, validated.
SuperOperator induced_map(const Mat& u, const DensityOperator& rho_bath, int d_sys);

// Per-component maps on a time grid. maps[a][k] evolves to times[k]; the grid
// must start at whatever the caller treats as "now" (a 0 entry yields the
// identity map).
struct DynamicalMapSet {
    std::vector<double> times;
    std::vector<std::vector<SuperOperator>> maps;  // [component][time]
    RealVec weights;
    DualFrame dual;
};

// Builds the map set for a constant joint Hamiltonian.
DynamicalMapSet build_map_set(const BPlusDecomposition& decomp, const Mat& h_joint,
                              const std::vector<double>& times);

// rho_S(t) = sum_a w_a phi^(a)(Q_a); equals the brute-force marginal.
DensityOperator evolve_correlated(const BPlusDecomposition& decomp, const Mat& u);

// Evolution after a local CP operation R at t = 0:
// rho^R_S = sum_{a,a'} w_a R_{aa'} phi^(a)(Q_{a'}) / p_R.
std::pair<double, DensityOperator> evolve_after_operation(const BPlusDecomposition& decomp,
                                                          const Mat& u,
                                                          const LocalOperation& r);
std::pair<double, DensityOperator> evolve_after_operation(
    const BPlusDecomposition& decomp, const std::vector<SuperOperator>& maps_at_t,
    const LocalOperation& r);

// Superchannel C_t(R) for trace-preserving R (p_R = 1).
DensityOperator superchannel_eval(const BPlusDecomposition& decomp,
                                  const std::vector<SuperOperator>& maps_at_t,
                                  const LocalOperation& r);

struct Intervention {
    LocalOperation r;  // CP-TP
    Mat u;             // joint unitary applied after the operation
};

// Multi-time chain: alternating local operations and joint unitaries,
// evaluated through the frame-expansion recursion rather than by carrying the
// joint state forward.
DensityOperator process_tensor_eval(const BPlusDecomposition& decomp,
                                    const std::vector<Intervention>& interventions);

struct MapTomographyResult {
    std::vector<std::optional<SuperOperator>> maps;  // nullopt for w_a = 0 components
    std::vector<int> unrecoverable;                  // indices with w_a = 0
    int design_rank = 0;
    double condition_number = 0.0;
};

// Recovers the per-component maps from the evolved (unnormalised) marginals
// rho^(j) = sum_{a,a'} w_a R^(j)_{aa'} phi^(a)(Q_{a'}) for a spanning set of
// CP probe operations {R^(j)}. Trace-preserving probes alone provably leave
// replacement-type directions unconstrained, so the probe set must span the
// full d^4-dimensional operation space (trace-decreasing probes included);
// otherwise the design matrix is rank deficient and an error is raised.
MapTomographyResult map_tomography(const BPlusDecomposition& decomp,
                                   const std::vector<LocalOperation>& probes,
                                   const std::vector<Mat>& evolved);

}  // namespace bplus
