// frames.hpp — Positive operator frames, dual frames via the transfer
// matrix, canonical informationally complete POVMs, and the qubit SIC frame.

#pragma once

#include <optional>
#include <vector>

#include "bplus/opcore.hpp"

namespace bplus {

// A spanning set of n >= d^2 positive operators {P_a}.
struct PositiveFrame {
    int d = 0;
    std::vector<Mat> elements;

    int size() const { return static_cast<int>(elements.size()); }
    bool is_povm(double tolerance = tol::structural) const;
};

// Companion set {Q_a} satisfying A = sum_a Tr[A P_a] Q_a for all A.
struct DualFrame {
    std::vector<Mat> elements;
};

// T_{aj} = Tr[P_a G_j] plus the finite frame-condition bounds, i.e. the
// extreme eigenvalues of the Gram matrix T^T T.
struct TransferMatrix {
    RealMat t;
    double gram_min_eig = 0.0;
    double gram_max_eig = 0.0;
};

// Exactly d^2 linearly independent positive operators summing to identity.
struct CanonicalPOVM {
    PositiveFrame frame;
    DualFrame dual;
};

TransferMatrix transfer_matrix(const PositiveFrame& frame, const HermitianBasis& basis);

// Minimal-norm dual: Q_a = sum_b M_ab P_b with M = T (T^T T)^-2 T^T.
DualFrame dual_frame(const PositiveFrame& frame, const HermitianBasis& basis);

// Rescales d^2 linearly independent positive operators into an
// informationally complete POVM via P_a -> S^-1/2 P'_a S^-1/2, S = sum P'_a.
// Inputs with more than d^2 elements have a linearly independent subset
// selected first.
CanonicalPOVM canonicalize_povm(const std::vector<Mat>& raw);

// Qubit SIC-POVM from the regular-tetrahedron Bloch vectors, with its
// closed-form dual Q_a = (1 + 3 m_a . sigma)/2.
CanonicalPOVM qubit_sic_frame();

// {1, 1+sx, 1+sy, 1+sz}: the positive frame behind the Pauli-sum qubit
// decomposition (dual {(1 - sx - sy - sz)/2, sx/2, sy/2, sz/2}).
PositiveFrame qubit_pauli_frame();

// Overcomplete six-state POVM: projectors onto the +-x, +-y, +-z eigenstates,
// each weighted 1/3.
PositiveFrame qubit_six_state_frame();

struct FrameValidationReport {
    double reconstruction_residual = 0.0;      // two-sided identity on random A
    std::optional<double> biorthogonality_residual;  // only when n = d^2
    double frame_bound_lower = 0.0;
    double frame_bound_upper = 0.0;
    std::optional<double> dual_trace_residual;       // only for POVM frames
    std::optional<double> sic_closed_form_residual;  // only for general-SIC frames
};

FrameValidationReport validate_frame(const PositiveFrame& frame, const DualFrame& dual);

}  // namespace bplus
