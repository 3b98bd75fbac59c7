// bplus.hpp — Bath-positive decompositions of joint system-bath states:
// rho_SB = sum_a w_a Q_a (x) rho_a with every rho_a a genuine bath state.

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bplus/frames.hpp"

namespace bplus {

struct LocalOperation;  // defined in dynmaps.hpp

struct BPlusDecomposition {
    PositiveFrame frame;
    DualFrame dual;
    int d_sys = 0;
    int d_bath = 0;
    RealVec weights;  // w_a = Tr[P_a rho_S]
    // Bath states; absent when |w_a| < weight_floor (the term contributes
    // nothing and rho_a is arbitrary there).
    std::vector<std::optional<DensityOperator>> bath_states;

    int size() const { return frame.size(); }
    // Reduced system state sum_a w_a Q_a.
    Mat system_state() const;
};

BPlusDecomposition decompose(const DensityOperator& rho_sb, const PositiveFrame& frame,
                             const DualFrame& dual, int d_sys, int d_bath);

// sum_a w_a Q_a (x) rho_a; equals the source state within structural tolerance.
Mat reconstruct(const BPlusDecomposition& decomp);

struct SteeredState {
    int outcome = 0;
    double probability = 0.0;
    DensityOperator state;
};

// Conditional bath states rho'_m = sum_a w_a Tr[E_m Q_a] rho_a / p_m induced
// by measuring the POVM {E_m} on the system. Outcomes with p_m <= floor are
// omitted.
std::vector<SteeredState> steered_states(const BPlusDecomposition& decomp,
                                         const std::vector<Mat>& povm);

// Transports the decomposition through a local CP operation on the system:
// Q_a -> R(Q_a) re-expanded in the frame, bath states recombined accordingly.
// Returns (p_R, decomposition of (R (x) I)(rho_SB) / p_R).
std::pair<double, BPlusDecomposition> apply_local_operation(const BPlusDecomposition& decomp,
                                                            const LocalOperation& op);

}  // namespace bplus
