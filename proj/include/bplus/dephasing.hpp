// dephasing.hpp — Exact qubit dephasing with a bosonic bath for arbitrary
// initial correlations: closed-form characteristic-function route plus a
// truncated-Fock brute-force oracle.

#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "bplus/bplus.hpp"

namespace bplus {

// H = eps sz/2 + sum_j w_j b^dag b + sum_j g_j sz (b + b^dag), hbar = 1.
struct DephasingSpec {
    double eps = 0.0;
    struct Mode {
        double omega;
        double g;
    };
    std::vector<Mode> modes;
};

using DisplacementVector = Vec;  // one complex entry per mode

// xi_j(t) = 2 g_j (1 - e^{i w_j t}) / w_j.
DisplacementVector displacement_vector(const DephasingSpec& spec, double t);

// Displaced thermal states (squeezing excluded): mean amplitude alpha_j and
// symmetric occupancy nbar_j per mode.
struct GaussianBathState {
    struct ModeState {
        cplx alpha{0.0, 0.0};
        double nbar = 0.0;
    };
    std::vector<ModeState> modes;
};

// Finite Fock-space stand-in; rho lives on (cutoff+1)^n_modes levels.
struct TruncatedBathState {
    int cutoff = 0;
    int n_modes = 1;
    DensityOperator rho;

    // Largest top-level population across modes; must stay below 1e-6.
    double truncation_tail() const;
};

// chi(xi) = prod_j exp(-(2 nbar_j + 1)|xi_j|^2 / 2 + xi_j conj(a_j) - conj(xi_j) a_j).
cplx char_fn_gaussian(const GaussianBathState& state, const DisplacementVector& xi);

// Tr[rho D(xi)] with D built from truncated ladder operators.
cplx char_fn_numeric(const TruncatedBathState& state, const DisplacementVector& xi);

using BathStateRep = std::variant<GaussianBathState, TruncatedBathState>;

// Qubit decomposition data for the dephasing solver: weights, dual elements
// and one representable bath state per present component.
struct DephasingInput {
    RealVec weights;
    std::vector<Mat> dual_elements;  // 2x2
    std::vector<std::optional<BathStateRep>> baths;
};

// Wraps a decomposed joint state whose bath factor is a truncated Fock space.
DephasingInput dephasing_input(const BPlusDecomposition& decomp, int cutoff, int n_modes);

// Factorisable input rho_S (x) rho_B with a Gaussian bath.
DephasingInput dephasing_input(const DensityOperator& rho_s, const GaussianBathState& bath);

// Interaction-picture state at time t: diagonal frozen at its initial value,
// coherence <0|rho|1> = sum_a w_a <0|Q_a|1> chi_a(xi_t).
DensityOperator dephase_correlated(const DephasingInput& input, const DephasingSpec& spec,
                                   double t);

// Brute-force oracle: builds the full Hamiltonian on the truncated space,
// evolves exactly, partial-traces, and applies the same interaction-picture
// transformation (coherence multiplied by e^{+i eps t}).
class DephasingOracle {
  public:
    DephasingOracle(const DephasingSpec& spec, int cutoff);

    DensityOperator evolve(const DensityOperator& rho_sb, double t) const;
    int bath_dim() const { return d_bath_; }

  private:
    DephasingSpec spec_;
    int cutoff_;
    int d_bath_;
    Eigen::SelfAdjointEigenSolver<Mat> eig_;
};

// Ladder and state helpers on a truncated Fock space.
Mat annihilation_operator(int levels);
Mat displacement_operator(int levels, cplx xi);
DensityOperator thermal_state(int levels, double nbar);
Vec coherent_state(int levels, cplx alpha);

}  // namespace bplus
