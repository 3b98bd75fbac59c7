// lat.hpp — Limited-access tomography: reconstruct a joint multiqubit state
// from control and measurement on a single probe qubit, using a known dipolar
// Hamiltonian, resonance-matched decoupling sequences, least squares, and PSD
// projection.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bplus/control.hpp"
#include "bplus/dynmaps.hpp"

namespace bplus {

struct NoiseModel {
    double mean = 0.0;
    double variance = 0.0;
    int realizations = 1;
};

struct LatConfig {
    // Probe is qubit 1 (tensor index 0).
    int n_qubits = 3;
    struct Bond {
        int i = 1, j = 2;       // 1-based qubit labels, i < j
        double g[3] = {0, 0, 0};  // couplings for sigma_x sigma_x, y y, z z
    };
    std::vector<Bond> bonds;
    std::vector<double> local_fields;  // J_i, one per qubit
    DensityOperator initial_state;     // joint state at t = 0
    double probe_time = 1.0;           // T1: control access starts here
    std::vector<PulseSequence> sequences;
    NoiseModel noise;
    std::uint64_t seed = 0;
    std::string menu_name = "custom";

    void validate() const;
    int joint_dim() const { return 1 << n_qubits; }
    int bath_dim() const { return 1 << (n_qubits - 1); }
};

// H = sum_{a, i<j} g^(ij)_a s_a^(i) s_a^(j) + sum_i J_i s_z^(i).
Mat build_dipolar_hamiltonian(const LatConfig& config);

// Bath-only block (terms not touching the probe) and the probe-coupling bath
// operators B_a = sum_j g^(1j)_a s_a^(j); both act on the bath factor.
Mat bath_hamiltonian(const LatConfig& config);
std::vector<Mat> probe_coupling_operators(const LatConfig& config);

// Projective preparation: project onto |s_a, sigma_a>, rotate to |s_b, sigma_b>.
struct PreparationMap {
    int from_axis = 3, to_axis = 3;  // 1..3
    int from_sign = +1, to_sign = +1;
    LocalOperation op;  // rank-1 Kraus |b><a|

    std::string label() const;
};

// All 36 (state, target) pairs over the +-x, +-y, +-z eigenstates; spans the
// full 16-dimensional qubit operation space.
std::vector<PreparationMap> preparation_maps();

// Probe eigenstate |sign, sigma_axis>.
Vec probe_eigenstate(int axis, int sign);

struct ExpectationRecord {
    int prep = 0, seq = 0, obs = 0;  // indices into the experiment grid
    double probability = 0.0;        // preparation success probability
    double noiseless = 0.0;          // exact conditional expectation
    double measured = 0.0;           // realization-averaged noisy expectation
    std::vector<double> realizations;  // individual noisy draws
};

// One experiment: evolve to T1, apply the preparation (conditioned on its
// outcome), run the sequence, measure sigma_obs on the probe with additive
// Gaussian noise per realization. obs is 1..3.
ExpectationRecord simulate_expectation(const LatConfig& config, const PreparationMap& prep,
                                       int seq_index, int obs_axis);

struct LinearSystem {
    RealMat design;
    RealVec observations;
    std::vector<std::string> column_labels;
    double condition_number = 0.0;
    int rank = 0;
};

enum class LatMode { factorisable, correlated };

struct SolveResult {
    LinearSystem system;
    RealVec solution;
    Mat rho_tilde;     // raw (possibly unphysical) estimate: rho_B or rho_SB
    RealVec weights;   // recovered w_a (correlated mode)
};

// Builds the design matrix from exact propagators and solves the
// least-squares system. Throws unidentifiable_error when columns are
// unconstrained by the menu.
SolveResult assemble_solve(const LatConfig& config, const std::vector<ExpectationRecord>& records,
                           LatMode mode);

struct EstimationResult {
    Mat rho_tilde;
    DensityOperator rho_bar;      // PSD-projected estimate
    double fidelity_joint = 0.0;  // F_SB vs the true rho_SB(T1)
    double fidelity_probe = 0.0;  // F_S of plain probe tomography at T1
    double fidelity_joint_t0 = 0.0;  // pulled back to t = 0 by the exact inverse
    double condition_number = 0.0;
    int design_rank = 0;
    // Per-realization scatter: mean standard error of the measured
    // expectations across the experiment grid.
    double realization_sem = 0.0;
    std::string menu_name;
};

// Full pipeline: preparations x sequences x observables -> simulate ->
// assemble -> least squares -> closest_psd -> fidelities.
EstimationResult run_lat(const LatConfig& config, int jobs = 1);

enum class LatMenu { one_resonance_x, two_resonance_x, full };

// The three-qubit dipolar preset: g(1,2) = g(2,3) = 1, g(1,3) = 1/100,
// J = (0, 1, 3), W-state prepared by a sigma_z measurement on the probe.
// Sequence cycle times are matched to the two strongest computed resonances.
LatConfig dipolar3q_preset(LatMenu menu, std::uint64_t seed, int repetitions_full = 50,
                           int repetitions_base = 10);

}  // namespace bplus
