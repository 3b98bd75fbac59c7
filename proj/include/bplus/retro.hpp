// retro.hpp — Retrodiction of past system states: exact backward CPTP maps,
// stationary-noise correlator extrapolation, and a classical-dephasing
// retrodiction demonstration on an Ornstein-Uhlenbeck process.

#pragma once

#include <cstdint>
#include <vector>

#include "bplus/dynmaps.hpp"

namespace bplus {

// Backward maps phi^(a)_{T-}(X) = Tr_B[U (X (x) rho_a) U^dag] with
// U = (forward propagator from T- to 0)^dag. `history` lists the Hamiltonian
// segments covering [T0, 0] in forward time order; t_minus lies in [T0, 0].
std::vector<SuperOperator> backward_maps(const BPlusDecomposition& decomp,
                                         const PiecewiseHamiltonian& history, double t_minus);

// Correlator samples <B(t_1)...B(t_k)> over time tuples in [0, T].
struct CorrelatorTable {
    int order = 2;
    double horizon = 0.0;                          // T
    std::vector<std::vector<double>> time_tuples;  // each sorted ascending
    std::vector<cplx> values;
    std::vector<std::string> labels;  // operator labels b_1..b_k (optional)
};

// True iff equal gap tuples carry equal values within match_tol (the
// stationarity round-trip check; the variance-ramp counterexample fails it).
bool is_stationary(const CorrelatorTable& table, double match_tol);

// Looks up the correlator at arbitrary (possibly negative, unsorted) times by
// reduction to the gap tuple; linear interpolation on the gap grid for k = 2,
// exact gap matching otherwise. Throws numeric_error outside the sampled range.
cplx correlator_lookup(const CorrelatorTable& table, std::vector<double> times);

// Mirrors the sampled tuples onto [-T, 0]; requires stationarity.
CorrelatorTable stationary_extrapolate(const CorrelatorTable& table,
                                       double match_tol = 1e-2);

// Ornstein-Uhlenbeck dephasing noise: relaxation rate gamma, stationary
// variance s2, mean zero, coupled through H(t) = B(t) sz / 2.
struct StationaryNoiseModel {
    double gamma = 1.0;
    double s2 = 1.0;
    std::uint64_t seed = 0;
};

// Exact-update OU trajectory on a uniform grid, started in the stationary law.
std::vector<double> ou_trajectory(const StationaryNoiseModel& model, double dt, int steps,
                                  std::uint64_t stream);

struct RetroDemoResult {
    double retrodicted_coherence = 0.0;  // |<0|rho(T-)|1>| via extrapolation
    double truth_closed_form = 0.0;      // Gaussian closed form
    double truth_monte_carlo = 0.0;      // backward-simulated trajectories
    double relative_error = 0.0;         // |retrodicted - closed form| / closed form
    CorrelatorTable table;               // estimated forward correlator
};

// Forward-simulates OU dephasing on [0, T] to estimate the second-order
// correlator, extrapolates it to negative times, and retrodicts the
// coherence magnitude at T- through the Gaussian decoherence integral.
RetroDemoResult classical_retrodiction_demo(const StationaryNoiseModel& model,
                                            const DensityOperator& rho0, double horizon,
                                            int trajectories, double t_minus, int jobs = 1);

}  // namespace bplus
