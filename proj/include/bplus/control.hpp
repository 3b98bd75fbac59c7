// control.hpp — Pulse sequences, toggling-frame switching functions,
// first-order filter functions, the repetition window factor, and
// resonance-frequency extraction for sequence design.

#pragma once

#include <vector>

#include "bplus/opcore.hpp"

namespace bplus {

// Instantaneous pi pulses about x, y or z at fixed offsets within a base
// cycle of length T_c, repeated M times.
struct PulseSequence {
    struct Pulse {
        double offset;  // in [0, cycle_time)
        int axis;       // 1 = x, 2 = y, 3 = z
    };
    double cycle_time = 0.0;
    std::vector<Pulse> pulses;  // strictly increasing offsets
    int repetitions = 1;

    double total_time() const { return cycle_time * repetitions; }
    // Absolute pulse times over all repetitions, sorted.
    std::vector<double> pulse_times() const;
    // 2x2 unitary of the pulse at schedule position k (same every cycle).
    Mat pulse_unitary(int k) const;
};

PulseSequence cpmg_sequence(double t_c, int m, int axis);
PulseSequence free_evolution(double duration);

// Piecewise-constant switching functions y_{a,b}(t) = Tr[Uc^dag s_a Uc s_b]/2
// on [0, M T_c]; breakpoints at the pulse times.
struct SwitchingFunctions {
    std::vector<double> breakpoints;           // size s+1, covers [0, T]
    std::vector<Eigen::Matrix4d> y;            // per segment, indices (a, b) in 0..3
    double total_time = 0.0;

    const Eigen::Matrix4d& at(double t) const;
};

SwitchingFunctions switching_functions(const PulseSequence& seq);

// Toggling frame with respect to control + bath Hamiltonian: the switching
// functions plus the toggled bath operators B_a(t) = U_B^dag B_a U_B sampled
// on the grid. The grid must resolve every pulse time.
struct TogglingFrame {
    SwitchingFunctions y;
    std::vector<double> grid;
    std::vector<std::vector<Mat>> toggled_bath_ops;  // [bath op][grid point]
};

TogglingFrame toggling_frame(const PulseSequence& seq, const Mat& h_bath,
                             const std::vector<Mat>& bath_ops,
                             const std::vector<double>& grid);

// F^(1)_{a,b}(w, T) = int_0^T y_{a,b}(s) e^{i w s} ds, closed form per segment.
Eigen::Matrix4cd filter_first_order(const PulseSequence& seq, double omega, double t_final);

// (1 - e^{i M w T_c}) / (1 - e^{i w T_c}); the limit value M at resonances.
cplx window_factor(double omega, double t_c, int m);

struct ResonanceSet {
    struct Line {
        double frequency;
        double weight;  // max matrix-element magnitude across the bath operators
    };
    std::vector<Line> lines;  // sorted by frequency
};

// Eigen-gap frequencies of H_B screened by the matrix elements of the coupling
// operators between the corresponding eigenvectors.
ResonanceSet resonance_frequencies(const Mat& h_bath, const std::vector<Mat>& bath_ops,
                                   double weight_cut = 1e-8);

// Joint propagator of a constant Hamiltonian interleaved with the sequence's
// instantaneous probe pulses, up to time t. The probe is the first tensor
// factor (dimension d_sys).
Mat pulsed_propagator(const Mat& h_joint, int d_sys, const PulseSequence& seq, double t);

}  // namespace bplus
