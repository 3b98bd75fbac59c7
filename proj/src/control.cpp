#include "bplus/control.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace bplus {

std::vector<double> PulseSequence::pulse_times() const {
    std::vector<double> times;
    times.reserve(pulses.size() * repetitions);
    for (int cycle = 0; cycle < repetitions; ++cycle)
        for (const auto& p : pulses) times.push_back(cycle * cycle_time + p.offset);
    return times;
}

Mat PulseSequence::pulse_unitary(int k) const {
    // pi rotation: exp(-i pi s_a / 2) = -i s_a.
    return cplx(0, -1) * pauli(pulses[static_cast<std::size_t>(k)].axis);
}

PulseSequence cpmg_sequence(double t_c, int m, int axis) {
    if (t_c <= 0.0) throw std::invalid_argument("cpmg_sequence: cycle time must be > 0");
    if (m < 1) throw std::invalid_argument("cpmg_sequence: repetitions must be >= 1");
    if (axis < 1 || axis > 3) throw std::invalid_argument("cpmg_sequence: axis must be 1..3");
    PulseSequence seq;
    seq.cycle_time = t_c;
    seq.repetitions = m;
    seq.pulses = {{t_c / 4.0, axis}, {3.0 * t_c / 4.0, axis}};
    return seq;
}

PulseSequence free_evolution(double duration) {
    if (duration <= 0.0) throw std::invalid_argument("free_evolution: duration must be > 0");
    PulseSequence seq;
    seq.cycle_time = duration;
    seq.repetitions = 1;
    return seq;
}

const Eigen::Matrix4d& SwitchingFunctions::at(double t) const {
    if (t < breakpoints.front() - 1e-12 || t > breakpoints.back() + 1e-12)
        throw std::invalid_argument("SwitchingFunctions::at: time outside range");
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    std::size_t seg = static_cast<std::size_t>(std::distance(breakpoints.begin(), it));
    if (seg > 0) --seg;
    if (seg >= y.size()) seg = y.size() - 1;
    return y[seg];
}

SwitchingFunctions switching_functions(const PulseSequence& seq) {
    for (std::size_t k = 0; k + 1 < seq.pulses.size(); ++k)
        if (seq.pulses[k].offset >= seq.pulses[k + 1].offset)
            throw std::invalid_argument("switching_functions: pulse offsets must increase");
    if (!seq.pulses.empty() &&
        (seq.pulses.front().offset < 0.0 || seq.pulses.back().offset >= seq.cycle_time))
        throw std::invalid_argument("switching_functions: pulse offsets outside cycle");

    SwitchingFunctions out;
    out.total_time = seq.total_time();
    std::vector<double> times = seq.pulse_times();
    out.breakpoints.push_back(0.0);
    Mat u = Mat::Identity(2, 2);
    auto record = [&out](const Mat& frame) {
        Eigen::Matrix4d y;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                y(a, b) = ((frame.adjoint() * pauli(a) * frame * pauli(b)).trace() / 2.0).real();
        out.y.push_back(y);
    };
    record(u);
    int pulse_index = 0;
    for (double t : times) {
        out.breakpoints.push_back(t);
        u = seq.pulse_unitary(pulse_index % std::max<int>(1, seq.pulses.size())) * u;
        ++pulse_index;
        record(u);
    }
    out.breakpoints.push_back(out.total_time);
    return out;
}

TogglingFrame toggling_frame(const PulseSequence& seq, const Mat& h_bath,
                             const std::vector<Mat>& bath_ops,
                             const std::vector<double>& grid) {
    if (!is_hermitian(h_bath)) throw numeric_error("toggling_frame: H_B not Hermitian");
    if (grid.size() < 2) throw std::invalid_argument("toggling_frame: grid too short");
    // Every pulse must be resolved: at most one pulse between consecutive samples.
    std::vector<double> times = seq.pulse_times();
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        int count = 0;
        for (double t : times)
            if (t > grid[i] && t <= grid[i + 1]) ++count;
        if (count > 1)
            throw std::invalid_argument("toggling_frame: grid too coarse, pulses unresolved");
    }

    TogglingFrame frame;
    frame.y = switching_functions(seq);
    frame.grid = grid;
    Eigen::SelfAdjointEigenSolver<Mat> es(h_bath);
    frame.toggled_bath_ops.resize(bath_ops.size());
    for (std::size_t b = 0; b < bath_ops.size(); ++b) {
        frame.toggled_bath_ops[b].reserve(grid.size());
        for (double t : grid) {
            Vec phases(h_bath.rows());
            for (Eigen::Index i = 0; i < h_bath.rows(); ++i)
                phases(i) = std::exp(cplx(0, -t) * es.eigenvalues()(i));
            Mat u_b = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
            frame.toggled_bath_ops[b].push_back(u_b.adjoint() * bath_ops[b] * u_b);
        }
    }
    return frame;
}

Eigen::Matrix4cd filter_first_order(const PulseSequence& seq, double omega, double t_final) {
    if (t_final > seq.total_time() + 1e-12)
        throw std::invalid_argument("filter_first_order: T exceeds sequence duration");
    SwitchingFunctions y = switching_functions(seq);
    Eigen::Matrix4cd f = Eigen::Matrix4cd::Zero();
    for (std::size_t seg = 0; seg + 1 < y.breakpoints.size(); ++seg) {
        double t0 = y.breakpoints[seg];
        double t1 = std::min(y.breakpoints[seg + 1], t_final);
        if (t1 <= t0) break;
        cplx weight;
        if (std::abs(omega) < 1e-14) {
            weight = t1 - t0;
        } else {
            weight = (std::exp(cplx(0, omega * t1)) - std::exp(cplx(0, omega * t0))) /
                     cplx(0, omega);
        }
        f += weight * y.y[seg].cast<cplx>();
    }
    return f;
}

cplx window_factor(double omega, double t_c, int m) {
    cplx unit = std::exp(cplx(0, omega * t_c));
    if (std::abs(unit - cplx(1.0, 0.0)) < 1e-9) return cplx(static_cast<double>(m), 0.0);
    return (1.0 - std::pow(unit, m)) / (1.0 - unit);
}

ResonanceSet resonance_frequencies(const Mat& h_bath, const std::vector<Mat>& bath_ops,
                                   double weight_cut) {
    if (!is_hermitian(h_bath)) throw numeric_error("resonance_frequencies: H_B not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(h_bath);
    const Eigen::Index d = h_bath.rows();
    ResonanceSet set;
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            double gap = std::abs(es.eigenvalues()(j) - es.eigenvalues()(i));
            double weight = 0.0;
            for (const auto& b : bath_ops) {
                cplx element = es.eigenvectors().col(i).adjoint() * b * es.eigenvectors().col(j);
                weight = std::max(weight, std::abs(element));
            }
            if (weight <= weight_cut) continue;
            bool merged = false;
            for (auto& line : set.lines) {
                if (std::abs(line.frequency - gap) < 1e-9 * std::max(1.0, gap)) {
                    line.weight = std::max(line.weight, weight);
                    merged = true;
                    break;
                }
            }
            if (!merged) set.lines.push_back({gap, weight});
        }
    }
    std::sort(set.lines.begin(), set.lines.end(),
              [](const auto& a, const auto& b) { return a.frequency < b.frequency; });
    return set;
}

Mat pulsed_propagator(const Mat& h_joint, int d_sys, const PulseSequence& seq, double t) {
    if (h_joint.rows() % d_sys != 0)
        throw std::invalid_argument("pulsed_propagator: dimension mismatch");
    const int d_bath = static_cast<int>(h_joint.rows()) / d_sys;
    if (d_sys != 2) throw std::invalid_argument("pulsed_propagator: probe must be a qubit");
    if (t > seq.total_time() + 1e-12)
        throw std::invalid_argument("pulsed_propagator: time exceeds sequence duration");

    Eigen::SelfAdjointEigenSolver<Mat> es(h_joint);
    auto free_u = [&](double dt) {
        Vec phases(h_joint.rows());
        for (Eigen::Index i = 0; i < h_joint.rows(); ++i)
            phases(i) = std::exp(cplx(0, -dt) * es.eigenvalues()(i));
        return Mat(es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint());
    };

    Mat u = Mat::Identity(h_joint.rows(), h_joint.cols());
    double now = 0.0;
    std::vector<double> times = seq.pulse_times();
    const int per_cycle = std::max<int>(1, seq.pulses.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] >= t) break;
        if (times[k] > now) u = free_u(times[k] - now) * u;
        Mat pulse = tensor_product(seq.pulse_unitary(static_cast<int>(k) % per_cycle),
                                   Mat::Identity(d_bath, d_bath));
        u = pulse * u;
        now = times[k];
    }
    if (t > now) u = free_u(t - now) * u;
    return u;
}

}  // namespace bplus
