#include "bplus/markov.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "bplus/rng.hpp"

namespace bplus {

DivisibilityResult cp_divisibility(const std::vector<SuperOperator>& maps_on_grid,
                                   double tolerance, double pinv_cut) {
    DivisibilityResult result;
    result.worst_choi_min_eig = 0.0;
    bool violated = false;
    for (std::size_t k = 0; k + 1 < maps_on_grid.size(); ++k) {
        const Mat& s_now = maps_on_grid[k].m;
        Eigen::JacobiSVD<Mat> svd(s_now);
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) <= pinv_cut * sv(0)) {
            result.indeterminate = true;  // cannot invert without manufacturing negativity
            continue;
        }
        SuperOperator step{maps_on_grid[k].d, maps_on_grid[k + 1].m * pinv(s_now, pinv_cut)};
        CptpReport rep = validate_cptp(step);
        if (rep.choi_min_eig < result.worst_choi_min_eig) {
            result.worst_choi_min_eig = rep.choi_min_eig;
            result.worst_pair = static_cast<int>(k);
        }
        if (rep.choi_min_eig < -tolerance) violated = true;
    }
    result.markovian = !violated && !result.indeterminate;
    return result;
}

namespace {

// System block of a joint Hamiltonian (bath-averaged; any trace part only
// contributes a global phase to the ideal propagator).
Mat system_block(const Mat& h_joint, int d_sys) {
    const int d_bath = static_cast<int>(h_joint.rows()) / d_sys;
    return partial_trace(h_joint, d_sys, d_bath, Keep::system) / static_cast<double>(d_bath);
}

// Noise map at time t in the interaction picture of the ideal control: the
// joint evolution (with or without pulses), bath traced out, conjugated by
// the adjoint of the corresponding system-only propagator.
SuperOperator noise_map(const Mat& h_joint, int d_sys, const DensityOperator& rho_bath,
                        const PulseSequence* seq, double t) {
    const Mat h_sys = system_block(h_joint, d_sys);
    Mat u_full, v_ideal;
    if (seq) {
        u_full = pulsed_propagator(h_joint, d_sys, *seq, t);
        v_ideal = pulsed_propagator(h_sys, d_sys, *seq, t);
    } else {
        u_full = expm_hermitian(h_joint, cplx(0, -t));
        v_ideal = expm_hermitian(h_sys, cplx(0, -t));
    }
    const int d_bath = rho_bath.dim();
    return SuperOperator::from_action(d_sys, [&](const Mat& x) {
        Mat evolved = partial_trace(u_full * tensor_product(x, rho_bath.rho) * u_full.adjoint(),
                                    d_sys, d_bath, Keep::system);
        return Mat(v_ideal.adjoint() * evolved * v_ideal);
    });
}

double dd_residual_for(const Mat& h_joint, int d_sys, const DensityOperator& rho_bath,
                       const std::vector<PulseSequence>& menu) {
    double worst = 0.0;
    for (const auto& seq : menu) {
        for (int cycle = 1; cycle <= seq.repetitions; ++cycle) {
            double t = cycle * seq.cycle_time;
            SuperOperator with_dd = noise_map(h_joint, d_sys, rho_bath, &seq, t);
            SuperOperator without = noise_map(h_joint, d_sys, rho_bath, nullptr, t);
            worst = std::max(worst, frob_diff(with_dd.m, without.m));
        }
    }
    return worst;
}

}  // namespace

DdInvarianceReport dd_invariance(const BPlusDecomposition& decomp, const Mat& h_joint,
                                 const std::vector<PulseSequence>& menu, double tolerance) {
    DdInvarianceReport report;
    for (int a = 0; a < decomp.size(); ++a) {
        if (!decomp.bath_states[static_cast<std::size_t>(a)] ||
            std::abs(decomp.weights(a)) < tol::weight_floor)
            continue;
        report.worst_residual = std::max(
            report.worst_residual,
            dd_residual_for(h_joint, decomp.d_sys,
                            *decomp.bath_states[static_cast<std::size_t>(a)], menu));
    }
    report.invariant = report.worst_residual <= tolerance;

    // Frame independence: re-derive the decomposition in a randomly rotated
    // frame and re-run; the maps mix linearly, so the verdict must agree.
    Rng rng(0xdd5eedULL);
    Mat w = random_unitary(decomp.d_sys, rng);
    CanonicalPOVM base = qubit_sic_frame();
    PositiveFrame rotated;
    rotated.d = decomp.d_sys;
    for (const auto& p : base.frame.elements) rotated.elements.push_back(w * p * w.adjoint());
    DualFrame rotated_dual;
    for (const auto& q : base.dual.elements) rotated_dual.elements.push_back(w * q * w.adjoint());
    DensityOperator joint = DensityOperator::checked(reconstruct(decomp), 1e-8);
    BPlusDecomposition other =
        decompose(joint, rotated, rotated_dual, decomp.d_sys, decomp.d_bath);
    for (int a = 0; a < other.size(); ++a) {
        if (!other.bath_states[static_cast<std::size_t>(a)] ||
            std::abs(other.weights(a)) < tol::weight_floor)
            continue;
        report.frame_change_residual = std::max(
            report.frame_change_residual,
            dd_residual_for(h_joint, other.d_sys,
                            *other.bath_states[static_cast<std::size_t>(a)], menu));
    }
    return report;
}

MarkovReport comp_markov_check(const BPlusDecomposition& decomp, const Mat& h_joint,
                               MarkovCriterion criterion, const MarkovCheckOptions& options) {
    MarkovReport report;
    report.criterion =
        criterion == MarkovCriterion::divisibility ? "cp_divisibility" : "dd_failure";
    report.overall = true;
    for (int a = 0; a < decomp.size(); ++a) {
        if (!decomp.bath_states[static_cast<std::size_t>(a)] ||
            std::abs(decomp.weights(a)) < tol::weight_floor)
            continue;
        const DensityOperator& rho_a = *decomp.bath_states[static_cast<std::size_t>(a)];
        bool pass = false;
        if (criterion == MarkovCriterion::divisibility) {
            std::vector<SuperOperator> grid_maps;
            grid_maps.reserve(options.grid.size());
            for (double t : options.grid)
                grid_maps.push_back(
                    induced_map(expm_hermitian(h_joint, cplx(0, -t)), rho_a, decomp.d_sys));
            DivisibilityResult div = cp_divisibility(grid_maps, options.tolerance);
            pass = div.markovian;
            if (div.worst_choi_min_eig < report.worst_choi_min_eig)
                report.worst_choi_min_eig = div.worst_choi_min_eig;
        } else {
            pass = dd_residual_for(h_joint, decomp.d_sys, rho_a, options.menu) <=
                   options.tolerance;
        }
        report.components.push_back(a);
        report.verdicts.push_back(pass);
        if (!pass && report.offending_component < 0) report.offending_component = a;
        report.overall = report.overall && pass;
    }
    return report;
}

namespace {

struct CandidateObjective {
    const BPlusDecomposition* decomp;
    const std::vector<std::vector<SuperOperator>>* grids;
    double tolerance;

    // Builds the POVM from 3 parameters per element: two direction angles and
    // an identity admixture.
    PositiveFrame build(const RealVec& theta) const {
        const int n = 4;
        std::vector<Mat> raw;
        raw.reserve(n);
        for (int a = 0; a < n; ++a) {
            double p1 = theta(3 * a), p2 = theta(3 * a + 1);
            double mu = 0.5 / (1.0 + std::exp(-theta(3 * a + 2)));
            Eigen::Vector3d dir(std::sin(p1) * std::cos(p2), std::sin(p1) * std::sin(p2),
                                std::cos(p1));
            Mat p = Mat::Identity(2, 2);
            for (int k = 0; k < 3; ++k) p += (1.0 - mu) * dir(k) * pauli(k + 1);
            raw.push_back(0.5 * p);
        }
        return canonicalize_povm(raw).frame;
    }

    // Worst intermediate Choi eigenvalue over candidate components, or a flat
    // penalty when the candidate degenerates.
    double evaluate(const PositiveFrame& candidate, RealMat* kappa_out = nullptr,
                    double* consistency_out = nullptr) const {
        const int n_cand = candidate.size();
        const int n = decomp->size();
        RealMat kappa(n_cand, n);
        for (int a = 0; a < n_cand; ++a)
            for (int k = 0; k < n; ++k)
                kappa(a, k) =
                    (candidate.elements[static_cast<std::size_t>(a)] *
                     decomp->dual.elements[static_cast<std::size_t>(k)])
                        .trace()
                        .real();
        if (kappa_out) *kappa_out = kappa;

        std::size_t n_times = 0;
        for (const auto& g : *grids) n_times = std::max(n_times, g.size());
        const int d = decomp->d_sys;
        double objective = 0.0;
        bool first = true;
        for (int a = 0; a < n_cand; ++a) {
            double w_cand = 0.0;
            for (int k = 0; k < n; ++k) w_cand += kappa(a, k) * decomp->weights(k);
            if (std::abs(w_cand) < tol::weight_floor) continue;  // exempt component
            std::vector<SuperOperator> combined;
            combined.reserve(n_times);
            for (std::size_t ti = 0; ti < n_times; ++ti) {
                Mat m = Mat::Zero(d * d, d * d);
                for (int k = 0; k < n; ++k) {
                    if ((*grids)[static_cast<std::size_t>(k)].empty()) continue;
                    m += kappa(a, k) * decomp->weights(k) *
                         (*grids)[static_cast<std::size_t>(k)][ti].m;
                }
                combined.push_back(SuperOperator{d, m / w_cand});
            }
            DivisibilityResult div = cp_divisibility(combined, tolerance);
            double val = div.indeterminate ? -10.0 : div.worst_choi_min_eig;
            objective = first ? val : std::min(objective, val);
            first = false;
        }
        if (first) return -10.0;  // every component exempt: not a usable frame

        if (consistency_out) {
            double res = 0.0;
            for (std::size_t ti = 0; ti < n_times; ++ti) {
                Mat lhs = Mat::Zero(d * d, d * d);
                Mat rhs = Mat::Zero(d * d, d * d);
                for (int a = 0; a < n_cand; ++a)
                    for (int k = 0; k < n; ++k) {
                        if ((*grids)[static_cast<std::size_t>(k)].empty()) continue;
                        lhs += kappa(a, k) * decomp->weights(k) *
                               (*grids)[static_cast<std::size_t>(k)][ti].m;
                    }
                for (int k = 0; k < n; ++k) {
                    if ((*grids)[static_cast<std::size_t>(k)].empty()) continue;
                    rhs += decomp->weights(k) * (*grids)[static_cast<std::size_t>(k)][ti].m;
                }
                res = std::max(res, frob_diff(lhs, rhs));
            }
            *consistency_out = res;
        }
        return objective;
    }

    double operator()(const RealVec& theta) const {
        try {
            return evaluate(build(theta));
        } catch (const numeric_error&) {
            return -5.0;  // degenerate candidate (rank deficient / singular sum)
        }
    }
};

}  // namespace

FrameSearchResult frame_search(const BPlusDecomposition& decomp,
                               const std::vector<std::vector<SuperOperator>>& map_grids,
                               const FrameSearchConfig& config) {
    FrameSearchResult result;
    if (decomp.d_sys != 2)
        throw std::invalid_argument("frame_search: implemented for qubit systems");
    if (static_cast<int>(map_grids.size()) != decomp.size())
        throw std::invalid_argument("frame_search: one map grid per component required");
    if (config.restarts <= 0) return result;  // zero budget: not found, zero iterations

    CandidateObjective objective{&decomp, &map_grids, config.tolerance};
    int evaluations = 0;

    auto accept = [&](const PositiveFrame& candidate) {
        RealMat kappa;
        double consistency = 0.0;
        double value = objective.evaluate(candidate, &kappa, &consistency);
        if (value >= -config.tolerance) {
            result.found = true;
            result.kappa = kappa;
            result.candidate = candidate;
            result.consistency_residual = consistency;
            result.best_objective = value;
        }
        return result.found;
    };

    // The input frame first: kappa is the identity assignment when the
    // decomposition is canonical.
    ++evaluations;
    if (accept(decomp.frame)) {
        result.iterations_used = evaluations;
        return result;
    }

    const int dim = 12;
    double best_seen = -1e300;
    for (int restart = 1; restart < config.restarts; ++restart) {
        Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(restart)));
        // Nelder-Mead from a random start.
        std::vector<RealVec> simplex;
        std::vector<double> value;
        RealVec base(dim);
        for (int i = 0; i < dim; ++i)
            base(i) = (i % 3 == 2) ? -4.0 + 2.0 * rng.uniform()
                                   : 2.0 * M_PI * rng.uniform();
        for (int v = 0; v <= dim; ++v) {
            RealVec vertex = base;
            if (v > 0) vertex(v - 1) += 0.4;
            simplex.push_back(vertex);
            value.push_back(objective(vertex));
            ++evaluations;
        }
        for (int it = 0; it < config.iterations; ++it) {
            // Order: best first.
            std::vector<int> idx(simplex.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
            std::sort(idx.begin(), idx.end(), [&](int a, int b) { return value[static_cast<std::size_t>(a)] > value[static_cast<std::size_t>(b)]; });
            std::vector<RealVec> s2;
            std::vector<double> v2;
            for (int i : idx) {
                s2.push_back(simplex[static_cast<std::size_t>(i)]);
                v2.push_back(value[static_cast<std::size_t>(i)]);
            }
            simplex = std::move(s2);
            value = std::move(v2);
            if (value[0] >= -config.tolerance) break;

            RealVec centroid = RealVec::Zero(dim);
            for (int v = 0; v < dim; ++v) centroid += simplex[static_cast<std::size_t>(v)];
            centroid /= static_cast<double>(dim);
            const RealVec& worst = simplex.back();
            RealVec reflected = centroid + (centroid - worst);
            double f_ref = objective(reflected);
            ++evaluations;
            if (f_ref > value[0]) {
                RealVec expanded = centroid + 2.0 * (centroid - worst);
                double f_exp = objective(expanded);
                ++evaluations;
                if (f_exp > f_ref) {
                    simplex.back() = expanded;
                    value.back() = f_exp;
                } else {
                    simplex.back() = reflected;
                    value.back() = f_ref;
                }
            } else if (f_ref > value[value.size() - 2]) {
                simplex.back() = reflected;
                value.back() = f_ref;
            } else {
                RealVec contracted = centroid + 0.5 * (worst - centroid);
                double f_con = objective(contracted);
                ++evaluations;
                if (f_con > value.back()) {
                    simplex.back() = contracted;
                    value.back() = f_con;
                } else {
                    for (std::size_t v = 1; v < simplex.size(); ++v) {
                        simplex[v] = simplex[0] + 0.5 * (simplex[v] - simplex[0]);
                        value[v] = objective(simplex[v]);
                        ++evaluations;
                    }
                }
            }
        }
        std::size_t best = 0;
        for (std::size_t v = 1; v < value.size(); ++v)
            if (value[v] > value[best]) best = v;
        best_seen = std::max(best_seen, value[best]);
        if (value[best] >= -config.tolerance) {
            try {
                if (accept(objective.build(simplex[best]))) {
                    result.iterations_used = evaluations;
                    return result;
                }
            } catch (const numeric_error&) {
            }
        }
    }
    result.best_objective = best_seen;
    result.iterations_used = evaluations;
    return result;
}

SuperOperator qubit_dephasing_map(cplx coherence_factor) {
    Mat m = Mat::Zero(4, 4);
    m(0, 0) = 1.0;
    m(3, 3) = 1.0;
    m(1, 1) = std::conj(coherence_factor);  // vec index 1 = <1|rho|0>
    m(2, 2) = coherence_factor;             // vec index 2 = <0|rho|1>
    return SuperOperator{2, std::move(m)};
}

FrameSearchDemo rotated_zero_discord_instance(double rotation_angle, double g_fast,
                                              double g_slow, int grid_points, double t_max) {
    FrameSearchDemo demo;
    // System eigenbasis rotated about y.
    Mat v = expm_hermitian(pauli(2), cplx(0, -rotation_angle / 2.0));
    Vec psi0 = v.col(0);
    Vec psi1 = v.col(1);

    // Bath qubit A pinned, bath qubit B maximally mixed.
    Mat pa0 = Mat::Zero(2, 2), pa1 = Mat::Zero(2, 2);
    pa0(0, 0) = 1.0;
    pa1(1, 1) = 1.0;
    Mat half = Mat::Identity(2, 2) / 2.0;
    Mat rho_b0 = tensor_product(pa0, half);
    Mat rho_b1 = tensor_product(pa1, half);
    Mat joint = 0.5 * tensor_product(Mat(psi0 * psi0.adjoint()), rho_b0) +
                0.5 * tensor_product(Mat(psi1 * psi1.adjoint()), rho_b1);

    demo.h_joint =
        g_fast * tensor_product(pauli(3), tensor_product(pauli(3), Mat::Identity(2, 2))) +
        g_slow * tensor_product(pauli(3), tensor_product(Mat::Identity(2, 2), pauli(3)));

    CanonicalPOVM sic = qubit_sic_frame();
    demo.decomp =
        decompose(DensityOperator::checked(joint), sic.frame, sic.dual, 2, 4);

    demo.grid.resize(static_cast<std::size_t>(grid_points));
    for (int k = 0; k < grid_points; ++k)
        demo.grid[static_cast<std::size_t>(k)] = t_max * k / (grid_points - 1);
    DynamicalMapSet set = build_map_set(demo.decomp, demo.h_joint, demo.grid);
    demo.map_grids = std::move(set.maps);
    return demo;
}

}  // namespace bplus
