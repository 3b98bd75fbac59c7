#include "bplus/dynmaps.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace bplus {

Mat SuperOperator::apply(const Mat& x) const {
    if (x.rows() != d || x.cols() != d)
        throw std::invalid_argument("SuperOperator::apply: dimension mismatch");
    return unvec_op(m * vec_op(x), d, d);
}

SuperOperator SuperOperator::identity(int d) {
    return SuperOperator{d, Mat::Identity(d * d, d * d)};
}

SuperOperator SuperOperator::from_action(int d, const std::function<Mat(const Mat&)>& action) {
    SuperOperator op{d, Mat(d * d, d * d)};
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) {
            Mat unit = Mat::Zero(d, d);
            unit(i, j) = 1.0;
            op.m.col(j * d + i) = vec_op(action(unit));
        }
    return op;
}

SuperOperator SuperOperator::conjugation(const Mat& v) {
    const int d = static_cast<int>(v.rows());
    // vec(V X V^dag) = conj(V) (x) V vec(X) in column-major convention.
    return SuperOperator{d, tensor_product(v.conjugate(), v)};
}

Mat choi_matrix(const SuperOperator& op) {
    const int d = op.d;
    Mat choi = Mat::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Mat unit = Mat::Zero(d, d);
            unit(i, j) = 1.0;
            Mat image = op.apply(unit);
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) choi(i * d + k, j * d + l) = image(k, l);
        }
    return choi;
}

CptpReport validate_cptp(const SuperOperator& op, double cp_slack, double tp_slack) {
    CptpReport report;
    Mat choi = choi_matrix(op);
    Eigen::SelfAdjointEigenSolver<Mat> es(herm_part(choi));
    report.choi_min_eig = es.eigenvalues().minCoeff();
    // Hermiticity preservation shows up as the anti-Hermitian part of the Choi.
    double herm_res = frob(choi - choi.adjoint()) / 2.0;
    Mat traced = partial_trace(choi, op.d, op.d, Keep::system);
    report.tp_residual = frob_diff(traced, Mat::Identity(op.d, op.d));
    report.pass = report.choi_min_eig >= -cp_slack && report.tp_residual <= tp_slack &&
                  herm_res <= cp_slack;
    return report;
}

LocalOperation LocalOperation::from_kraus(int d, const std::vector<Mat>& kraus) {
    if (kraus.empty()) throw std::invalid_argument("from_kraus: empty operator list");
    Mat total = Mat::Zero(d, d);
    Mat sup = Mat::Zero(d * d, d * d);
    for (const auto& k : kraus) {
        if (k.rows() != d || k.cols() != d)
            throw std::invalid_argument("from_kraus: operator dimension mismatch");
        total += k.adjoint() * k;
        sup += tensor_product(k.conjugate(), k);
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(herm_part(total));
    if (es.eigenvalues().maxCoeff() > 1.0 + 1e-9)
        throw numeric_error("from_kraus: operation increases trace");
    LocalOperation op;
    op.op = SuperOperator{d, std::move(sup)};
    op.trace_preserving =
        frob_diff(total, Mat::Identity(d, d)) <= tol::structural;
    return op;
}

LocalOperation LocalOperation::from_superoperator(SuperOperator sup) {
    Mat choi = choi_matrix(sup);
    Eigen::SelfAdjointEigenSolver<Mat> es(herm_part(choi));
    if (es.eigenvalues().minCoeff() < -tol::structural)
        throw numeric_error("from_superoperator: map is not completely positive");
    Mat traced = partial_trace(choi, sup.d, sup.d, Keep::system);
    LocalOperation op;
    op.trace_preserving = frob_diff(traced, Mat::Identity(sup.d, sup.d)) <= tol::structural;
    op.op = std::move(sup);
    return op;
}

LocalOperation LocalOperation::identity(int d) {
    LocalOperation op;
    op.op = SuperOperator::identity(d);
    op.trace_preserving = true;
    return op;
}

LocalOperation LocalOperation::replacement(const Mat& tau) {
    const int d = static_cast<int>(tau.rows());
    SuperOperator sup{d, Mat(d * d, d * d)};
    Vec tau_vec = vec_op(tau);
    Vec id_vec = vec_op(Mat::Identity(d, d));
    sup.m = tau_vec * id_vec.transpose();  // vec(tau) <vec(1)| picks out Tr[X]
    return from_superoperator(std::move(sup));
}

LocalOperation LocalOperation::projection(const Vec& psi) {
    Mat proj = psi * psi.adjoint() / psi.squaredNorm();
    return from_kraus(static_cast<int>(psi.size()), {proj});
}

SuperOperator induced_map(const Mat& u, const DensityOperator& rho_bath, int d_sys) {
    const int d_bath = rho_bath.dim();
    if (u.rows() != static_cast<Eigen::Index>(d_sys) * d_bath || u.rows() != u.cols())
        throw std::invalid_argument("induced_map: unitary dimension mismatch");
    if (frob_diff(u.adjoint() * u, Mat::Identity(u.rows(), u.cols())) > tol::structural)
        throw numeric_error("induced_map: operator is not unitary");
    SuperOperator op = SuperOperator::from_action(d_sys, [&](const Mat& x) {
        return partial_trace(u * tensor_product(x, rho_bath.rho) * u.adjoint(), d_sys, d_bath,
                             Keep::system);
    });
    return op;
}

DynamicalMapSet build_map_set(const BPlusDecomposition& decomp, const Mat& h_joint,
                              const std::vector<double>& times) {
    DynamicalMapSet set;
    set.times = times;
    set.weights = decomp.weights;
    set.dual = decomp.dual;
    set.maps.resize(decomp.size());
    Eigen::SelfAdjointEigenSolver<Mat> es(h_joint);
    for (int a = 0; a < decomp.size(); ++a) {
        if (!decomp.bath_states[a]) continue;
        set.maps[a].reserve(times.size());
        for (double t : times) {
            Vec phases(h_joint.rows());
            for (Eigen::Index i = 0; i < h_joint.rows(); ++i)
                phases(i) = std::exp(cplx(0, -t) * es.eigenvalues()(i));
            Mat u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
            set.maps[a].push_back(induced_map(u, *decomp.bath_states[a], decomp.d_sys));
        }
    }
    return set;
}

DensityOperator evolve_correlated(const BPlusDecomposition& decomp, const Mat& u) {
    Mat out = Mat::Zero(decomp.d_sys, decomp.d_sys);
    for (int a = 0; a < decomp.size(); ++a) {
        if (!decomp.bath_states[a]) continue;
        SuperOperator phi = induced_map(u, *decomp.bath_states[a], decomp.d_sys);
        out += decomp.weights(a) * phi.apply(decomp.dual.elements[a]);
    }
    return DensityOperator::checked(std::move(out), 1e-9);
}

namespace {

std::pair<double, DensityOperator> after_operation_impl(
    const BPlusDecomposition& decomp, const std::vector<SuperOperator>& maps,
    const LocalOperation& r, bool require_tp) {
    const int n = decomp.size();
    if (static_cast<int>(maps.size()) != n)
        throw std::invalid_argument("evolve_after_operation: one map per component required");
    if (require_tp && !r.trace_preserving)
        throw std::invalid_argument("superchannel_eval: operation must be trace preserving");

    double p_r = 0.0;
    Mat out = Mat::Zero(decomp.d_sys, decomp.d_sys);
    for (int a = 0; a < n; ++a) {
        if (!decomp.bath_states[a]) continue;
        Mat transformed = r.apply(decomp.dual.elements[a]);
        p_r += decomp.weights(a) * transformed.trace().real();
        for (int b = 0; b < n; ++b) {
            double coeff = (transformed * decomp.frame.elements[b]).trace().real();
            out += decomp.weights(a) * coeff * maps[a].apply(decomp.dual.elements[b]);
        }
    }
    if (p_r <= tol::weight_floor)
        throw numeric_error("evolve_after_operation: zero success probability");
    return {p_r, DensityOperator::checked(out / p_r, 1e-8)};
}

}  // namespace

std::pair<double, DensityOperator> evolve_after_operation(const BPlusDecomposition& decomp,
                                                          const Mat& u,
                                                          const LocalOperation& r) {
    std::vector<SuperOperator> maps;
    maps.reserve(decomp.size());
    for (int a = 0; a < decomp.size(); ++a) {
        if (decomp.bath_states[a])
            maps.push_back(induced_map(u, *decomp.bath_states[a], decomp.d_sys));
        else
            maps.push_back(SuperOperator::identity(decomp.d_sys));  // unused placeholder
    }
    return after_operation_impl(decomp, maps, r, false);
}

std::pair<double, DensityOperator> evolve_after_operation(
    const BPlusDecomposition& decomp, const std::vector<SuperOperator>& maps_at_t,
    const LocalOperation& r) {
    return after_operation_impl(decomp, maps_at_t, r, false);
}

DensityOperator superchannel_eval(const BPlusDecomposition& decomp,
                                  const std::vector<SuperOperator>& maps_at_t,
                                  const LocalOperation& r) {
    return after_operation_impl(decomp, maps_at_t, r, true).second;
}

DensityOperator process_tensor_eval(const BPlusDecomposition& decomp,
                                    const std::vector<Intervention>& interventions) {
    const int n = decomp.size();
    const int d_s = decomp.d_sys;
    const int d_b = decomp.d_bath;
    const Mat identity_b = Mat::Identity(d_b, d_b);

    // Unnormalised bath operators eta_a with current joint operator
    // sum_a Q_a (x) eta_a. Refreshed through each (R, U) step via the frame
    // expansion, never by carrying the joint state itself.
    std::vector<Mat> eta(n, Mat::Zero(d_b, d_b));
    for (int a = 0; a < n; ++a)
        if (decomp.bath_states[a]) eta[a] = decomp.weights(a) * decomp.bath_states[a]->rho;

    for (const auto& step : interventions) {
        if (!step.r.trace_preserving)
            throw std::invalid_argument("process_tensor_eval: interventions must be CP-TP");
        if (step.u.rows() != static_cast<Eigen::Index>(d_s) * d_b)
            throw std::invalid_argument("process_tensor_eval: unitary dimension mismatch");

        // Local operation: Q_a -> sum_b R_{ab} Q_b regroups the bath side.
        std::vector<Mat> eta_r(n, Mat::Zero(d_b, d_b));
        for (int a = 0; a < n; ++a) {
            Mat transformed = step.r.apply(decomp.dual.elements[a]);
            for (int b = 0; b < n; ++b) {
                double coeff = (transformed * decomp.frame.elements[b]).trace().real();
                eta_r[b] += coeff * eta[a];
            }
        }
        // Joint unitary: refresh via eta'_g = sum_a Tr_S[(P_g (x) 1) U (Q_a (x) eta_a) U^dag].
        std::vector<Mat> eta_u(n, Mat::Zero(d_b, d_b));
        for (int a = 0; a < n; ++a) {
            Mat evolved =
                step.u * tensor_product(decomp.dual.elements[a], eta_r[a]) * step.u.adjoint();
            for (int g = 0; g < n; ++g) {
                eta_u[g] += partial_trace(
                    tensor_product(decomp.frame.elements[g], identity_b) * evolved, d_s, d_b,
                    Keep::bath);
            }
        }
        eta = std::move(eta_u);
    }

    Mat out = Mat::Zero(d_s, d_s);
    for (int a = 0; a < n; ++a) out += eta[a].trace() * decomp.dual.elements[a];
    return DensityOperator::checked(std::move(out), 1e-8);
}

MapTomographyResult map_tomography(const BPlusDecomposition& decomp,
                                   const std::vector<LocalOperation>& probes,
                                   const std::vector<Mat>& evolved) {
    const int n = decomp.size();
    const int d = decomp.d_sys;
    if (probes.size() != evolved.size())
        throw std::invalid_argument("map_tomography: probe/record count mismatch");

    MapTomographyResult result;
    result.maps.resize(n);
    std::vector<int> active;
    for (int a = 0; a < n; ++a) {
        if (std::abs(decomp.weights(a)) < tol::weight_floor)
            result.unrecoverable.push_back(a);
        else
            active.push_back(a);
    }
    const int n_act = static_cast<int>(active.size());

    // Unknowns F^(a)_{a',b} = w_a Tr[phi^(a)(Q_{a'}) P_b] for active a.
    // Each probe j and output index b gives one scalar equation
    //   Tr[rho^(j) P_b] = sum_{a,a'} R^(j)_{aa'} F^(a)_{a',b}.
    const int unknowns = n_act * n * n;
    const int rows = static_cast<int>(probes.size()) * n;
    RealMat design = RealMat::Zero(rows, unknowns);
    RealVec rhs(rows);
    for (int j = 0; j < static_cast<int>(probes.size()); ++j) {
        RealMat r_coeff(n, n);
        for (int a = 0; a < n; ++a) {
            Mat transformed = probes[j].apply(decomp.dual.elements[a]);
            for (int b = 0; b < n; ++b)
                r_coeff(a, b) = (transformed * decomp.frame.elements[b]).trace().real();
        }
        for (int b = 0; b < n; ++b) {
            int row = j * n + b;
            rhs(row) = (evolved[j] * decomp.frame.elements[b]).trace().real();
            for (int ia = 0; ia < n_act; ++ia)
                for (int ap = 0; ap < n; ++ap)
                    design(row, (ia * n + ap) * n + b) = r_coeff(active[ia], ap);
        }
    }

    Eigen::JacobiSVD<RealMat> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    result.design_rank = static_cast<int>((sv.array() > 1e-10 * smax).count());
    if (result.design_rank < unknowns) {
        throw unidentifiable_error(
            "map_tomography: probe set does not span the operation space "
            "(trace-decreasing probes are required)",
            {});
    }
    result.condition_number = smax / sv(sv.size() - 1);
    RealVec f = svd.solve(rhs);

    // phi^(a)(Q_{a'}) = w_a^-1 sum_b F^(a)_{a',b} Q_b determines each map on the
    // dual basis; the superoperator follows by solving against vec(Q).
    Mat q_mat(d * d, n);
    for (int b = 0; b < n; ++b) q_mat.col(b) = vec_op(decomp.dual.elements[b]);
    Mat q_pinv = pinv(q_mat);
    for (int ia = 0; ia < n_act; ++ia) {
        int a = active[ia];
        Mat images(d * d, n);
        for (int ap = 0; ap < n; ++ap) {
            Mat img = Mat::Zero(d, d);
            for (int b = 0; b < n; ++b)
                img += f((ia * n + ap) * n + b) * decomp.dual.elements[b];
            images.col(ap) = vec_op(img) / decomp.weights(a);
        }
        result.maps[a] = SuperOperator{d, images * q_pinv};
    }
    return result;
}

}  // namespace bplus
