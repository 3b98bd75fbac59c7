#include "bplus/frames.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "bplus/rng.hpp"

namespace bplus {

namespace {

void require_consistent(const PositiveFrame& frame) {
    if (frame.d < 2) throw std::invalid_argument("frame: system dimension must be >= 2");
    if (frame.size() < frame.d * frame.d)
        throw numeric_error("frame: fewer than d^2 elements cannot span");
    for (const auto& p : frame.elements) {
        if (p.rows() != frame.d || p.cols() != frame.d)
            throw std::invalid_argument("frame: element dimension mismatch");
        if (!is_hermitian(p)) throw numeric_error("frame: element not Hermitian");
        Eigen::SelfAdjointEigenSolver<Mat> es(herm_part(p));
        if (es.eigenvalues().minCoeff() < -tol::structural)
            throw numeric_error("frame: element not positive semidefinite");
    }
}

Mat bloch_operator(double scale, const Eigen::Vector3d& m, double weight) {
    Mat out = Mat::Identity(2, 2);
    for (int a = 0; a < 3; ++a) out += m(a) * pauli(a + 1);
    return weight * scale * out;
}

}  // namespace

bool PositiveFrame::is_povm(double tolerance) const {
    Mat sum = Mat::Zero(d, d);
    for (const auto& p : elements) sum += p;
    return frob_diff(sum, Mat::Identity(d, d)) <= tolerance;
}

TransferMatrix transfer_matrix(const PositiveFrame& frame, const HermitianBasis& basis) {
    require_consistent(frame);
    if (basis.d != frame.d) throw std::invalid_argument("transfer_matrix: basis dimension mismatch");
    const int n = frame.size();
    const int d2 = frame.d * frame.d;
    TransferMatrix tm;
    tm.t.resize(n, d2);
    for (int a = 0; a < n; ++a)
        for (int j = 0; j < d2; ++j)
            tm.t(a, j) = (frame.elements[a] * basis.elements[j]).trace().real();
    Eigen::SelfAdjointEigenSolver<RealMat> es(tm.t.transpose() * tm.t);
    tm.gram_min_eig = es.eigenvalues().minCoeff();
    tm.gram_max_eig = es.eigenvalues().maxCoeff();
    if (tm.gram_min_eig <= tol::spectral_cut * tm.gram_max_eig)
        throw numeric_error("transfer_matrix: T^T T singular, the set is not a frame");
    return tm;
}

DualFrame dual_frame(const PositiveFrame& frame, const HermitianBasis& basis) {
    TransferMatrix tm = transfer_matrix(frame, basis);
    // The minimal-norm dual coefficients T~ = T (T^T T)^-1 applied to the
    // reference basis; evaluated through the SVD of T, which squares the
    // conditioning only once (the equivalent M = T (T^T T)^-2 T^T applied to
    // the frame squares it twice).
    Eigen::BDCSVD<RealMat> svd(tm.t, Eigen::ComputeThinU | Eigen::ComputeThinV);
    RealMat coeff =
        svd.matrixU() * svd.singularValues().cwiseInverse().asDiagonal() * svd.matrixV().transpose();
    DualFrame dual;
    dual.elements.resize(frame.elements.size());
    for (int a = 0; a < frame.size(); ++a) {
        Mat q = Mat::Zero(frame.d, frame.d);
        for (std::size_t j = 0; j < basis.elements.size(); ++j)
            q += coeff(a, static_cast<Eigen::Index>(j)) * basis.elements[j];
        dual.elements[a] = std::move(q);
    }
    return dual;
}

CanonicalPOVM canonicalize_povm(const std::vector<Mat>& raw) {
    if (raw.empty()) throw std::invalid_argument("canonicalize_povm: empty input");
    const int d = static_cast<int>(raw.front().rows());
    const int d2 = d * d;
    if (static_cast<int>(raw.size()) < d2)
        throw numeric_error("canonicalize_povm: need at least d^2 elements");

    // Greedy selection of a linearly independent d^2-subset.
    std::vector<Mat> picked;
    picked.reserve(d2);
    for (const auto& cand : raw) {
        if (static_cast<int>(picked.size()) == d2) break;
        std::vector<Mat> trial = picked;
        trial.push_back(cand);
        if (rank_of_span(trial, 1e-9) == static_cast<int>(trial.size())) picked = std::move(trial);
    }
    if (static_cast<int>(picked.size()) != d2)
        throw numeric_error("canonicalize_povm: input is rank deficient");

    Mat total = Mat::Zero(d, d);
    for (const auto& p : picked) total += p;
    Eigen::SelfAdjointEigenSolver<Mat> es(herm_part(total));
    if (es.eigenvalues().minCoeff() <= tol::structural)
        throw numeric_error("canonicalize_povm: element sum is singular");
    RealVec inv_roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cwiseInverse();
    Mat s_inv_half = es.eigenvectors() * inv_roots.asDiagonal() * es.eigenvectors().adjoint();

    CanonicalPOVM povm;
    povm.frame.d = d;
    povm.frame.elements.reserve(d2);
    for (const auto& p : picked) povm.frame.elements.push_back(herm_part(s_inv_half * p * s_inv_half));
    if (!povm.frame.is_povm())
        throw numeric_error("canonicalize_povm: rescaled elements do not sum to identity");
    if (rank_of_span(povm.frame.elements, 1e-9) != d2)
        throw numeric_error("canonicalize_povm: rescaling lost linear independence");
    povm.dual = dual_frame(povm.frame, hermitian_basis(d));
    for (const auto& q : povm.dual.elements)
        if (std::abs(q.trace() - cplx(1.0, 0.0)) > 1e-8)
            throw numeric_error("canonicalize_povm: dual element trace differs from 1");
    return povm;
}

CanonicalPOVM qubit_sic_frame() {
    const double s2 = std::sqrt(2.0);
    std::vector<Eigen::Vector3d> bloch = {
        {0.0, 0.0, 1.0},
        {2.0 * s2 / 3.0, 0.0, -1.0 / 3.0},
        {-s2 / 3.0, std::sqrt(2.0 / 3.0), -1.0 / 3.0},
        {-s2 / 3.0, -std::sqrt(2.0 / 3.0), -1.0 / 3.0},
    };
    CanonicalPOVM povm;
    povm.frame.d = 2;
    for (const auto& m : bloch) povm.frame.elements.push_back(bloch_operator(1.0, m, 0.25));
    for (const auto& m : bloch) povm.dual.elements.push_back(bloch_operator(1.0, 3.0 * m, 0.5));
    return povm;
}

PositiveFrame qubit_pauli_frame() {
    PositiveFrame frame;
    frame.d = 2;
    frame.elements.push_back(Mat::Identity(2, 2));
    for (int a = 1; a <= 3; ++a) frame.elements.push_back(Mat::Identity(2, 2) + pauli(a));
    return frame;
}

PositiveFrame qubit_six_state_frame() {
    PositiveFrame frame;
    frame.d = 2;
    for (int a = 1; a <= 3; ++a)
        for (double sign : {1.0, -1.0})
            frame.elements.push_back((Mat::Identity(2, 2) + sign * pauli(a)) / 6.0);
    return frame;
}

FrameValidationReport validate_frame(const PositiveFrame& frame, const DualFrame& dual) {
    if (frame.elements.size() != dual.elements.size())
        throw std::invalid_argument("validate_frame: frame/dual size mismatch");
    const int d = frame.d;
    const int n = frame.size();
    FrameValidationReport report;

    TransferMatrix tm = transfer_matrix(frame, hermitian_basis(d));
    report.frame_bound_lower = tm.gram_min_eig;
    report.frame_bound_upper = tm.gram_max_eig;

    Rng rng(0x5eedf00dULL);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        Mat a = random_hermitian(d, rng);
        Mat rebuilt = Mat::Zero(d, d);
        Mat rebuilt_swapped = Mat::Zero(d, d);
        for (int i = 0; i < n; ++i) {
            rebuilt += (a * frame.elements[i]).trace() * dual.elements[i];
            rebuilt_swapped += (a * dual.elements[i]).trace() * frame.elements[i];
        }
        worst = std::max({worst, frob_diff(rebuilt, a), frob_diff(rebuilt_swapped, a)});
    }
    report.reconstruction_residual = worst;

    if (n == d * d) {
        double bio = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double expect = (i == j) ? 1.0 : 0.0;
                bio = std::max(bio,
                               std::abs((frame.elements[i] * dual.elements[j]).trace() - cplx(expect, 0)));
            }
        report.biorthogonality_residual = bio;
    }

    if (frame.is_povm()) {
        double tr_res = 0.0;
        for (const auto& q : dual.elements)
            tr_res = std::max(tr_res, std::abs(q.trace() - cplx(1.0, 0.0)));
        report.dual_trace_residual = tr_res;
    }

    // General-SIC detection: Tr[P_a^2] constant and Tr[P_a P_b] constant off
    // the diagonal. The closed form Q_a = d/(a d^3 - 1) [(d^2-1) P_a - (1-ad) 1]
    // then fixes the dual.
    if (n == d * d && frame.is_povm()) {
        double diag = (frame.elements[0] * frame.elements[0]).trace().real();
        double off = (n > 1) ? (frame.elements[0] * frame.elements[1]).trace().real() : 0.0;
        bool sic = true;
        for (int i = 0; i < n && sic; ++i)
            for (int j = 0; j < n && sic; ++j) {
                double val = (frame.elements[i] * frame.elements[j]).trace().real();
                sic = std::abs(val - (i == j ? diag : off)) <= 1e-9;
            }
        if (sic) {
            const double a = diag;
            const double coeff = d / (a * d * d * d - 1.0);
            double res = 0.0;
            for (int i = 0; i < n; ++i) {
                Mat closed = coeff * ((d * d - 1.0) * frame.elements[i] -
                                      (1.0 - a * d) * Mat::Identity(d, d));
                res = std::max(res, frob_diff(closed, dual.elements[i]));
            }
            report.sic_closed_form_residual = res;
        }
    }
    return report;
}

}  // namespace bplus
