#include "bplus/opcore.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace bplus {

namespace {

Mat make_pauli(int a) {
    Mat m(2, 2);
    switch (a) {
        case 0: m << 1, 0, 0, 1; break;
        case 1: m << 0, 1, 1, 0; break;
        case 2: m << 0, cplx(0, -1), cplx(0, 1), 0; break;
        case 3: m << 1, 0, 0, -1; break;
        default: throw std::invalid_argument("pauli index must be 0..3");
    }
    return m;
}

}  // namespace

const Mat& pauli(int a) {
    static const Mat s0 = make_pauli(0), s1 = make_pauli(1), s2 = make_pauli(2),
                     s3 = make_pauli(3);
    switch (a) {
        case 0: return s0;
        case 1: return s1;
        case 2: return s2;
        case 3: return s3;
        default: throw std::invalid_argument("pauli index must be 0..3");
    }
}

bool is_hermitian(const Mat& m, double tolerance) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
}

Mat herm_part(const Mat& m) { return (m + m.adjoint()) / 2.0; }

DensityOperator DensityOperator::checked(Mat m, double slack) {
    if (m.rows() != m.cols()) throw std::invalid_argument("density operator must be square");
    if (!m.allFinite()) throw numeric_error("density operator has non-finite entries");
    if (!is_hermitian(m, slack)) throw numeric_error("density operator is not Hermitian");
    if (std::abs(m.trace() - cplx(1.0, 0.0)) > slack)
        throw numeric_error("density operator trace differs from 1");

    Eigen::SelfAdjointEigenSolver<Mat> es(herm_part(m));
    double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -slack) throw numeric_error("density operator has a negative eigenvalue");
    // Eigenvalues in [-slack, 0) are within contract; the matrix is kept
    // untouched so linear identities built from it stay exact.
    return DensityOperator{std::move(m)};
}

double PiecewiseHamiltonian::total_duration() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.duration;
    return t;
}

Mat tensor_product(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Mat partial_trace(const Mat& x, int d_sys, int d_bath, Keep keep) {
    if (x.rows() != x.cols()) throw std::invalid_argument("partial_trace: input not square");
    if (x.rows() != static_cast<Eigen::Index>(d_sys) * d_bath)
        throw std::invalid_argument("partial_trace: dimension mismatch");
    if (keep == Keep::system) {
        Mat out = Mat::Zero(d_sys, d_sys);
        for (int i = 0; i < d_sys; ++i)
            for (int j = 0; j < d_sys; ++j)
                for (int k = 0; k < d_bath; ++k) out(i, j) += x(i * d_bath + k, j * d_bath + k);
        return out;
    }
    Mat out = Mat::Zero(d_bath, d_bath);
    for (int k = 0; k < d_bath; ++k)
        for (int l = 0; l < d_bath; ++l)
            for (int i = 0; i < d_sys; ++i) out(k, l) += x(i * d_bath + k, i * d_bath + l);
    return out;
}

HermitianBasis hermitian_basis(int d) {
    if (d < 2) throw std::invalid_argument("hermitian_basis: dimension must be >= 2");
    HermitianBasis basis;
    basis.d = d;
    basis.elements.reserve(static_cast<std::size_t>(d) * d);
    basis.elements.push_back(Mat::Identity(d, d) / std::sqrt(static_cast<double>(d)));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            Mat sym = Mat::Zero(d, d);
            sym(j, k) = inv_sqrt2;
            sym(k, j) = inv_sqrt2;
            basis.elements.push_back(sym);
            Mat asym = Mat::Zero(d, d);
            asym(j, k) = cplx(0, -inv_sqrt2);
            asym(k, j) = cplx(0, inv_sqrt2);
            basis.elements.push_back(asym);
        }
    }
    for (int l = 1; l < d; ++l) {
        Mat diag = Mat::Zero(d, d);
        double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
        for (int i = 0; i < l; ++i) diag(i, i) = norm;
        diag(l, l) = -static_cast<double>(l) * norm;
        basis.elements.push_back(diag);
    }
    return basis;
}

Mat expm_hermitian(const Mat& h, cplx scale) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Vec phases(h.rows());
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        phases(i) = std::exp(scale * es.eigenvalues()(i));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Mat sqrtm_psd(const Mat& h) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    RealVec roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();
}

Mat evolve_piecewise(const PiecewiseHamiltonian& h, double t) {
    const double total = h.total_duration();
    const double slack = 1e-12 * std::max(1.0, total);
    if (t > total + slack || t < -total - slack)
        throw std::invalid_argument("evolve_piecewise: time outside [-T, T]");
    const bool backward = t < 0.0;
    double remaining = std::min(std::abs(t), total);

    Eigen::Index d = h.segments.empty() ? 0 : h.segments.front().h.rows();
    if (d == 0) throw std::invalid_argument("evolve_piecewise: empty Hamiltonian");
    Mat u = Mat::Identity(d, d);
    for (const auto& seg : h.segments) {
        if (remaining <= 0.0) break;
        if (seg.duration <= 0.0) throw std::invalid_argument("evolve_piecewise: nonpositive segment");
        if (!is_hermitian(seg.h)) throw numeric_error("evolve_piecewise: segment not Hermitian");
        double dt = std::min(seg.duration, remaining);
        u = expm_hermitian(seg.h, cplx(0, -dt)) * u;  // right-to-left ordered product
        remaining -= dt;
    }
    return backward ? Mat(u.adjoint()) : u;
}

DensityOperator closest_psd(const Mat& x) {
    Eigen::SelfAdjointEigenSolver<Mat> es(herm_part(x));
    RealVec clipped = es.eigenvalues().cwiseMax(0.0);
    double total = clipped.sum();
    if (total <= 1e-14)
        throw numeric_error("closest_psd: degenerate input, all eigenvalues clipped to zero");
    Mat psd = es.eigenvectors() * (clipped / total).asDiagonal() * es.eigenvectors().adjoint();
    return DensityOperator{std::move(psd)};
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
    if (rho.dim() != sigma.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
    Mat root = sqrtm_psd(rho.rho);
    Mat inner = root * sigma.rho * root;
    Eigen::SelfAdjointEigenSolver<Mat> es(herm_part(inner));
    double sum = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return std::min(1.0, sum * sum);
}

int rank_of_span(const std::vector<Mat>& ops, double tolerance) {
    if (ops.empty()) throw std::invalid_argument("rank_of_span: empty operator list");
    const Eigen::Index n = ops.front().size();
    Mat stacked(n, static_cast<Eigen::Index>(ops.size()));
    for (std::size_t i = 0; i < ops.size(); ++i) {
        if (ops[i].size() != n) throw std::invalid_argument("rank_of_span: dimension mismatch");
        stacked.col(static_cast<Eigen::Index>(i)) = vec_op(ops[i]);
    }
    Eigen::JacobiSVD<Mat> svd(stacked);
    double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    if (smax == 0.0) return 0;
    return static_cast<int>((svd.singularValues().array() > tolerance * smax).count());
}

Vec vec_op(const Mat& x) { return Eigen::Map<const Vec>(x.data(), x.size()); }

Mat unvec_op(const Vec& v, int rows, int cols) {
    return Eigen::Map<const Mat>(v.data(), rows, cols);
}

Mat pinv(const Mat& m, double rcond) {
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return Mat::Zero(m.cols(), m.rows());
    double cutoff = rcond * sv(0);
    RealVec inv = RealVec::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

}  // namespace bplus
