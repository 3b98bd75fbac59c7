// Shared test utilities: seeded generators and independent brute-force
// oracles (kept free of the library code paths they are used to check).

#pragma once

#include <cmath>
#include <vector>

#include "bplus/dynmaps.hpp"
#include "bplus/rng.hpp"

namespace testutil {

using bplus::cplx;
using bplus::Mat;
using bplus::Vec;

// Entry-indexed Kronecker product, written independently of the library's
// block-based implementation.
inline Mat naive_kron(const Mat& a, const Mat& b) {
    const auto ra = a.rows(), ca = a.cols(), rb = b.rows(), cb = b.cols();
    Mat out(ra * rb, ca * cb);
    for (Eigen::Index i = 0; i < ra * rb; ++i)
        for (Eigen::Index j = 0; j < ca * cb; ++j)
            out(i, j) = a(i / rb, j / cb) * b(i % rb, j % cb);
    return out;
}

// Brute-force reduced state: evolve the joint state and sum bath indices by
// explicit loops.
inline Mat brute_reduced_state(const Mat& u, const Mat& rho_sb, int d_sys, int d_bath) {
    Mat evolved = u * rho_sb * u.adjoint();
    Mat out = Mat::Zero(d_sys, d_sys);
    for (int i = 0; i < d_sys; ++i)
        for (int j = 0; j < d_sys; ++j)
            for (int k = 0; k < d_bath; ++k) out(i, j) += evolved(i * d_bath + k, j * d_bath + k);
    return out;
}

// Apply a local system operation (R (x) I) to a joint operator via the
// superoperator acting on system blocks.
inline Mat apply_local_to_joint(const bplus::LocalOperation& r, const Mat& rho_sb, int d_sys,
                                int d_bath) {
    // rho_sb = sum_{ij} |i><j| (x) block_ij; R acts on the system factor.
    Mat out = Mat::Zero(rho_sb.rows(), rho_sb.cols());
    for (int i = 0; i < d_sys; ++i)
        for (int j = 0; j < d_sys; ++j) {
            Mat unit = Mat::Zero(d_sys, d_sys);
            unit(i, j) = 1.0;
            Mat image = r.apply(unit);
            Mat block = rho_sb.block(i * d_bath, j * d_bath, d_bath, d_bath);
            out += naive_kron(image, block);
        }
    return out;
}

// Random CP (generally trace-decreasing) operation from Gaussian Kraus
// operators rescaled so the total Kraus sum stays below identity.
inline bplus::LocalOperation random_cp_operation(int d, bplus::Rng& rng, int n_kraus = 2,
                                                 bool trace_preserving = false) {
    std::vector<Mat> kraus;
    Mat total = Mat::Zero(d, d);
    for (int k = 0; k < n_kraus; ++k) {
        kraus.push_back(bplus::random_ginibre(d, d, rng));
        total += kraus.back().adjoint() * kraus.back();
    }
    if (trace_preserving) {
        // Normalise so sum K^dag K = 1.
        Eigen::SelfAdjointEigenSolver<Mat> es(total);
        Mat inv_half = es.eigenvectors() *
                       es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal().toDenseMatrix() *
                       es.eigenvectors().adjoint();
        for (auto& k : kraus) k = k * inv_half;
    } else {
        Eigen::SelfAdjointEigenSolver<Mat> es(total);
        double scale = 1.0 / std::sqrt(es.eigenvalues().maxCoeff() * 1.25);
        for (auto& k : kraus) k *= scale;
    }
    return bplus::LocalOperation::from_kraus(d, kraus);
}

// Random two-sided joint state with a chosen Schmidt rank (pure).
inline Mat random_schmidt_pure(int d_sys, int d_bath, int rank, bplus::Rng& rng) {
    Vec psi = Vec::Zero(d_sys * d_bath);
    Mat us = bplus::random_unitary(d_sys, rng);
    Mat ub = bplus::random_unitary(d_bath, rng);
    bplus::RealVec coeff(rank);
    for (int r = 0; r < rank; ++r) coeff(r) = 0.2 + rng.uniform();
    coeff /= coeff.norm();
    for (int r = 0; r < rank; ++r)
        for (int i = 0; i < d_sys; ++i)
            for (int k = 0; k < d_bath; ++k)
                psi(i * d_bath + k) += coeff(r) * us(i, r) * ub(k, r);
    psi /= psi.norm();
    return psi * psi.adjoint();
}

// A generic canonical POVM on dimension d, built deterministically from a
// seeded set of rank-1-plus-identity positive operators. The identity
// admixture keeps the frame well conditioned.
inline bplus::CanonicalPOVM generic_povm(int d, std::uint64_t seed) {
    bplus::Rng rng(seed);
    std::vector<Mat> raw;
    for (int k = 0; k < d * d; ++k) {
        Vec v = bplus::random_pure_state(d, rng);
        raw.push_back(Mat(v * v.adjoint()) + 0.5 * Mat::Identity(d, d));
    }
    return bplus::canonicalize_povm(raw);
}

inline double frob(const Mat& m) { return m.norm(); }

}  // namespace testutil
