#include "bplus/bplus.hpp"

#include <Eigen/Eigenvalues>

#include "bplus/dynmaps.hpp"

namespace bplus {

namespace {

// Clips roundoff-scale negative eigenvalues of a nominally PSD bath operator.
// Larger negativity means the frame element was not positive or the input was
// not a state, which is a caller error.
DensityOperator bath_state_from(const Mat& eta, double weight) {
    Mat candidate = eta / weight;
    Eigen::SelfAdjointEigenSolver<Mat> es(herm_part(candidate));
    if (es.eigenvalues().minCoeff() < -tol::structural)
        throw numeric_error("decompose: bath component fails positivity beyond tolerance");
    return DensityOperator::checked(std::move(candidate));
}

}  // namespace

Mat BPlusDecomposition::system_state() const {
    Mat rho_s = Mat::Zero(d_sys, d_sys);
    for (int a = 0; a < size(); ++a) rho_s += weights(a) * dual.elements[a];
    return rho_s;
}

BPlusDecomposition decompose(const DensityOperator& rho_sb, const PositiveFrame& frame,
                             const DualFrame& dual, int d_sys, int d_bath) {
    if (rho_sb.dim() != d_sys * d_bath)
        throw std::invalid_argument("decompose: joint dimension mismatch");
    if (frame.d != d_sys) throw std::invalid_argument("decompose: frame dimension mismatch");
    if (frame.elements.size() != dual.elements.size())
        throw std::invalid_argument("decompose: frame/dual size mismatch");

    BPlusDecomposition decomp;
    decomp.frame = frame;
    decomp.dual = dual;
    decomp.d_sys = d_sys;
    decomp.d_bath = d_bath;
    decomp.weights.resize(frame.size());
    decomp.bath_states.resize(frame.elements.size());

    const Mat identity_b = Mat::Identity(d_bath, d_bath);
    for (int a = 0; a < frame.size(); ++a) {
        Mat eta = partial_trace(tensor_product(frame.elements[a], identity_b) * rho_sb.rho,
                                d_sys, d_bath, Keep::bath);
        double w = eta.trace().real();
        decomp.weights(a) = w;
        if (std::abs(w) < tol::weight_floor) {
            decomp.weights(a) = 0.0;
            continue;  // marked absent
        }
        decomp.bath_states[a] = bath_state_from(eta, w);
    }

    if (frame.is_povm()) {
        if (decomp.weights.minCoeff() < -tol::structural)
            throw numeric_error("decompose: negative weight for a POVM frame");
        if (std::abs(decomp.weights.sum() - 1.0) > tol::structural)
            throw numeric_error("decompose: POVM weights do not sum to 1");
    }
    return decomp;
}

Mat reconstruct(const BPlusDecomposition& decomp) {
    Mat out = Mat::Zero(decomp.d_sys * decomp.d_bath, decomp.d_sys * decomp.d_bath);
    for (int a = 0; a < decomp.size(); ++a) {
        if (!decomp.bath_states[a]) continue;
        out += decomp.weights(a) *
               tensor_product(decomp.dual.elements[a], decomp.bath_states[a]->rho);
    }
    return out;
}

std::vector<SteeredState> steered_states(const BPlusDecomposition& decomp,
                                         const std::vector<Mat>& povm) {
    Mat sum = Mat::Zero(decomp.d_sys, decomp.d_sys);
    for (const auto& e : povm) sum += e;
    if (frob_diff(sum, Mat::Identity(decomp.d_sys, decomp.d_sys)) > tol::structural)
        throw std::invalid_argument("steered_states: measurement elements do not form a POVM");

    std::vector<SteeredState> result;
    for (int m = 0; m < static_cast<int>(povm.size()); ++m) {
        double p = 0.0;
        Mat eta = Mat::Zero(decomp.d_bath, decomp.d_bath);
        for (int a = 0; a < decomp.size(); ++a) {
            if (!decomp.bath_states[a]) continue;
            double coeff =
                decomp.weights(a) * (povm[m] * decomp.dual.elements[a]).trace().real();
            p += coeff;
            eta += coeff * decomp.bath_states[a]->rho;
        }
        if (p <= tol::weight_floor) continue;
        result.push_back({m, p, closest_psd(eta / p)});
    }
    return result;
}

std::pair<double, BPlusDecomposition> apply_local_operation(const BPlusDecomposition& decomp,
                                                            const LocalOperation& op) {
    const int n = decomp.size();
    // R_{aa'} = Tr[R(Q_a) P_{a'}] re-expands the transformed duals in the frame.
    RealMat r_coeff(n, n);
    std::vector<Mat> transformed(n);
    double p_r = 0.0;
    for (int a = 0; a < n; ++a) {
        transformed[a] = op.apply(decomp.dual.elements[a]);
        p_r += decomp.weights(a) * transformed[a].trace().real();
        for (int b = 0; b < n; ++b)
            r_coeff(a, b) = (transformed[a] * decomp.frame.elements[b]).trace().real();
    }
    if (p_r <= tol::weight_floor)
        throw numeric_error("apply_local_operation: operation has zero success probability");

    BPlusDecomposition out;
    out.frame = decomp.frame;
    out.dual = decomp.dual;
    out.d_sys = decomp.d_sys;
    out.d_bath = decomp.d_bath;
    out.weights.resize(n);
    out.bath_states.resize(n);
    for (int b = 0; b < n; ++b) {
        Mat eta = Mat::Zero(decomp.d_bath, decomp.d_bath);
        for (int a = 0; a < n; ++a) {
            if (!decomp.bath_states[a]) continue;
            eta += decomp.weights(a) * r_coeff(a, b) * decomp.bath_states[a]->rho;
        }
        eta /= p_r;
        double w = eta.trace().real();
        out.weights(b) = w;
        if (std::abs(w) < tol::weight_floor) {
            out.weights(b) = 0.0;
            continue;
        }
        // Positivity here is inherited from the frame elements; fail loudly if lost.
        out.bath_states[b] = DensityOperator::checked(eta / w, 1e-8);
    }
    return {p_r, out};
}

}  // namespace bplus
