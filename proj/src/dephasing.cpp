#include "bplus/dephasing.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace bplus {

namespace {

constexpr double kTailLimit = 1e-6;

int int_pow(int base, int exp) {
    int out = 1;
    for (int i = 0; i < exp; ++i) out *= base;
    return out;
}

// Kronecker chain placing op at mode slot `mode` out of `n_modes`.
Mat mode_operator(const Mat& op, int mode, int n_modes) {
    const int levels = static_cast<int>(op.rows());
    Mat out = (mode == 0) ? op : Mat::Identity(levels, levels);
    for (int m = 1; m < n_modes; ++m)
        out = tensor_product(out, (m == mode) ? op : Mat::Identity(levels, levels));
    return out;
}

}  // namespace

DisplacementVector displacement_vector(const DephasingSpec& spec, double t) {
    DisplacementVector xi(static_cast<Eigen::Index>(spec.modes.size()));
    for (std::size_t j = 0; j < spec.modes.size(); ++j) {
        const auto& mode = spec.modes[j];
        if (mode.omega <= 0.0) throw std::invalid_argument("dephasing: mode frequency must be > 0");
        xi(static_cast<Eigen::Index>(j)) =
            2.0 * mode.g * (1.0 - std::exp(cplx(0, mode.omega * t))) / mode.omega;
    }
    return xi;
}

cplx char_fn_gaussian(const GaussianBathState& state, const DisplacementVector& xi) {
    if (static_cast<Eigen::Index>(state.modes.size()) != xi.size())
        throw std::invalid_argument("char_fn_gaussian: mode count mismatch");
    cplx log_chi = 0.0;
    for (std::size_t j = 0; j < state.modes.size(); ++j) {
        const auto& m = state.modes[j];
        if (m.nbar < 0.0) throw std::invalid_argument("char_fn_gaussian: nbar must be >= 0");
        cplx x = xi(static_cast<Eigen::Index>(j));
        log_chi += -(2.0 * m.nbar + 1.0) * std::norm(x) / 2.0 + x * std::conj(m.alpha) -
                   std::conj(x) * m.alpha;
    }
    return std::exp(log_chi);
}

double TruncatedBathState::truncation_tail() const {
    const int levels = cutoff + 1;
    double worst = 0.0;
    for (int mode = 0; mode < n_modes; ++mode) {
        Mat top = Mat::Zero(levels, levels);
        top(cutoff, cutoff) = 1.0;
        Mat proj = mode_operator(top, mode, n_modes);
        worst = std::max(worst, (proj * rho.rho).trace().real());
    }
    return worst;
}

cplx char_fn_numeric(const TruncatedBathState& state, const DisplacementVector& xi) {
    if (xi.size() != state.n_modes)
        throw std::invalid_argument("char_fn_numeric: mode count mismatch");
    if (state.truncation_tail() > kTailLimit)
        throw numeric_error("char_fn_numeric: truncation inadequate for this state");
    const int levels = state.cutoff + 1;
    Mat d = Mat::Identity(1, 1);
    for (int mode = 0; mode < state.n_modes; ++mode)
        d = tensor_product(d, displacement_operator(levels, xi(mode)));
    return (state.rho.rho * d).trace();
}

DephasingInput dephasing_input(const BPlusDecomposition& decomp, int cutoff, int n_modes) {
    if (decomp.d_sys != 2) throw std::invalid_argument("dephasing: system must be a qubit");
    if (decomp.d_bath != int_pow(cutoff + 1, n_modes))
        throw std::invalid_argument("dephasing: bath dimension does not match cutoff/modes");
    DephasingInput input;
    input.weights = decomp.weights;
    input.dual_elements = decomp.dual.elements;
    input.baths.resize(decomp.bath_states.size());
    for (std::size_t a = 0; a < decomp.bath_states.size(); ++a) {
        if (!decomp.bath_states[a]) continue;
        input.baths[a] = TruncatedBathState{cutoff, n_modes, *decomp.bath_states[a]};
    }
    return input;
}

DephasingInput dephasing_input(const DensityOperator& rho_s, const GaussianBathState& bath) {
    if (rho_s.dim() != 2) throw std::invalid_argument("dephasing: system must be a qubit");
    DephasingInput input;
    PositiveFrame frame = qubit_pauli_frame();
    DualFrame dual = dual_frame(frame, hermitian_basis(2));
    input.weights.resize(4);
    input.dual_elements = dual.elements;
    input.baths.resize(4);
    for (int a = 0; a < 4; ++a) {
        input.weights(a) = (frame.elements[a] * rho_s.rho).trace().real();
        if (std::abs(input.weights(a)) >= tol::weight_floor) input.baths[a] = bath;
    }
    return input;
}

namespace {

cplx bath_char_fn(const BathStateRep& rep, const DisplacementVector& xi) {
    if (std::holds_alternative<GaussianBathState>(rep))
        return char_fn_gaussian(std::get<GaussianBathState>(rep), xi);
    return char_fn_numeric(std::get<TruncatedBathState>(rep), xi);
}

}  // namespace

DensityOperator dephase_correlated(const DephasingInput& input, const DephasingSpec& spec,
                                   double t) {
    const int n = static_cast<int>(input.dual_elements.size());
    DisplacementVector xi = displacement_vector(spec, t);
    double p0 = 0.0, p1 = 0.0;
    cplx coherence = 0.0;
    for (int a = 0; a < n; ++a) {
        if (std::abs(input.weights(a)) < tol::weight_floor) continue;
        if (!input.baths[a])
            throw numeric_error("dephase_correlated: component lacks a representable bath state");
        const Mat& q = input.dual_elements[a];
        p0 += input.weights(a) * q(0, 0).real();
        p1 += input.weights(a) * q(1, 1).real();
        coherence += input.weights(a) * q(0, 1) * bath_char_fn(*input.baths[a], xi);
    }
    Mat rho(2, 2);
    rho << p0, coherence, std::conj(coherence), p1;
    return DensityOperator::checked(std::move(rho), 1e-8);
}

Mat annihilation_operator(int levels) {
    Mat b = Mat::Zero(levels, levels);
    for (int k = 1; k < levels; ++k) b(k - 1, k) = std::sqrt(static_cast<double>(k));
    return b;
}

Mat displacement_operator(int levels, cplx xi) {
    Mat b = annihilation_operator(levels);
    Mat herm = cplx(0, -1) * (xi * b.adjoint() - std::conj(xi) * b);  // Hermitian
    return expm_hermitian(herm, cplx(0, 1));
}

DensityOperator thermal_state(int levels, double nbar) {
    Mat rho = Mat::Zero(levels, levels);
    if (nbar <= 0.0) {
        rho(0, 0) = 1.0;
    } else {
        double ratio = nbar / (nbar + 1.0);
        double p = 1.0 / (nbar + 1.0);
        for (int k = 0; k < levels; ++k) {
            rho(k, k) = p;
            p *= ratio;
        }
        rho /= rho.trace();
    }
    return DensityOperator{std::move(rho)};
}

Vec coherent_state(int levels, cplx alpha) {
    Vec v(levels);
    cplx amp = std::exp(-std::norm(alpha) / 2.0);
    for (int k = 0; k < levels; ++k) {
        v(k) = amp;
        amp *= alpha / std::sqrt(static_cast<double>(k + 1));
    }
    return v / v.norm();
}

DephasingOracle::DephasingOracle(const DephasingSpec& spec, int cutoff)
    : spec_(spec), cutoff_(cutoff) {
    const int levels = cutoff + 1;
    const int n_modes = static_cast<int>(spec.modes.size());
    d_bath_ = int_pow(levels, n_modes);

    Mat h_bath = Mat::Zero(d_bath_, d_bath_);
    Mat coupling = Mat::Zero(d_bath_, d_bath_);
    Mat b = annihilation_operator(levels);
    Mat number = b.adjoint() * b;
    Mat quad = b + b.adjoint();
    for (int j = 0; j < n_modes; ++j) {
        h_bath += spec.modes[j].omega * mode_operator(number, j, n_modes);
        coupling += spec.modes[j].g * mode_operator(quad, j, n_modes);
    }
    Mat h = 0.5 * spec.eps * tensor_product(pauli(3), Mat::Identity(d_bath_, d_bath_)) +
            tensor_product(Mat::Identity(2, 2), h_bath) + tensor_product(pauli(3), coupling);
    eig_.compute(h);
}

DensityOperator DephasingOracle::evolve(const DensityOperator& rho_sb, double t) const {
    if (rho_sb.dim() != 2 * d_bath_)
        throw std::invalid_argument("dephasing oracle: joint dimension mismatch");
    Vec phases(eig_.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        phases(i) = std::exp(cplx(0, -t) * eig_.eigenvalues()(i));
    Mat u = eig_.eigenvectors() * phases.asDiagonal() * eig_.eigenvectors().adjoint();
    Mat rho_s = partial_trace(u * rho_sb.rho * u.adjoint(), 2, d_bath_, Keep::system);
    // Same interaction picture as the analytic route: rotate out the qubit gap.
    rho_s(0, 1) *= std::exp(cplx(0, spec_.eps * t));
    rho_s(1, 0) = std::conj(rho_s(0, 1));
    return DensityOperator::checked(std::move(rho_s), 1e-8);
}

}  // namespace bplus
