#include "bplus/rng.hpp"

#include <cmath>

namespace bplus {

double Rng::normal() {
    // Box-Muller; discard the sine branch so each call consumes exactly two
    // uniforms and the stream stays position-stable.
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) {
    Rng mix(seed ^ 0xa0761d6478bd642fULL);
    mix.state ^= mix.next_u64() + a * 0xe7037ed1a0b428dbULL;
    mix.state ^= mix.next_u64() + b * 0x8ebc6af09c88c6e3ULL;
    mix.state ^= mix.next_u64() + c * 0x589965cc75374cc3ULL;
    return mix.next_u64();
}

Mat random_ginibre(int rows, int cols, Rng& rng) {
    Mat g(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) g(i, j) = rng.normal_cplx();
    return g;
}

Mat random_unitary(int d, Rng& rng) {
    Mat g = random_ginibre(d, d, rng);
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the phase ambiguity so the distribution is Haar.
    for (int j = 0; j < d; ++j) {
        cplx rjj = r(j, j);
        cplx phase = (std::abs(rjj) > 0.0) ? rjj / std::abs(rjj) : cplx(1.0, 0.0);
        q.col(j) *= phase;
    }
    return q;
}

Mat random_hermitian(int d, Rng& rng) {
    Mat g = random_ginibre(d, d, rng);
    return (g + g.adjoint()) / 2.0;
}

Mat random_density_matrix(int d, Rng& rng) {
    Mat g = random_ginibre(d, d, rng);
    Mat rho = g * g.adjoint();
    return rho / rho.trace();
}

Vec random_pure_state(int d, Rng& rng) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v(i) = rng.normal_cplx();
    return v / v.norm();
}

}  // namespace bplus
