// rng.hpp — Deterministic, schedule-independent random streams.
//
// Every stochastic routine in the toolkit derives its stream from a 64-bit
// seed plus structured indices (experiment, realization, trajectory), so
// results are bit-identical regardless of the parallelism degree.

#pragma once

#include <cstdint>

#include "bplus/common.hpp"

namespace bplus {

// splitmix64: tiny, well-mixed, stable across platforms.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller (cached second draw not kept: one
    // transcendental pair per sample keeps the stream position obvious).
    double normal();

    cplx normal_cplx() { return {normal(), normal()}; }
};

// Derive an independent stream from (seed, indices...) without consuming the
// parent stream; used to make parallel grids schedule-independent.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

Mat random_ginibre(int rows, int cols, Rng& rng);
Mat random_unitary(int d, Rng& rng);
Mat random_hermitian(int d, Rng& rng);       // Gaussian entries, norm O(d)
Mat random_density_matrix(int d, Rng& rng);  // full-rank mixed state
Vec random_pure_state(int d, Rng& rng);

}  // namespace bplus
