#include "bplus/retro.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "bplus/parallel.hpp"
#include "bplus/rng.hpp"

namespace bplus {

std::vector<SuperOperator> backward_maps(const BPlusDecomposition& decomp,
                                         const PiecewiseHamiltonian& history, double t_minus) {
    const double duration = history.total_duration();
    if (t_minus < -duration - 1e-12 || t_minus > 1e-12)
        throw std::invalid_argument("backward_maps: T- outside [T0, 0]");
    // history covers [T0, 0] in forward order; the forward propagator from T-
    // to 0 is the suffix of the segment chain starting at offset T- - T0.
    const double start = duration + t_minus;
    const Eigen::Index dim = history.segments.front().h.rows();
    Mat forward = Mat::Identity(dim, dim);
    double now = 0.0;
    for (const auto& seg : history.segments) {
        double seg_end = now + seg.duration;
        if (seg_end > start + 1e-15) {
            double dt = seg_end - std::max(now, start);
            forward = expm_hermitian(seg.h, cplx(0, -dt)) * forward;
        }
        now = seg_end;
    }
    Mat backward = forward.adjoint();

    std::vector<SuperOperator> maps;
    maps.reserve(static_cast<std::size_t>(decomp.size()));
    for (int a = 0; a < decomp.size(); ++a) {
        if (decomp.bath_states[static_cast<std::size_t>(a)])
            maps.push_back(induced_map(backward, *decomp.bath_states[static_cast<std::size_t>(a)],
                                       decomp.d_sys));
        else
            maps.push_back(SuperOperator::identity(decomp.d_sys));
    }
    return maps;
}

namespace {

std::vector<double> gap_tuple(std::vector<double> times) {
    std::sort(times.begin(), times.end());
    std::vector<double> gaps;
    gaps.reserve(times.size() - 1);
    for (std::size_t i = 0; i + 1 < times.size(); ++i) gaps.push_back(times[i + 1] - times[i]);
    return gaps;
}

long long quantize(double x) { return std::llround(x * 1e9); }

std::vector<long long> quantized_gaps(const std::vector<double>& times) {
    std::vector<long long> q;
    for (double g : gap_tuple(times)) q.push_back(quantize(g));
    return q;
}

}  // namespace

bool is_stationary(const CorrelatorTable& table, double match_tol) {
    std::map<std::vector<long long>, std::vector<cplx>> groups;
    for (std::size_t i = 0; i < table.time_tuples.size(); ++i)
        groups[quantized_gaps(table.time_tuples[i])].push_back(table.values[i]);
    double scale = 0.0;
    for (const auto& v : table.values) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return true;
    for (const auto& [gaps, values] : groups) {
        cplx mean = 0.0;
        for (const auto& v : values) mean += v;
        mean /= static_cast<double>(values.size());
        for (const auto& v : values)
            if (std::abs(v - mean) > match_tol * scale) return false;
    }
    return true;
}

cplx correlator_lookup(const CorrelatorTable& table, std::vector<double> times) {
    if (static_cast<int>(times.size()) != table.order)
        throw std::invalid_argument("correlator_lookup: wrong tuple order");
    std::vector<double> gaps = gap_tuple(std::move(times));

    if (table.order == 2) {
        // Pool equal-gap samples, then interpolate linearly on the gap grid.
        std::map<long long, std::pair<cplx, int>> pooled;
        for (std::size_t i = 0; i < table.time_tuples.size(); ++i) {
            auto& slot = pooled[quantized_gaps(table.time_tuples[i])[0]];
            slot.first += table.values[i];
            slot.second += 1;
        }
        std::vector<std::pair<double, cplx>> grid;
        grid.reserve(pooled.size());
        for (const auto& [qg, acc] : pooled)
            grid.emplace_back(static_cast<double>(qg) * 1e-9,
                              acc.first / static_cast<double>(acc.second));
        double g = gaps[0];
        if (g < grid.front().first - 1e-9 || g > grid.back().first + 1e-9)
            throw numeric_error("correlator_lookup: gap outside sampled range");
        auto hi = std::lower_bound(grid.begin(), grid.end(), g,
                                   [](const auto& entry, double x) { return entry.first < x; });
        if (hi == grid.begin()) return grid.front().second;
        if (hi == grid.end()) return grid.back().second;
        auto lo = std::prev(hi);
        double span = hi->first - lo->first;
        double w = (span > 0.0) ? (g - lo->first) / span : 0.0;
        return (1.0 - w) * lo->second + w * hi->second;
    }

    std::vector<long long> target;
    for (double g : gaps) target.push_back(quantize(g));
    for (std::size_t i = 0; i < table.time_tuples.size(); ++i)
        if (quantized_gaps(table.time_tuples[i]) == target) return table.values[i];
    throw numeric_error("correlator_lookup: gap tuple outside sampled set");
}

CorrelatorTable stationary_extrapolate(const CorrelatorTable& table, double match_tol) {
    if (!is_stationary(table, match_tol))
        throw numeric_error("stationary_extrapolate: table is not stationary");
    CorrelatorTable extended = table;
    for (std::size_t i = 0; i < table.time_tuples.size(); ++i) {
        std::vector<double> sorted = table.time_tuples[i];
        std::sort(sorted.begin(), sorted.end());
        double last = sorted.back();
        std::vector<double> mirrored;
        mirrored.reserve(sorted.size());
        for (double t : sorted) mirrored.push_back(t - last);  // ends at 0, same gaps
        extended.time_tuples.push_back(std::move(mirrored));
        extended.values.push_back(table.values[i]);
    }
    return extended;
}

std::vector<double> ou_trajectory(const StationaryNoiseModel& model, double dt, int steps,
                                  std::uint64_t stream) {
    if (model.gamma <= 0.0) throw std::invalid_argument("ou: gamma must be > 0");
    if (model.s2 < 0.0) throw std::invalid_argument("ou: variance must be >= 0");
    Rng rng(stream);
    std::vector<double> b(static_cast<std::size_t>(steps) + 1);
    double decay = std::exp(-model.gamma * dt);
    double kick = std::sqrt(model.s2 * (1.0 - decay * decay));
    b[0] = std::sqrt(model.s2) * rng.normal();
    for (int k = 1; k <= steps; ++k) b[static_cast<std::size_t>(k)] = decay * b[k - 1] + kick * rng.normal();
    return b;
}

RetroDemoResult classical_retrodiction_demo(const StationaryNoiseModel& model,
                                            const DensityOperator& rho0, double horizon,
                                            int trajectories, double t_minus, int jobs) {
    if (rho0.dim() != 2) throw std::invalid_argument("retro demo: qubit state required");
    if (t_minus > 0.0 || -t_minus > horizon)
        throw std::invalid_argument("retro demo: need T- in [-T, 0]");
    if (trajectories < 100)
        throw numeric_error("retro demo: insufficient trajectories for a stable estimate");

    const double dt = 0.05;
    const int steps = static_cast<int>(std::ceil(horizon / dt));
    const int n = steps + 1;
    const double c0 = std::abs(rho0.rho(0, 1));
    constexpr int kBlocks = 10;

    // Forward phase: pooled two-time correlator estimate on the grid, split
    // into blocks for a Monte Carlo error estimate.
    // One contiguous trajectory range per block, each accumulated serially in
    // index order: the reduction is bit-identical for any thread count.
    std::vector<RealMat> block_acc(kBlocks, RealMat::Zero(n, n));
    std::vector<int> block_count(kBlocks, 0);
    parallel_for(jobs, kBlocks, [&](int bl) {
        int lo = bl * trajectories / kBlocks;
        int hi = (bl + 1) * trajectories / kBlocks;
        block_count[static_cast<std::size_t>(bl)] = hi - lo;
        RealMat& target = block_acc[static_cast<std::size_t>(bl)];
        for (int traj = lo; traj < hi; ++traj) {
            std::vector<double> b =
                ou_trajectory(model, dt, steps, derive_seed(model.seed, 0xf0, traj));
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j)
                    target(i, j) += b[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
        }
    });
    RealMat pooled = RealMat::Zero(n, n);
    for (const auto& blockm : block_acc) pooled += blockm;
    pooled /= static_cast<double>(trajectories);

    // Gap-pooled correlator and a thinned two-time sample table.
    RealVec gap_mean = RealVec::Zero(n);
    for (int g = 0; g < n; ++g) {
        double sum = 0.0;
        for (int i = 0; i + g < n; ++i) sum += pooled(i, i + g);
        gap_mean(g) = sum / static_cast<double>(n - g);
    }
    RetroDemoResult result;
    result.table.order = 2;
    result.table.horizon = horizon;
    result.table.labels = {"B", "B"};
    const int thin = std::max(1, n / 40);
    for (int i = 0; i < n; i += thin)
        for (int j = i; j < n; j += thin) {
            result.table.time_tuples.push_back({i * dt, j * dt});
            result.table.values.push_back(pooled(i, j));
        }

    // Retrodiction: Gaussian decoherence integral over [T-, 0] using the
    // extrapolated (stationary) correlator, trapezoid weights.
    const int back_steps = static_cast<int>(std::ceil(-t_minus / dt));
    auto exponent_from = [&](const RealVec& gaps) {
        double integral = 0.0;
        for (int i = 0; i <= back_steps; ++i) {
            for (int j = 0; j <= back_steps; ++j) {
                int g = std::abs(i - j);
                double w = ((i == 0 || i == back_steps) ? 0.5 : 1.0) *
                           ((j == 0 || j == back_steps) ? 0.5 : 1.0);
                integral += w * gaps(std::min(g, n - 1));
            }
        }
        return integral * dt * dt / 2.0;
    };
    result.retrodicted_coherence = c0 * std::exp(-exponent_from(gap_mean));

    // Block-wise exponents give the MC error estimate.
    double block_mean = 0.0, block_var = 0.0;
    std::vector<double> block_vals;
    for (int bl = 0; bl < kBlocks; ++bl) {
        RealMat bm = block_acc[static_cast<std::size_t>(bl)] /
                     static_cast<double>(block_count[static_cast<std::size_t>(bl)]);
        RealVec gaps = RealVec::Zero(n);
        for (int g = 0; g < n; ++g) {
            double sum = 0.0;
            for (int i = 0; i + g < n; ++i) sum += bm(i, i + g);
            gaps(g) = sum / static_cast<double>(n - g);
        }
        block_vals.push_back(c0 * std::exp(-exponent_from(gaps)));
    }
    for (double v : block_vals) block_mean += v;
    block_mean /= kBlocks;
    for (double v : block_vals) block_var += (v - block_mean) * (v - block_mean);
    double mc_se = std::sqrt(block_var / (kBlocks - 1)) / std::sqrt(static_cast<double>(kBlocks));

    // Closed-form truth for the OU double integral over an interval of length tau.
    const double tau = -t_minus;
    double closed_exponent =
        model.s2 * (model.gamma * tau - 1.0 + std::exp(-model.gamma * tau)) /
        (model.gamma * model.gamma);
    result.truth_closed_form = c0 * std::exp(-closed_exponent);

    // Independent backward Monte Carlo ground truth on [T-, 0].
    std::vector<cplx> phase_blocks(kBlocks, cplx(0, 0));
    parallel_for(jobs, kBlocks, [&](int bl) {
        int lo = bl * trajectories / kBlocks;
        int hi = (bl + 1) * trajectories / kBlocks;
        cplx acc = 0.0;
        for (int traj = lo; traj < hi; ++traj) {
            std::vector<double> b =
                ou_trajectory(model, dt, back_steps, derive_seed(model.seed, 0xba, traj));
            double phi = 0.0;
            for (int i = 0; i < back_steps; ++i)
                phi += 0.5 * (b[static_cast<std::size_t>(i)] + b[static_cast<std::size_t>(i) + 1]) * dt;
            acc += std::exp(cplx(0, -phi));
        }
        phase_blocks[static_cast<std::size_t>(bl)] = acc;
    });
    cplx phase_acc = 0.0;
    for (const auto& p : phase_blocks) phase_acc += p;
    result.truth_monte_carlo = c0 * std::abs(phase_acc) / static_cast<double>(trajectories);

    result.relative_error =
        std::abs(result.retrodicted_coherence - result.truth_closed_form) /
        result.truth_closed_form;
    if (mc_se > 0.2 * result.retrodicted_coherence)
        throw numeric_error("retro demo: Monte Carlo error estimate too large, add trajectories");
    return result;
}

}  // namespace bplus
