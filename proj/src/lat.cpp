#include "bplus/lat.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "bplus/parallel.hpp"
#include "bplus/rng.hpp"

namespace bplus {

namespace {

// Operator s_a on qubit `q` (0-based) of an n-qubit register.
Mat single_site(int n_qubits, int q, int axis) {
    Mat out = (q == 0) ? pauli(axis) : Mat::Identity(2, 2);
    for (int k = 1; k < n_qubits; ++k)
        out = tensor_product(out, (k == q) ? pauli(axis) : Mat::Identity(2, 2));
    return out;
}

struct ExperimentGrid {
    std::vector<PreparationMap> preps;
    int n_seq = 0;
    static constexpr int n_obs = 3;

    int rows() const { return static_cast<int>(preps.size()) * n_seq * n_obs; }
    // Row layout: prep-major, then sequence, then observable.
    std::tuple<int, int, int> unpack(int row) const {
        int obs = row % n_obs;
        int rest = row / n_obs;
        int seq = rest % n_seq;
        int prep = rest / n_seq;
        return {prep, seq, obs + 1};
    }
};

// Precomputed propagators and bath-side effective observables shared by the
// simulation and the design-matrix assembly, so both use identical exact
// propagators.
struct Engine {
    const LatConfig* config;
    Mat h;
    Mat u_t1;
    Mat rho_t1;    // truth at T1
    Mat rho_s_t1;  // probe marginal at T1
    // beta[seq][(obs-1)*6 + b] = Tr_S[(|b><b| (x) 1) U^dag (s_obs (x) 1) U]
    std::vector<std::vector<Mat>> beta;
    std::vector<Vec> axis_states;  // the six +-x, +-y, +-z eigenstates
    std::vector<Mat> eta;          // <a|rho(T1)|a> bath operators per state
    std::vector<double> prob;      // Tr[eta_a]

    explicit Engine(const LatConfig& cfg) : config(&cfg) {
        cfg.validate();
        const int d_b = cfg.bath_dim();
        h = build_dipolar_hamiltonian(cfg);
        Eigen::SelfAdjointEigenSolver<Mat> es(h);
        Vec phases(h.rows());
        for (Eigen::Index i = 0; i < h.rows(); ++i)
            phases(i) = std::exp(cplx(0, -cfg.probe_time) * es.eigenvalues()(i));
        u_t1 = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
        rho_t1 = u_t1 * cfg.initial_state.rho * u_t1.adjoint();
        rho_s_t1 = partial_trace(rho_t1, 2, d_b, Keep::system);

        for (int axis = 1; axis <= 3; ++axis)
            for (int sign : {+1, -1}) axis_states.push_back(probe_eigenstate(axis, sign));
        for (const auto& state : axis_states) {
            Mat proj = state * state.adjoint();
            Mat e = partial_trace(tensor_product(proj, Mat::Identity(d_b, d_b)) * rho_t1, 2,
                                  d_b, Keep::bath);
            prob.push_back(e.trace().real());
            eta.push_back(std::move(e));
        }

        beta.resize(cfg.sequences.size());
        for (std::size_t s = 0; s < cfg.sequences.size(); ++s) {
            const auto& seq = cfg.sequences[s];
            Mat u = pulsed_propagator(h, 2, seq, seq.total_time());
            beta[s].resize(3 * 6);
            for (int obs = 1; obs <= 3; ++obs) {
                Mat o_eff =
                    u.adjoint() * tensor_product(pauli(obs), Mat::Identity(d_b, d_b)) * u;
                for (int b = 0; b < 6; ++b) {
                    Mat proj = axis_states[b] * axis_states[b].adjoint();
                    beta[s][(obs - 1) * 6 + b] = partial_trace(
                        tensor_product(proj, Mat::Identity(d_b, d_b)) * o_eff, 2, d_b,
                        Keep::bath);
                }
            }
        }
    }

    int state_index(int axis, int sign) const { return (axis - 1) * 2 + (sign > 0 ? 0 : 1); }

    ExpectationRecord run(const ExperimentGrid& grid, int row) const {
        auto [p_idx, s_idx, obs] = grid.unpack(row);
        const auto& prep = grid.preps[static_cast<std::size_t>(p_idx)];
        ExpectationRecord rec;
        rec.prep = p_idx;
        rec.seq = s_idx;
        rec.obs = obs;
        int a = state_index(prep.from_axis, prep.from_sign);
        int b = state_index(prep.to_axis, prep.to_sign);
        rec.probability = prob[static_cast<std::size_t>(a)];
        if (rec.probability <= 1e-9)
            throw numeric_error("simulate_expectation: preparation has zero probability");
        double raw =
            (beta[static_cast<std::size_t>(s_idx)][(obs - 1) * 6 + b] * eta[static_cast<std::size_t>(a)])
                .trace()
                .real();
        rec.noiseless = raw / rec.probability;
        rec.realizations.reserve(static_cast<std::size_t>(config->noise.realizations));
        double acc = 0.0;
        for (int r = 0; r < config->noise.realizations; ++r) {
            Rng rng(derive_seed(config->seed, static_cast<std::uint64_t>(row),
                                static_cast<std::uint64_t>(r)));
            double draw = rec.noiseless + config->noise.mean +
                          std::sqrt(config->noise.variance) * rng.normal();
            rec.realizations.push_back(draw);
            acc += draw;
        }
        rec.measured = acc / config->noise.realizations;
        return rec;
    }
};

std::string axis_name(int axis) { return axis == 1 ? "x" : (axis == 2 ? "y" : "z"); }

SolveResult solve_system(const LatConfig& config, const Engine& engine,
                         const std::vector<ExpectationRecord>& records, LatMode mode) {
    const int d_b = config.bath_dim();
    const int n_bath_ops = d_b * d_b;
    HermitianBasis basis = hermitian_basis(d_b);
    CanonicalPOVM sic = qubit_sic_frame();
    ExperimentGrid grid{preparation_maps(), static_cast<int>(config.sequences.size())};

    const bool correlated = mode == LatMode::correlated;
    const int n_alpha = correlated ? 4 : 1;
    const int cols = n_alpha * n_bath_ops;

    SolveResult result;
    auto& sys = result.system;
    sys.column_labels.reserve(static_cast<std::size_t>(cols));
    for (int a = 0; a < n_alpha; ++a)
        for (int j = 0; j < n_bath_ops; ++j)
            sys.column_labels.push_back(
                correlated ? "w[" + std::to_string(a) + "]*Tr[W" + std::to_string(j) +
                                 " rho_" + std::to_string(a) + "]"
                           : "Tr[W" + std::to_string(j) + " rho_B]");

    const int data_rows = static_cast<int>(records.size());
    const int rows = data_rows + 1;  // + trace normalization
    sys.design = RealMat::Zero(rows, cols);
    sys.observations.resize(rows);

    for (int r = 0; r < data_rows; ++r) {
        const auto& rec = records[static_cast<std::size_t>(r)];
        const auto& prep = grid.preps[static_cast<std::size_t>(rec.prep)];
        int a_state = engine.state_index(prep.from_axis, prep.from_sign);
        int b_state = engine.state_index(prep.to_axis, prep.to_sign);
        const Mat& beta =
            engine.beta[static_cast<std::size_t>(rec.seq)][(rec.obs - 1) * 6 + b_state];
        RealVec beta_coeff(n_bath_ops);
        for (int j = 0; j < n_bath_ops; ++j)
            beta_coeff(j) = (beta * basis.elements[static_cast<std::size_t>(j)]).trace().real();
        if (correlated) {
            const Vec& a_vec = engine.axis_states[static_cast<std::size_t>(a_state)];
            for (int alpha = 0; alpha < 4; ++alpha) {
                double overlap =
                    (a_vec.adjoint() * sic.dual.elements[static_cast<std::size_t>(alpha)] * a_vec)(0)
                        .real();
                for (int j = 0; j < n_bath_ops; ++j)
                    sys.design(r, alpha * n_bath_ops + j) = overlap * beta_coeff(j);
            }
        } else {
            // Product truth: <a|rho_SB|a> = p_a rho_B, so the known preparation
            // probability multiplies the coefficients.
            for (int j = 0; j < n_bath_ops; ++j)
                sys.design(r, j) = rec.probability * beta_coeff(j);
        }
        sys.observations(r) = rec.probability * rec.measured;
    }
    // Normalization row: sum_a w_a = 1 (correlated) or Tr[rho_B] = 1.
    const double root_db = std::sqrt(static_cast<double>(d_b));
    for (int a = 0; a < n_alpha; ++a) sys.design(data_rows, a * n_bath_ops) = root_db;
    sys.observations(data_rows) = 1.0;

    Eigen::BDCSVD<RealMat> svd(sys.design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    double smax = sv(0);
    sys.rank = static_cast<int>((sv.array() > 1e-10 * smax).count());
    if (sys.rank < cols) {
        std::vector<std::string> missing;
        for (Eigen::Index k = sys.rank; k < sv.size(); ++k) {
            RealVec dir = svd.matrixV().col(k);
            double top = dir.cwiseAbs().maxCoeff();
            for (int c = 0; c < cols; ++c)
                if (std::abs(dir(c)) > 0.3 * top)
                    missing.push_back(sys.column_labels[static_cast<std::size_t>(c)]);
        }
        std::sort(missing.begin(), missing.end());
        missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
        throw unidentifiable_error("assemble_solve: menu leaves unknowns unconstrained",
                                   std::move(missing));
    }
    sys.condition_number = smax / sv(sv.size() - 1);
    result.solution = svd.solve(sys.observations);

    if (correlated) {
        result.weights.resize(4);
        Mat rho = Mat::Zero(2 * d_b, 2 * d_b);
        for (int alpha = 0; alpha < 4; ++alpha) {
            result.weights(alpha) = root_db * result.solution(alpha * n_bath_ops);
            Mat eta = Mat::Zero(d_b, d_b);
            for (int j = 0; j < n_bath_ops; ++j)
                eta += result.solution(alpha * n_bath_ops + j) *
                       basis.elements[static_cast<std::size_t>(j)];
            rho += tensor_product(sic.dual.elements[static_cast<std::size_t>(alpha)], eta);
        }
        result.rho_tilde = std::move(rho);
    } else {
        Mat rho = Mat::Zero(d_b, d_b);
        for (int j = 0; j < n_bath_ops; ++j)
            rho += result.solution(j) * basis.elements[static_cast<std::size_t>(j)];
        result.rho_tilde = std::move(rho);
    }
    return result;
}

}  // namespace

void LatConfig::validate() const {
    if (n_qubits < 2) throw std::invalid_argument("lat: need at least two qubits");
    if (static_cast<int>(local_fields.size()) != n_qubits)
        throw std::invalid_argument("lat: one local field per qubit required");
    for (const auto& bond : bonds) {
        if (bond.i < 1 || bond.j <= bond.i || bond.j > n_qubits)
            throw std::invalid_argument("lat: bond indices must satisfy 1 <= i < j <= N");
    }
    if (initial_state.dim() != joint_dim())
        throw std::invalid_argument("lat: initial state dimension mismatch");
    if (noise.variance < 0.0) throw std::invalid_argument("lat: noise variance must be >= 0");
    if (noise.realizations < 1) throw std::invalid_argument("lat: need at least one realization");
    if (probe_time < 0.0) throw std::invalid_argument("lat: probe time must be >= 0");
    if (sequences.empty()) throw std::invalid_argument("lat: empty sequence menu");
}

Mat build_dipolar_hamiltonian(const LatConfig& config) {
    const int n = config.n_qubits;
    const int dim = config.joint_dim();
    Mat h = Mat::Zero(dim, dim);
    for (const auto& bond : config.bonds)
        for (int a = 1; a <= 3; ++a)
            h += bond.g[a - 1] * single_site(n, bond.i - 1, a) * single_site(n, bond.j - 1, a);
    for (int q = 0; q < n; ++q) h += config.local_fields[static_cast<std::size_t>(q)] * single_site(n, q, 3);
    return h;
}

Mat bath_hamiltonian(const LatConfig& config) {
    const int n_bath = config.n_qubits - 1;
    const int dim = config.bath_dim();
    Mat h = Mat::Zero(dim, dim);
    for (const auto& bond : config.bonds) {
        if (bond.i == 1) continue;  // touches the probe
        for (int a = 1; a <= 3; ++a)
            h += bond.g[a - 1] * single_site(n_bath, bond.i - 2, a) *
                 single_site(n_bath, bond.j - 2, a);
    }
    for (int q = 1; q < config.n_qubits; ++q)
        h += config.local_fields[static_cast<std::size_t>(q)] * single_site(n_bath, q - 1, 3);
    return h;
}

std::vector<Mat> probe_coupling_operators(const LatConfig& config) {
    const int n_bath = config.n_qubits - 1;
    const int dim = config.bath_dim();
    std::vector<Mat> ops;
    for (int a = 1; a <= 3; ++a) {
        Mat b = Mat::Zero(dim, dim);
        for (const auto& bond : config.bonds)
            if (bond.i == 1) b += bond.g[a - 1] * single_site(n_bath, bond.j - 2, a);
        ops.push_back(std::move(b));
    }
    return ops;
}

Vec probe_eigenstate(int axis, int sign) {
    Vec v(2);
    const double s = 1.0 / std::sqrt(2.0);
    if (axis == 1)
        v << s, (sign > 0 ? s : -s);
    else if (axis == 2)
        v << s, cplx(0, sign > 0 ? s : -s);
    else if (axis == 3) {
        if (sign > 0)
            v << 1, 0;
        else
            v << 0, 1;
    } else {
        throw std::invalid_argument("probe_eigenstate: axis must be 1..3");
    }
    return v;
}

std::string PreparationMap::label() const {
    auto sgn = [](int s) { return s > 0 ? "+" : "-"; };
    return std::string(sgn(from_sign)) + axis_name(from_axis) + "->" + sgn(to_sign) +
           axis_name(to_axis);
}

std::vector<PreparationMap> preparation_maps() {
    std::vector<PreparationMap> maps;
    maps.reserve(36);
    for (int fa = 1; fa <= 3; ++fa)
        for (int fs : {+1, -1})
            for (int ta = 1; ta <= 3; ++ta)
                for (int ts : {+1, -1}) {
                    PreparationMap m;
                    m.from_axis = fa;
                    m.from_sign = fs;
                    m.to_axis = ta;
                    m.to_sign = ts;
                    Vec a = probe_eigenstate(fa, fs);
                    Vec b = probe_eigenstate(ta, ts);
                    m.op = LocalOperation::from_kraus(2, {Mat(b * a.adjoint())});
                    maps.push_back(std::move(m));
                }
    return maps;
}

ExpectationRecord simulate_expectation(const LatConfig& config, const PreparationMap& prep,
                                       int seq_index, int obs_axis) {
    Engine engine(config);
    ExperimentGrid grid{preparation_maps(), static_cast<int>(config.sequences.size())};
    // Locate the matching prepared row so seeding matches the batch pipeline.
    int p_idx = -1;
    for (std::size_t k = 0; k < grid.preps.size(); ++k) {
        const auto& cand = grid.preps[k];
        if (cand.from_axis == prep.from_axis && cand.from_sign == prep.from_sign &&
            cand.to_axis == prep.to_axis && cand.to_sign == prep.to_sign)
            p_idx = static_cast<int>(k);
    }
    if (p_idx < 0) throw std::invalid_argument("simulate_expectation: unknown preparation");
    int row = (p_idx * grid.n_seq + seq_index) * ExperimentGrid::n_obs + (obs_axis - 1);
    return engine.run(grid, row);
}

SolveResult assemble_solve(const LatConfig& config, const std::vector<ExpectationRecord>& records,
                           LatMode mode) {
    Engine engine(config);
    return solve_system(config, engine, records, mode);
}

EstimationResult run_lat(const LatConfig& config, int jobs) {
    Engine engine(config);
    ExperimentGrid grid{preparation_maps(), static_cast<int>(config.sequences.size())};

    std::vector<ExpectationRecord> records(static_cast<std::size_t>(grid.rows()));
    parallel_for(jobs, grid.rows(), [&](int row) {
        records[static_cast<std::size_t>(row)] = engine.run(grid, row);
    });

    SolveResult solved = solve_system(config, engine, records, LatMode::correlated);

    EstimationResult result;
    result.menu_name = config.menu_name;
    if (config.noise.realizations > 1) {
        double sem_sum = 0.0;
        for (const auto& rec : records) {
            double var = 0.0;
            for (double v : rec.realizations)
                var += (v - rec.measured) * (v - rec.measured);
            var /= (rec.realizations.size() - 1);
            sem_sum += std::sqrt(var / static_cast<double>(rec.realizations.size()));
        }
        result.realization_sem = sem_sum / static_cast<double>(records.size());
    }
    result.rho_tilde = solved.rho_tilde;
    result.rho_bar = closest_psd(solved.rho_tilde);
    result.condition_number = solved.system.condition_number;
    result.design_rank = solved.system.rank;

    DensityOperator truth = DensityOperator::checked(engine.rho_t1);
    result.fidelity_joint = fidelity(result.rho_bar, truth);

    // Probe-only tomography baseline with the identical noise model.
    RealVec bloch(3);
    for (int a = 1; a <= 3; ++a) {
        double exact = (pauli(a) * engine.rho_s_t1).trace().real();
        double acc = 0.0;
        for (int r = 0; r < config.noise.realizations; ++r) {
            Rng rng(derive_seed(config.seed, 0x70726f6265ULL + static_cast<std::uint64_t>(a),
                                static_cast<std::uint64_t>(r)));
            acc += config.noise.mean + std::sqrt(config.noise.variance) * rng.normal();
        }
        bloch(a - 1) = exact + acc / config.noise.realizations;
    }
    Mat rho_probe = Mat::Identity(2, 2);
    for (int a = 1; a <= 3; ++a) rho_probe += bloch(a - 1) * pauli(a);
    rho_probe /= 2.0;
    result.fidelity_probe =
        fidelity(closest_psd(rho_probe), DensityOperator::checked(engine.rho_s_t1));

    // Retrodicted score: pull the estimate back to t = 0 with the exact inverse.
    Mat back = engine.u_t1.adjoint() * result.rho_bar.rho * engine.u_t1;
    result.fidelity_joint_t0 = fidelity(DensityOperator::checked(back), config.initial_state);
    return result;
}

LatConfig dipolar3q_preset(LatMenu menu, std::uint64_t seed, int repetitions_full,
                           int repetitions_base) {
    LatConfig config;
    config.n_qubits = 3;
    LatConfig::Bond b12;
    b12.i = 1;
    b12.j = 2;
    b12.g[0] = b12.g[1] = b12.g[2] = 1.0;
    LatConfig::Bond b23;
    b23.i = 2;
    b23.j = 3;
    b23.g[0] = b23.g[1] = b23.g[2] = 1.0;
    LatConfig::Bond b13;
    b13.i = 1;
    b13.j = 3;
    b13.g[0] = b13.g[1] = b13.g[2] = 0.01;
    config.bonds = {b12, b23, b13};
    config.local_fields = {0.0, 1.0, 3.0};

    // W state measured in sigma_z on the probe:
    // 2/3 |0><0| (x) |phi+><phi+| + 1/3 |1><1| (x) |00><00|.
    Vec phi_plus(4);
    phi_plus << 0, 1, 1, 0;
    phi_plus /= std::sqrt(2.0);
    Vec zero_zero(4);
    zero_zero << 1, 0, 0, 0;
    Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    Mat rho = (2.0 / 3.0) * tensor_product(p0, Mat(phi_plus * phi_plus.adjoint())) +
              (1.0 / 3.0) * tensor_product(p1, Mat(zero_zero * zero_zero.adjoint()));
    config.initial_state = DensityOperator::checked(std::move(rho));

    config.probe_time = 1.0;
    config.noise = {0.0, 0.1, 100};
    config.seed = seed;

    // Resonances of the bath block, strongest transitions first.
    ResonanceSet res =
        resonance_frequencies(bath_hamiltonian(config), probe_coupling_operators(config));
    std::vector<ResonanceSet::Line> lines = res.lines;
    std::sort(lines.begin(), lines.end(),
              [](const auto& a, const auto& b) { return a.weight > b.weight; });
    if (lines.size() < 2) throw numeric_error("dipolar3q_preset: expected two resonances");
    double tc1 = 2.0 * M_PI / lines[0].frequency;
    double tc2 = 2.0 * M_PI / lines[1].frequency;

    const double free_time = 2.0;
    config.sequences = {free_evolution(free_time)};
    switch (menu) {
        case LatMenu::one_resonance_x:
            config.menu_name = "one_resonance_x";
            config.sequences.push_back(cpmg_sequence(tc1, repetitions_base, 1));
            break;
        case LatMenu::two_resonance_x:
            config.menu_name = "two_resonance_x";
            config.sequences.push_back(cpmg_sequence(tc1, repetitions_base, 1));
            config.sequences.push_back(cpmg_sequence(tc2, repetitions_base, 1));
            break;
        case LatMenu::full:
            config.menu_name = "full";
            for (int axis = 1; axis <= 3; ++axis) {
                config.sequences.push_back(cpmg_sequence(tc1, repetitions_full, axis));
                config.sequences.push_back(cpmg_sequence(tc2, repetitions_full, axis));
                config.sequences.push_back(cpmg_sequence(tc1, repetitions_base, axis));
                config.sequences.push_back(cpmg_sequence(tc2, repetitions_base, axis));
            }
            break;
    }
    return config;
}

}  // namespace bplus
