#include <doctest.h>

#include "bplus/lat.hpp"
#include "helpers.hpp"

using namespace bplus;

namespace {

LatConfig noiseless(LatMenu menu, std::uint64_t seed = 0) {
    LatConfig config = dipolar3q_preset(menu, seed);
    config.noise = {0.0, 0.0, 1};
    return config;
}

}  // namespace

TEST_CASE("dipolar Hamiltonian construction") {
    SUBCASE("fields only: diagonal") {
        LatConfig config = dipolar3q_preset(LatMenu::one_resonance_x, 0);
        for (auto& bond : config.bonds) bond.g[0] = bond.g[1] = bond.g[2] = 0.0;
        Mat h = build_dipolar_hamiltonian(config);
        CHECK((h - Mat(h.diagonal().asDiagonal())).norm() < 1e-14);
        CHECK(h(0, 0).real() == doctest::Approx(0.0 + 1.0 + 3.0));
    }

    SUBCASE("frozen eigenvalue fixture for the stock parameters") {
        Mat h = build_dipolar_hamiltonian(dipolar3q_preset(LatMenu::full, 0));
        Eigen::SelfAdjointEigenSolver<Mat> es(h);
        const double expected[8] = {-6.251367938540238, -3.397933998027396,
                                    -2.414308107257306, -1.990000000000000,
                                    0.469081815290747,  2.655676045797541,
                                    4.918852182736652,  6.010000000000000};
        for (int i = 0; i < 8; ++i)
            CHECK(es.eigenvalues()(i) == doctest::Approx(expected[i]).epsilon(1e-12));
    }

    SUBCASE("uniform couplings without fields commute with total spin") {
        LatConfig config = dipolar3q_preset(LatMenu::one_resonance_x, 0);
        for (auto& bond : config.bonds) bond.g[0] = bond.g[1] = bond.g[2] = 0.5;
        config.local_fields = {0.0, 0.0, 0.0};
        Mat h = build_dipolar_hamiltonian(config);
        for (int axis = 1; axis <= 3; ++axis) {
            Mat total = Mat::Zero(8, 8);
            for (int q = 0; q < 3; ++q) {
                Mat op = Mat::Identity(1, 1);
                for (int k = 0; k < 3; ++k)
                    op = tensor_product(op, k == q ? pauli(axis) : Mat::Identity(2, 2));
                total += op;
            }
            CHECK((h * total - total * h).norm() < 1e-12);
        }
    }
}

TEST_CASE("preparation maps") {
    std::vector<PreparationMap> maps = preparation_maps();
    REQUIRE(maps.size() == 36);

    // (+z -> +z) on |0><0| keeps the state with certainty.
    Mat zero = Mat::Zero(2, 2);
    zero(0, 0) = 1;
    const PreparationMap* zz = nullptr;
    const PreparationMap* z_flip = nullptr;
    for (const auto& m : maps) {
        if (m.from_axis == 3 && m.from_sign > 0 && m.to_axis == 3 && m.to_sign > 0) zz = &m;
        if (m.from_axis == 3 && m.from_sign > 0 && m.to_axis == 3 && m.to_sign < 0) z_flip = &m;
    }
    REQUIRE(zz != nullptr);
    CHECK((zz->op.apply(zero) - zero).norm() < 1e-14);

    // (+z -> -z) applied to 1/2 yields |1><1| with probability 1/2.
    REQUIRE(z_flip != nullptr);
    Mat out = z_flip->op.apply(Mat(0.5 * Mat::Identity(2, 2)));
    CHECK(out.trace().real() == doctest::Approx(0.5));
    Mat one = Mat::Zero(2, 2);
    one(1, 1) = 1;
    CHECK((out / out.trace() - one).norm() < 1e-14);

    // The 36 superoperators span the full 16-dimensional operation space.
    std::vector<Mat> superops;
    for (const auto& m : maps) superops.push_back(m.op.op.m);
    CHECK(rank_of_span(superops, 1e-10) == 16);
}

TEST_CASE("simulated expectations") {
    SUBCASE("prepared +z measured immediately in sigma_z gives +1") {
        LatConfig config = noiseless(LatMenu::one_resonance_x);
        config.probe_time = 0.0;
        config.sequences = {free_evolution(1e-9)};
        PreparationMap prep;  // +z -> +z is the default-constructed map
        ExpectationRecord rec = simulate_expectation(config, prep, 0, 3);
        CHECK(rec.noiseless == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(rec.measured == rec.noiseless);
    }

    SUBCASE("decoupled probe precesses freely") {
        LatConfig config = noiseless(LatMenu::one_resonance_x);
        for (auto& bond : config.bonds)
            if (bond.i == 1) bond.g[0] = bond.g[1] = bond.g[2] = 0.0;
        config.local_fields = {0.7, 1.0, 3.0};
        config.probe_time = 0.0;
        const double t_free = 0.9;
        config.sequences = {free_evolution(t_free)};
        PreparationMap prep;
        prep.from_axis = 3;
        prep.from_sign = +1;
        prep.to_axis = 1;
        prep.to_sign = +1;  // prepare |+x>
        Vec plus = probe_eigenstate(1, +1);
        prep.op = LocalOperation::from_kraus(
            2, {Mat(plus * probe_eigenstate(3, +1).adjoint())});
        // H_S = 0.7 sz: <sx>(t) = cos(2*0.7*t), <sy>(t) = sin(2*0.7*t).
        ExpectationRecord ex = simulate_expectation(config, prep, 0, 1);
        ExpectationRecord ey = simulate_expectation(config, prep, 0, 2);
        CHECK(ex.noiseless == doctest::Approx(std::cos(1.4 * t_free)).epsilon(1e-10));
        CHECK(ey.noiseless == doctest::Approx(std::sin(1.4 * t_free)).epsilon(1e-10));
    }

    SUBCASE("noisy averages concentrate around the noiseless value") {
        LatConfig config = dipolar3q_preset(LatMenu::one_resonance_x, 7);
        config.noise = {0.0, 0.1, 100};
        PreparationMap prep;
        ExpectationRecord rec = simulate_expectation(config, prep, 0, 3);
        double sigma_mean = std::sqrt(0.1 / 100.0);
        CHECK(std::abs(rec.measured - rec.noiseless) < 5.0 * sigma_mean);
    }
}

TEST_CASE("assemble_solve") {
    SUBCASE("noiseless factorisable truth recovers the bath moments") {
        LatConfig config = noiseless(LatMenu::two_resonance_x, 3);
        // Product state handed over at the moment control starts.
        Rng rng(5);
        Mat rho_s = random_density_matrix(2, rng);
        Mat rho_b = random_density_matrix(4, rng);
        config.initial_state = DensityOperator::checked(tensor_product(rho_s, rho_b));
        config.probe_time = 0.0;
        std::vector<ExpectationRecord> records;
        std::vector<PreparationMap> preps = preparation_maps();
        for (int p = 0; p < 36; ++p)
            for (int s = 0; s < static_cast<int>(config.sequences.size()); ++s)
                for (int o = 1; o <= 3; ++o)
                    records.push_back(simulate_expectation(config, preps[p], s, o));
        SolveResult solved = assemble_solve(config, records, LatMode::factorisable);
        const Mat& truth = rho_b;
        HermitianBasis basis = hermitian_basis(4);
        for (int j = 0; j < 16; ++j) {
            double expect = (truth * basis.elements[j]).trace().real();
            CHECK(solved.solution(j) == doctest::Approx(expect).epsilon(1e-8));
        }
        CHECK((solved.rho_tilde - truth).norm() < 1e-8);
    }

    SUBCASE("pathological z-only coupling is reported unidentifiable") {
        LatConfig config = noiseless(LatMenu::one_resonance_x, 1);
        for (auto& bond : config.bonds) {
            if (bond.i == 1) {
                bond.g[0] = 0.0;
                bond.g[1] = 0.0;  // probe couples through sz only
            }
        }
        config.sequences = {free_evolution(2.0)};
        std::vector<ExpectationRecord> records;
        std::vector<PreparationMap> preps = preparation_maps();
        for (int p = 0; p < 36; ++p)
            for (int o = 1; o <= 3; ++o)
                records.push_back(simulate_expectation(config, preps[p], 0, o));
        try {
            assemble_solve(config, records, LatMode::correlated);
            FAIL("expected unidentifiable_error");
        } catch (const unidentifiable_error& e) {
            CHECK_FALSE(e.columns.empty());
        }
    }
}

TEST_CASE("noiseless end-to-end runs recover the joint state") {
    for (LatMenu menu : {LatMenu::one_resonance_x, LatMenu::full}) {
        LatConfig config = noiseless(menu, 11);
        EstimationResult result = run_lat(config);
        CHECK(result.fidelity_joint >= 1.0 - 1e-6);
        CHECK(result.design_rank == 64);
        // Exact-transport invariance of the fidelity.
        CHECK(std::abs(result.fidelity_joint_t0 - result.fidelity_joint) < 1e-10);
    }
}

TEST_CASE("conditioning improves along the menu ladder") {
    auto cond_of = [](LatMenu menu) {
        LatConfig config = noiseless(menu, 2);
        return run_lat(config).condition_number;
    };
    double c1 = cond_of(LatMenu::one_resonance_x);
    double c2 = cond_of(LatMenu::two_resonance_x);
    double c3 = cond_of(LatMenu::full);
    CHECK(c1 > c2);
    CHECK(c2 > c3);
}

TEST_CASE("recovered per-component moments reproduce unprepared expectations") {
    // eQSP consistency: the solved unknowns re-synthesize the expectation of
    // the plain (no preparation) evolution on noiseless data.
    LatConfig config = noiseless(LatMenu::full, 13);
    std::vector<ExpectationRecord> records;
    std::vector<PreparationMap> preps = preparation_maps();
    for (int p = 0; p < 36; ++p)
        for (int s = 0; s < static_cast<int>(config.sequences.size()); ++s)
            for (int o = 1; o <= 3; ++o)
                records.push_back(simulate_expectation(config, preps[p], s, o));
    SolveResult solved = assemble_solve(config, records, LatMode::correlated);

    Mat h = build_dipolar_hamiltonian(config);
    Mat u_t1 = expm_hermitian(h, cplx(0, -config.probe_time));
    Mat rho_t1 = u_t1 * config.initial_state.rho * u_t1.adjoint();
    CHECK((solved.rho_tilde - rho_t1).norm() < 1e-7);

    const auto& seq = config.sequences[1];
    Mat u_seq = pulsed_propagator(h, 2, seq, seq.total_time());
    for (int obs = 1; obs <= 3; ++obs) {
        Mat o_joint = tensor_product(pauli(obs), Mat::Identity(4, 4));
        double direct = (o_joint * u_seq * rho_t1 * u_seq.adjoint()).trace().real();
        double synth = (o_joint * u_seq * solved.rho_tilde * u_seq.adjoint()).trace().real();
        CHECK(synth == doctest::Approx(direct).epsilon(1e-7));
    }
}
