#include <doctest.h>

#include "bplus/control.hpp"
#include "bplus/rng.hpp"
#include "helpers.hpp"

using namespace bplus;

TEST_CASE("cpmg sequence structure") {
    PulseSequence seq = cpmg_sequence(2.0, 1, 1);
    REQUIRE(seq.pulses.size() == 2);
    CHECK(seq.pulses[0].offset == doctest::Approx(0.5));
    CHECK(seq.pulses[1].offset == doctest::Approx(1.5));

    PulseSequence three = cpmg_sequence(2.0, 3, 2);
    std::vector<double> times = three.pulse_times();
    REQUIRE(times.size() == 6);
    CHECK(times[2] == doctest::Approx(2.5));
    CHECK(times[5] == doctest::Approx(5.5));
}

TEST_CASE("switching functions") {
    SUBCASE("no pulses: identity frame") {
        SwitchingFunctions y = switching_functions(free_evolution(1.0));
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                CHECK(y.at(0.5)(a, b) == doctest::Approx(a == b ? 1.0 : 0.0));
    }

    SUBCASE("pi-x pulse flips y_zz") {
        PulseSequence seq;
        seq.cycle_time = 1.0;
        seq.repetitions = 1;
        seq.pulses = {{0.4, 1}};
        SwitchingFunctions y = switching_functions(seq);
        CHECK(y.at(0.2)(3, 3) == doctest::Approx(1.0));
        CHECK(y.at(0.7)(3, 3) == doctest::Approx(-1.0));
        CHECK(y.at(0.7)(1, 1) == doctest::Approx(1.0));  // x component survives
    }

    SUBCASE("CPMG toggling is the textbook square wave") {
        SwitchingFunctions y = switching_functions(cpmg_sequence(2.0, 2, 1));
        CHECK(y.at(0.25)(3, 3) == doctest::Approx(1.0));
        CHECK(y.at(1.0)(3, 3) == doctest::Approx(-1.0));
        CHECK(y.at(1.8)(3, 3) == doctest::Approx(1.0));
        CHECK(y.at(2.25)(3, 3) == doctest::Approx(1.0));
        CHECK(y.at(3.0)(3, 3) == doctest::Approx(-1.0));
    }

    SUBCASE("Pauli-norm preservation: sum_b y_ab^2 = 1") {
        SwitchingFunctions y = switching_functions(cpmg_sequence(1.0, 2, 2));
        for (double t : {0.1, 0.3, 0.6, 1.4}) {
            for (int a = 1; a < 4; ++a) {
                double total = 0.0;
                for (int b = 1; b < 4; ++b) total += y.at(t)(a, b) * y.at(t)(a, b);
                CHECK(total == doctest::Approx(1.0));
            }
        }
    }
}

TEST_CASE("toggling frame bath operators oscillate at the eigen-gaps") {
    Rng rng(7);
    Mat h_b = 0.8 * pauli(3);
    Mat b_op = pauli(1);
    std::vector<double> grid;
    for (int k = 0; k <= 40; ++k) grid.push_back(0.05 * k);
    TogglingFrame frame = toggling_frame(free_evolution(2.0), h_b, {b_op}, grid);
    // <0| B(t) |1> rotates at the gap 1.6: U^dag sx U picks up e^{+i 1.6 t}.
    for (std::size_t k = 0; k < grid.size(); ++k) {
        cplx expect = std::exp(cplx(0, 1.6 * grid[k]));
        CHECK(std::abs(frame.toggled_bath_ops[0][k](0, 1) - expect) < 1e-10);
    }

    SUBCASE("unresolved pulses are rejected") {
        PulseSequence seq = cpmg_sequence(0.04, 1, 1);  // both pulses inside one step
        CHECK_THROWS_AS(toggling_frame(seq, h_b, {b_op}, {0.0, 0.04}),
                        std::invalid_argument);
    }
}

TEST_CASE("first-order filter functions") {
    SUBCASE("free evolution closed form") {
        PulseSequence seq = free_evolution(3.0);
        CHECK(std::abs(filter_first_order(seq, 0.0, 3.0)(3, 3) - cplx(3.0, 0)) < 1e-12);
        double omega = 1.3;
        cplx expect = (std::exp(cplx(0, omega * 3.0)) - 1.0) / cplx(0, omega);
        CHECK(std::abs(filter_first_order(seq, omega, 3.0)(3, 3) - expect) < 1e-12);
    }

    SUBCASE("CPMG cancels the DC component") {
        for (int m : {1, 10, 50}) {
            PulseSequence seq = cpmg_sequence(2.0, m, 1);
            CHECK(std::abs(filter_first_order(seq, 0.0, seq.total_time())(3, 3)) < 1e-10);
        }
    }

    SUBCASE("resonant filter grows linearly with repetitions") {
        const double t_c = 2.0;
        const double omega = 2.0 * M_PI / t_c;
        double per_cycle = std::abs(filter_first_order(cpmg_sequence(t_c, 1, 1), omega, t_c)(3, 3));
        for (int m : {5, 20, 50}) {
            PulseSequence seq = cpmg_sequence(t_c, m, 1);
            double value = std::abs(filter_first_order(seq, omega, seq.total_time())(3, 3));
            CHECK(value == doctest::Approx(m * per_cycle).epsilon(1e-10));
        }
    }

    SUBCASE("closed form equals quadrature") {
        Rng rng(17);
        PulseSequence seq;
        seq.cycle_time = 1.7;
        seq.repetitions = 2;
        seq.pulses = {{0.3, 1}, {0.8, 2}, {1.5, 3}};
        SwitchingFunctions y = switching_functions(seq);
        for (double omega : {0.0, 0.9, 4.2}) {
            Eigen::Matrix4cd closed = filter_first_order(seq, omega, seq.total_time());
            // Midpoint quadrature per switching segment (the integrand jumps
            // at the pulse times, so integrate between breakpoints).
            Eigen::Matrix4cd quad = Eigen::Matrix4cd::Zero();
            for (std::size_t s = 0; s + 1 < y.breakpoints.size(); ++s) {
                double a = y.breakpoints[s], b = y.breakpoints[s + 1];
                const int n = 4000;
                double dt = (b - a) / n;
                for (int k = 0; k < n; ++k) {
                    double t = a + (k + 0.5) * dt;
                    quad += y.y[s].cast<cplx>() * std::exp(cplx(0, omega * t)) * dt;
                }
            }
            CHECK((closed - quad).cwiseAbs().maxCoeff() < 1e-6);
        }
    }
}

TEST_CASE("window factor") {
    const double t_c = 1.7;
    CHECK(std::abs(window_factor(2.0 * M_PI / t_c, t_c, 7) - cplx(7, 0)) < 1e-12);
    CHECK(std::abs(window_factor(0.9, t_c, 1) - cplx(1, 0)) < 1e-12);
    for (int m : {3, 10, 40}) {
        for (double omega : {0.3, 1.1, 2.9}) {
            CHECK(std::abs(window_factor(omega, t_c, m)) <= m + 1e-9);
        }
        double near = 2.0 * M_PI / t_c + M_PI / (m * t_c);
        CHECK(std::abs(window_factor(near, t_c, m)) <= (2.0 / M_PI) * m * 1.1);
    }
}

TEST_CASE("resonance frequencies") {
    SUBCASE("single bath qubit gap") {
        double gx = 0.4, gy = -0.8, gz = 0.3;
        Mat h_b = gx * pauli(1) + gy * pauli(2) + gz * pauli(3);
        ResonanceSet set = resonance_frequencies(h_b, {pauli(1), pauli(2), pauli(3)});
        REQUIRE(set.lines.size() == 1);
        double expect = 2.0 * std::sqrt(gx * gx + gy * gy + gz * gz);
        CHECK(std::abs(set.lines[0].frequency - expect) < 1e-10);
    }

    SUBCASE("trivial bath Hamiltonian") {
        ResonanceSet set = resonance_frequencies(Mat::Zero(2, 2), {pauli(1)});
        REQUIRE(set.lines.size() == 1);
        CHECK(set.lines[0].frequency == doctest::Approx(0.0));
    }

    SUBCASE("screened transitions are dropped") {
        // sz couples only within eigenspaces of sz: no off-diagonal element.
        Mat h_b = pauli(3);
        ResonanceSet set = resonance_frequencies(h_b, {pauli(3)});
        CHECK(set.lines.empty());
    }
}
