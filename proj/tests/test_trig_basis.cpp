#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lame/elliptic.hpp"
#include "lame/trig_basis.hpp"
#include "oracle_helpers.hpp"

using namespace lame;

TEST_CASE("model_params requires a positive integer coupling") {
    CHECK_THROWS_AS(model_params(0), std::invalid_argument);
    CHECK_THROWS_AS(model_params(-3), std::invalid_argument);
    CHECK(model_params(1).nu() == 2);
    CHECK(model_params(3).coupling() == 12);
}

TEST_CASE("basis elements: norms and unperturbed energies") {
    const model_params p1(1);
    for (int m = 0; m <= 12; ++m) {
        const basis_element b = make_basis_element(m, p1);
        // n = 1 closed form: N_m = (m+1)(m+3)/8
        CHECK(b.squared_norm == rational(static_cast<long>(m + 1) * (m + 3), 8));
        CHECK(b.unperturbed_energy == rational(static_cast<long>(m + 2) * (m + 2)) - rational(2, 3));
    }
    const model_params p2(2);
    // n = 2: N_m = (m+5)!/(32 (m+3) m! 4)
    for (int m : {0, 1, 5}) {
        const basis_element b = make_basis_element(m, p2);
        rational want(factorial(static_cast<unsigned>(m + 5)));
        want /= rational(factorial(static_cast<unsigned>(m)));
        want /= rational(32L * (m + 3) * 4);
        want.canonicalize();
        CHECK(b.squared_norm == want);
    }
    CHECK_THROWS_AS(make_basis_element(-1, p1), std::invalid_argument);
}

TEST_CASE("potential Fourier data: divisor structure") {
    CHECK_THROWS_AS(potential_fourier(0, 1), std::invalid_argument);

    const auto v1 = potential_fourier(1, 1);
    CHECK(v1.constant == 16);
    REQUIRE(v1.cosines.size() == 1);
    CHECK(v1.cosines[0].harmonic == 1);
    CHECK(v1.cosines[0].coeff == -16);

    // k = 2, n = 1: 16 (sigma_1(2) - cos 2 pi x - 2 cos 4 pi x)
    const auto v2 = potential_fourier(2, 1);
    CHECK(v2.constant == 48);
    REQUIRE(v2.cosines.size() == 2);
    CHECK(v2.cosines[0].coeff == -16);
    CHECK(v2.cosines[1].harmonic == 2);
    CHECK(v2.cosines[1].coeff == -32);

    const auto v6 = potential_fourier(6, 1);
    CHECK(v6.constant == rational(16 * 12));   // sigma_1(6) = 12
    CHECK(v6.cosines.size() == 4);             // divisors 1,2,3,6
}

TEST_CASE("potential Fourier data equals the q^2k Taylor coefficient of n(n+1) wp") {
    // Cauchy-ring differentiation of q -> n(n+1) wp(x; q) in the variable u = q^2
    for (int n : {1, 2}) {
        for (int k : {1, 2, 3}) {
            const auto v = potential_fourier(k, n);
            for (double x : {0.21, 0.37, 0.63}) {
                const auto f = [&](std::complex<double> u) {
                    const cplx q = std::sqrt(u);
                    const q_context ctx(q, 60);
                    return static_cast<std::complex<double>>(
                        static_cast<double>(n * (n + 1)) * wp(cplx(x, 0.0), ctx));
                };
                const std::complex<double> coeff = oracle::ring_coefficient(f, k, 0.3, 128);
                double direct = to_double(v.constant);
                for (const auto& t : v.cosines)
                    direct += to_double(t.coeff) * std::cos(2.0 * t.harmonic * pi_d * x);
                direct *= pi_sq;
                CHECK(std::abs(coeff - std::complex<double>(direct, 0.0)) <
                      1e-8 * (1.0 + std::abs(direct)));
            }
        }
    }
}

TEST_CASE("Gegenbauer recurrence coefficients") {
    const auto s0 = gegenbauer_recurrence(0, rational(2));
    CHECK(s0.a_plus == rational(1, 4));
    CHECK(s0.a_minus == 0);

    const auto s1 = gegenbauer_recurrence(1, rational(2));
    CHECK(s1.a_plus == rational(1, 3));
    CHECK(s1.a_minus == rational(2, 3));

    CHECK_THROWS_AS(gegenbauer_recurrence(-1, rational(2)), std::invalid_argument);
}

TEST_CASE("recurrence-built Gegenbauer values equal the exact hypergeometric sum") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> num(-20, 20);
    for (int nu : {2, 3}) {
        for (int trial = 0; trial < 6; ++trial) {
            const rational z(num(rng), 23);
            // build C_0..C_8 by inverting the multiplication recurrence
            std::vector<rational> C{rational(1), rational(2 * nu) * z};
            for (int m = 1; m <= 7; ++m) {
                const auto st = gegenbauer_recurrence(m, rational(nu));
                rational next = (z * C[static_cast<size_t>(m)] -
                                 st.a_minus * C[static_cast<size_t>(m - 1)]) /
                                st.a_plus;
                next.canonicalize();
                C.push_back(next);
            }
            for (int m = 0; m <= 8; ++m)
                CHECK(C[static_cast<size_t>(m)] == oracle::gegenbauer_exact(m, nu, z));
        }
    }
}

TEST_CASE("coupling matrix: structure and published first-order shifts") {
    const model_params p1(1);
    CHECK_THROWS_AS(coupling_matrix::build(3, 5, p1), std::invalid_argument);

    const auto c1 = coupling_matrix::build(1, 14, p1);
    CHECK(c1.action(0, 0) == rational(80, 3));
    CHECK(c1.action(1, 1) == rational(20));
    CHECK(c1.action(2, 2) == rational(272, 15));
    CHECK(c1.action(3, 3) == rational(52, 3));
    CHECK(c1.action(4, 4) == rational(592, 35));
    CHECK(c1.action(5, 5) == rational(50, 3));
    CHECK(c1.action(7, 7) == rational(82, 5));

    for (const auto& cm : {c1, coupling_matrix::build(2, 14, p1), coupling_matrix::build(3, 14, p1)}) {
        for (int r = 0; r <= cm.cutoff(); ++r)
            for (int c = 0; c <= cm.cutoff(); ++c) {
                if ((r - c) % 2 != 0) CHECK(cm.action(r, c) == 0);          // parity
                if (std::abs(r - c) > 2 * cm.order()) CHECK(cm.action(r, c) == 0);   // band
            }
        // orthonormal-basis symmetry as an exact rational identity
        for (int r = 0; r <= cm.cutoff(); ++r)
            for (int c = 0; c <= cm.cutoff(); ++c)
                CHECK(cm.action(r, c) * cm.norm_sq(r) == cm.action(c, r) * cm.norm_sq(c));
    }
}

TEST_CASE("coupling matrix equals Gauss quadrature of the inner products") {
    for (int n : {1, 2}) {
        const model_params params(n);
        for (int k : {1, 2}) {
            const auto cm = coupling_matrix::build(k, 10, params);
            const auto v = potential_fourier(k, n);
            for (const auto [r, c] : {std::pair{0, 0}, {1, 1}, {0, 2}, {2, 0}, {1, 3}, {3, 3},
                                      {2, 4}, {0, 4}}) {
                const auto integrand = [&](double x) {
                    double pot = to_double(v.constant);
                    for (const auto& t : v.cosines)
                        pot += to_double(t.coeff) * std::cos(2.0 * t.harmonic * pi_d * x);
                    return oracle::basis_value(r, n, x) * pot * oracle::basis_value(c, n, x);
                };
                const double quad = oracle::integrate_01(integrand, 64);
                CHECK(std::abs(quad - cm.orthonormal(r, c)) < 1e-9 * (1.0 + std::abs(quad)));
            }
        }
    }
}

TEST_CASE("enlarged-window construction keeps boundary entries exact") {
    // entries on a small window must not depend on the requested cutoff
    const model_params p1(1);
    const auto small = coupling_matrix::build(2, 8, p1);
    const auto large = coupling_matrix::build(2, 20, p1);
    for (int r = 0; r <= 8; ++r)
        for (int c = 0; c <= 8; ++c)
            CHECK(small.action(r, c) == large.action(r, c));
}
