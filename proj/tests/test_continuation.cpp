#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lame/continuation.hpp"

using namespace lame;

TEST_CASE("path_spec validation") {
    CHECK_THROWS_AS(path_spec::cycle(cplx(-0.1, 0.7), 0.02), std::invalid_argument);
    CHECK_THROWS_AS(path_spec::cycle(cplx(0.3, 0.5), 0.6), std::invalid_argument);
    CHECK_THROWS_AS(path_spec::polyline({cplx(0.1, 0.0)}), std::invalid_argument);
    // a polyline through the origin is rejected at discretization
    const path_spec bad = path_spec::polyline({cplx(-0.1, 0.0), cplx(0.1, 0.0)}, 16);
    CHECK_THROWS_AS(bad.discretize(), std::invalid_argument);

    const path_spec cyc = path_spec::cycle(cplx(0.26, 0.7), 0.02, 100);
    const auto pts = cyc.discretize();
    CHECK(std::abs(pts.front() - cplx(0.26, 0.0)) < 1e-12);
    CHECK(std::abs(pts.back() - cplx(0.26, 0.0)) < 1e-12);
    for (const cplx q : pts) CHECK(std::abs(q) < 1.0);
}

TEST_CASE("init_state: parity, integrality, input validation") {
    const model_params p1(1);
    const auto exps = expand_many({0, 1}, 20, p1);

    const spectral_point s0 = init_state(0, 0.1, exps[0].series);
    CHECK(s0.m % 2 == 0);
    CHECK(s0.m >= 0);
    CHECK(s0.residual_exponent < 1e-8);
    CHECK(s0.residual_pole < 1e-10 * (1.0 + std::abs(s0.E)));

    const spectral_point s1 = init_state(1, 0.1, exps[1].series);
    CHECK(s1.m % 2 == 1);
    CHECK(s1.residual_exponent < 1e-8);

    CHECK_THROWS_AS(init_state(0, 0.0, exps[0].series), std::invalid_argument);
    CHECK_THROWS_AS(init_state(0, 0.5, exps[0].series), std::invalid_argument);
    // feeding the wrong-parity series must trip the parity check
    CHECK_THROWS_AS(init_state(1, 0.1, exps[0].series), newton_error);
}

TEST_CASE("continuation along trivial and real-axis paths") {
    const model_params p1(1);
    const auto exps = expand_many({0, 1}, 40, p1, 2);
    const spectral_point s0 = init_state(0, 0.1, exps[0].series);

    // zero-length loop: queue is empty, the initial state is returned as-is
    const path_spec loop = path_spec::polyline({cplx(0.1, 0.0), cplx(0.1, 0.0)}, 8);
    const trajectory t0 = continue_along(s0, loop, {});
    CHECK(t0.back().t0 == s0.t0);
    CHECK(t0.back().m == s0.m);

    // real-axis sweep lands on the series value inside the convergence disk
    const path_spec sweep = path_spec::polyline({cplx(0.1, 0.0), cplx(0.3, 0.0)}, 100);
    const trajectory t1 = continue_along(s0, sweep, {});
    const cplx want = evaluate(exps[0].series, cplx(0.3, 0.0)).value;
    CHECK(std::abs(t1.back().E - want) < 1e-8 * (1.0 + std::abs(want)));

    // every recorded state satisfies the exponent condition
    const continuation_controls ctl;
    for (size_t i = 0; i < t1.states.size(); i += 7) {
        const auto& st = t1.states[i];
        const q_context ctx(st.q, ctl.truncation);
        CHECK(std::abs(exponent(st.t0, ctx) - cplx(0.0, pi_d * st.m)) < 1e-9);
        CHECK(std::abs(wp(st.t0, ctx) + st.E) < 1e-9 * (1.0 + std::abs(st.E)));
    }

    // multiplier exp(exponent) stays at +1 for the periodic family
    for (size_t i = 0; i < t1.states.size(); i += 11)
        CHECK(t1.states[i].m % 2 == 0);

    // path must start where the state sits
    CHECK_THROWS_AS(
        continue_along(s0, path_spec::polyline({cplx(0.2, 0.0), cplx(0.3, 0.0)}, 10), {}),
        std::invalid_argument);
}

TEST_CASE("reversed paths return to the start away from branch points") {
    const model_params p1(1);
    const auto exps = expand_many({1}, 30, p1);
    const spectral_point s0 = init_state(1, 0.12, exps[0].series);
    const path_spec there_and_back = path_spec::polyline(
        {cplx(0.12, 0.0), cplx(0.3, 0.2), cplx(0.15, 0.35), cplx(0.12, 0.0)}, 240);
    const trajectory t = continue_along(s0, there_and_back, {});
    CHECK(std::abs(t.back().E - s0.E) < 1e-7 * (1.0 + std::abs(s0.E)));
    CHECK(std::abs(t.back().t0 - s0.t0) < 1e-7);
    CHECK(t.back().m == s0.m);
}

TEST_CASE("cycle around the nearest periodic branch point swaps the first pair") {
    const model_params p1(1);
    const cplx anchor(0.258666, 0.697448);
    for (double rho : {0.01, 0.04}) {
        const permutation_report rep = monodromy_permutation(anchor, {0, 2, 4, 6}, rho, p1);
        REQUIRE(rep.image.size() == 4);
        CHECK(rep.image[0] == 2);
        CHECK(rep.image[1] == 0);
        CHECK(rep.image[2] == 4);
        CHECK(rep.image[3] == 6);
        CHECK_FALSE(rep.is_identity());
        for (double err : rep.match_error) CHECK(err < 1e-6);
    }
}

TEST_CASE("permutation runs validate their inputs") {
    const model_params p1(1);
    CHECK_THROWS_AS(monodromy_permutation(cplx(0.26, 0.7), {0, 1}, 0.02, p1),
                    std::invalid_argument);
    CHECK_THROWS_AS(monodromy_permutation(cplx(0.26, 0.7), {}, 0.02, p1),
                    std::invalid_argument);
}
