#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lame/monodromy.hpp"
#include "lame/perturbation.hpp"

using namespace lame;

namespace {

// torus distance honoring the t -> -t identification
double rep_distance(cplx a, cplx b, const q_context& ctx) {
    const double d1 = std::abs(reduce_to_cell(a - b, ctx).x);
    const double d2 = std::abs(reduce_to_cell(a + b, ctx).x);
    return std::min(d1, d2);
}

// inversion integral t - omega_1 = int_{e1}^{wp(t)} ds / sqrt(4 prod (s - e_i)),
// endpoint substitution s = e1 + w^2, midpoint rule with branch tracking
cplx inversion_integral(cplx wp_value, const elliptic_constants& ec) {
    const cplx wend = std::sqrt(wp_value - ec.e1);
    const int n = 6000;
    const cplx dw = wend / static_cast<double>(n);
    cplx prev = std::sqrt((ec.e1 - ec.e2) * (ec.e1 - ec.e3));
    cplx acc(0.0);
    for (int i = 0; i < n; ++i) {
        const cplx w = (i + 0.5) * dw;
        cplx s = std::sqrt((w * w + ec.e1 - ec.e2) * (w * w + ec.e1 - ec.e3));
        if (std::abs(s - prev) > std::abs(s + prev)) s = -s;
        prev = s;
        acc += dw / s;
    }
    return acc;
}

}

TEST_CASE("solve_t0: residuals, half-period target, context mismatch") {
    const q_context ctx(cplx(0.2, 0.0), 200);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ur(1.0, 9.0), ui(-2.0, 2.0);
    for (int trial = 0; trial < 12; ++trial) {
        const cplx E = pi_sq * cplx(ur(rng), ui(rng));
        const cplx t0 = solve_t0(cplx(0.2, 0.0), E, cplx(0.2, 0.12), ctx);
        CHECK(std::abs(wp(t0, ctx) + E) <= 1e-12 * (1.0 + std::abs(E)));
        CHECK(t0.real() > 0.0);
        CHECK(t0.real() <= 0.5 + 1e-12);
    }

    const elliptic_constants ec = constants(ctx);
    const cplx th = solve_t0(cplx(0.2, 0.0), -ec.e1, cplx(0.47, 0.01), ctx);
    CHECK(std::abs(th - cplx(0.5, 0.0)) < 1e-5);

    CHECK_THROWS_AS(solve_t0(cplx(0.21, 0.0), cplx(1.0), cplx(0.2, 0.1), ctx),
                    std::invalid_argument);
}

TEST_CASE("solve_t0 agrees with the elliptic inversion integral") {
    const q_context ctx(cplx(0.2, 0.0), 200);
    const elliptic_constants ec = constants(ctx);
    for (const cplx Eu : {cplx(3.5, 0.9), cplx(2.0, 1.0), cplx(6.5, -1.2)}) {
        const cplx E = pi_sq * Eu;
        const cplx t0 = solve_t0(cplx(0.2, 0.0), E, cplx(0.2, 0.12), ctx);
        const cplx I = inversion_integral(-E, ec);
        const double d = std::min(rep_distance(cplx(0.5) + I, t0, ctx),
                                  rep_distance(cplx(0.5) - I, t0, ctx));
        CHECK(d < 1e-6);
    }
}

TEST_CASE("exponent translation laws") {
    const q_context ctx(cplx(0.25, 0.1), 200);
    const cplx tau = ctx.tau();
    for (const cplx t : {cplx(0.31, 0.07), cplx(0.12, -0.02), cplx(0.44, 0.0)}) {
        CHECK(std::abs(exponent(-t, ctx) + exponent(t, ctx)) < 1e-12);
        CHECK(std::abs(exponent(t + 1.0, ctx) - exponent(t, ctx)) < 1e-10);
        CHECK(std::abs(exponent(t + tau, ctx) - exponent(t, ctx) - cplx(0.0, 2.0 * pi_d)) < 1e-10);
    }
}

TEST_CASE("hyperelliptic exponent: empty integral and cross validation") {
    const q_context ctx(cplx(0.2, 0.0), 200);
    const elliptic_constants ec = constants(ctx);
    CHECK(std::abs(hyperelliptic_exponent(-ec.e1, ctx)) < 1e-10);

    auto mod_pi_i = [](cplx z) {
        const double r = z.imag() / pi_d;
        return std::hypot(z.real(), (r - std::round(r)) * pi_d);
    };
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ur(1.0, 9.0), ui(0.2, 2.0);
    int checked = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const cplx E = pi_sq * cplx(ur(rng), (trial % 2 ? 1.0 : -1.0) * ui(rng));
        const cplx ex = exponent(solve_t0(cplx(0.2, 0.0), E, cplx(0.2, 0.12), ctx), ctx);
        const cplx hy = hyperelliptic_exponent(E, ctx);
        CHECK(std::min(mod_pi_i(ex - hy), mod_pi_i(ex + hy)) < 1e-6);
        ++checked;
    }
    CHECK(checked == 10);

    // a real E between the bands forces a detour around real branch points
    const cplx Ereal = pi_sq * cplx(3.5, 0.0);
    const cplx ex = exponent(solve_t0(cplx(0.2, 0.0), Ereal, cplx(0.2, 0.12), ctx), ctx);
    const cplx hy = hyperelliptic_exponent(Ereal, ctx);
    CHECK(std::min(mod_pi_i(ex - hy), mod_pi_i(ex + hy)) < 1e-6);
}

TEST_CASE("exponent is real (mod pi i) in the spectral gaps at real nome") {
    const q_context ctx(cplx(0.3, 0.0), 200);
    const elliptic_constants ec = constants(ctx);
    // bands at real q: [-e1, -e2] and [-e3, inf); test midpoints of both gaps
    const cplx gap1 = 0.5 * (-ec.e2 - ec.e3);               // finite gap
    const cplx gap0 = -ec.e1 - cplx(30.0, 0.0);             // below the spectrum
    for (const cplx E : {gap0, gap1}) {
        const cplx ex = exponent(solve_t0(cplx(0.3, 0.0), E, cplx(0.2, 0.12), ctx), ctx);
        const double frac = ex.imag() / pi_d - std::round(ex.imag() / pi_d);
        CHECK(std::abs(frac) < 1e-8);
        CHECK(std::abs(ex.real()) > 1e-3);   // multiplier off the unit circle
    }
}

TEST_CASE("ode multiplier: family traces and the closed form") {
    // periodic and anti-periodic eigenvalues give trace +2 / -2
    const q_context ctx01(cplx(0.1, 0.0), 200);
    // exact series values at q = 0.1 (k_max = 20 is far below truncation noise)
    const model_params p1(1);
    const auto exps = expand_many({0, 1}, 20, p1);
    const cplx E0 = evaluate(exps[0].series, cplx(0.1, 0.0)).value;
    const cplx E1 = evaluate(exps[1].series, cplx(0.1, 0.0)).value;
    CHECK(std::abs(ode_multiplier(cplx(0.1, 0.0), E0).trace - cplx(2.0, 0.0)) < 1e-8);
    CHECK(std::abs(ode_multiplier(cplx(0.1, 0.0), E1).trace - cplx(-2.0, 0.0)) < 1e-8);

    std::mt19937 rng(17);
    std::uniform_real_distribution<double> ur(0.5, 8.0), ui(-1.5, 1.5);
    const q_context ctx(cplx(0.15, 0.0), 200);
    for (int trial = 0; trial < 5; ++trial) {
        const cplx E = pi_sq * cplx(ur(rng), ui(rng));
        const cplx ex = exponent(solve_t0(cplx(0.15, 0.0), E, cplx(0.2, 0.12), ctx), ctx);
        const cplx trace = ode_multiplier(cplx(0.15, 0.0), E).trace;
        CHECK(std::abs(trace - 2.0 * std::cosh(ex)) < 1e-8 * (1.0 + std::abs(trace)));
    }
}

TEST_CASE("branch scan: local recovery, empty region, determinism") {
    scan_params par;
    par.region = {0.22, 0.30, 0.66, 0.74};
    par.nx = par.ny = 6;
    const auto found = branch_scan(par);
    REQUIRE(found.size() == 1);
    CHECK(std::abs(found[0].point.q - cplx(0.258666, 0.697448)) < 1e-4);
    CHECK(found[0].classification == branch_class::true_branch);
    CHECK(std::abs(found[0].point.m) == 2);
    CHECK(found[0].r1 < 1e-10);
    CHECK(found[0].r2 < 1e-10);

    scan_params empty;
    empty.region = {0.02, 0.18, 0.0, 0.18};
    empty.nx = empty.ny = 8;
    CHECK(branch_scan(empty).empty());

    scan_params par2 = par;
    par2.jobs = 2;
    const auto found2 = branch_scan(par2);
    REQUIRE(found2.size() == found.size());
    CHECK(found2[0].point.q == found[0].point.q);
    CHECK(found2[0].point.m == found[0].point.m);

    scan_params bad;
    bad.nx = 1;
    CHECK_THROWS_AS(branch_scan(bad), std::invalid_argument);
}

TEST_CASE("classification at published coincidence points") {
    struct probe {
        double re, im;
        branch_class want;
    };
    const probe probes[] = {
        {0.0, 0.328106, branch_class::coincidence_e1},
        {0.281417, 0.534362, branch_class::coincidence_e2},
        {0.264829, 0.792687, branch_class::coincidence_e3},
        {0.258666, 0.697448, branch_class::true_branch},
    };
    for (const auto& pr : probes) {
        scan_params par;
        par.region = {pr.re - 0.03, pr.re + 0.03, pr.im - 0.03, pr.im + 0.03};
        if (par.region.re_min < 0) par.region.re_min = 0;
        par.nx = par.ny = 5;
        const auto found = branch_scan(par);
        REQUIRE(!found.empty());
        // nearest candidate to the advertised point
        const auto best = *std::min_element(
            found.begin(), found.end(), [&](const auto& a, const auto& b) {
                return std::abs(a.point.q - cplx(pr.re, pr.im)) <
                       std::abs(b.point.q - cplx(pr.re, pr.im));
            });
        CHECK(std::abs(best.point.q - cplx(pr.re, pr.im)) < 1e-4);
        CHECK(best.classification == pr.want);
        if (pr.want != branch_class::true_branch)
            CHECK(best.coincidence_gap < 1e-6 * pi_sq);
        else
            CHECK(best.coincidence_gap > 1.0);
    }
}
