#include "lame/monodromy.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <thread>

namespace lame {

const char* to_string(branch_class c) {
    switch (c) {
        case branch_class::true_branch: return "branch";
        case branch_class::coincidence_e1: return "e1";
        case branch_class::coincidence_e2: return "e2";
        case branch_class::coincidence_e3: return "e3";
        default: return "unresolved";
    }
}

namespace {

// Half-cell representative: Re in (0, 1/2]; pure-imaginary roots keep Im >= 0.
cplx normalize_half_cell(cplx t, const q_context& ctx) {
    t = reduce_to_cell(t, ctx).x;               // Re in [-1/2, 1/2), |Im| minimal
    if (std::abs(t.real()) < 1e-14) {
        if (t.imag() < 0) t = -t;
    } else if (t.real() < 0) {
        t = -t;
    }
    return t;
}

}

cplx solve_t0(cplx q, cplx E, cplx seed, const q_context& ctx) {
    if (std::abs(q - ctx.q()) > 1e-15)
        throw std::invalid_argument("solve_t0: context was built for a different q");
    cplx t = seed;
    const double target = 1e-12 * (1.0 + std::abs(E));
    const double jac_floor = 1e-10 * std::pow(1.0 + std::abs(E), 1.5);
    for (int it = 0; it < 50; ++it) {
        const cplx f = wp(t, ctx) + E;
        if (std::abs(f) <= target)
            return normalize_half_cell(t, ctx);
        const cplx fp = wp_prime(t, ctx);
        if (std::abs(fp) < jac_floor && std::abs(f) > 10.0 * target)
            throw newton_error("solve_t0: near-singular Jacobian (t close to a half-period)");
        t -= f / fp;
    }
    throw newton_error("solve_t0: no convergence after 50 iterations");
}

cplx exponent(cplx t0, const q_context& ctx) {
    return 2.0 * eta1(ctx) * t0 - zeta(t0, ctx);
}

namespace {

// Integrand data for the hyperelliptic route after the substitution
// s = -e1 + u^2: exponent = int_0^{sqrt(E+e1)} (u^2 - e1 - 2 eta1) /
// sqrt(-(u^2+e2-e1)(u^2+e3-e1)) du, branch continued from u = 0.
struct hyper_integrand {
    cplx e1, e2, e3, two_eta1;
    cplx radicand(cplx u) const {
        const cplx u2 = u * u;
        return -((u2 + e2 - e1) * (u2 + e3 - e1));
    }
};

// 12-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 6> gl_x = {0.1252334085114689, 0.3678314989981802,
                                        0.5873179542866175, 0.7699026741943047,
                                        0.9041172563704749, 0.9815606342467192};
constexpr std::array<double, 6> gl_w = {0.2491470458134028, 0.2334925365383548,
                                        0.2031674267230659, 0.1600783285433462,
                                        0.1069393259953184, 0.0471753363865118};

// Sum over the polyline with continuity-tracked square root. `nodes_per_unit`
// controls the subdivision density along each leg.
cplx integrate_polyline(const hyper_integrand& f, const std::vector<cplx>& poly, int panels) {
    cplx sqrt_prev = std::sqrt(f.radicand(poly.front()));
    if (sqrt_prev == cplx(0.0))
        throw quadrature_error("hyperelliptic_exponent: branch point at path start");
    cplx acc(0.0);
    double total_len = 0.0;
    for (size_t i = 0; i + 1 < poly.size(); ++i) total_len += std::abs(poly[i + 1] - poly[i]);
    for (size_t leg = 0; leg + 1 < poly.size(); ++leg) {
        const cplx a = poly[leg], b = poly[leg + 1];
        const double len = std::abs(b - a);
        const int n = std::max(1, static_cast<int>(std::ceil(panels * len / total_len)));
        for (int p = 0; p < n; ++p) {
            const cplx p0 = a + (b - a) * (static_cast<double>(p) / n);
            const cplx p1 = a + (b - a) * (static_cast<double>(p + 1) / n);
            const cplx mid = 0.5 * (p0 + p1);
            const cplx half = 0.5 * (p1 - p0);
            // ordered nodes keep the continuity tracking monotone along the path
            std::array<double, 12> xs;
            for (int i = 0; i < 6; ++i) {
                xs[static_cast<size_t>(i)] = -gl_x[static_cast<size_t>(5 - i)];
                xs[static_cast<size_t>(6 + i)] = gl_x[static_cast<size_t>(i)];
            }
            for (int i = 0; i < 12; ++i) {
                const cplx u = mid + half * xs[static_cast<size_t>(i)];
                const cplx rad = f.radicand(u);
                if (std::abs(rad) < 1e-24)
                    throw quadrature_error("hyperelliptic_exponent: node hit a branch point");
                cplx s = std::sqrt(rad);
                if (std::abs(s - sqrt_prev) > std::abs(s + sqrt_prev)) s = -s;
                sqrt_prev = s;
                const double w = gl_w[static_cast<size_t>(i < 6 ? 5 - i : i - 6)];
                acc += w * half * (u * u - f.e1 - f.two_eta1) / s;
            }
        }
    }
    return acc;
}

}

cplx hyperelliptic_exponent(cplx E, const q_context& ctx) {
    const elliptic_constants ec = constants(ctx);
    hyper_integrand f{ec.e1, ec.e2, ec.e3, 2.0 * ec.eta1};

    const cplx uend = std::sqrt(E + ec.e1);
    if (std::abs(uend) < 1e-12) return cplx(0.0);   // E = -e1: empty integral

    // Branch points in the u plane; detour around any that sit near the
    // straight segment [0, uend].
    std::vector<cplx> branch_pts;
    for (const cplx w : {ec.e1 - ec.e2, ec.e1 - ec.e3}) {
        const cplx r = std::sqrt(w);
        branch_pts.push_back(r);
        branch_pts.push_back(-r);
    }
    struct detour {
        double tpar;
        cplx waypoint;
    };
    std::vector<detour> detours;
    const cplx dir = uend / std::abs(uend);
    const double guard = std::max(1e-3, 0.03 * std::abs(uend));
    for (const cplx p : branch_pts) {
        const double tpar = (p / dir).real();           // projection parameter
        if (tpar <= 1e-9 || tpar >= std::abs(uend) - 1e-9) continue;
        const cplx foot = tpar * dir;
        const double dist = std::abs(p - foot);
        if (dist >= guard) continue;
        // push the waypoint to the side of the segment away from p
        cplx normal = cplx(-dir.imag(), dir.real());
        cplx away = foot - p;
        if (std::abs(away) < 1e-12) away = normal;      // p exactly on the segment
        if ((away / normal).real() < 0) normal = -normal;
        detours.push_back({tpar, foot + normal * (guard * 2.0)});
    }
    std::sort(detours.begin(), detours.end(),
              [](const detour& a, const detour& b) { return a.tpar < b.tpar; });

    std::vector<cplx> poly;
    poly.push_back(cplx(0.0));
    for (const auto& d : detours) poly.push_back(d.waypoint);
    poly.push_back(uend);

    // doubling refinement until two resolutions agree
    cplx prev = integrate_polyline(f, poly, 256);
    for (int panels = 512; panels <= 4096; panels *= 2) {
        const cplx cur = integrate_polyline(f, poly, panels);
        if (std::abs(cur - prev) <= 1e-9 * (1.0 + std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

multiplier_result ode_multiplier(cplx q, cplx E, int steps, int truncation) {
    const q_context ctx(q, truncation);
    const cplx shift = 0.5 * ctx.tau();
    const double h = 1.0 / steps;

    // potential on the half-step grid, shared by both basis solutions
    std::vector<cplx> pot(static_cast<size_t>(2 * steps) + 1);
    for (int i = 0; i <= 2 * steps; ++i)
        pot[static_cast<size_t>(i)] = 2.0 * wp(0.5 * h * i + shift, ctx) - E;

    // two columns of the transfer matrix
    cplx f1 = 1.0, f1d = 0.0;   // solution with f(0)=1, f'(0)=0
    cplx f2 = 0.0, f2d = 1.0;   // solution with f(0)=0, f'(0)=1
    auto rk4 = [&](cplx& y, cplx& yd, int i) {
        const cplx v0 = pot[static_cast<size_t>(2 * i)];
        const cplx vh = pot[static_cast<size_t>(2 * i + 1)];
        const cplx v1 = pot[static_cast<size_t>(2 * i + 2)];
        const cplx k1 = yd, k1d = v0 * y;
        const cplx k2 = yd + 0.5 * h * k1d, k2d = vh * (y + 0.5 * h * k1);
        const cplx k3 = yd + 0.5 * h * k2d, k3d = vh * (y + 0.5 * h * k2);
        const cplx k4 = yd + h * k3d, k4d = v1 * (y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        yd += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    };
    for (int i = 0; i < steps; ++i) {
        rk4(f1, f1d, i);
        rk4(f2, f2d, i);
    }

    multiplier_result out;
    out.trace = f1 + f2d;
    const cplx disc = std::sqrt(out.trace * out.trace - 4.0);
    const cplx mu1 = 0.5 * (out.trace + disc);
    const cplx mu2 = 0.5 * (out.trace - disc);
    out.multiplier = std::abs(mu1) >= std::abs(mu2) ? mu1 : mu2;
    return out;
}

namespace {

struct polish_result {
    bool ok = false;
    cplx q, t;
    double r1 = 0.0, r2 = 0.0;
};

// Two-variable complex Newton on
//   F1(q,t) = 2 eta1(q) + wp(t; q)
//   F2(q,t) = 2 eta1(q) t - zeta(t; q) - m pi i
polish_result polish_branch_root(cplx q, cplx t, int m, const scan_params& par) {
    polish_result res;
    for (int it = 0; it < 40; ++it) {
        if (std::abs(q) >= 0.97) return res;
        q_context ctx(q, par.truncation);
        cplx F1, F2;
        try {
            const cplx e1v = eta1(ctx);
            F1 = 2.0 * e1v + wp(t, ctx);
            F2 = 2.0 * e1v * t - zeta(t, ctx) - cplx(0.0, pi_d * m);
            if (std::abs(F1) <= par.polish_tol && std::abs(F2) <= par.polish_tol) {
                res.ok = true;
                res.q = q;
                res.t = normalize_half_cell(t, ctx);
                res.r1 = std::abs(F1);
                res.r2 = std::abs(F2);
                return res;
            }
            const cplx de1 = eta1_dq(ctx);
            const cplx j11 = 2.0 * de1 + wp_dq(t, ctx);          // dF1/dq
            const cplx j12 = wp_prime(t, ctx);                   // dF1/dt
            const cplx j21 = 2.0 * de1 * t - zeta_dq(t, ctx);    // dF2/dq
            const cplx j22 = 2.0 * e1v + wp(t, ctx);             // dF2/dt
            const cplx det = j11 * j22 - j12 * j21;
            if (std::abs(det) < 1e-14) return res;
            const cplx dq = (-F1 * j22 + F2 * j12) / det;
            const cplx dt = (-F2 * j11 + F1 * j21) / det;
            q += dq;
            t += dt;
        } catch (const pole_error&) {
            return res;
        }
    }
    return res;
}

// Newton solve of wp(t) = -2 eta1 with a short seed list; returns the
// half-cell representative or throws.
cplx solve_branch_t(const q_context& ctx, cplx seed_hint, bool have_hint) {
    const cplx E = 2.0 * eta1(ctx);   // wp(t) = -E
    std::vector<cplx> seeds;
    if (have_hint) seeds.push_back(seed_hint);
    seeds.insert(seeds.end(), {cplx(0.25, 0.12), cplx(0.4, 0.2), cplx(0.15, 0.28), cplx(0.45, 0.05)});
    for (const cplx s : seeds) {
        try {
            return solve_t0(ctx.q(), E, s, ctx);
        } catch (const newton_error&) {
        } catch (const pole_error&) {
        }
    }
    throw newton_error("branch_scan: all seeds failed");
}

}

branch_candidate classify(branch_candidate cand, const q_context& ctx) {
    const elliptic_constants ec = constants(ctx);
    const cplx twoeta = 2.0 * eta1(ctx);
    const double tol = 1e-6 * pi_sq;
    cand.classification = branch_class::true_branch;
    const std::array<std::pair<cplx, branch_class>, 3> tests{{
        {ec.e1, branch_class::coincidence_e1},
        {ec.e2, branch_class::coincidence_e2},
        {ec.e3, branch_class::coincidence_e3},
    }};
    double gap = 1e300;
    double best = tol;
    for (const auto& [e, cls] : tests) {
        const double d = std::abs(twoeta + e);
        gap = std::min(gap, d);
        if (d <= best) {
            best = d;
            cand.classification = cls;
        }
    }
    cand.coincidence_gap = gap;
    return cand;
}

namespace {

// A doubly-periodic coincidence 2 eta1 = -e_i is a degenerate root of the
// two-variable system (wp'(omega_i) = 0 kills the Jacobian), so the polish
// stops ~1e-4 short of it. When a candidate lands near a coincidence, finish
// with a scalar Newton on h(q) = 2 eta1(q) + e_i(q), whose root is simple,
// and put t0 on the half-period exactly.
branch_candidate refine_coincidence(branch_candidate cand, const scan_params& par) {
    int which = -1;
    {
        const q_context ctx(cand.point.q, par.truncation);
        const elliptic_constants ec = constants(ctx);
        const cplx twoeta = 2.0 * eta1(ctx);
        double best = 1e-2 * pi_sq;
        const std::array<cplx, 3> es{ec.e1, ec.e2, ec.e3};
        for (int i = 0; i < 3; ++i) {
            const double d = std::abs(twoeta + es[static_cast<size_t>(i)]);
            if (d < best) {
                best = d;
                which = i;
            }
        }
    }
    if (which < 0) return cand;

    cplx q = cand.point.q;
    bool converged = false;
    for (int it = 0; it < 30 && !converged; ++it) {
        const q_context ctx(q, par.truncation);
        const elliptic_constants ec = constants(ctx);
        const std::array<cplx, 3> es{ec.e1, ec.e2, ec.e3};
        const cplx h = 2.0 * eta1(ctx) + es[static_cast<size_t>(which)];
        if (std::abs(h) <= 1e-11 * pi_sq) {
            converged = true;
            break;
        }
        const cplx omega = which == 0   ? cplx(0.5)
                           : which == 1 ? cplx(-0.5) - 0.5 * ctx.tau()
                                        : 0.5 * ctx.tau();
        // wp'(omega_i) = 0, so the total q-derivative of e_i is the partial one
        const cplx dh = 2.0 * eta1_dq(ctx) + wp_dq(omega, ctx);
        q -= h / dh;
        if (std::abs(q - cand.point.q) > 5e-3) return cand;   // drifted; not a coincidence
    }
    if (!converged) return cand;

    const q_context ctx(q, par.truncation);
    const cplx omega = which == 0   ? cplx(0.5)
                       : which == 1 ? cplx(-0.5) - 0.5 * ctx.tau()
                                    : 0.5 * ctx.tau();
    const cplx t0 = normalize_half_cell(omega, ctx);
    const cplx r = exponent(t0, ctx) / cplx(0.0, pi_d);
    cand.point.q = q;
    cand.point.t0 = t0;
    cand.point.m = static_cast<int>(std::lround(r.real()));
    cand.point.E = -wp(t0, ctx);
    cand.r1 = std::abs(2.0 * eta1(ctx) + wp(t0, ctx));
    cand.r2 = std::abs(exponent(t0, ctx) - cplx(0.0, pi_d * cand.point.m));
    cand.point.residual_pole = 0.0;
    cand.point.residual_exponent = cand.r2;
    return cand;
}

}

std::vector<branch_candidate> branch_scan(const scan_params& par, scan_stats* stats) {
    if (par.nx < 2 || par.ny < 2)
        throw std::invalid_argument("branch_scan: grid must be at least 2x2");
    if (par.region.re_min > par.region.re_max || par.region.im_min > par.region.im_max)
        throw std::invalid_argument("branch_scan: malformed region");
    if (std::hypot(std::max(std::abs(par.region.re_min), std::abs(par.region.re_max)),
                   std::max(std::abs(par.region.im_min), std::abs(par.region.im_max))) >= 0.95 &&
        par.q_abs_max >= 0.95)
        throw std::invalid_argument("branch_scan: region must stay inside |q| < 0.95");

    struct row_hits {
        std::vector<branch_candidate> cands;
        int visited = 0, failed = 0, attempts = 0, polish_failed = 0;
    };
    std::vector<row_hits> rows(static_cast<size_t>(par.ny));

    auto run_row = [&](int iy) {
        row_hits& out = rows[static_cast<size_t>(iy)];
        const double im = par.region.im_min +
                          (par.region.im_max - par.region.im_min) * iy / (par.ny - 1);
        cplx t_prev;
        bool have_prev = false;
        for (int ix = 0; ix < par.nx; ++ix) {
            const double re = par.region.re_min +
                              (par.region.re_max - par.region.re_min) * ix / (par.nx - 1);
            const cplx q(re, im);
            const double aq = std::abs(q);
            if (aq < 1e-3 || aq >= std::min(par.q_abs_max, 0.95)) continue;
            ++out.visited;
            try {
                q_context ctx(q, par.truncation);
                const cplx t = solve_branch_t(ctx, t_prev, have_prev);
                t_prev = t;
                have_prev = true;
                const cplx r = exponent(t, ctx) / cplx(0.0, pi_d);
                const long mr = std::lround(r.real());
                if (std::abs(r - cplx(static_cast<double>(mr), 0.0)) > par.near_integer_tol)
                    continue;
                if (mr < par.m_min || mr > par.m_max) continue;
                ++out.attempts;
                const polish_result pol =
                    polish_branch_root(q, t, static_cast<int>(mr), par);
                if (!pol.ok) {
                    ++out.polish_failed;
                    continue;
                }
                if (std::abs(pol.q) >= par.q_abs_max || std::abs(pol.q) < par.q_abs_min)
                    continue;
                const double cell_re = (par.region.re_max - par.region.re_min) / (par.nx - 1);
                const double cell_im = (par.region.im_max - par.region.im_min) / (par.ny - 1);
                if (pol.q.real() < par.region.re_min - cell_re ||
                    pol.q.real() > par.region.re_max + cell_re ||
                    pol.q.imag() < par.region.im_min - cell_im ||
                    pol.q.imag() > par.region.im_max + cell_im)
                    continue;
                q_context pctx(pol.q, par.truncation);
                branch_candidate cand;
                cand.point.q = pol.q;
                cand.point.t0 = pol.t;
                cand.point.E = -wp(pol.t, pctx);
                const cplx rr = exponent(pol.t, pctx) / cplx(0.0, pi_d);
                cand.point.m = static_cast<int>(std::lround(rr.real()));
                cand.point.residual_pole = std::abs(wp(pol.t, pctx) + cand.point.E);
                cand.point.residual_exponent =
                    std::abs(exponent(pol.t, pctx) - cplx(0.0, pi_d * cand.point.m));
                cand.r1 = pol.r1;
                cand.r2 = pol.r2;
                cand = refine_coincidence(cand, par);
                const q_context cctx(cand.point.q, par.truncation);
                out.cands.push_back(classify(cand, cctx));
            } catch (const newton_error&) {
                ++out.failed;
                have_prev = false;
            } catch (const pole_error&) {
                ++out.failed;
                have_prev = false;
            }
        }
    };

    const int workers = std::max(1, std::min(par.jobs, par.ny));
    if (workers == 1) {
        for (int iy = 0; iy < par.ny; ++iy) run_row(iy);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int iy = next.fetch_add(1); iy < par.ny; iy = next.fetch_add(1)) run_row(iy);
            });
        for (auto& th : pool) th.join();
    }

    // deterministic merge + dedupe in row-major order
    std::vector<branch_candidate> all;
    for (auto& row : rows) {
        if (stats) {
            stats->points_visited += row.visited;
            stats->points_failed += row.failed;
            stats->polish_attempts += row.attempts;
            stats->polish_failed += row.polish_failed;
        }
        for (auto& c : row.cands) {
            bool dup = false;
            for (const auto& seen : all)
                if (std::abs(seen.point.q - c.point.q) <= par.dedupe_tol) {
                    dup = true;
                    break;
                }
            if (!dup) all.push_back(std::move(c));
        }
    }
    std::sort(all.begin(), all.end(), [](const branch_candidate& a, const branch_candidate& b) {
        if (a.point.q.imag() != b.point.q.imag()) return a.point.q.imag() < b.point.q.imag();
        return a.point.q.real() < b.point.q.real();
    });
    return all;
}

}
