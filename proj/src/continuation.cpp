#include "lame/continuation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <thread>

namespace lame {

path_spec path_spec::polyline(std::vector<cplx> pts, int steps) {
    if (pts.size() < 2) throw std::invalid_argument("path_spec: polyline needs >= 2 waypoints");
    path_spec p;
    p.kind = kind_t::polyline;
    p.waypoints = std::move(pts);
    p.steps = steps;
    return p;
}

path_spec path_spec::cycle(cplx anchor, double rho, int steps) {
    if (anchor.real() <= 0.0)
        throw std::invalid_argument("path_spec: cycle anchor must have Re a > 0");
    if (rho <= 0.0 || rho >= anchor.imag())
        throw std::invalid_argument("path_spec: cycle radius must satisfy 0 < rho < Im a");
    path_spec p;
    p.kind = kind_t::cycle;
    p.anchor = anchor;
    p.rho = rho;
    p.steps = steps;
    return p;
}

std::vector<cplx> path_spec::discretize() const {
    std::vector<cplx> pts;
    if (kind == kind_t::polyline) {
        double total = 0.0;
        for (size_t i = 0; i + 1 < waypoints.size(); ++i)
            total += std::abs(waypoints[i + 1] - waypoints[i]);
        pts.push_back(waypoints.front());
        for (size_t i = 0; i + 1 < waypoints.size(); ++i) {
            const cplx a = waypoints[i], b = waypoints[i + 1];
            const int n = std::max(
                1, static_cast<int>(std::lround(steps * std::abs(b - a) / std::max(total, 1e-300))));
            for (int s = 1; s <= n; ++s)
                pts.push_back(a + (b - a) * (static_cast<double>(s) / n));
        }
    } else {
        const double ra = anchor.real();
        const cplx below = anchor - cplx(0.0, rho);
        const int vert = std::max(16, steps / 5);
        for (int i = 0; i <= vert; ++i)
            pts.push_back(cplx(ra, below.imag() * i / vert));
        for (int i = 1; i <= steps; ++i) {
            const double th = -0.5 * pi_d + 2.0 * pi_d * i / steps;
            pts.push_back(anchor + rho * std::exp(cplx(0.0, th)));
        }
        for (int i = 1; i <= vert; ++i)
            pts.push_back(cplx(ra, below.imag() * (vert - i) / vert));
    }
    for (const cplx q : pts) {
        const double aq = std::abs(q);
        if (aq >= 1.0 || aq == 0.0)
            throw std::invalid_argument("path_spec: discretized path must keep 0 < |q| < 1");
    }
    return pts;
}

namespace {

// Newton correction on g(t) = zeta(t) - 2 eta1 t + m pi i; g' = -wp(t) - 2 eta1.
// Converged iff |g| <= tol. Returns false on pole or iteration exhaustion.
bool correct_state(const q_context& ctx, cplx& t, int m, const continuation_controls& ctl,
                   int& iters_out) {
    const cplx e1v = eta1(ctx);
    cplx tt = t;
    for (int it = 0; it < ctl.max_newton_iter; ++it) {
        try {
            const cplx g = zeta(tt, ctx) - 2.0 * e1v * tt + cplx(0.0, pi_d * m);
            if (std::abs(g) <= ctl.newton_tol) {
                t = tt;
                iters_out = it;
                return true;
            }
            const cplx gp = -wp(tt, ctx) - 2.0 * e1v;
            if (std::abs(gp) < 1e-13) return false;
            tt -= g / gp;
        } catch (const pole_error&) {
            return false;
        }
    }
    return false;
}

struct tracked {
    cplx t;
    int m = 0;
    int moves = 0;
};

// Keep t inside the working strip; every tau shift moves the sheet index by 2
// (exponent(t + tau) = exponent(t) + 2 pi i).
void renormalize(tracked& st, cplx& t_prev, const q_context& ctx,
                 const continuation_controls& ctl) {
    const cplx tau = ctx.tau();
    while (st.t.imag() > ctl.im_fraction * tau.imag()) {
        st.t -= tau;
        t_prev -= tau;
        st.m -= 2;
        ++st.moves;
    }
    while (st.t.imag() < -ctl.im_fraction * tau.imag()) {
        st.t += tau;
        t_prev += tau;
        st.m += 2;
        ++st.moves;
    }
    while (st.t.real() > 1.0) {
        st.t -= 1.0;
        t_prev -= 1.0;
        ++st.moves;
    }
    while (st.t.real() < -1.0) {
        st.t += 1.0;
        t_prev += 1.0;
        ++st.moves;
    }
}

}

spectral_point init_state(int m_index, double q_start, const rational_series& series,
                          const continuation_controls& controls) {
    if (m_index < 0) throw std::invalid_argument("init_state: m_index must be >= 0");
    if (!(q_start > 0.0 && q_start <= 0.3))
        throw std::invalid_argument("init_state: q_start must lie in (0, 0.3]");

    const q_context ctx(q_start, controls.truncation);
    const cplx E = evaluate(series, q_start).value;

    // trigonometric-limit seed: wp ~ -pi^2/3 - pi^2/sinh^2(pi s) on the
    // imaginary axis, so t0 ~ i asinh(pi / sqrt(E - pi^2/3)) / pi
    cplx seed(0.0, 0.3);
    if (E.real() > pi_sq / 3.0 + 1e-9)
        seed = cplx(0.0, std::asinh(pi_d / std::sqrt(E.real() - pi_sq / 3.0)) / pi_d);

    cplx t0 = solve_t0(q_start, E, seed, ctx);
    const cplx r = exponent(t0, ctx) / cplx(0.0, pi_d);
    int m = static_cast<int>(std::lround(r.real()));
    if (std::abs(r - cplx(static_cast<double>(m), 0.0)) > 1e-7)
        throw newton_error("init_state: exponent is not integral; E is not in the family");
    if (((m % 2 + 2) % 2) != (m_index % 2))
        throw newton_error("init_state: sheet parity does not match the index parity");
    if (m < 0) {
        t0 = -t0;
        m = -m;
    }

    spectral_point out;
    out.q = q_start;
    out.E = E;
    out.t0 = t0;
    out.m = m;
    out.residual_pole = std::abs(wp(t0, ctx) + E);
    out.residual_exponent = std::abs(exponent(t0, ctx) - cplx(0.0, pi_d * m));
    return out;
}

trajectory continue_along(const spectral_point& start, const path_spec& path,
                          const continuation_controls& ctl) {
    const std::vector<cplx> base = path.discretize();
    if (std::abs(base.front() - start.q) > 1e-9)
        throw std::invalid_argument("continue_along: path must start at the state's q");

    double nominal = 0.0;
    for (size_t i = 0; i + 1 < base.size(); ++i)
        nominal = std::max(nominal, std::abs(base[i + 1] - base[i]));

    trajectory traj;
    tracked st{start.t0, start.m, 0};
    cplx t_prev = start.t0;     // previous accepted t0, for the predictor
    cplx q_prev = base.front();

    {
        q_context ctx0(base.front(), ctl.truncation);
        traj.states.push_back({0.0, base.front(), -wp(st.t, ctx0), st.t, st.m, 0, 0});
    }

    std::deque<cplx> queue(base.begin() + 1, base.end());
    size_t consumed = 0;
    const size_t base_targets = queue.size();
    int halvings_here = 0;
    while (!queue.empty()) {
        const cplx q_next = queue.front();
        const q_context ctx(q_next, ctl.truncation);

        // near-branch guard: cap the step at a quarter of the nominal one
        bool force_split = false;
        try {
            const cplx Ecur = -wp(st.t, ctx);
            if (std::abs(Ecur - 2.0 * eta1(ctx)) < ctl.branch_guard * pi_sq &&
                std::abs(q_next - q_prev) > 0.25 * nominal)
                force_split = true;
        } catch (const pole_error&) {
        }

        bool ok = false;
        cplx t_corr;
        int iters = 0;
        if (!force_split) {
            const double denom = std::abs(q_prev - (traj.states.size() > 1
                                                        ? traj.states[traj.states.size() - 2].q
                                                        : q_prev));
            const double ratio = denom > 1e-300 ? std::abs(q_next - q_prev) / denom : 1.0;
            t_corr = st.t + (st.t - t_prev) * ratio;
            ok = correct_state(ctx, t_corr, st.m, ctl, iters);
            if (ok && std::abs(t_corr - st.t) > ctl.step_jump_max) ok = false;
        }
        if (!ok) {
            if (++halvings_here > ctl.max_halvings)
                throw continuation_stall("continue_along: step underflow (branch locus?)", q_next);
            queue.push_front(0.5 * (q_prev + q_next));
            continue;
        }
        halvings_here = 0;

        t_prev = st.t;
        st.t = t_corr;
        renormalize(st, t_prev, ctx, ctl);
        q_prev = q_next;
        queue.pop_front();
        if (consumed < base_targets) ++consumed;

        continuation_state rec;
        rec.s = static_cast<double>(consumed) / static_cast<double>(base_targets);
        rec.q = q_next;
        rec.E = -wp(st.t, ctx);
        rec.t0 = st.t;
        rec.m = st.m;
        rec.newton_iters = iters;
        rec.sheet_moves = st.moves;
        traj.states.push_back(rec);
    }
    return traj;
}

bool permutation_report::is_identity() const {
    for (size_t i = 0; i < indices.size(); ++i)
        if (indices[i] != image[i]) return false;
    return true;
}

permutation_report monodromy_permutation(cplx anchor, const std::vector<int>& indices,
                                         double rho, const model_params& params,
                                         const continuation_controls& ctl,
                                         std::vector<trajectory>* out_cycles) {
    if (indices.empty()) throw std::invalid_argument("monodromy_permutation: no indices");
    const int parity = indices.front() % 2;
    for (int i : indices)
        if (i % 2 != parity)
            throw std::invalid_argument("monodromy_permutation: indices must share parity");

    const auto expansions = expand_many(indices, ctl.series_order, params, ctl.jobs);

    const double q_base = ctl.q_base;
    const cplx q_anchor_base(anchor.real(), 0.0);
    if (out_cycles) out_cycles->assign(indices.size(), trajectory{});

    struct run_out {
        double E_ref = 0.0;
        cplx E_fin;
    };
    std::vector<run_out> runs(indices.size());

    auto run_one = [&](size_t i) {
        const spectral_point s0 = init_state(indices[i], q_base, expansions[i].series, ctl);
        // real-axis approach to Re(anchor)
        const path_spec approach = path_spec::polyline({cplx(q_base, 0.0), q_anchor_base},
                                                       std::max(40, ctl.path_steps / 4));
        const trajectory t1 = continue_along(s0, approach, ctl);
        runs[i].E_ref = t1.back().E.real();

        spectral_point at_base;
        at_base.q = t1.back().q;
        at_base.E = t1.back().E;
        at_base.t0 = t1.back().t0;
        at_base.m = t1.back().m;

        const path_spec cyc = path_spec::cycle(anchor, rho, ctl.path_steps);
        trajectory t2 = continue_along(at_base, cyc, ctl);
        runs[i].E_fin = t2.back().E;
        if (out_cycles) (*out_cycles)[i] = std::move(t2);
    };

    const int workers = std::max(1, std::min<int>(ctl.jobs, static_cast<int>(indices.size())));
    if (workers == 1) {
        for (size_t i = 0; i < indices.size(); ++i) run_one(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < indices.size(); i = next.fetch_add(1))
                    run_one(i);
            });
        for (auto& th : pool) th.join();
    }

    permutation_report rep;
    rep.anchor = anchor;
    rep.rho = rho;
    rep.indices = indices;
    rep.image.resize(indices.size());
    rep.match_error.resize(indices.size());
    for (size_t i = 0; i < indices.size(); ++i) {
        double best = 1e300, second = 1e300;
        size_t best_j = 0;
        for (size_t j = 0; j < indices.size(); ++j) {
            const double d = std::abs(runs[i].E_fin - cplx(runs[j].E_ref, 0.0)) / pi_sq;
            if (d < best) {
                second = best;
                best = d;
                best_j = j;
            } else if (d < second) {
                second = d;
            }
        }
        if (best > 1e-4)
            throw newton_error("monodromy_permutation: unmatched final eigenvalue");
        if (second - best < 1e-6)
            throw newton_error("monodromy_permutation: ambiguous eigenvalue match");
        rep.image[i] = indices[best_j];
        rep.match_error[i] = best;
    }
    return rep;
}

}
