#include "lame/elliptic.hpp"

#include <cmath>
#include <limits>

namespace lame {

q_context::q_context(cplx q, int truncation) : q_(q), trunc_(truncation) {
    if (std::abs(q) >= 1.0)
        throw std::domain_error("q_context: |q| must be < 1, series diverge otherwise");
    if (truncation < 1)
        throw std::domain_error("q_context: truncation order K must be >= 1");

    if (q_ != cplx(0.0)) {
        // principal log; Im tau = -ln|q|/pi > 0
        tau_ = std::log(q_) / (cplx(0.0, 1.0) * pi_d);
    } else {
        tau_ = cplx(0.0, std::numeric_limits<double>::infinity());
    }

    w1_.resize(trunc_);
    w2_.resize(trunc_);
    w3_.resize(trunc_);
    dw1_.resize(trunc_);
    dw2_.resize(trunc_);
    const cplx q2 = q_ * q_;
    cplx qp(1.0);       // q^{2k}
    cplx qpm(1.0);      // q^{2k-1}
    s_a_ = cplx(0.0);
    for (int k = 1; k <= trunc_; ++k) {
        qpm = (k == 1) ? q_ : qpm * q2;
        qp *= q2;
        const cplx den = 1.0 - qp;
        const cplx base = qp / den;
        const double kd = static_cast<double>(k);
        w2_[k - 1] = base;
        w1_[k - 1] = kd * base;
        w3_[k - 1] = kd * kd * base;
        const cplx dbase = 2.0 * kd * qpm / (den * den);
        dw2_[k - 1] = dbase;
        dw1_[k - 1] = kd * dbase;
        s_a_ += w1_[k - 1];
    }
}

cplx q_context::tau() const {
    if (is_trigonometric())
        throw std::domain_error("tau is undefined at q = 0");
    return tau_;
}

lattice_reduced reduce_to_cell(cplx x, const q_context& ctx) {
    lattice_reduced out{x, 0, 0};
    if (!ctx.is_trigonometric()) {
        const cplx tau = ctx.tau();
        const long b = static_cast<long>(std::floor(x.imag() / tau.imag() + 0.5));
        if (b != 0) {
            out.x -= static_cast<double>(b) * tau;
            out.shift_tau = b;
        }
    }
    const long a = static_cast<long>(std::floor(out.x.real() + 0.5));
    if (a != 0) {
        out.x -= static_cast<double>(a);
        out.shift_one = a;
    }
    return out;
}

bool series_converges(cplx x, const q_context& ctx) {
    const double aq = std::abs(ctx.q());
    if (aq == 0.0) return true;
    return aq * aq * std::exp(2.0 * pi_d * std::abs(x.imag())) < 1.0;
}

cplx eta1(const q_context& ctx) {
    return pi_sq * (1.0 / 6.0 - 4.0 * ctx.lattice_sum());
}

cplx eta1_dq(const q_context& ctx) {
    cplx acc(0.0);
    for (const cplx& d : ctx.dw_k()) acc += d;
    return pi_sq * (-4.0) * acc;
}

namespace {

// Accumulates sum of weights[k-1] * cos(2 k pi x) (kind=0) or * sin(2 k pi x)
// (kind=1) by the exp recurrence. Underflowed weights are skipped so a huge
// cos/sin factor never multiplies a denormal into NaN territory.
cplx trig_sum(cplx x, const std::vector<cplx>& weights, int kind) {
    const cplx e = std::exp(cplx(0.0, 2.0 * pi_d) * x);
    const cplx einv = 1.0 / e;
    cplx ep(1.0), em(1.0), acc(0.0);
    for (const cplx& w : weights) {
        ep *= e;
        em *= einv;
        if (w == cplx(0.0)) continue;
        if (kind == 0)
            acc += w * (ep + em) * 0.5;
        else
            acc += w * (ep - em) * cplx(0.0, -0.5);
    }
    return acc;
}

cplx reduced_or_throw(cplx x, const q_context& ctx, const char* who) {
    const cplx xr = reduce_to_cell(x, ctx).x;
    if (std::abs(std::sin(pi_d * xr)) < pole_tol)
        throw pole_error(std::string(who) + ": argument within pole_tol of a lattice point");
    return xr;
}

}

cplx wp(cplx x, const q_context& ctx) {
    const cplx xr = reduced_or_throw(x, ctx, "wp");
    const cplx s = std::sin(pi_d * xr);
    return -2.0 * eta1(ctx) + pi_sq / (s * s) - 8.0 * pi_sq * trig_sum(xr, ctx.w_k(), 0);
}

cplx wp_prime(cplx x, const q_context& ctx) {
    const cplx xr = reduced_or_throw(x, ctx, "wp_prime");
    const cplx s = std::sin(pi_d * xr);
    const cplx c = std::cos(pi_d * xr);
    const double pi3 = pi_sq * pi_d;
    return -2.0 * pi3 * c / (s * s * s) + 16.0 * pi3 * trig_sum(xr, ctx.w_k2(), 1);
}

cplx wp_dq(cplx x, const q_context& ctx) {
    const cplx xr = reduced_or_throw(x, ctx, "wp_dq");
    return -2.0 * eta1_dq(ctx) - 8.0 * pi_sq * trig_sum(xr, ctx.dw_k(), 0);
}

cplx zeta(cplx x, const q_context& ctx) {
    const lattice_reduced red = reduce_to_cell(x, ctx);
    const cplx xr = red.x;
    if (std::abs(std::sin(pi_d * xr)) < pole_tol)
        throw pole_error("zeta: argument within pole_tol of a lattice point");
    const cplx s = std::sin(pi_d * xr);
    const cplx c = std::cos(pi_d * xr);
    const cplx e1v = eta1(ctx);
    cplx val = 2.0 * e1v * xr + pi_d * c / s + 4.0 * pi_d * trig_sum(xr, ctx.w_1(), 1);
    if (red.shift_one != 0)
        val += 2.0 * static_cast<double>(red.shift_one) * e1v;
    if (red.shift_tau != 0) {
        const cplx eta3 = e1v * ctx.tau() - cplx(0.0, pi_d);
        val += 2.0 * static_cast<double>(red.shift_tau) * eta3;
    }
    return val;
}

cplx zeta_dq(cplx x, const q_context& ctx) {
    const lattice_reduced red = reduce_to_cell(x, ctx);
    const cplx xr = red.x;
    if (std::abs(std::sin(pi_d * xr)) < pole_tol)
        throw pole_error("zeta_dq: argument within pole_tol of a lattice point");
    const cplx de1 = eta1_dq(ctx);
    cplx val = 2.0 * de1 * xr + 4.0 * pi_d * trig_sum(xr, ctx.dw_1(), 1);
    if (red.shift_one != 0)
        val += 2.0 * static_cast<double>(red.shift_one) * de1;
    if (red.shift_tau != 0) {
        // d(eta3)/dq with eta3 = eta1 tau - pi i and dtau/dq = 1/(pi i q)
        const cplx dtau = 1.0 / (cplx(0.0, pi_d) * ctx.q());
        const cplx deta3 = de1 * ctx.tau() + eta1(ctx) * dtau;
        val += 2.0 * static_cast<double>(red.shift_tau) * deta3;
    }
    return val;
}

elliptic_constants constants(const q_context& ctx) {
    elliptic_constants out;
    out.eta1 = eta1(ctx);
    if (ctx.is_trigonometric()) {
        out.e1 = wp(cplx(0.5), ctx);
        out.e2 = -2.0 * out.eta1;    // q -> 0 limit at the tau-dependent half-periods
        out.e3 = out.e2;
        out.eta3 = cplx(0.0, std::numeric_limits<double>::infinity());
        return out;
    }
    const cplx tau = ctx.tau();
    out.e1 = wp(cplx(0.5), ctx);
    out.e2 = wp(-0.5 - 0.5 * tau, ctx);
    out.e3 = wp(0.5 * tau, ctx);
    out.eta3 = out.eta1 * tau - cplx(0.0, pi_d);
    return out;
}

}
