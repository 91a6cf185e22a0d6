#pragma once

// Extended-precision evaluation of the same truncated q-series the double
// path uses. Templated on the complex scalar; the caller supplies pi at the
// working precision. No lattice reduction: the argument must already lie in
// a strip where the sums decay.

#include <vector>

namespace lame::detail {

template <class C>
struct series_weights {
    std::vector<C> wk, w1, wk2;

    static series_weights make(const C& q, int K) {
        series_weights out;
        out.wk.reserve(K);
        out.w1.reserve(K);
        out.wk2.reserve(K);
        const C q2 = q * q;
        C qp(1);
        for (int k = 1; k <= K; ++k) {
            qp *= q2;
            const C base = qp / (C(1) - qp);
            out.w1.push_back(base);
            out.wk.push_back(C(k) * base);
            out.wk2.push_back(C(k) * C(k) * base);
        }
        return out;
    }
};

template <class C, class R>
C eta1_series(const series_weights<C>& w, const R& pi) {
    C acc(0);
    for (const auto& t : w.wk) acc += t;
    return pi * pi * (C(R(1) / R(6)) - C(4) * acc);
}

template <class C, class R>
C wp_series(const C& x, const series_weights<C>& w, const C& eta1v, const R& pi) {
    using std::cos;
    using std::exp;
    using std::sin;
    const C s = sin(pi * x);
    const C e = exp(C(0, 2) * pi * x);
    C ep(1), em(1), acc(0);
    for (const auto& t : w.wk) {
        ep *= e;
        em /= e;
        acc += t * (ep + em) / C(2);
    }
    return -C(2) * eta1v + pi * pi / (s * s) - C(8) * pi * pi * acc;
}

template <class C, class R>
C wp_prime_series(const C& x, const series_weights<C>& w, const R& pi) {
    using std::cos;
    using std::exp;
    using std::sin;
    const C s = sin(pi * x);
    const C c = cos(pi * x);
    const C e = exp(C(0, 2) * pi * x);
    C ep(1), em(1), acc(0);
    for (const auto& t : w.wk2) {
        ep *= e;
        em /= e;
        acc += t * (ep - em) / C(0, 2);
    }
    return -C(2) * pi * pi * pi * c / (s * s * s) + C(16) * pi * pi * pi * acc;
}

template <class C, class R>
C zeta_series(const C& x, const series_weights<C>& w, const C& eta1v, const R& pi) {
    using std::cos;
    using std::exp;
    using std::sin;
    const C s = sin(pi * x);
    const C c = cos(pi * x);
    const C e = exp(C(0, 2) * pi * x);
    C ep(1), em(1), acc(0);
    for (const auto& t : w.w1) {
        ep *= e;
        em /= e;
        acc += t * (ep - em) / C(0, 2);
    }
    return C(2) * eta1v * x + pi * c / s + C(4) * pi * acc;
}

}
