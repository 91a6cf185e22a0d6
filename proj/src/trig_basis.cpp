#include "lame/trig_basis.hpp"

#include <cmath>

namespace lame {

namespace detail {

std::vector<int> divisors(int k) {
    std::vector<int> out;
    for (int d = 1; d <= k; ++d)
        if (k % d == 0) out.push_back(d);
    return out;
}

stepped_band stepped_band::zero(int size, int reach) {
    stepped_band m;
    m.size = size;
    m.reach = reach;
    m.a.assign(static_cast<size_t>(size) * (reach + 1), rational(0));
    return m;
}

namespace {
const rational zero_rational(0);
}

const rational& stepped_band::get(int r, int c) const {
    const int off = c - r;
    if (off < -reach || off > reach || ((off - reach) & 1)) return zero_rational;
    return slot(r, (off + reach) / 2);
}

namespace {

// One Chebyshev marching step: out = 2 Z T - P where Z is the cos(pi x)
// multiplication operator, T has reach t_reach and P has reach t_reach - 1.
// (Z T)[r][c] = a_plus(r-1) T[r-1][c] + a_minus(r+1) T[r+1][c].
stepped_band cheb_step(const stepped_band& T, const stepped_band& P, const rational& nu) {
    const int n = T.size;
    stepped_band out = stepped_band::zero(n, T.reach + 1);
    for (int r = 0; r < n; ++r) {
        if (r - 1 >= 0) {
            const rational w = 2 * gegenbauer_recurrence(r - 1, nu).a_plus;
            const int base = r - 1 - T.reach;
            for (int s = 0; s <= T.reach; ++s) {
                const rational& v = T.slot(r - 1, s);
                if (v == 0) continue;
                const int c = base + 2 * s;
                if (c < 0 || c >= n) continue;
                out.slot(r, (c - r + out.reach) / 2) += w * v;
            }
        }
        if (r + 1 < n) {
            const rational w = 2 * gegenbauer_recurrence(r + 1, nu).a_minus;
            const int base = r + 1 - T.reach;
            for (int s = 0; s <= T.reach; ++s) {
                const rational& v = T.slot(r + 1, s);
                if (v == 0) continue;
                const int c = base + 2 * s;
                if (c < 0 || c >= n) continue;
                out.slot(r, (c - r + out.reach) / 2) += w * v;
            }
        }
        // subtract P (reach T.reach - 1, same parity as out)
        const int pbase = r - P.reach;
        for (int s = 0; s <= P.reach; ++s) {
            const rational& v = P.slot(r, s);
            if (v == 0) continue;
            const int c = pbase + 2 * s;
            if (c < 0 || c >= n) continue;
            out.slot(r, (c - r + out.reach) / 2) -= v;
        }
    }
    return out;
}

}

std::vector<stepped_band> potential_actions(int k_max, int cutoff, const model_params& params) {
    if (k_max < 1) throw std::invalid_argument("potential_actions: k_max must be >= 1");
    if (cutoff < 2 * k_max)
        throw std::invalid_argument("potential_actions: cutoff must be >= 2 k_max");

    const rational nu(params.nu());
    const rational scale(8L * params.coupling());
    const int work = cutoff + 2 * k_max + 1;   // rows above `cutoff` absorb truncation

    std::vector<stepped_band> U;
    U.reserve(k_max);
    for (int j = 1; j <= k_max; ++j) {
        U.push_back(stepped_band::zero(cutoff + 1, 2 * j));
        rational sigma1(0);
        for (int d : divisors(j)) sigma1 += d;
        for (int r = 0; r <= cutoff; ++r)
            U.back().slot(r, j) = scale * sigma1;   // diagonal slot: offset 0
    }

    // March T_1, T_2, ... over the enlarged window, folding each T_{2d} into
    // every U_j with d | j as it appears, then discarding it.
    stepped_band Tprev = stepped_band::zero(work, 0);
    for (int r = 0; r < work; ++r) Tprev.slot(r, 0) = 1;            // T_0 = I
    stepped_band Tcur = stepped_band::zero(work, 1);   // T_1 = Z
    for (int r = 0; r < work; ++r) {
        if (r - 1 >= 0) Tcur.slot(r, 0) = gegenbauer_recurrence(r - 1, nu).a_plus;
        if (r + 1 < work) Tcur.slot(r, 1) = gegenbauer_recurrence(r + 1, nu).a_minus;
    }
    for (int j = 2; j <= 2 * k_max; ++j) {
        stepped_band Tnext = cheb_step(Tcur, Tprev, nu);
        Tprev = std::move(Tcur);
        Tcur = std::move(Tnext);
        if (j % 2 != 0) continue;
        const int d = j / 2;
        for (int target = d; target <= k_max; target += d) {
            stepped_band& Uj = U[static_cast<size_t>(target - 1)];
            for (int r = 0; r <= cutoff; ++r) {
                const int base = r - Tcur.reach;
                for (int s = 0; s <= Tcur.reach; ++s) {
                    const rational& v = Tcur.slot(r, s);
                    if (v == 0) continue;
                    const int c = base + 2 * s;
                    if (c < 0 || c > cutoff) continue;
                    Uj.slot(r, (c - r + Uj.reach) / 2) -= scale * d * v;
                }
            }
        }
    }
    return U;
}

}

basis_element make_basis_element(int m, const model_params& params) {
    if (m < 0) throw std::invalid_argument("basis_element: m must be >= 0");
    const int n = params.n;
    // N_m = (m+2n+1)! / (2^{2n+1} (m+n+1) m! (n!)^2)
    rational num(factorial(static_cast<unsigned>(m + 2 * n + 1)));
    rational den(factorial(static_cast<unsigned>(m)));
    den *= rational(factorial(static_cast<unsigned>(n))) * rational(factorial(static_cast<unsigned>(n)));
    den *= rational(m + n + 1);
    den *= rational_pow(rational(2), static_cast<unsigned>(2 * n + 1));
    rational norm = num / den;
    norm.canonicalize();

    rational energy(static_cast<long>(m + n + 1) * (m + n + 1));
    energy -= rational(n * (n + 1), 3);

    return basis_element{m, norm, energy};
}

potential_fourier_data potential_fourier(int k, int n) {
    if (k < 1) throw std::invalid_argument("potential_fourier: k must be >= 1");
    const rational scale(8L * n * (n + 1));
    potential_fourier_data out;
    out.order = k;
    out.constant = 0;
    for (int d : detail::divisors(k)) {
        out.constant += scale * d;
        out.cosines.push_back({d, rational(-scale * d)});
    }
    return out;
}

gegenbauer_step gegenbauer_recurrence(int m, const rational& nu) {
    if (m < 0) throw std::invalid_argument("gegenbauer_recurrence: m must be >= 0");
    const rational den = 2 * (m + nu);
    gegenbauer_step st;
    st.a_plus = rational(m + 1) / den;
    if (m == 0)
        st.a_minus = 0;
    else
        st.a_minus = (2 * nu + rational(m - 1)) / den;
    st.a_plus.canonicalize();
    st.a_minus.canonicalize();
    return st;
}

coupling_matrix coupling_matrix::build(int k, int cutoff, const model_params& params) {
    if (k < 1) throw std::invalid_argument("coupling_matrix: k must be >= 1");
    if (cutoff < 2 * k)
        throw std::invalid_argument("coupling_matrix: cutoff must be >= 2k, band would overflow");

    coupling_matrix out;
    out.order_ = k;
    out.cutoff_ = cutoff;
    out.band_ = std::move(detail::potential_actions(k, cutoff, params).back());
    out.norms_.reserve(cutoff + 1);
    for (int m = 0; m <= cutoff; ++m)
        out.norms_.push_back(make_basis_element(m, params).squared_norm);
    return out;
}

double coupling_matrix::orthonormal(int r, int c) const {
    const rational ratio = norms_[static_cast<size_t>(r)] / norms_[static_cast<size_t>(c)];
    return to_double(action(r, c)) * std::sqrt(to_double(ratio));
}

}
