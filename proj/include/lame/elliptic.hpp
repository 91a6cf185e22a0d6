#pragma once

#include <vector>

#include "lame/types.hpp"

namespace lame {

inline constexpr int default_truncation = 200;
inline constexpr double pole_tol = 1e-8;

/// Immutable evaluation context for the q-series of the Weierstrass functions
/// on the lattice (1, tau), q = exp(pi i tau). Caches the lattice sums
/// k q^{2k}/(1-q^{2k}) and friends for k = 1..K, plus their q-derivatives.
/// Safe for concurrent use once constructed.
class q_context {
public:
    explicit q_context(cplx q, int truncation = default_truncation);

    cplx q() const { return q_; }
    int truncation() const { return trunc_; }

    /// tau = log(q)/(pi i), principal branch, Im tau > 0. Throws at q = 0.
    cplx tau() const;
    bool is_trigonometric() const { return q_ == cplx(0.0); }

    // weights[k-1] holds the k-th cached term, k = 1..K
    const std::vector<cplx>& w_k() const { return w1_; }      // k q^{2k}/(1-q^{2k})
    const std::vector<cplx>& w_1() const { return w2_; }      // q^{2k}/(1-q^{2k})
    const std::vector<cplx>& w_k2() const { return w3_; }     // k^2 q^{2k}/(1-q^{2k})
    const std::vector<cplx>& dw_k() const { return dw1_; }    // d/dq of w_k entries
    const std::vector<cplx>& dw_1() const { return dw2_; }    // d/dq of w_1 entries

    cplx lattice_sum() const { return s_a_; }                 // sum of w_k entries

private:
    cplx q_;
    int trunc_;
    cplx tau_;
    cplx s_a_;
    std::vector<cplx> w1_, w2_, w3_, dw1_, dw2_;
};

struct elliptic_constants {
    cplx eta1, eta3;
    cplx e1, e2, e3;
};

/// eta1 = pi^2 (1/6 - 4 sum_{k=1..K} k q^{2k}/(1-q^{2k})).
cplx eta1(const q_context& ctx);

/// d(eta1)/dq of the truncated series.
cplx eta1_dq(const q_context& ctx);

/// wp(x) = -2 eta1 + pi^2/sin^2(pi x) - 8 pi^2 sum k q^{2k}/(1-q^{2k}) cos 2k pi x.
/// x is lattice-reduced first; throws pole_error when |sin(pi x)| < pole_tol.
cplx wp(cplx x, const q_context& ctx);

/// d(wp)/dx of the truncated series.
cplx wp_prime(cplx x, const q_context& ctx);

/// partial d(wp)/dq at fixed x (term-by-term q-derivative).
cplx wp_dq(cplx x, const q_context& ctx);

/// zeta(x) = 2 eta1 x + pi/tan(pi x) + 4 pi sum q^{2k}/(1-q^{2k}) sin 2k pi x,
/// extended to the full plane through the quasi-periodicity corrections of the
/// lattice reduction.
cplx zeta(cplx x, const q_context& ctx);

/// partial d(zeta)/dq at fixed x.
cplx zeta_dq(cplx x, const q_context& ctx);

/// e_i = wp(omega_i) at omega_1 = 1/2, omega_2 = -1/2 - tau/2, omega_3 = tau/2;
/// eta3 from the Legendre relation eta3 = eta1 tau - pi i.
elliptic_constants constants(const q_context& ctx);

/// True when the cos/sin sums decay for this x before lattice reduction,
/// i.e. |q^2 e^{2 pi |Im x|}| < 1.
bool series_converges(cplx x, const q_context& ctx);

struct lattice_reduced {
    cplx x;            // representative with Re in [-1/2,1/2), |Im| <= Im(tau)/2
    long shift_one;    // x = reduced.x + shift_one * 1 + shift_tau * tau
    long shift_tau;
};

lattice_reduced reduce_to_cell(cplx x, const q_context& ctx);

}
