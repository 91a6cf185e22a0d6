#pragma once

#include <optional>
#include <vector>

#include "lame/rational.hpp"
#include "lame/trig_basis.hpp"
#include "lame/types.hpp"

namespace lame {

/// Even power series in q with exact rational coefficients, pi^2 units:
/// E_m(q) = pi^2 sum_k coeffs[k] q^{2k}.
struct rational_series {
    int n = 1;
    int m = 0;
    std::vector<rational> coeffs;
    int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

/// Eigenvector expansion data. chat[k][m'] are the w-basis coefficients of
/// sqrt(N_m) v_m(q) at order q^{2k}; the orthonormal-basis coefficient is
/// chat[k][m'] * sqrt(norm_sq[m'] / norm_sq[m]). Support is banded:
/// chat[k][m'] == 0 unless |m' - m| <= 2k and m' - m is even.
struct eigvec_table {
    int m = 0;
    int cutoff = 0;
    std::vector<std::vector<rational>> chat;
    std::vector<rational> norm_sq;
};

struct expansion {
    rational_series series;
    eigvec_table vectors;
};

/// Exact eigenvalue/eigenvector expansion of index m to order q^{2 k_max}.
/// Basis cutoff is m + 2 k_max + 2; the banded support makes that lossless.
expansion expand(int m, int k_max, const model_params& params);

/// Shared-workspace expansion of several indices (one potential-action build).
std::vector<expansion> expand_many(const std::vector<int>& ms, int k_max,
                                   const model_params& params, int jobs = 1);

struct eval_result {
    cplx value;                  // absolute units (pi^2 applied)
    bool radius_warning = false; // set when a radius was supplied and |q| >= radius
};

/// Horner evaluation in q^2. Advisory warning only; never throws for large q.
eval_result evaluate(const rational_series& s, cplx q,
                     std::optional<double> radius = std::nullopt);

/// Exact evaluation at rational q, result in pi^2 units.
rational evaluate_exact(const rational_series& s, const rational& q);

struct radius_fit {
    double log_a = 0.0;
    double log_b = 0.0;
    double a() const;
    double b() const;
};

struct radius_estimate {
    double radius = 0.0;   // 1/b of the least-squares envelope fit
    double tail = 0.0;     // min over the last 10 usable k of (|c_k|/a)^{-1/(2k)}
    radius_fit fit;
    int points_used = 0;
};

/// Least-squares fit of log|coeffs[k]| ~ log a + 2k log b over k in
/// [k_min, order]; zero coefficients are skipped. Throws std::domain_error
/// when fewer than 5 usable points remain or the order is below k_min + 10.
radius_estimate estimate_radius(const rational_series& s, int k_min = 10);

}
