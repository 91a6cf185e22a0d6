#pragma once

#include <vector>

#include "lame/elliptic.hpp"
#include "lame/types.hpp"

namespace lame {

/// A point (q, E) with its auxiliary data: E = -wp(t0) and
/// 2 eta1 t0 - zeta(t0) = m pi i. Even m: periodic family; odd m: anti-periodic.
struct spectral_point {
    cplx q;
    cplx E;               // absolute units
    cplx t0;
    int m = 0;
    double residual_pole = 0.0;      // |wp(t0) + E|
    double residual_exponent = 0.0;  // |2 eta1 t0 - zeta(t0) - m pi i|
};

enum class branch_class {
    true_branch,
    coincidence_e1,
    coincidence_e2,
    coincidence_e3,
    unresolved,
};

const char* to_string(branch_class c);

/// Root of the simultaneous branching conditions 2 eta1 = -wp(t0) and
/// exponent quantization, with residuals and its coincidence classification.
struct branch_candidate {
    spectral_point point;
    double r1 = 0.0;               // |2 eta1 + wp(t0)|
    double r2 = 0.0;               // |2 eta1 t0 - zeta(t0) - m pi i|
    double coincidence_gap = 0.0;  // min_i |2 eta1 + e_i|
    branch_class classification = branch_class::unresolved;
};

/// Newton solve of wp(t) + E = 0 from `seed`; the result is lattice-reduced
/// and sign-normalized to Re t0 in (0, 1/2] (pure-imaginary roots take
/// Im t0 >= 0). Throws newton_error on failure or a near-singular Jacobian.
cplx solve_t0(cplx q, cplx E, cplx seed, const q_context& ctx);

/// Floquet exponent 2 eta1 t0 - zeta(t0). Invariant under t0 -> t0 + 1,
/// gains 2 pi i under t0 -> t0 + tau, flips sign under t0 -> -t0.
cplx exponent(cplx t0, const q_context& ctx);

/// The same exponent from the hyperelliptic integral
///   (1/2) int_{-e1}^{E} (s - 2 eta1) / sqrt(-(s+e1)(s+e2)(s+e3)) ds
/// with the square-root branch continued from the principal value at the
/// endpoint substitution s = -e1 + u^2. Agrees with `exponent` modulo
/// pi i Z and overall sign. Throws quadrature_error when the path cannot
/// avoid a branch point.
cplx hyperelliptic_exponent(cplx E, const q_context& ctx);

struct multiplier_result {
    cplx trace;        // of the x -> x+1 transfer matrix
    cplx multiplier;   // root of mu^2 - trace mu + 1 with |mu| >= 1
};

/// Direct integration oracle: f'' = (2 wp(x + tau/2) - E) f over [0, 1]
/// (pole-free potential on the real axis), classic RK4 with `steps` steps.
multiplier_result ode_multiplier(cplx q, cplx E, int steps = 6000,
                                 int truncation = default_truncation);

struct scan_region {
    double re_min = 0.0, re_max = 0.9;
    double im_min = 0.0, im_max = 0.9;
};

struct scan_params {
    scan_region region;
    int nx = 40, ny = 40;
    int m_min = -6, m_max = 6;
    int truncation = default_truncation;
    // Candidates kept strictly inside this modulus. One published root sits at
    // |q| = 0.9034, so the default leaves margin beyond 0.9.
    double q_abs_max = 0.91;
    double q_abs_min = 0.05;         // polished roots below this are the q->0 degeneracy
    // Pre-polish detector on exponent/(pi i). The distance-to-integer field
    // moves at 5..20 per unit of q near the large-|q| roots, so any filter
    // tighter than a grid cell drops them; 0.5 (the maximum possible
    // distance) polishes from every grid point, which costs milliseconds.
    double near_integer_tol = 0.5;
    double polish_tol = 1e-10;
    double dedupe_tol = 1e-6;
    int jobs = 1;
};

struct scan_stats {
    int points_visited = 0;
    int points_failed = 0;
    int polish_attempts = 0;
    int polish_failed = 0;
};

/// Grid scan for simultaneous roots of the branching conditions, with
/// per-point Newton tracking, near-integer detection, two-variable polish
/// and deduplication. Per-point failures are skipped, never fatal.
/// Deterministic for fixed parameters, independent of `jobs`.
std::vector<branch_candidate> branch_scan(const scan_params& params,
                                          scan_stats* stats = nullptr);

/// Fills `classification`: coincidence_ei when |2 eta1 + e_i| <= 1e-6 pi^2,
/// true_branch otherwise. `ctx` must be at the candidate's q.
branch_candidate classify(branch_candidate cand, const q_context& ctx);

}
