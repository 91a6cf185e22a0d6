#pragma once

#include <vector>

#include "lame/monodromy.hpp"
#include "lame/perturbation.hpp"

namespace lame {

/// A path in the q plane: either an explicit polyline, or the keyhole cycle
/// around an anchor a — start at Re a on the real axis, rise parallel to the
/// imaginary axis to a - i rho, circle a anti-clockwise, descend back.
struct path_spec {
    enum class kind_t { polyline, cycle };
    kind_t kind = kind_t::polyline;
    std::vector<cplx> waypoints;   // polyline
    cplx anchor;                   // cycle
    double rho = 0.02;
    int steps = 400;

    static path_spec polyline(std::vector<cplx> pts, int steps = 400);
    static path_spec cycle(cplx anchor, double rho = 0.02, int steps = 400);

    /// Validated discretization: every point has 0 < |q| < 1.
    std::vector<cplx> discretize() const;
};

struct continuation_controls {
    int truncation = default_truncation;
    double newton_tol = 1e-11;
    int max_newton_iter = 30;
    int max_halvings = 12;
    double step_jump_max = 0.25;      // largest accepted |t0 move| per step
    double im_fraction = 0.35;        // tau-shift t0 when |Im t0| exceeds this * Im tau
    double branch_guard = 1e-3;       // cap steps near |E - 2 eta1| < guard * pi^2
    int series_order = 20;            // expansion order used by init_state helpers
    double q_base = 0.15;             // start nome for permutation runs
    int path_steps = 400;             // discretization of permutation-run paths
    int jobs = 1;
};

struct continuation_state {
    double s = 0.0;   // fraction of the discretized path consumed
    cplx q, E, t0;
    int m = 0;
    int newton_iters = 0;
    int sheet_moves = 0;
};

struct trajectory {
    std::vector<continuation_state> states;
    const continuation_state& back() const { return states.back(); }
};

/// Start state for index m_index at real nome q_start (0 < q_start <= 0.3):
/// E from the series, t0 by Newton, sheet index from the exponent. The sheet
/// parity must match the index parity (hard error otherwise); the sign is
/// normalized to m >= 0.
spectral_point init_state(int m_index, double q_start, const rational_series& series,
                          const continuation_controls& controls = {});

/// Predictor-corrector tracking of (t0, m) along the path, keeping
/// E = -wp(t0) and 2 eta1 t0 - zeta(t0) = m pi i. Lattice moves re-normalize
/// t0 and shift m by the exponent translation laws. Throws continuation_stall
/// when step halving underflows.
trajectory continue_along(const spectral_point& start, const path_spec& path,
                          const continuation_controls& controls = {});

struct permutation_report {
    cplx anchor;
    double rho = 0.0;
    std::vector<int> indices;
    std::vector<int> image;            // image[i]: index reached from indices[i]
    std::vector<double> match_error;   // |E_final - E_ref(image)| in pi^2 units
    bool is_identity() const;
};

/// Runs the cycle around `anchor` for every index (same parity required),
/// matching final eigenvalues to the family values at Re(anchor) by |dE|.
/// Matching threshold 1e-4 pi^2 with tie detection at 1e-6 pi^2. When
/// `out_cycles` is given it receives the cycle trajectory of each index.
permutation_report monodromy_permutation(cplx anchor, const std::vector<int>& indices,
                                         double rho, const model_params& params,
                                         const continuation_controls& controls = {},
                                         std::vector<trajectory>* out_cycles = nullptr);

}
