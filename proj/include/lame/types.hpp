#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lame {

using cplx = std::complex<double>;

inline constexpr double pi_d = std::numbers::pi_v<double>;
inline constexpr double pi_sq = pi_d * pi_d;

/// Newton iteration failed to reach the requested residual.
struct newton_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Series argument too close to a lattice pole.
struct pole_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Adaptive quadrature could not resolve the integrand.
struct quadrature_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Path tracking stalled (step underflow); carries the offending q.
struct continuation_stall : std::runtime_error {
    cplx q_stall;
    continuation_stall(const std::string& msg, cplx q) : std::runtime_error(msg), q_stall(q) {}
};

}
