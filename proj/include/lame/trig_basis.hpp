#pragma once

#include <vector>

#include "lame/rational.hpp"

namespace lame {

/// Coupling n(n+1) of the potential; the Gegenbauer index is nu = n + 1.
struct model_params {
    int n = 1;
    explicit model_params(int n_) : n(n_) {
        if (n < 1) throw std::invalid_argument("model_params: n must be a positive integer");
    }
    int nu() const { return n + 1; }
    int coupling() const { return n * (n + 1); }
};

/// One element of the q = 0 eigenbasis v_m = c_m C^{n+1}_m(cos pi x) sin^{n+1}(pi x).
struct basis_element {
    int m;
    rational squared_norm;        // N_m = <w_m, w_m> with w_m the unnormalized element
    rational unperturbed_energy;  // (m+n+1)^2 - n(n+1)/3, in pi^2 units
};

basis_element make_basis_element(int m, const model_params& params);

/// Fourier data of the order-2k potential term, in pi^2 units:
/// constant 8 n(n+1) sigma_1(k) plus a cosine coefficient -8 n(n+1) d
/// for every divisor d of k (harmonic cos 2 d pi x).
struct fourier_term {
    int harmonic;
    rational coeff;
};

struct potential_fourier_data {
    int order;
    rational constant;
    std::vector<fourier_term> cosines;   // ascending harmonic
};

potential_fourier_data potential_fourier(int k, int n);

/// cos(pi x) C^nu_m = a_plus C^nu_{m+1} + a_minus C^nu_{m-1};
/// the a_minus term is absent for m = 0.
struct gegenbauer_step {
    rational a_plus, a_minus;
};

gegenbauer_step gegenbauer_recurrence(int m, const rational& nu);

namespace detail {

/// Row-banded rational matrix whose entry (r, c) may be nonzero only when
/// |r - c| <= reach and r - c has the parity of reach. Row r, slot s holds
/// column c = r - reach + 2s.
struct stepped_band {
    int size = 0;
    int reach = 0;
    std::vector<rational> a;

    static stepped_band zero(int size, int reach);
    rational& slot(int r, int s) { return a[static_cast<size_t>(r) * (reach + 1) + s]; }
    const rational& slot(int r, int s) const { return a[static_cast<size_t>(r) * (reach + 1) + s]; }
    /// Entry (r, c); returns a reference to a shared zero outside the band.
    const rational& get(int r, int c) const;
};

/// Action matrices of the potential orders: result[j-1] is the exact action
/// of V_{2j} on the unnormalized basis w_m over indices [0, cutoff], for
/// j = 1..k_max (pi^2 units). Chebyshev marching runs on an enlarged window
/// so all returned entries are exact despite truncation.
std::vector<stepped_band> potential_actions(int k_max, int cutoff, const model_params& params);

std::vector<int> divisors(int k);

}

/// Exact action of the order-2k potential on the unnormalized basis w_m,
/// restricted to indices 0..cutoff. Entries vanish for odd or out-of-band
/// index gaps (|r - c| > 2k). The orthonormal-basis matrix element is
/// action(r,c) * sqrt(N_r / N_c); symmetry of the orthonormal matrix reads
/// action(r,c) N_r == action(c,r) N_c in exact arithmetic.
class coupling_matrix {
public:
    static coupling_matrix build(int k, int cutoff, const model_params& params);

    int order() const { return order_; }
    int cutoff() const { return cutoff_; }

    /// Coefficient of w_r in V_{2k} w_c (pi^2 units). Zero outside the band.
    const rational& action(int r, int c) const { return band_.get(r, c); }

    /// Orthonormal-basis matrix element <v_r, V_{2k} v_c> as a double (pi^2 units).
    double orthonormal(int r, int c) const;

    const rational& norm_sq(int m) const { return norms_[static_cast<size_t>(m)]; }

private:
    coupling_matrix() = default;
    int order_ = 0;
    int cutoff_ = 0;
    detail::stepped_band band_;
    std::vector<rational> norms_;
};

}
