#include "lame/perturbation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace lame {

namespace {

using detail::stepped_band;

expansion run_recursion(int m, int k_max, const std::vector<stepped_band>& U,
                        const std::vector<rational>& norms,
                        const std::vector<rational>& energies,
                        const model_params& params) {
    const int M = static_cast<int>(norms.size()) - 1;
    expansion out;
    out.series.n = params.n;
    out.series.m = m;
    out.series.coeffs.assign(static_cast<size_t>(k_max) + 1, rational(0));
    out.vectors.m = m;
    out.vectors.cutoff = M;
    out.vectors.norm_sq = norms;
    out.vectors.chat.assign(static_cast<size_t>(k_max) + 1,
                            std::vector<rational>(static_cast<size_t>(M) + 1, rational(0)));

    auto& E = out.series.coeffs;
    auto& chat = out.vectors.chat;
    E[0] = energies[static_cast<size_t>(m)];
    chat[0][static_cast<size_t>(m)] = 1;

    std::vector<rational> t(static_cast<size_t>(M) + 1);
    for (int k = 1; k <= k_max; ++k) {
        const int lo = std::max(0, m - 2 * k);
        const int hi = std::min(M, m + 2 * k);
        for (int mp = lo; mp <= hi; ++mp) t[static_cast<size_t>(mp)] = 0;

        // t = sum_{j=1..k} V_{2j} chat^{(k-j)}, restricted to the k-window
        for (int j = 1; j <= k; ++j) {
            const auto& cj = chat[static_cast<size_t>(k - j)];
            const stepped_band& Uj = U[static_cast<size_t>(j - 1)];
            const int slo = std::max(0, m - 2 * (k - j));
            const int shi = std::min(M, m + 2 * (k - j));
            for (int ms = slo; ms <= shi; ++ms) {
                const rational& cv = cj[static_cast<size_t>(ms)];
                if (cv == 0) continue;
                int mp = std::max(lo, ms - 2 * j);
                if ((mp - ms) & 1) ++mp;
                for (; mp <= std::min(hi, ms + 2 * j); mp += 2) {
                    const rational& uv = Uj.get(mp, ms);
                    if (uv == 0) continue;
                    t[static_cast<size_t>(mp)] += uv * cv;
                }
            }
        }

        // eigenvalue coefficient (normalization-corrected)
        rational Ek = t[static_cast<size_t>(m)];
        for (int j = 1; j <= k - 1; ++j) {
            const rational& cm = chat[static_cast<size_t>(k - j)][static_cast<size_t>(m)];
            if (cm != 0) Ek -= E[static_cast<size_t>(j)] * cm;
        }
        E[static_cast<size_t>(k)] = Ek;

        // off-diagonal coefficients
        for (int mp = lo; mp <= hi; ++mp) {
            if (mp == m || ((mp - m) & 1)) continue;
            rational num = t[static_cast<size_t>(mp)];
            for (int j = 1; j <= k; ++j) {
                const rational& cv = chat[static_cast<size_t>(k - j)][static_cast<size_t>(mp)];
                if (cv != 0) num -= E[static_cast<size_t>(j)] * cv;
            }
            if (num == 0) continue;
            const rational dE = energies[static_cast<size_t>(m)] - energies[static_cast<size_t>(mp)];
            chat[static_cast<size_t>(k)][static_cast<size_t>(mp)] = num / dE;
        }

        // diagonal coefficient from <v_m(q), v_m(q)> = 1
        rational acc(0);
        for (int j = 1; j <= k - 1; ++j) {
            const auto& cj = chat[static_cast<size_t>(j)];
            const auto& ck = chat[static_cast<size_t>(k - j)];
            const int wlo = std::max(0, m - 2 * std::min(j, k - j));
            const int whi = std::min(M, m + 2 * std::min(j, k - j));
            for (int mp = wlo; mp <= whi; ++mp) {
                const rational& x = cj[static_cast<size_t>(mp)];
                if (x == 0) continue;
                const rational& y = ck[static_cast<size_t>(mp)];
                if (y == 0) continue;
                acc += x * y * norms[static_cast<size_t>(mp)];
            }
        }
        if (acc != 0)
            chat[static_cast<size_t>(k)][static_cast<size_t>(m)] =
                -acc / (2 * norms[static_cast<size_t>(m)]);
    }
    return out;
}

}

std::vector<expansion> expand_many(const std::vector<int>& ms, int k_max,
                                   const model_params& params, int jobs) {
    if (ms.empty()) return {};
    if (k_max < 1) throw std::invalid_argument("expand: k_max must be >= 1");
    for (int m : ms)
        if (m < 0) throw std::invalid_argument("expand: m must be >= 0");

    const int m_top = *std::max_element(ms.begin(), ms.end());
    const int M = m_top + 2 * k_max + 2;
    const auto U = detail::potential_actions(k_max, M, params);

    std::vector<rational> norms, energies;
    norms.reserve(M + 1);
    energies.reserve(M + 1);
    for (int i = 0; i <= M; ++i) {
        const basis_element b = make_basis_element(i, params);
        norms.push_back(b.squared_norm);
        energies.push_back(b.unperturbed_energy);
    }

    std::vector<expansion> out(ms.size());
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(ms.size())));
    if (workers == 1) {
        for (size_t i = 0; i < ms.size(); ++i)
            out[i] = run_recursion(ms[i], k_max, U, norms, energies, params);
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < ms.size(); i = next.fetch_add(1))
                    out[i] = run_recursion(ms[i], k_max, U, norms, energies, params);
            });
        for (auto& th : pool) th.join();
    }
    return out;
}

expansion expand(int m, int k_max, const model_params& params) {
    return std::move(expand_many({m}, k_max, params).front());
}

eval_result evaluate(const rational_series& s, cplx q, std::optional<double> radius) {
    const cplx q2 = q * q;
    cplx acc(0.0);
    for (auto it = s.coeffs.rbegin(); it != s.coeffs.rend(); ++it)
        acc = acc * q2 + to_double(*it);
    eval_result out;
    out.value = acc * pi_sq;
    out.radius_warning = radius.has_value() && std::abs(q) >= *radius;
    return out;
}

rational evaluate_exact(const rational_series& s, const rational& q) {
    const rational q2 = q * q;
    rational acc(0);
    for (auto it = s.coeffs.rbegin(); it != s.coeffs.rend(); ++it) {
        acc *= q2;
        acc += *it;
    }
    return acc;
}

double radius_fit::a() const { return std::exp(log_a); }
double radius_fit::b() const { return std::exp(log_b); }

radius_estimate estimate_radius(const rational_series& s, int k_min) {
    if (k_min < 0) throw std::invalid_argument("estimate_radius: k_min must be >= 0");
    if (s.order() < k_min + 10)
        throw std::domain_error("estimate_radius: series order must be >= k_min + 10");

    std::vector<std::pair<int, double>> pts;   // (k, log|c_k|)
    for (int k = k_min; k <= s.order(); ++k) {
        const rational& c = s.coeffs[static_cast<size_t>(k)];
        if (c == 0) continue;
        // log of |num|/den via mpz sizes keeps giant coefficients in range
        signed long exp_n = 0, exp_d = 0;
        const double mn = mpz_get_d_2exp(&exp_n, mpq_numref(c.get_mpq_t()));
        const double md = mpz_get_d_2exp(&exp_d, mpq_denref(c.get_mpq_t()));
        const double lg = std::log(std::fabs(mn)) - std::log(std::fabs(md)) +
                          (static_cast<double>(exp_n) - static_cast<double>(exp_d)) * std::log(2.0);
        pts.emplace_back(k, lg);
    }
    if (pts.size() < 5)
        throw std::domain_error("estimate_radius: fewer than 5 usable (nonzero) coefficients");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [k, y] : pts) {
        const double x = 2.0 * k;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(pts.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double inter = (sy - slope * sx) / n;

    radius_estimate out;
    out.fit.log_a = inter;
    out.fit.log_b = slope;
    out.radius = std::exp(-slope);
    out.points_used = static_cast<int>(pts.size());

    const size_t tail_n = std::min<size_t>(10, pts.size());
    double tail = std::numeric_limits<double>::infinity();
    for (size_t i = pts.size() - tail_n; i < pts.size(); ++i) {
        const auto& [k, lg] = pts[i];
        tail = std::min(tail, std::exp(-(lg - inter) / (2.0 * k)));
    }
    out.tail = tail;
    return out;
}

}
