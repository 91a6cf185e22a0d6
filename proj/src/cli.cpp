#include "lame/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "lame/io.hpp"
#include "lame/version.hpp"

namespace lame::cli {

namespace {

namespace fs = std::filesystem;

json block(const json& cfg, const std::string& name) {
    if (!cfg.contains(name)) return json::object();
    if (!cfg.at(name).is_object()) throw config_error(name + ": expected an object");
    return cfg.at(name);
}

int get_int(const json& b, const std::string& field, int dflt, int lo, int hi) {
    if (!b.contains(field)) {
        if (dflt < lo || dflt > hi) throw config_error(field + ": required field missing");
        return dflt;
    }
    if (!b.at(field).is_number_integer()) throw config_error(field + ": expected an integer");
    const int v = b.at(field).get<int>();
    if (v < lo || v > hi)
        throw config_error(field + ": value " + std::to_string(v) + " outside [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
}

double get_num(const json& b, const std::string& field, double dflt, double lo, double hi) {
    if (!b.contains(field)) return dflt;
    if (!b.at(field).is_number()) throw config_error(field + ": expected a number");
    const double v = b.at(field).get<double>();
    if (!(v >= lo && v <= hi)) throw config_error(field + ": value outside valid range");
    return v;
}

cplx get_cplx(const json& b, const std::string& field) {
    if (!b.contains(field) || !b.at(field).is_array() || b.at(field).size() != 2)
        throw config_error(field + ": expected [re, im]");
    return cplx(b.at(field)[0].get<double>(), b.at(field)[1].get<double>());
}

std::vector<int> get_index_list(const json& b, const std::string& field,
                                std::vector<int> dflt) {
    if (!b.contains(field)) return dflt;
    if (!b.at(field).is_array()) throw config_error(field + ": expected an array of integers");
    std::vector<int> out;
    for (const auto& v : b.at(field)) {
        if (!v.is_number_integer()) throw config_error(field + ": expected integers");
        const int m = v.get<int>();
        if (m < 0 || m > 200) throw config_error(field + ": index outside [0, 200]");
        out.push_back(m);
    }
    if (out.empty()) throw config_error(field + ": must not be empty");
    return out;
}

void ensure_outdir(const fs::path& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw config_error("cannot create output directory " + out.string());
}

std::string fmt_cplx(cplx z) {
    std::ostringstream os;
    os.precision(17);
    os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return os.str();
}

struct series_request {
    int n;
    std::vector<int> ms;
    int k_max;
    int k_min_fit;
    json resolved;
};

series_request parse_series_request(const json& cfg, const run_options& opt) {
    const json b = block(cfg, "series");
    series_request req;
    req.n = get_int(b, "n", 1, 1, 50);
    req.ms = get_index_list(b, "m", {0, 1, 2, 3, 4, 5});
    req.k_max = opt.k_max >= 0 ? opt.k_max : get_int(b, "k_max", opt.slow ? 110 : 60, 0, 1000);
    if (opt.slow && opt.k_max < 0) req.k_max = std::max(req.k_max, 110);
    req.k_min_fit = get_int(b, "k_min_fit", 10, 0, 500);
    req.resolved = json{{"n", req.n}, {"m", req.ms}, {"k_max", req.k_max},
                        {"k_min_fit", req.k_min_fit}, {"jobs", opt.jobs}};
    return req;
}

// constant-only series for the degenerate k_max = 0 request
rational_series constant_series(int n, int m) {
    rational_series s;
    s.n = n;
    s.m = m;
    s.coeffs = {make_basis_element(m, model_params(n)).unperturbed_energy};
    return s;
}

std::vector<expansion> run_expansions(const series_request& req, const run_options& opt) {
    if (req.k_max == 0) {
        std::vector<expansion> out;
        for (int m : req.ms) {
            expansion e;
            e.series = constant_series(req.n, m);
            out.push_back(std::move(e));
        }
        return out;
    }
    return expand_many(req.ms, req.k_max, model_params(req.n), opt.jobs);
}

std::string radius_cell(const rational_series& s, int k_min) {
    if (s.order() < k_min + 10) return "n/a";
    const radius_estimate est = estimate_radius(s, k_min);
    std::ostringstream os;
    os.precision(4);
    os << est.radius << " (tail " << est.tail << ")";
    return os.str();
}

std::string series_table(const std::vector<expansion>& exps, int k_min_fit) {
    std::ostringstream os;
    os << "eigenvalue expansions, pi^2 units, coefficient of q^(2k)\n\n";
    for (const auto& e : exps) {
        os << "E_" << e.series.m << "(q) | pi^2 ( ";
        for (int k = 0; k <= e.series.order(); ++k) {
            if (k) os << " + ";
            os << to_fraction_string(e.series.coeffs[static_cast<size_t>(k)]);
            if (k) os << " q^" << 2 * k;
        }
        os << " + ... ) | radius " << radius_cell(e.series, k_min_fit) << "\n";
    }
    return os.str();
}

scan_params parse_scan_params(const json& cfg, const run_options& opt, json* resolved) {
    const json b = block(cfg, "scan");
    scan_params par;
    if (b.contains("region")) {
        const auto& r = b.at("region");
        if (!r.is_array() || r.size() != 4) throw config_error("scan.region: expected [re0,re1,im0,im1]");
        par.region = {r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>()};
    }
    if (par.region.re_min > par.region.re_max || par.region.im_min > par.region.im_max)
        throw config_error("scan.region: inverted bounds");
    if (b.contains("grid")) {
        const auto& g = b.at("grid");
        if (!g.is_array() || g.size() != 2) throw config_error("scan.grid: expected [nx, ny]");
        par.nx = g[0].get<int>();
        par.ny = g[1].get<int>();
    }
    if (par.nx < 2 || par.ny < 2) throw config_error("scan.grid: must be at least 2x2");
    if (b.contains("m_range")) {
        const auto& g = b.at("m_range");
        if (!g.is_array() || g.size() != 2) throw config_error("scan.m_range: expected [lo, hi]");
        par.m_min = g[0].get<int>();
        par.m_max = g[1].get<int>();
        if (par.m_min > par.m_max) throw config_error("scan.m_range: inverted");
    }
    par.truncation = opt.trunc > 0 ? opt.trunc : get_int(b, "trunc_K", opt.slow ? 300 : 200, 1, 5000);
    par.q_abs_max = get_num(b, "q_abs_max", 0.91, 0.05, 0.949);
    par.near_integer_tol = get_num(b, "near_integer_tol", 0.5, 1e-6, 0.5);
    par.polish_tol = opt.tol > 0 ? opt.tol : get_num(b, "polish_tol", 1e-10, 1e-14, 1e-4);
    par.dedupe_tol = get_num(b, "dedupe_tol", 1e-6, 1e-14, 1e-2);
    par.jobs = opt.jobs;
    if (resolved)
        *resolved = json{{"region", {par.region.re_min, par.region.re_max, par.region.im_min,
                                     par.region.im_max}},
                         {"grid", {par.nx, par.ny}},
                         {"m_range", {par.m_min, par.m_max}},
                         {"trunc_K", par.truncation},
                         {"q_abs_max", par.q_abs_max},
                         {"near_integer_tol", par.near_integer_tol},
                         {"polish_tol", par.polish_tol},
                         {"dedupe_tol", par.dedupe_tol},
                         {"jobs", par.jobs}};
    return par;
}

std::string scan_summary(const std::vector<branch_candidate>& cands, const scan_stats& st) {
    std::ostringstream os;
    os.precision(10);
    auto section = [&](const char* title, bool even) {
        os << title << "\n";
        for (const auto& c : cands) {
            if ((std::abs(c.point.m) % 2 == 0) != even) continue;
            os << "  q = " << fmt_cplx(c.point.q) << "   m = " << c.point.m
               << "   residual = " << std::max(c.r1, c.r2)
               << "   class = " << to_string(c.classification) << "\n";
        }
    };
    section("periodic candidates (even sheet index):", true);
    section("anti-periodic candidates (odd sheet index):", false);
    os << "grid points visited: " << st.points_visited << ", failed: " << st.points_failed
       << ", polish attempts: " << st.polish_attempts << ", polish failures: " << st.polish_failed
       << "\n";
    return os.str();
}

struct continue_request {
    int n;
    std::vector<int> indices;
    path_spec path{};
    continuation_controls controls;
    bool is_cycle;
    json resolved;
};

continue_request parse_continue_request(const json& cfg, const run_options& opt) {
    const json b = block(cfg, "continue");
    continue_request req;
    req.n = get_int(b, "n", 1, 1, 50);
    req.indices = get_index_list(b, "indices", {0});
    req.controls.q_base = get_num(b, "q_base", 0.15, 1e-6, 0.3);
    req.controls.series_order = get_int(b, "k_init", 20, 1, 500);
    req.controls.truncation = opt.trunc > 0 ? opt.trunc : get_int(b, "trunc_K", opt.slow ? 300 : 200, 1, 5000);
    req.controls.jobs = opt.jobs;
    if (!b.contains("path")) throw config_error("continue.path: required");
    const json p = b.at("path");
    const std::string kind = p.value("kind", "");
    const int steps = p.contains("steps") ? p.at("steps").get<int>() : 400;
    if (steps < 8 || steps > 1000000) throw config_error("continue.path.steps: outside [8, 1e6]");
    req.controls.path_steps = steps;
    if (kind == "cycle") {
        const cplx anchor = get_cplx(p, "anchor");
        const double rho = get_num(p, "rho", 0.02, 1e-6, 0.5);
        try {
            req.path = path_spec::cycle(anchor, rho, steps);
        } catch (const std::invalid_argument& e) {
            throw config_error(std::string("continue.path: ") + e.what());
        }
        req.is_cycle = true;
    } else if (kind == "polyline") {
        if (!p.contains("waypoints") || !p.at("waypoints").is_array() || p.at("waypoints").size() < 2)
            throw config_error("continue.path.waypoints: expected >= 2 [re, im] pairs");
        std::vector<cplx> wps;
        for (const auto& w : p.at("waypoints")) {
            if (!w.is_array() || w.size() != 2) throw config_error("continue.path.waypoints: malformed");
            wps.emplace_back(w[0].get<double>(), w[1].get<double>());
        }
        try {
            req.path = path_spec::polyline(std::move(wps), steps);
            req.path.discretize();
        } catch (const std::invalid_argument& e) {
            throw config_error(std::string("continue.path: ") + e.what());
        }
        req.is_cycle = false;
        const cplx q0 = req.path.waypoints.front();
        if (std::abs(q0.imag()) > 1e-12 || !(q0.real() > 0.0 && q0.real() <= 0.3))
            throw config_error("continue.path.waypoints: polyline must start at real q in (0, 0.3]");
    } else {
        throw config_error("continue.path.kind: expected \"cycle\" or \"polyline\"");
    }
    req.resolved = json{{"n", req.n},
                        {"indices", req.indices},
                        {"q_base", req.controls.q_base},
                        {"k_init", req.controls.series_order},
                        {"trunc_K", req.controls.truncation},
                        {"path", p},
                        {"jobs", opt.jobs}};
    return req;
}

std::string jsonl_with_meta(const json& resolved, const trajectory& t) {
    std::ostringstream os;
    os << json{{"meta", {{"version", version}, {"config", resolved}}}}.dump() << "\n";
    os << io::trajectory_to_jsonl(t);
    return os.str();
}

void print_check(std::ostream& os, const std::string& name, double resid, double tol) {
    os << (resid <= tol ? "PASS" : "FAIL") << "  " << name << "  residual " << resid
       << "  (tol " << tol << ")\n";
}

}

int cmd_series(const json& cfg, const run_options& opt) {
    const series_request req = parse_series_request(cfg, opt);
    ensure_outdir(opt.out);
    const auto exps = run_expansions(req, opt);
    for (const auto& e : exps) {
        const std::string stem =
            "series_n" + std::to_string(req.n) + "_m" + std::to_string(e.series.m);
        io::write_text(opt.out / (stem + ".json"),
                       io::with_provenance(req.resolved, "series", io::series_to_json(e.series))
                               .dump(1) +
                           "\n");
        io::write_text(opt.out / (stem + ".csv"),
                       "# config: " + req.resolved.dump() + "\n" + io::series_to_csv(e.series));
    }
    std::string table = "# version " + std::string(version) + "\n# config: " + req.resolved.dump() +
                        "\n\n" + series_table(exps, req.k_min_fit);
    io::write_text(opt.out / "series_table.txt", table);
    std::cout << "wrote " << exps.size() << " series to " << opt.out.string() << "\n";
    return exit_ok;
}

int cmd_radius(const json& cfg, const run_options& opt) {
    series_request req = parse_series_request(cfg, opt);
    if (req.k_max < req.k_min_fit + 10)
        throw config_error("radius: k_max must be at least k_min_fit + 10");
    ensure_outdir(opt.out);
    const auto exps = run_expansions(req, opt);
    json rows = json::array();
    std::ostringstream table;
    table.precision(6);
    for (const auto& e : exps) {
        const radius_estimate est = estimate_radius(e.series, req.k_min_fit);
        rows.push_back(json{{"m", e.series.m},
                            {"radius", est.radius},
                            {"tail", est.tail},
                            {"log_a", est.fit.log_a},
                            {"log_b", est.fit.log_b},
                            {"points_used", est.points_used}});
        table << "m = " << e.series.m << ":  radius(ls) = " << est.radius
              << "   radius(tail) = " << est.tail << "   points = " << est.points_used << "\n";
    }
    io::write_text(opt.out / "radius_report.json",
                   io::with_provenance(req.resolved, "radii", rows).dump(1) + "\n");
    io::write_text(opt.out / "radius_report.txt", table.str());
    std::cout << table.str();
    return exit_ok;
}

int cmd_scan(const json& cfg, const run_options& opt) {
    json resolved;
    const scan_params par = parse_scan_params(cfg, opt, &resolved);
    ensure_outdir(opt.out);
    scan_stats st;
    const auto cands = branch_scan(par, &st);
    json payload = io::candidates_to_json(cands);
    json report = io::with_provenance(resolved, "candidates", payload);
    report["stats"] = json{{"points_visited", st.points_visited},
                           {"points_failed", st.points_failed},
                           {"polish_attempts", st.polish_attempts},
                           {"polish_failed", st.polish_failed}};
    io::write_text(opt.out / "scan_report.json", report.dump(1) + "\n");
    io::write_text(opt.out / "scan_summary.txt",
                   "# version " + std::string(version) + "\n# config: " + resolved.dump() + "\n\n" +
                       scan_summary(cands, st));
    std::cout << "scan found " << cands.size() << " candidates ("
              << st.points_visited << " grid points)\n";
    return exit_ok;
}

int cmd_continue(const json& cfg, const run_options& opt) {
    const continue_request req = parse_continue_request(cfg, opt);
    ensure_outdir(opt.out);
    const model_params params(req.n);

    try {
        if (req.is_cycle && req.indices.size() > 1) {
            std::vector<trajectory> trajs;
            const permutation_report rep = monodromy_permutation(
                req.path.anchor, req.indices, req.path.rho, params, req.controls, &trajs);
            io::write_text(opt.out / "permutation.json",
                           io::with_provenance(req.resolved, "permutation",
                                               io::permutation_to_json(rep))
                                   .dump(1) +
                               "\n");
            for (size_t i = 0; i < trajs.size(); ++i)
                io::write_text(opt.out / ("trajectory_m" + std::to_string(req.indices[i]) + ".jsonl"),
                               jsonl_with_meta(req.resolved, trajs[i]));
            std::cout << "permutation:";
            for (size_t i = 0; i < rep.indices.size(); ++i)
                std::cout << " E" << rep.indices[i] << "->E" << rep.image[i];
            std::cout << "\n";
            return exit_ok;
        }

        const auto exps = expand_many(req.indices, req.controls.series_order, params, opt.jobs);
        for (size_t i = 0; i < req.indices.size(); ++i) {
            const int idx = req.indices[i];
            path_spec path = req.path;
            spectral_point s0;
            if (req.is_cycle) {
                const spectral_point sbase =
                    init_state(idx, req.controls.q_base, exps[i].series, req.controls);
                const path_spec approach = path_spec::polyline(
                    {cplx(req.controls.q_base, 0.0), cplx(path.anchor.real(), 0.0)},
                    std::max(40, req.controls.path_steps / 4));
                s0 = spectral_point{};
                const trajectory t1 = continue_along(sbase, approach, req.controls);
                s0.q = t1.back().q;
                s0.E = t1.back().E;
                s0.t0 = t1.back().t0;
                s0.m = t1.back().m;
            } else {
                s0 = init_state(idx, req.path.waypoints.front().real(), exps[i].series,
                                req.controls);
            }
            const trajectory t = continue_along(s0, path, req.controls);
            io::write_text(opt.out / ("trajectory_m" + std::to_string(idx) + ".jsonl"),
                           jsonl_with_meta(req.resolved, t));
            std::cout << "index " << idx << ": E(end) = " << fmt_cplx(t.back().E)
                      << "  (m = " << t.back().m << ")\n";
        }
        return exit_ok;
    } catch (const continuation_stall& e) {
        std::cerr << "continuation stalled at q = " << fmt_cplx(e.q_stall) << ": " << e.what()
                  << "\n";
        return exit_numerical;
    }
}

int cmd_wp_eval(const json& cfg, const run_options& opt) {
    const json b = block(cfg, "wp_eval");
    const cplx q = b.contains("q") ? get_cplx(b, "q") : cplx(0.2, 0.0);
    const cplx x = b.contains("x") ? get_cplx(b, "x") : cplx(0.31, 0.05);
    const int K = opt.trunc > 0 ? opt.trunc : get_int(b, "trunc_K", opt.slow ? 300 : 200, 1, 5000);
    if (std::abs(q) >= 1.0) throw config_error("wp_eval.q: |q| must be < 1");

    const q_context ctx(q, K);
    const elliptic_constants ec = constants(ctx);
    std::cout.precision(15);
    std::cout << "q = " << fmt_cplx(q) << "   K = " << K << "   x = " << fmt_cplx(x) << "\n";
    std::cout << "eta1 = " << fmt_cplx(ec.eta1) << "\n";
    if (!ctx.is_trigonometric()) std::cout << "eta3 = " << fmt_cplx(ec.eta3) << "\n";
    std::cout << "e1 = " << fmt_cplx(ec.e1) << "\ne2 = " << fmt_cplx(ec.e2)
              << "\ne3 = " << fmt_cplx(ec.e3) << "\n";
    const cplx P = wp(x, ctx), Pp = wp_prime(x, ctx), Z = zeta(x, ctx);
    std::cout << "wp(x)       = " << fmt_cplx(P) << "\n";
    std::cout << "wp'(x)      = " << fmt_cplx(Pp) << "\n";
    std::cout << "zeta(x)     = " << fmt_cplx(Z) << "\n";
    std::cout << "exponent(x) = " << fmt_cplx(exponent(x, ctx)) << "\n";
    if (!series_converges(x, ctx))
        std::cout << "warning: |q^2 exp(2 pi |Im x|)| >= 1, series reduced before summation\n";

    std::cout << "\nidentity checks:\n";
    print_check(std::cout, "e1+e2+e3 = 0", std::abs(ec.e1 + ec.e2 + ec.e3), 1e-10 * pi_sq);
    if (!ctx.is_trigonometric())
        print_check(std::cout, "legendre eta1 tau - eta3 = pi i",
                    std::abs(ec.eta1 * ctx.tau() - ec.eta3 - cplx(0.0, pi_d)), 1e-12);
    print_check(std::cout, "wp evenness", std::abs(wp(-x, ctx) - P), 1e-10 * (1.0 + std::abs(P)));
    print_check(std::cout, "zeta oddness", std::abs(zeta(-x, ctx) + Z),
                1e-10 * (1.0 + std::abs(Z)));
    print_check(std::cout, "wp periodicity", std::abs(wp(x + 1.0, ctx) - P),
                1e-10 * (1.0 + std::abs(P)));
    print_check(std::cout, "zeta quasi-periodicity",
                std::abs(zeta(x + 1.0, ctx) - Z - 2.0 * ec.eta1), 1e-10 * (1.0 + std::abs(Z)));
    const cplx rhs = 4.0 * (P - ec.e1) * (P - ec.e2) * (P - ec.e3);
    print_check(std::cout, "(wp')^2 = 4 prod(wp - e_i)", std::abs(Pp * Pp - rhs),
                1e-8 * (1.0 + std::pow(std::abs(P), 3)));
    const double h = 1e-6;
    const cplx fd_p = (wp(x + h, ctx) - wp(x - h, ctx)) / (2.0 * h);
    print_check(std::cout, "wp' vs finite difference", std::abs(fd_p - Pp),
                1e-5 * (1.0 + std::abs(Pp)));
    const cplx fd_z = (zeta(x + h, ctx) - zeta(x - h, ctx)) / (2.0 * h);
    print_check(std::cout, "-zeta' = wp (finite difference)", std::abs(fd_z + P),
                1e-5 * (1.0 + std::abs(P)));
    return exit_ok;
}

int cmd_reproduce(const json& cfg, const run_options& opt) {
    ensure_outdir(opt.out);

    // 1. series and radii
    json series_cfg = cfg;
    if (!series_cfg.contains("series")) series_cfg["series"] = json::object();
    if (!series_cfg["series"].contains("k_min_fit")) series_cfg["series"]["k_min_fit"] = 40;
    run_options sopt = opt;
    if (opt.k_max < 0 && !opt.slow) sopt.k_max = 60;
    if (opt.slow) sopt.k_max = 110;
    cmd_series(series_cfg, sopt);
    cmd_radius(series_cfg, sopt);

    // 2. branch scan over the first quadrant
    cmd_scan(cfg, opt);

    // 3. cycles around every true branch point found by the scan
    const json scan_report = json::parse(io::read_text(opt.out / "scan_report.json"));
    json perms = json::array();
    for (const auto& cand : scan_report.at("candidates")) {
        if (cand.at("class").get<std::string>() != "branch") continue;
        const cplx anchor(cand.at("q")[0].get<double>(), cand.at("q")[1].get<double>());
        const bool even = cand.at("m").get<int>() % 2 == 0;
        const std::vector<int> indices = even ? std::vector<int>{0, 2, 4, 6}
                                              : std::vector<int>{1, 3, 5, 7};
        continuation_controls ctl;
        ctl.jobs = opt.jobs;
        if (opt.trunc > 0) ctl.truncation = opt.trunc;
        const permutation_report rep =
            monodromy_permutation(anchor, indices, 0.02, model_params(1), ctl);
        perms.push_back(io::permutation_to_json(rep));
        std::cout << "cycle at " << fmt_cplx(anchor) << ":";
        for (size_t i = 0; i < rep.indices.size(); ++i)
            std::cout << " E" << rep.indices[i] << "->E" << rep.image[i];
        std::cout << "\n";
    }
    io::write_text(opt.out / "permutations.json",
                   io::with_provenance(json{{"rho", 0.02}}, "cycles", perms).dump(1) + "\n");
    std::cout << "reproduction artifacts written to " << opt.out.string() << "\n";
    return exit_ok;
}

int dispatch(int argc, const char* const* argv) {
    CLI::App app{"Lame operator spectra: perturbation series, convergence radii, "
                 "branch points and monodromy in the complex nome"};
    app.require_subcommand(1);

    std::string config_path;
    run_options opt;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", opt.out, "output directory");
    app.add_option("--jobs", opt.jobs, "parallel work items")->check(CLI::Range(1, 256));
    app.add_option("--kmax", opt.k_max, "series order override");
    app.add_option("--trunc-K", opt.trunc, "elliptic series truncation override");
    app.add_option("--tol", opt.tol, "tolerance override (scan polish)");
    app.add_flag("--slow", opt.slow, "high-accuracy mode (k_max 110, K 300)");

    auto* c_series = app.add_subcommand("series", "exact eigenvalue expansions");
    auto* c_radius = app.add_subcommand("radius", "convergence-radius estimates");
    auto* c_scan = app.add_subcommand("scan", "branch-point scan in the q plane");
    auto* c_cont = app.add_subcommand("continue", "analytic continuation along paths");
    auto* c_wp = app.add_subcommand("wp-eval", "evaluate elliptic functions at a point");
    auto* c_rep = app.add_subcommand("reproduce-paper", "full reference reproduction run");
    for (auto* s : {c_series, c_radius, c_scan, c_cont, c_wp, c_rep}) s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }

    try {
        json cfg = json::object();
        if (!config_path.empty()) {
            try {
                cfg = json::parse(io::read_text(config_path));
            } catch (const std::exception& e) {
                throw config_error(std::string("config: ") + e.what());
            }
            if (!cfg.is_object()) throw config_error("config: top level must be an object");
        }
        if (cfg.contains("out") && opt.out == "out") opt.out = cfg.at("out").get<std::string>();
        if (cfg.contains("jobs") && opt.jobs == 1) opt.jobs = cfg.at("jobs").get<int>();

        if (c_series->parsed()) return cmd_series(cfg, opt);
        if (c_radius->parsed()) return cmd_radius(cfg, opt);
        if (c_scan->parsed()) return cmd_scan(cfg, opt);
        if (c_cont->parsed()) return cmd_continue(cfg, opt);
        if (c_wp->parsed()) return cmd_wp_eval(cfg, opt);
        if (c_rep->parsed()) return cmd_reproduce(cfg, opt);
        return exit_config;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    }
}

}
