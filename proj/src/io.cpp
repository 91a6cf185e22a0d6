#include "lame/io.hpp"

#include <fstream>
#include <sstream>

#include "lame/version.hpp"

namespace lame::io {

json series_to_json(const rational_series& s) {
    json coeffs = json::array();
    for (const auto& c : s.coeffs) coeffs.push_back(to_fraction_string(c));
    return json{{"n", s.n}, {"m", s.m}, {"units", "pi^2"}, {"coeffs", coeffs}};
}

rational_series series_from_json(const json& j) {
    rational_series s;
    s.n = j.at("n").get<int>();
    s.m = j.at("m").get<int>();
    if (j.at("units").get<std::string>() != "pi^2")
        throw std::invalid_argument("series_from_json: unsupported units");
    for (const auto& c : j.at("coeffs")) s.coeffs.push_back(rational_from_string(c.get<std::string>()));
    return s;
}

std::string series_to_csv(const rational_series& s) {
    std::ostringstream os;
    os << "# eigenvalue expansion, pi^2 units; coefficient of q^(2k)\n";
    os << "# n=" << s.n << " m=" << s.m << " version=" << version << "\n";
    os << "k,numerator,denominator,value\n";
    os.precision(17);
    for (size_t k = 0; k < s.coeffs.size(); ++k) {
        const auto& c = s.coeffs[k];
        os << k << "," << c.get_num().get_str() << "," << c.get_den().get_str() << ","
           << to_double(c) << "\n";
    }
    return os.str();
}

namespace {
json cplx_to_json(cplx z) { return json::array({z.real(), z.imag()}); }
}

json candidates_to_json(const std::vector<branch_candidate>& cands) {
    json out = json::array();
    for (const auto& c : cands) {
        out.push_back(json{{"q", cplx_to_json(c.point.q)},
                           {"t0", cplx_to_json(c.point.t0)},
                           {"m", c.point.m},
                           {"residual", std::max(c.r1, c.r2)},
                           {"coincidence_gap", c.coincidence_gap},
                           {"class", to_string(c.classification)}});
    }
    return out;
}

std::string trajectory_to_jsonl(const trajectory& t) {
    std::ostringstream os;
    for (const auto& st : t.states) {
        os << json{{"s", st.s},
                   {"q", cplx_to_json(st.q)},
                   {"E", cplx_to_json(st.E)},
                   {"t0", cplx_to_json(st.t0)},
                   {"m", st.m}}
                  .dump()
           << "\n";
    }
    return os.str();
}

json permutation_to_json(const permutation_report& rep) {
    json perm = json::array();
    for (size_t i = 0; i < rep.indices.size(); ++i)
        perm.push_back(json::array({rep.indices[i], rep.image[i]}));
    return json{{"anchor", cplx_to_json(rep.anchor)},
                {"rho", rep.rho},
                {"parity", rep.indices.front() % 2 == 0 ? "even" : "odd"},
                {"perm", perm},
                {"match_error", rep.match_error}};
}

json with_provenance(const json& resolved_config, const std::string& key, json payload) {
    return json{{"version", version}, {"config", resolved_config}, {key, std::move(payload)}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    f << text;
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path.string());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}
