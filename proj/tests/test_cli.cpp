#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "lame/cli.hpp"
#include "lame/io.hpp"
#include "lame/perturbation.hpp"

using namespace lame;
namespace fs = std::filesystem;

namespace {

struct temp_dir {
    fs::path path;
    temp_dir() {
        path = fs::temp_directory_path() /
               ("lamespec_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~temp_dir() { fs::remove_all(path); }
};

int run(std::vector<std::string> args) {
    std::vector<const char*> argv{"lamespec"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli::dispatch(static_cast<int>(argv.size()), argv.data());
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p);
    f << text;
}

}

TEST_CASE("series command writes exact, parseable, deterministic outputs") {
    temp_dir tmp;
    const fs::path cfg = tmp.path / "cfg.json";
    write_file(cfg, R"({ "series": { "n": 1, "m": [0, 1], "k_max": 6 } })");

    const fs::path out1 = tmp.path / "a", out2 = tmp.path / "b";
    CHECK(run({"series", "--config", cfg.string(), "--out", out1.string()}) == cli::exit_ok);
    CHECK(run({"series", "--config", cfg.string(), "--out", out2.string()}) == cli::exit_ok);

    const auto doc = cli::json::parse(io::read_text(out1 / "series_n1_m0.json"));
    CHECK(doc.at("version").get<std::string>() == std::string(lame::version));
    CHECK(doc.contains("config"));
    const rational_series s = io::series_from_json(doc.at("series"));
    const auto direct = expand(0, 6, model_params(1));
    CHECK(s.coeffs == direct.series.coeffs);

    // determinism: byte-identical reruns
    for (const char* name : {"series_n1_m0.json", "series_n1_m1.json", "series_n1_m0.csv",
                             "series_table.txt"})
        CHECK(io::read_text(out1 / name) == io::read_text(out2 / name));
}

TEST_CASE("series command handles the degenerate constant-only order") {
    temp_dir tmp;
    const fs::path cfg = tmp.path / "cfg.json";
    write_file(cfg, R"({ "series": { "n": 1, "m": [0], "k_max": 0 } })");
    CHECK(run({"series", "--config", cfg.string(), "--out", (tmp.path / "o").string()}) ==
          cli::exit_ok);
    const std::string table = io::read_text(tmp.path / "o" / "series_table.txt");
    CHECK(table.find("radius n/a") != std::string::npos);
    const auto doc = cli::json::parse(io::read_text(tmp.path / "o" / "series_n1_m0.json"));
    CHECK(doc.at("series").at("coeffs").size() == 1);
}

TEST_CASE("config validation failures exit with code 2") {
    temp_dir tmp;
    const fs::path bad1 = tmp.path / "bad1.json";
    write_file(bad1, R"({ "series": { "n": 0 } })");
    CHECK(run({"series", "--config", bad1.string(), "--out", (tmp.path / "x").string()}) ==
          cli::exit_config);

    const fs::path bad2 = tmp.path / "bad2.json";
    write_file(bad2, R"({ "scan": { "region": [0.5, 0.1, 0.0, 0.4] } })");
    CHECK(run({"scan", "--config", bad2.string(), "--out", (tmp.path / "x").string()}) ==
          cli::exit_config);

    const fs::path bad3 = tmp.path / "bad3.json";
    write_file(bad3, "{ not json");
    CHECK(run({"series", "--config", bad3.string(), "--out", (tmp.path / "x").string()}) ==
          cli::exit_config);

    const fs::path bad4 = tmp.path / "bad4.json";
    write_file(bad4, R"({ "continue": { "indices": [0] } })");
    CHECK(run({"continue", "--config", bad4.string(), "--out", (tmp.path / "x").string()}) ==
          cli::exit_config);

    CHECK(run({"no-such-command"}) == cli::exit_config);
}

TEST_CASE("scan command emits schema-complete reports") {
    temp_dir tmp;
    const fs::path cfg = tmp.path / "cfg.json";
    write_file(cfg,
               R"({ "scan": { "region": [0.22, 0.30, 0.66, 0.74], "grid": [6, 6] } })");
    CHECK(run({"scan", "--config", cfg.string(), "--out", (tmp.path / "o").string(), "--jobs",
               "2"}) == cli::exit_ok);
    const auto doc = cli::json::parse(io::read_text(tmp.path / "o" / "scan_report.json"));
    REQUIRE(doc.at("candidates").size() == 1);
    const auto& c = doc.at("candidates")[0];
    for (const char* field : {"q", "t0", "m", "residual", "class", "coincidence_gap"})
        CHECK(c.contains(field));
    CHECK(c.at("class").get<std::string>() == "branch");
    CHECK(doc.at("stats").at("points_visited").get<int>() == 36);
}

TEST_CASE("continue command writes trajectories and permutations") {
    temp_dir tmp;
    const fs::path cfg = tmp.path / "cfg.json";
    write_file(cfg, R"({ "continue": { "indices": [0, 2], "q_base": 0.15,
        "path": { "kind": "cycle", "anchor": [0.258666, 0.697448], "rho": 0.02,
                  "steps": 200 } } })");
    CHECK(run({"continue", "--config", cfg.string(), "--out", (tmp.path / "o").string(),
               "--jobs", "2"}) == cli::exit_ok);

    const auto perm = cli::json::parse(io::read_text(tmp.path / "o" / "permutation.json"));
    const auto& pairs = perm.at("permutation").at("perm");
    CHECK(pairs[0][0].get<int>() == 0);
    CHECK(pairs[0][1].get<int>() == 2);
    CHECK(pairs[1][1].get<int>() == 0);

    // JSONL: meta record first, then step records with stable fields
    std::istringstream lines(io::read_text(tmp.path / "o" / "trajectory_m0.jsonl"));
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(cli::json::parse(line).contains("meta"));
    int steps = 0;
    while (std::getline(lines, line)) {
        const auto rec = cli::json::parse(line);
        for (const char* field : {"s", "q", "E", "t0", "m"}) CHECK(rec.contains(field));
        ++steps;
    }
    CHECK(steps > 200);
}

TEST_CASE("wp-eval prints the identity suite") {
    CHECK(run({"wp-eval"}) == cli::exit_ok);
}
