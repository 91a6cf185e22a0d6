#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lame/continuation.hpp"
#include "lame/monodromy.hpp"
#include "lame/perturbation.hpp"

namespace lame::io {

using json = nlohmann::json;

/// { "n": .., "m": .., "units": "pi^2", "coeffs": ["10/3", "80/3", ...] }
json series_to_json(const rational_series& s);
rational_series series_from_json(const json& j);

/// CSV rows: k, numerator, denominator, float value. '#' comment header.
std::string series_to_csv(const rational_series& s);

/// [{ "q": [re, im], "t0": [re, im], "m": .., "residual": .., "class": .. }, ...]
json candidates_to_json(const std::vector<branch_candidate>& cands);

/// JSON-lines trajectory: one record per step
/// { "s": .., "q": [..], "E": [..], "t0": [..], "m": .. }.
std::string trajectory_to_jsonl(const trajectory& t);

/// { "anchor": [re, im], "rho": .., "parity": "even"|"odd",
///   "perm": [[from, to], ...], "match_error": [...] }
json permutation_to_json(const permutation_report& rep);

/// Wraps a payload with provenance: { "version": .., "config": .., <key>: payload }.
json with_provenance(const json& resolved_config, const std::string& key, json payload);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}
