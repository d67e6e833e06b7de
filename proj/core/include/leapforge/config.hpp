#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "leapforge/scenario.hpp"

namespace leapforge {

/// Config text could not be read or does not match the schema.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the TOML subset used by scenario files into a JSON tree:
/// bare keys, [table] and [[array-of-tables]] headers, strings, integers,
/// floats, booleans and (nested, possibly multi-line) arrays. Comments start
/// with '#'. Throws ConfigError with a line number.
nlohmann::ordered_json parse_toml(std::string_view text);

/// Maps a parsed tree onto a Scenario. Unknown keys and type mismatches are
/// ConfigErrors naming the field; value ranges are left to Scenario::validate.
Scenario scenario_from_tree(const nlohmann::ordered_json& tree);
Scenario parse_scenario(std::string_view toml_text);
Scenario load_scenario(const std::filesystem::path& path);

/// Writes every field, defaults included. parse_scenario() reads it back.
std::string scenario_to_toml(const Scenario& scenario);

/// Shortest round-tripping decimal form of a double.
std::string format_double(double v);

}  // namespace leapforge
