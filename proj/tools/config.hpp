#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "signalflow/discrete.hpp"
#include "signalflow/equilibrium.hpp"
#include "signalflow/model.hpp"
#include "signalflow/values.hpp"

namespace signalflow::cli {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, int line, const std::string& message);
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

// A TOML-style document: [section] headers, key = value lines, # comments.
// Values are numbers, quoted strings, booleans or flat arrays of those.
struct ConfigValue {
  using Scalar = std::variant<double, std::string, bool>;
  std::variant<Scalar, std::vector<Scalar>> data;
  int line = 0;
  std::string raw;
};

class Document {
 public:
  static Document parse(const std::string& text);

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  bool has_section(const std::string& section) const;
  const ConfigValue& at(const std::string& key) const;
  // Replace or add an entry, as if it had been written in the file.
  void set(const std::string& key, const std::string& raw_value);

  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  std::string string_or(const std::string& key, const std::string& fallback) const;
  bool bool_or(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key) const;
  // Log-odds given as l_<name> or mu_<name>, in section.
  std::optional<double> log_odds(const std::string& section, const std::string& name) const;
  std::optional<std::pair<double, double>> log_odds_range(const std::string& section,
                                                          const std::string& name) const;

  void reject_unknown(const std::vector<std::string>& allowed_prefixes) const;
  const std::map<std::string, ConfigValue>& entries() const { return entries_; }
  int line_of(const std::string& key) const;

 private:
  std::map<std::string, ConfigValue> entries_;
  std::vector<std::string> sections_;
};

enum class ProfileKind { Pooling, Switched, Extremal };

struct ProfileSpec {
  ProfileKind kind = ProfileKind::Pooling;
  double l_under = 0.0;
  double l_0 = 0.0;
  double l_1 = 0.0;
  double l_over = 0.0;
};

struct SimulationSpec {
  double horizon = 0.0;
  std::size_t paths = 10000;
  std::optional<std::uint64_t> seed;
  std::optional<double> l0;
  bool deviations = true;
  double rk_step = 0.005;
};

struct DiscreteSpec {
  DiscreteParams params;
  std::optional<DiscreteCandidate> candidate;
  DiscreteGrid grid;
};

struct SweepSpec {
  std::string field;
  std::vector<std::string> values;
};

struct RunConfig {
  std::string path;
  std::string text;
  Document doc;
  std::optional<Game> game;
  std::optional<ProfileSpec> profile;
  std::optional<SearchSpec> search;
  ValueOptions numerics;
  Tolerances tolerances;
  double br_tolerance = 1e-8;
  std::vector<double> dtheta_deltas;
  SimulationSpec simulation;
  std::optional<DiscreteSpec> discrete;
  std::optional<SweepSpec> sweep;
  std::string out_dir;
};

RunConfig load_config(const std::string& path);
RunConfig config_from_text(const std::string& text, const std::string& path = "<string>");
RunConfig config_from_document(Document doc, const std::string& text, const std::string& path);

// Accepts plain numbers, "inf", "-inf", "a/b", "ln(x)" and "ln(a/b)".
double parse_number(const std::string& s);

}  // namespace signalflow::cli
