#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace acceldse {

enum class ParamKind { Int, Float, Cat };

// One architectural or backend knob: a closed numeric range (integer or
// continuous, optionally log-scaled) or a categorical choice set.
struct ParameterSpec {
  std::string name;
  ParamKind kind = ParamKind::Float;
  double low = 0.0;
  double high = 0.0;
  std::vector<std::string> choices;
  bool log_scale = false;

  void check() const;  // throws std::invalid_argument on a malformed spec
};

using ParamValue = std::variant<double, std::string>;

// Flat name -> value assignment.
struct Configuration {
  std::map<std::string, ParamValue> values;

  double num(const std::string& name) const;
  const std::string& cat(const std::string& name) const;
};

class ParameterSpace {
 public:
  ParameterSpace() = default;
  explicit ParameterSpace(std::vector<ParameterSpec> specs);

  const std::vector<ParameterSpec>& specs() const { return specs_; }
  std::size_t dim() const { return specs_.size(); }
  const ParameterSpec& spec(const std::string& name) const;

  // Every domain/missing/extra violation, empty when the configuration is ok.
  std::vector<std::string> validate(const Configuration& cfg) const;

  // Positional numeric encoding: ranges min-max normalized to [0,1]
  // (log-domain first when log_scale), categoricals one-hot.
  std::vector<double> encode(const Configuration& cfg) const;
  std::size_t encoded_dim() const;
  // Column names matching encode() positions.
  std::vector<std::string> encoded_names() const;

  // Maps a unit-hypercube point (one coordinate per spec, each in [0,1)) to a
  // configuration. Integers round half-up and clamp; categoricals bucket.
  Configuration decode_unit(const std::vector<double>& point) const;

  // FNV hash over (name, kind, bounds/choices) in order; used to refuse
  // predicting with a model trained against a different space.
  std::uint64_t schema_hash() const;

  static ParameterSpace from_json_file(const std::string& path);
  static ParameterSpace from_json_text(const std::string& text);
  std::string to_json_text() const;

 private:
  std::vector<ParameterSpec> specs_;
};

// Flat JSON object / CSV row serialization for configurations.
std::string configuration_to_json(const Configuration& cfg);
Configuration configuration_from_json(const std::string& text);
std::string configuration_csv_header(const ParameterSpace& space);
std::string configuration_csv_row(const ParameterSpace& space, const Configuration& cfg);

}  // namespace acceldse
