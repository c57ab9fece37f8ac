#include "acceldse/param_space.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "acceldse/rng.hpp"
#include "json.hpp"

namespace acceldse {

namespace {

std::string kind_name(ParamKind k) {
  switch (k) {
    case ParamKind::Int: return "int";
    case ParamKind::Float: return "float";
    case ParamKind::Cat: return "cat";
  }
  return "?";
}

std::string format_num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void ParameterSpec::check() const {
  if (name.empty()) throw std::invalid_argument("parameter spec has empty name");
  if (kind == ParamKind::Cat) {
    if (choices.empty())
      throw std::invalid_argument("categorical '" + name + "' has no choices");
    std::set<std::string> uniq(choices.begin(), choices.end());
    if (uniq.size() != choices.size())
      throw std::invalid_argument("categorical '" + name + "' has duplicate choices");
  } else {
    if (!(low < high))
      throw std::invalid_argument("range '" + name + "' needs low < high");
    if (kind == ParamKind::Int &&
        (std::floor(low) != low || std::floor(high) != high))
      throw std::invalid_argument("integer range '" + name + "' has non-integer bounds");
    if (log_scale && low <= 0.0)
      throw std::invalid_argument("log-scale range '" + name + "' needs low > 0");
  }
}

double Configuration::num(const std::string& name) const {
  auto it = values.find(name);
  if (it == values.end()) throw std::out_of_range("no value for '" + name + "'");
  return std::get<double>(it->second);
}

const std::string& Configuration::cat(const std::string& name) const {
  auto it = values.find(name);
  if (it == values.end()) throw std::out_of_range("no value for '" + name + "'");
  return std::get<std::string>(it->second);
}

ParameterSpace::ParameterSpace(std::vector<ParameterSpec> specs)
    : specs_(std::move(specs)) {
  std::set<std::string> names;
  for (const auto& s : specs_) {
    s.check();
    if (!names.insert(s.name).second)
      throw std::invalid_argument("duplicate parameter name '" + s.name + "'");
  }
}

const ParameterSpec& ParameterSpace::spec(const std::string& name) const {
  for (const auto& s : specs_)
    if (s.name == name) return s;
  throw std::out_of_range("no parameter '" + name + "'");
}

std::vector<std::string> ParameterSpace::validate(const Configuration& cfg) const {
  std::vector<std::string> violations;
  for (const auto& s : specs_) {
    auto it = cfg.values.find(s.name);
    if (it == cfg.values.end()) {
      violations.push_back("missing parameter '" + s.name + "'");
      continue;
    }
    if (s.kind == ParamKind::Cat) {
      const auto* c = std::get_if<std::string>(&it->second);
      if (!c) {
        violations.push_back("'" + s.name + "' must be categorical");
      } else if (std::find(s.choices.begin(), s.choices.end(), *c) == s.choices.end()) {
        violations.push_back("'" + s.name + "' has unknown choice '" + *c + "'");
      }
    } else {
      const auto* v = std::get_if<double>(&it->second);
      if (!v) {
        violations.push_back("'" + s.name + "' must be numeric");
      } else if (*v < s.low || *v > s.high) {
        violations.push_back("'" + s.name + "' out of range: " + format_num(*v) +
                             " not in [" + format_num(s.low) + ", " +
                             format_num(s.high) + "]");
      } else if (s.kind == ParamKind::Int && std::floor(*v) != *v) {
        violations.push_back("'" + s.name + "' must be an integer");
      }
    }
  }
  for (const auto& [name, value] : cfg.values) {
    (void)value;
    bool known = false;
    for (const auto& s : specs_)
      if (s.name == name) known = true;
    if (!known) violations.push_back("extra parameter '" + name + "'");
  }
  return violations;
}

std::size_t ParameterSpace::encoded_dim() const {
  std::size_t n = 0;
  for (const auto& s : specs_) n += (s.kind == ParamKind::Cat) ? s.choices.size() : 1;
  return n;
}

std::vector<std::string> ParameterSpace::encoded_names() const {
  std::vector<std::string> names;
  for (const auto& s : specs_) {
    if (s.kind == ParamKind::Cat) {
      for (const auto& c : s.choices) names.push_back(s.name + "=" + c);
    } else {
      names.push_back(s.name);
    }
  }
  return names;
}

std::vector<double> ParameterSpace::encode(const Configuration& cfg) const {
  auto violations = validate(cfg);
  if (!violations.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& v : violations) msg += " " + v + ";";
    throw std::invalid_argument(msg);
  }
  std::vector<double> out;
  out.reserve(encoded_dim());
  for (const auto& s : specs_) {
    if (s.kind == ParamKind::Cat) {
      const auto& c = cfg.cat(s.name);
      for (const auto& choice : s.choices) out.push_back(choice == c ? 1.0 : 0.0);
    } else {
      double v = cfg.num(s.name);
      double lo = s.low, hi = s.high;
      if (s.log_scale) {
        v = std::log(v);
        lo = std::log(s.low);
        hi = std::log(s.high);
      }
      out.push_back((v - lo) / (hi - lo));
    }
  }
  return out;
}

Configuration ParameterSpace::decode_unit(const std::vector<double>& point) const {
  if (point.size() != specs_.size())
    throw std::invalid_argument("decode_unit: expected " + std::to_string(specs_.size()) +
                                " coordinates, got " + std::to_string(point.size()));
  Configuration cfg;
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const auto& s = specs_[i];
    const double u = point[i];
    if (s.kind == ParamKind::Cat) {
      auto idx = static_cast<std::size_t>(std::floor(u * static_cast<double>(s.choices.size())));
      idx = std::min(idx, s.choices.size() - 1);
      cfg.values[s.name] = s.choices[idx];
    } else if (s.kind == ParamKind::Int) {
      const double raw = s.low + u * (s.high - s.low);
      double v = std::floor(raw + 0.5);  // half-up
      v = std::clamp(v, s.low, s.high);
      cfg.values[s.name] = v;
    } else {
      double v = s.low + u * (s.high - s.low);
      if (s.log_scale) {
        const double lo = std::log(s.low), hi = std::log(s.high);
        v = std::exp(lo + u * (hi - lo));
      }
      v = std::clamp(v, s.low, s.high);
      cfg.values[s.name] = v;
    }
  }
  return cfg;
}

std::uint64_t ParameterSpace::schema_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& s : specs_) {
    h = fnv1a_str(s.name, h);
    h = fnv1a_str(kind_name(s.kind), h);
    if (s.kind == ParamKind::Cat) {
      for (const auto& c : s.choices) h = fnv1a_str(c, h);
    } else {
      h = fnv1a(&s.low, sizeof s.low, h);
      h = fnv1a(&s.high, sizeof s.high, h);
      const char ls = s.log_scale ? '1' : '0';
      h = fnv1a(&ls, 1, h);
    }
  }
  return h;
}

ParameterSpace ParameterSpace::from_json_text(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  std::vector<ParameterSpec> specs;
  for (const auto& item : doc.at("specs")) {
    ParameterSpec s;
    s.name = item.at("name").get<std::string>();
    const auto kind = item.at("kind").get<std::string>();
    if (kind == "int") s.kind = ParamKind::Int;
    else if (kind == "float") s.kind = ParamKind::Float;
    else if (kind == "cat") s.kind = ParamKind::Cat;
    else throw std::invalid_argument("unknown parameter kind '" + kind + "'");
    if (s.kind == ParamKind::Cat) {
      s.choices = item.at("choices").get<std::vector<std::string>>();
    } else {
      s.low = item.at("low").get<double>();
      s.high = item.at("high").get<double>();
      s.log_scale = item.value("log_scale", false);
    }
    specs.push_back(std::move(s));
  }
  return ParameterSpace(std::move(specs));
}

ParameterSpace ParameterSpace::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open space file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string ParameterSpace::to_json_text() const {
  nlohmann::json doc;
  doc["specs"] = nlohmann::json::array();
  for (const auto& s : specs_) {
    nlohmann::json item;
    item["name"] = s.name;
    item["kind"] = kind_name(s.kind);
    if (s.kind == ParamKind::Cat) {
      item["choices"] = s.choices;
    } else {
      item["low"] = s.low;
      item["high"] = s.high;
      item["log_scale"] = s.log_scale;
    }
    doc["specs"].push_back(item);
  }
  return doc.dump(2);
}

std::string configuration_to_json(const Configuration& cfg) {
  nlohmann::json doc;
  for (const auto& [name, value] : cfg.values) {
    if (const auto* d = std::get_if<double>(&value)) doc[name] = *d;
    else doc[name] = std::get<std::string>(value);
  }
  return doc.dump();
}

Configuration configuration_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  Configuration cfg;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (it->is_string()) cfg.values[it.key()] = it->get<std::string>();
    else cfg.values[it.key()] = it->get<double>();
  }
  return cfg;
}

std::string configuration_csv_header(const ParameterSpace& space) {
  std::string out;
  for (const auto& s : space.specs()) {
    if (!out.empty()) out += ",";
    out += s.name;
  }
  return out;
}

std::string configuration_csv_row(const ParameterSpace& space, const Configuration& cfg) {
  std::string out;
  for (const auto& s : space.specs()) {
    if (!out.empty()) out += ",";
    if (s.kind == ParamKind::Cat) {
      out += cfg.cat(s.name);
    } else {
      std::ostringstream os;
      os.precision(12);
      os << cfg.num(s.name);
      out += os.str();
    }
  }
  return out;
}

}  // namespace acceldse
