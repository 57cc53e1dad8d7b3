#include "risopt/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>

namespace risopt {

namespace {

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string Describe(int line, const std::string& field, const std::string& what) {
  std::string msg;
  if (line > 0) msg += "line " + std::to_string(line) + ": ";
  if (!field.empty()) msg += "field '" + field + "': ";
  return msg + what;
}

class Value {
 public:
  Value(int line, std::string key, std::string text)
      : line_(line), key_(std::move(key)), text_(std::move(text)) {}

  [[noreturn]] void Fail(const std::string& what) const {
    throw ConfigError(line_, key_, what);
  }

  bool IsList() const { return !text_.empty() && text_.front() == '['; }

  std::vector<std::string> Items() const {
    if (!IsList()) Fail("expected a list [a, b, ...]");
    if (text_.back() != ']') Fail("unterminated list");
    const std::string body = Trim(text_.substr(1, text_.size() - 2));
    std::vector<std::string> items;
    if (body.empty()) return items;
    std::size_t start = 0;
    while (true) {
      const auto comma = body.find(',', start);
      const std::string item = Trim(body.substr(start, comma - start));
      if (item.empty()) Fail("empty list element");
      items.push_back(item);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return items;
  }

  double Number(const std::string& s) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
      Fail("'" + s + "' is not a finite number");
    }
    return v;
  }

  std::int64_t Integer(const std::string& s) const {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      Fail("'" + s + "' is not an integer");
    }
    return v;
  }

  double Real() const {
    if (IsList()) Fail("expected a scalar");
    return Number(text_);
  }

  int Int() const {
    if (IsList()) Fail("expected a scalar");
    const auto v = Integer(text_);
    if (v < -(1LL << 31) || v >= (1LL << 31)) Fail("integer out of range");
    return static_cast<int>(v);
  }

  std::string Word() const {
    if (IsList()) Fail("expected a scalar");
    return text_;
  }

  std::vector<double> Reals() const {
    std::vector<double> out;
    for (const auto& s : Items()) out.push_back(Number(s));
    return out;
  }

  Position Point() const {
    const auto v = Reals();
    if (v.size() != 2) Fail("expected [x, y]");
    return {v[0], v[1]};
  }

  int line() const { return line_; }

 private:
  int line_;
  std::string key_;
  std::string text_;
};

using Setter = std::function<void(ExperimentConfig&, const Value&)>;

const std::map<std::string, Setter>& Setters() {
  static const std::map<std::string, Setter> setters = {
      {"num_antennas", [](ExperimentConfig& c, const Value& v) { c.params.num_antennas = v.Int(); }},
      {"num_elements", [](ExperimentConfig& c, const Value& v) { c.params.num_elements = v.Int(); }},
      {"beta", [](ExperimentConfig& c, const Value& v) { c.params.beta_t = c.params.beta_r = v.Real(); }},
      {"beta_t", [](ExperimentConfig& c, const Value& v) { c.params.beta_t = v.Real(); }},
      {"beta_r", [](ExperimentConfig& c, const Value& v) { c.params.beta_r = v.Real(); }},
      {"noise_power", [](ExperimentConfig& c, const Value& v) { c.params.noise_power = v.Real(); }},
      {"target_rate", [](ExperimentConfig& c, const Value& v) { c.params.target_rate = v.Real(); }},
      {"outage", [](ExperimentConfig& c, const Value& v) { c.params.outage = v.Real(); }},
      {"bs", [](ExperimentConfig& c, const Value& v) { c.params.bs = v.Point(); }},
      {"ris", [](ExperimentConfig& c, const Value& v) { c.params.ris = v.Point(); }},
      {"user", [](ExperimentConfig& c, const Value& v) { c.params.user = v.Point(); }},
      {"alpha_cascaded", [](ExperimentConfig& c, const Value& v) { c.params.alpha_cascaded = v.Real(); }},
      {"alpha_direct", [](ExperimentConfig& c, const Value& v) { c.params.alpha_direct = v.Real(); }},
      {"rician_k", [](ExperimentConfig& c, const Value& v) { c.params.rician_k = v.Real(); }},
      {"delta_c", [](ExperimentConfig& c, const Value& v) { c.params.delta_c = v.Real(); }},
      {"ao_tolerance", [](ExperimentConfig& c, const Value& v) { c.params.ao_tolerance = v.Real(); }},
      {"ao_max_iterations", [](ExperimentConfig& c, const Value& v) { c.params.ao_max_iterations = v.Int(); }},
      {"sweep", [](ExperimentConfig& c, const Value& v) {
         const std::string w = v.Word();
         if (w == "delta_c") c.axis = SweepAxis::kDeltaC;
         else if (w == "beta") c.axis = SweepAxis::kBeta;
         else if (w == "L") c.axis = SweepAxis::kElements;
         else v.Fail("expected delta_c, beta or L, got '" + w + "'");
       }},
      {"grid", [](ExperimentConfig& c, const Value& v) { c.grid = v.Reals(); }},
      {"schemes", [](ExperimentConfig& c, const Value& v) {
         c.schemes.clear();
         for (const auto& s : v.Items()) {
           const auto scheme = ParseScheme(s);
           if (!scheme) v.Fail("unknown scheme '" + s + "'");
           c.schemes.push_back(*scheme);
         }
       }},
      {"seeds", [](ExperimentConfig& c, const Value& v) {
         c.seeds.clear();
         for (const auto& s : v.Items()) {
           const auto seed = v.Integer(s);
           if (seed < 0) v.Fail("seeds must be non-negative");
           c.seeds.push_back(static_cast<std::uint64_t>(seed));
         }
       }},
      {"n_samples", [](ExperimentConfig& c, const Value& v) { c.n_samples = v.Int(); }},
      {"candidates", [](ExperimentConfig& c, const Value& v) { c.num_candidates = v.Int(); }},
      {"output", [](ExperimentConfig& c, const Value& v) { c.output = v.Word(); }},
  };
  return setters;
}

}  // namespace

ConfigError::ConfigError(int line, const std::string& field,
                         const std::string& what)
    : std::runtime_error(Describe(line, field, what)), line_(line), field_(field) {}

const char* ToString(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kDeltaC: return "delta_c";
    case SweepAxis::kBeta: return "beta";
    case SweepAxis::kElements: return "L";
  }
  return "unknown";
}

void ExperimentConfig::Validate() const {
  if (grid.empty()) throw ConfigError(0, "grid", "must not be empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw ConfigError(0, "grid", "must be strictly increasing");
    }
  }
  if (axis == SweepAxis::kElements) {
    for (double x : grid) {
      if (x < 1.0 || x != std::floor(x)) {
        throw ConfigError(0, "grid", "L values must be positive integers");
      }
    }
  }
  if (seeds.empty()) throw ConfigError(0, "seeds", "must not be empty");
  if (schemes.empty()) throw ConfigError(0, "schemes", "must not be empty");
  if (n_samples < 1) throw ConfigError(0, "n_samples", "must be >= 1");
  if (num_candidates < 0) throw ConfigError(0, "candidates", "must be >= 0");
  for (double x : grid) {
    try {
      ParamsAt(x).Validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(0, "grid", e.what());
    }
  }
}

SystemParams ExperimentConfig::ParamsAt(double value) const {
  SystemParams p = params;
  switch (axis) {
    case SweepAxis::kDeltaC: p.delta_c = value; break;
    case SweepAxis::kBeta: p.beta_t = p.beta_r = value; break;
    case SweepAxis::kElements: p.num_elements = static_cast<int>(value); break;
  }
  return p;
}

ExperimentConfig ParseConfig(std::istream& in) {
  ExperimentConfig config;
  config.schemes = {Scheme::kProposed, Scheme::kNonrobustCsi,
                    Scheme::kNonrobustHwi, Scheme::kNonrobustBoth};
  std::set<std::string> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = Trim(raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line, "", "expected 'key = value'");
    }
    const std::string key = Trim(text.substr(0, eq));
    const std::string value = Trim(text.substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "", "missing key");
    const auto it = Setters().find(key);
    if (it == Setters().end()) throw ConfigError(line, key, "unknown key");
    if (!seen.insert(key).second) throw ConfigError(line, key, "duplicate key");
    if (value.empty()) throw ConfigError(line, key, "missing value");
    it->second(config, Value(line, key, value));
  }
  if (in.bad()) throw ConfigError(line, "", "read error");
  config.Validate();
  return config;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config '" + path + "'");
  return ParseConfig(in);
}

}  // namespace risopt
