#include "lrtrunc/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "lrtrunc/rng.hpp"

namespace lrtrunc {

namespace {

[[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& why) {
  throw ConfigError("[" + section + "] " + key + ": " + why);
}

std::optional<std::int64_t> parse_integer(const std::string& text) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec == std::errc() && ptr == text.data() + text.size()) return v;
  // Scientific notation for integral values, e.g. 1e5.
  try {
    std::size_t used = 0;
    const double d = std::stod(text, &used);
    if (used == text.size() && std::isfinite(d) && d == std::floor(d) && std::fabs(d) <= 0x1p53)
      return static_cast<std::int64_t>(d);
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

std::optional<double> parse_real(const std::string& text) {
  try {
    std::size_t used = 0;
    const double d = std::stod(text, &used);
    if (used == text.size()) return d;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(","));
  for (auto& p : parts) boost::trim(p);
  if (parts.size() == 1 && parts[0].empty()) parts.clear();
  return parts;
}

const std::map<std::string, std::set<std::string>> kParamKeys = {
    {"truncation-curve", {"half_side", "shell_width", "radii", "trials", "norm", "vertex_cap"}},
    {"dispersion-suite", {"max_coefficient", "max_terms", "max_cosine_n", "coefficients"}},
    {"tree-suite",
     {"max_level", "table_level", "predict_levels", "history_length", "trials", "histories"}},
    {"overlap-curve",
     {"measure", "phase", "radius", "u", "v", "m", "strict", "axis", "horizons", "trials"}},
    {"intersection-probe",
     {"measure", "phase", "second_phase", "radius", "u", "v", "m", "strict", "axis", "offset",
      "horizon_first", "horizon_second", "trials"}},
    {"potts-report", {"q", "beta", "radius"}},
    {"counterexample-scan", {"dim", "range", "epsilons", "k_values", "mode", "trials", "radius"}},
};

const std::set<std::string> kKernelKeys = {"family", "dim",      "scale",    "exponent",
                                           "norm",   "cap",      "value",    "radius",
                                           "range",  "epsilon",  "truncate", "truncate_norm"};
const std::set<std::string> kPotentialKeys = {"family", "dim",   "scale", "exponent",
                                              "norm",   "value", "radius"};
const std::set<std::string> kExperimentKeys = {"kind", "seed", "workers", "output"};

}  // namespace

std::string ExperimentConfig::kind() const {
  if (!has("experiment", "kind")) throw ConfigError("[experiment] kind is required");
  const auto k = get("experiment", "kind");
  if (!kExperimentKinds.count(k)) fail("experiment", "kind", "unknown experiment kind '" + k + "'");
  return k;
}

std::uint64_t ExperimentConfig::seed() const { return get_u64("experiment", "seed", kDefaultSeed); }

unsigned ExperimentConfig::workers() const {
  const auto w = get_u64("experiment", "workers", 1);
  if (w == 0 || w > 1024) fail("experiment", "workers", "must lie in 1..1024");
  return static_cast<unsigned>(w);
}

std::string ExperimentConfig::output() const { return get_or("experiment", "output", ""); }

bool ExperimentConfig::has(const std::string& section, const std::string& key) const {
  auto s = sections.find(section);
  return s != sections.end() && s->second.count(key) > 0;
}

std::string ExperimentConfig::get(const std::string& section, const std::string& key) const {
  if (!has(section, key)) fail(section, key, "missing");
  return sections.at(section).at(key);
}

std::string ExperimentConfig::get_or(const std::string& section, const std::string& key,
                                     const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

void ExperimentConfig::set(const std::string& section, const std::string& key,
                           const std::string& value) {
  sections[section][key] = value;
}

std::uint64_t ExperimentConfig::get_u64(const std::string& section, const std::string& key,
                                        std::optional<std::uint64_t> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    fail(section, key, "missing");
  }
  const auto text = get(section, key);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec == std::errc() && ptr == text.data() + text.size()) return v;
  auto i = parse_integer(text);
  if (!i || *i < 0) fail(section, key, "expected a nonnegative integer, got '" + text + "'");
  return static_cast<std::uint64_t>(*i);
}

std::int64_t ExperimentConfig::get_i64(const std::string& section, const std::string& key,
                                       std::optional<std::int64_t> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    fail(section, key, "missing");
  }
  const auto text = get(section, key);
  auto i = parse_integer(text);
  if (!i) fail(section, key, "expected an integer, got '" + text + "'");
  return *i;
}

double ExperimentConfig::get_double(const std::string& section, const std::string& key,
                                    std::optional<double> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    fail(section, key, "missing");
  }
  const auto text = get(section, key);
  auto d = parse_real(text);
  if (!d) fail(section, key, "expected a number, got '" + text + "'");
  return *d;
}

bool ExperimentConfig::get_bool(const std::string& section, const std::string& key,
                                std::optional<bool> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    fail(section, key, "missing");
  }
  const auto text = get(section, key);
  if (text == "true") return true;
  if (text == "false") return false;
  fail(section, key, "expected true or false, got '" + text + "'");
}

std::vector<std::int64_t> ExperimentConfig::get_int_list(
    const std::string& section, const std::string& key,
    std::optional<std::vector<std::int64_t>> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    fail(section, key, "missing");
  }
  std::vector<std::int64_t> out;
  for (const auto& part : split_list(get(section, key))) {
    auto i = parse_integer(part);
    if (!i) fail(section, key, "expected integers, got '" + part + "'");
    out.push_back(*i);
  }
  return out;
}

std::vector<double> ExperimentConfig::get_double_list(
    const std::string& section, const std::string& key,
    std::optional<std::vector<double>> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    fail(section, key, "missing");
  }
  std::vector<double> out;
  for (const auto& part : split_list(get(section, key))) {
    auto d = parse_real(part);
    if (!d) fail(section, key, "expected numbers, got '" + part + "'");
    out.push_back(*d);
  }
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config parse error: " + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }
  ExperimentConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + section + "' outside any section");
    auto& target = config.sections[section];
    for (const auto& [key, value] : body) {
      if (!value.empty()) throw ConfigError("nested key under [" + section + "] " + key);
      target[key] = boost::trim_copy(value.data());
    }
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& config) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [section, keys] : config.sections) {
    if (!first) os << '\n';
    first = false;
    os << '[' << section << "]\n";
    for (const auto& [key, value] : keys) os << key << " = " << value << '\n';
  }
  return os.str();
}

void validate_keys(const ExperimentConfig& config) {
  const auto kind = config.kind();
  std::set<std::string> allowed_sections = {"experiment", "params"};
  if (kind == "truncation-curve" || kind == "overlap-curve" || kind == "intersection-probe")
    allowed_sections.insert("kernel");
  if (kind == "potts-report") allowed_sections.insert("potential");
  for (const auto& [section, keys] : config.sections) {
    if (!allowed_sections.count(section))
      throw ConfigError("section [" + section + "] is not used by " + kind);
    const std::set<std::string>* allowed = nullptr;
    if (section == "experiment") allowed = &kExperimentKeys;
    else if (section == "kernel") allowed = &kKernelKeys;
    else if (section == "potential") allowed = &kPotentialKeys;
    else allowed = &kParamKeys.at(kind);
    for (const auto& [key, value] : keys) {
      if (!allowed->count(key)) fail(section, key, "unknown key for " + kind);
    }
  }
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : serialize_config(config)) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace lrtrunc
