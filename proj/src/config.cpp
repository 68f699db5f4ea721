#include "spgen/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace spgen {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::map<std::string, std::optional<double> RunConfig::*>& RunConfig::keys() {
  static const std::map<std::string, std::optional<double> RunConfig::*> k = {
      {"g", &RunConfig::g},
      {"gamma", &RunConfig::gamma},
      {"kappa_in", &RunConfig::kappa_in},
      {"kappa_ex", &RunConfig::kappa_ex},
      {"tau", &RunConfig::tau},
      {"delta_u", &RunConfig::delta_u},
      {"delta_e", &RunConfig::delta_e},
      {"a_eff_tilde", &RunConfig::a_eff_tilde},
      {"l_cav", &RunConfig::l_cav},
      {"alpha_loss", &RunConfig::alpha_loss},
      {"t_ex", &RunConfig::t_ex},
  };
  return k;
}

void RunConfig::set(const std::string& key, double value) {
  const auto& k = keys();
  const auto it = k.find(key);
  if (it == k.end()) throw ConfigError("unknown key '" + key + "'");
  this->*(it->second) = value;
}

std::optional<double> RunConfig::get(const std::string& key) const {
  const auto& k = keys();
  const auto it = k.find(key);
  if (it == k.end()) return std::nullopt;
  return this->*(it->second);
}

RunConfig RunConfig::parse_string(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (keys().find(key) == keys().end())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    double parsed = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, parsed);
    if (ec != std::errc() || ptr != last)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": key '" + key +
                        "': cannot parse '" + value + "' as a number");
    if (cfg.get(key).has_value())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    cfg.set(key, parsed);
  }
  return cfg;
}

RunConfig RunConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path.filename().string());
}

}  // namespace spgen
