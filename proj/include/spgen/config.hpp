#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace spgen {

/// Malformed configuration input; carries file/line/key context in what().
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key-value parameter file: `key = value` lines, `#` comments. Only the
/// documented keys are accepted, and every value must parse as a number.
struct RunConfig {
  std::optional<double> g, gamma, kappa_in, kappa_ex, tau;
  std::optional<double> delta_u, delta_e;
  std::optional<double> a_eff_tilde, l_cav, alpha_loss, t_ex;

  static RunConfig parse_file(const std::filesystem::path& path);
  static RunConfig parse_string(const std::string& text, const std::string& origin);

  /// Known keys in canonical order.
  static const std::map<std::string, std::optional<double> RunConfig::*>& keys();

  void set(const std::string& key, double value);  // throws ConfigError on unknown key
  std::optional<double> get(const std::string& key) const;
};

}  // namespace spgen
