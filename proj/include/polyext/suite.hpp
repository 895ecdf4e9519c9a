#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "polyext/functionals.hpp"
#include "polyext/parallel.hpp"

namespace polyext {

inline constexpr const char* kVersion = "1.0.0";

/// Invalid suite configuration; `problems` lists one entry per offending path.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Check groups in canonical order.
const std::vector<std::string>& known_groups();

/// Validated suite configuration. `doc` is the fully defaulted JSON document that the
/// run reads from and the report echoes.
struct SuiteConfig {
  nlohmann::json doc;
  std::vector<std::string> groups;
  double tol_scale = 1.0;
  Exec exec = Exec::serial;

  static SuiteConfig defaults();
  /// Merges `user` over the defaults section by section and validates the result.
  static SuiteConfig from_json(const nlohmann::json& user);
  static SuiteConfig from_file(const std::string& path);

  /// Tolerance of the named class, already multiplied by tol_scale.
  double tol(const std::string& key) const;
  RhoGridSpec rho_grid() const;
  YQuadSpec y_quadrature() const;
  PolarSpec polar() const;
};

struct VerificationReport {
  std::string version = kVersion;
  nlohmann::json config;
  std::vector<CheckValue> checks;
  std::vector<std::pair<std::string, double>> group_seconds;  ///< wall clock, excluded from comparisons
  std::string generated_at;                                    ///< UTC timestamp, excluded from comparisons

  std::size_t total() const { return checks.size(); }
  std::size_t passed() const;
  std::size_t failed() const { return total() - passed(); }
};

/// Runs every requested group. Exceptions inside a check become failed checks.
VerificationReport run_suite(const SuiteConfig& config);

/// Runs a single group with the given configuration.
std::vector<CheckValue> run_group(const std::string& group, const SuiteConfig& config);

}  // namespace polyext
