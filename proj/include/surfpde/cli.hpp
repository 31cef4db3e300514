#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace surfpde {

/// Resolved key = value configuration of one command-line run.
class RunConfig {
public:
  /// Parses and type-checks one value; throws InputError naming the key.
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string str(const std::string& key, const std::string& fallback) const;
  double real(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  std::optional<double> maybe_real(const std::string& key) const;
  std::optional<long> maybe_integer(const std::string& key) const;
  std::vector<double> list(const std::string& key, const std::vector<double>& fallback) const;

  /// Cross-key constraint checks (e.g. n_perp against l).
  void validate() const;

  const std::map<std::string, std::string>& values() const { return values_; }

private:
  std::map<std::string, std::string> values_;
};

/// Known keys in declaration order.
const std::vector<std::string>& config_keys();

/// `key = value` lines, `#` comments, blank lines ignored.
RunConfig load_config(const std::filesystem::path& path);

/// Entry point: 0 success, 1 usage error, 2 numerical failure.
int run(int argc, const char* const* argv);

}  // namespace surfpde
