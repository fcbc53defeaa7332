#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbcli {

// Bad config: unknown key, malformed value, syntax error.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ValueType { kReal, kCount, kBool, kRealList, kText };

struct KeySpec {
  std::string name;  // "section.key"
  ValueType type;
  std::string fallback;
  std::string help;
};

// Every key the CLI understands, with its default.
const std::vector<KeySpec>& known_keys();

class RunConfig {
 public:
  // Defaults for every known key.
  RunConfig();

  // key = value lines under [section] headers; '#' and ';' start comments.
  void load_text(const std::string& text, const std::string& origin = "<text>");
  void load_file(const std::string& path);
  // name is "section.key".
  void set(const std::string& name, const std::string& value);

  double real(const std::string& name) const;
  std::size_t count(const std::string& name) const;
  bool flag(const std::string& name) const;
  std::vector<double> reals(const std::string& name) const;
  const std::string& text(const std::string& name) const;

  // Canonical "[section]\nkey = value" dump, sorted.
  std::string dump() const;

 private:
  const KeySpec& spec(const std::string& name) const;
  std::map<std::string, std::string> values_;
};

double parse_real(const std::string& s);
std::vector<double> parse_reals(const std::string& s);

}  // namespace cbcli
