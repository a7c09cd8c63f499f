#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gapcert::cli {

// Bad config or command line; maps to exit code 64.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Positive covers tolerances and the absolute constants: both must be > 0.
enum class Kind { Text, Real, Positive, Int, RealList, IntList };

struct KeySpec {
  Kind kind;
  std::vector<std::string> choices;  // Text only; empty = free text
};

// Section name -> key -> spec. The top level is the section "".
using Schema = std::map<std::string, std::map<std::string, KeySpec>>;
const Schema& schema();

// Parsed `key = value` file with [sections]. Values are kept as trimmed text; typed access
// re-parses, which is cheap and keeps the canonical form trivially stable.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, const std::string& value);

  std::string text(const std::string& section, const std::string& key, const std::string& def) const;
  double real(const std::string& section, const std::string& key, double def) const;
  int64_t integer(const std::string& section, const std::string& key, int64_t def) const;
  std::vector<double> reals(const std::string& section, const std::string& key, const std::vector<double>& def) const;
  std::vector<int64_t> integers(const std::string& section, const std::string& key,
                                const std::vector<int64_t>& def) const;

  std::optional<uint64_t> seed() const;
  // Fails unless a seed was given; `why` names the randomized check.
  uint64_t require_seed(const std::string& why) const;

  // Sections and keys in sorted order, one `key = value` per line.
  std::string canonical() const;
  std::string sha256() const;
  const std::map<std::string, std::map<std::string, std::string>>& entries() const { return v_; }

 private:
  std::map<std::string, std::map<std::string, std::string>> v_;
};

// Checks a value against its spec; throws UsageError naming section.key.
void validate_value(const std::string& section, const std::string& key, const std::string& value);

// Numeric lists: "a, b, c" or a range "start:stop:step" (inclusive stop). With a "log10:"
// prefix the range runs over exponents and yields 10^e.
std::vector<double> parse_real_list(const std::string& s);

// "c_W=2,c_D=0.5" -> pairs. Only the constants known to the schema are accepted.
std::vector<std::pair<std::string, std::string>> parse_constants(const std::string& s);

std::string sha256_hex(const std::string& data);

}  // namespace gapcert::cli
