#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace recip::cli {

enum ExitCode : int { ok = 0, usage = 2, sign_ambiguous = 3, numerical = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using KeyValues = std::map<std::string, std::string>;

/// Resolved configuration. Core keys: model, grid, method, sign, out, format.
/// Model and command parameters are stored as "param.<name>".
struct RunConfig {
  std::string command;
  KeyValues values;

  const std::string& get(const std::string& key) const;
  const std::string& param(const std::string& name) const;
  double number(const std::string& name) const;
  int integer(const std::string& name) const;
  bool is_auto(const std::string& name) const { return param(name) == "auto"; }
};

const std::vector<std::string>& commands();
const std::vector<std::string>& models();

/// Flat "key = value" lines; '#' starts a comment. Keys other than the core
/// ones are parameters and may be written with or without the "param." prefix.
KeyValues read_config_file(std::istream& in);

/// Layers defaults, then the file, then flags; rejects unknown keys and values.
RunConfig resolve(const std::string& command, const KeyValues& file, const KeyValues& flags);

/// Every effective key, sorted, as "key = value" lines.
std::string show_config(const RunConfig& config);

/// Runs a resolved configuration; primary output goes to `out` when the out
/// key is "-". Returns an ExitCode.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv (subcommand first) and executes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace recip::cli
