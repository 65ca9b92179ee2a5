#pragma once

#include "fbma/report.hpp"

#include <map>
#include <string>
#include <vector>

namespace fbma::cli {

/// Typed view over a flat key = value parameter set. Keys must be declared
/// before they are set; anything else is a configuration error.
class Params {
public:
    void declare(const std::string& key, const std::string& value, const std::string& help);
    bool known(const std::string& key) const { return values_.count(key) > 0; }

    /// Flat text: `key = value` per line, `#` comments, blank lines ignored.
    void load_file(const std::string& path);
    void set(const std::string& key, const std::string& value);

    std::string text(const std::string& key) const;
    double real(const std::string& key) const;
    int integer(const std::string& key) const;
    bool flag(const std::string& key) const;
    std::vector<double> reals(const std::string& key) const;  // comma-separated

    const std::map<std::string, std::string>& values() const { return values_; }
    const std::map<std::string, std::string>& help() const { return help_; }
    Json to_json() const;

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, std::string> help_;
};

/// Declared keys (with defaults) of a subcommand; ConfigError for unknown commands.
Params command_params(const std::string& command);

std::vector<std::string> commands();

/// Every tolerance and threshold used by the library, with its default.
Json tolerance_table();

/// Runs one subcommand with resolved parameters and returns the exit status
/// (0 success, 1 numerical failure, 2 configuration error). Artifacts and
/// run.json go to params "out".
int run(const std::string& command, const Params& params);

/// Full command line entry point: parses flags and the optional --config file.
int main(int argc, char** argv);

}  // namespace fbma::cli
