#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace apnum::cli {

// Configuration-driven front end. Commands, file formats and exit codes:
//   0 success, 1 config/parse error, 2 hypothesis violation,
//   3 non-convergence (residual trace still written).
// The key-value schema is documented in the README.

/// Flat key-value document with [section] headers. Keys outside any section
/// live in the "" section.
struct IniDoc {
    std::map<std::string, std::map<std::string, std::string>> sections;

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    void set(const std::string& section, const std::string& key, const std::string& value);
};

IniDoc parse_ini(const std::string& text);

struct RunConfig {
    IniDoc doc;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

/// Executes the command named in the document, writes artifacts into
/// output_dir, prints a one-line summary, and returns the exit code.
int run(const RunConfig& config);

/// Full command line: flag parsing, config loading, overrides, then run().
int run_cli(int argc, const char* const* argv);

}  // namespace apnum::cli
