#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "pcfit/config.hpp"
#include "pcfit/report.hpp"

namespace pcfit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitInvariant = 2;

/// Parses and runs one command line (program name excluded). Never throws;
/// errors are written to `err` and mapped to an exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "1,2,5-8" -> {1, 2, 5, 6, 7, 8}.
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

/// Non-comment lines of a manifest, in order.
std::vector<std::string> read_manifest(const std::filesystem::path& path);

/// Layered settings: built-in defaults, then the config file (if any), then
/// `key=value` overrides.
KeyValues layered_config(const std::string& config_path, const std::vector<std::string>& overrides);

struct BatchOutcome {
  std::vector<RunRecord> records;             ///< manifest order, seeds in the order given
  std::vector<std::string> skipped;           ///< "image: reason"
};

BatchOutcome run_batch(const std::vector<std::string>& images, const std::filesystem::path& base_dir,
                       const KeyValues& kv, const std::vector<std::uint64_t>& seeds, int jobs);

}  // namespace pcfit::cli
