#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rankcal/histogram.hpp"

namespace rankcal::cli {

inline constexpr std::string_view version = "1.0.0";

/// "rank,count" rows.
std::string histogram_csv(const RankHistogram& h);

/// {method, m, n_cases, counts[], mean_rank, rank_variance, chi_square}.
nlohmann::ordered_json summary_json(std::string_view method, const RankHistogram& h);

/// Self-contained bar chart: one 20 px bar per rank plus a dashed line at
/// the uniform expectation. Output depends only on the arguments.
std::string histogram_svg(std::string_view title, const RankHistogram& h);

void write_text(const std::filesystem::path& file, std::string_view text);
std::string read_text(const std::filesystem::path& file);

/// Shortest round-trip JSON text with a trailing newline.
std::string dump_json(const nlohmann::ordered_json& j);

/// Provenance record written next to every output set.
struct RunManifest {
  std::string subcommand;
  /// Fully resolved command line; replaying it reproduces the outputs.
  std::vector<std::string> argv;
  nlohmann::ordered_json parameters;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  double duration_seconds = 0.0;

  nlohmann::ordered_json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

}  // namespace rankcal::cli
