#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "hetnet_cli/config.hpp"

namespace hetnet::cli {

/// Shortest decimal form that reads back to the same double.
std::string format_number(double x);

/// Comma-separated output with a one-line header; every row must have one
/// cell per column.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns);

  CsvWriter& cell(double x);
  CsvWriter& cell(std::int64_t x);
  CsvWriter& cell(int x) { return cell(static_cast<std::int64_t>(x)); }
  CsvWriter& cell(std::string_view s);
  void end_row();
  void close();

 private:
  void raw(std::string_view s);

  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_ = 0;
  std::size_t filled_ = 0;
};

struct RunMetadata {
  std::string command;
  std::uint64_t seed = 0;
  double runtime_seconds = 0.0;
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
  Json summary = Json::object();
};

/// Writes <out_dir>/<command>.json holding the config echo, version, seed,
/// runtime, produced files, warnings and a result summary.
std::filesystem::path write_sidecar(const ExperimentConfig& cfg, const RunMetadata& meta);

}  // namespace hetnet::cli
