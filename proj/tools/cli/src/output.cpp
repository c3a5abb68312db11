#include "hetnet_cli/output.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "hetnet_cli/version.hpp"

namespace hetnet::cli {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(columns.size()) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  for (const std::string& c : columns) cell(std::string_view(c));
  end_row();
}

void CsvWriter::raw(std::string_view s) {
  if (filled_ == columns_)
    throw std::logic_error(path_.string() + ": row has more cells than columns");
  if (filled_ > 0) out_ << ',';
  out_ << s;
  ++filled_;
}

CsvWriter& CsvWriter::cell(double x) {
  raw(format_number(x));
  return *this;
}

CsvWriter& CsvWriter::cell(std::int64_t x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  raw(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
  return *this;
}

CsvWriter& CsvWriter::cell(std::string_view s) {
  if (s.find_first_of(",\"\n") != std::string_view::npos) {
    std::string quoted = "\"";
    for (char ch : s) {
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    quoted += '"';
    raw(quoted);
  } else {
    raw(s);
  }
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_)
    throw std::logic_error(path_.string() + ": row has fewer cells than columns");
  out_ << '\n';
  filled_ = 0;
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw std::runtime_error("error writing " + path_.string());
}

std::filesystem::path write_sidecar(const ExperimentConfig& cfg, const RunMetadata& meta) {
  const std::filesystem::path path = std::filesystem::path(cfg.out_dir) / (meta.command + ".json");
  Json doc{{"command", meta.command},
           {"version", kVersion},
           {"seed", meta.seed},
           {"runtime_seconds", meta.runtime_seconds},
           {"outputs", meta.outputs},
           {"warnings", meta.warnings},
           {"summary", meta.summary},
           {"config", cfg.input},
           {"resolved", cfg.resolved}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return path;
}

}  // namespace hetnet::cli
