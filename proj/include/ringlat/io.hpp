#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ringlat {

inline constexpr const char* kToolVersion = "ringlat 0.1.0";

// Plot-ready CSV: '#' comment lines, one header row, then %.17g data rows.
class CsvWriter {
 public:
  CsvWriter(std::filesystem::path path, const std::vector<std::string>& comments,
            const std::vector<std::string>& columns);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<double>& values);
  void close();
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::FILE* f_ = nullptr;
  std::size_t n_cols_ = 0;
};

struct TimeSeries {
  std::vector<double> t;
  std::vector<double> value;
};

// Two-column (t_seconds, value) CSV with a header; '#' comments allowed.
// Parse failures report the 1-based line number.
TimeSeries read_time_series(const std::filesystem::path& path);

std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t file_digest(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

std::string format_double(double v);  // shortest round-trip via %.17g

}  // namespace ringlat
