#include "ringlat/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ringlat {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::filesystem::path path,
                     const std::vector<std::string>& comments,
                     const std::vector<std::string>& columns)
    : path_(std::move(path)), n_cols_(columns.size()) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  f_ = std::fopen(path_.string().c_str(), "wb");
  if (!f_) throw std::runtime_error("cannot open for writing: " + path_.string());
  for (const auto& c : comments) std::fprintf(f_, "# %s\n", c.c_str());
  for (std::size_t i = 0; i < columns.size(); ++i)
    std::fprintf(f_, "%s%s", columns[i].c_str(), i + 1 == columns.size() ? "\n" : ",");
}

CsvWriter::~CsvWriter() { close(); }

void CsvWriter::row(const std::vector<double>& values) {
  if (!f_) throw std::runtime_error("CsvWriter: file already closed");
  if (values.size() != n_cols_)
    throw std::invalid_argument("CsvWriter: wrong number of columns");
  for (std::size_t i = 0; i < values.size(); ++i)
    std::fprintf(f_, "%s%s", format_double(values[i]).c_str(),
                 i + 1 == values.size() ? "\n" : ",");
}

void CsvWriter::close() {
  if (f_) {
    std::fclose(f_);
    f_ = nullptr;
  }
}

TimeSeries read_time_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open time series: " + path.string());
  TimeSeries ts;
  std::string line;
  std::size_t line_no = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b)) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected two comma-separated columns");
    }
    char* end_a = nullptr;
    char* end_b = nullptr;
    const double t = std::strtod(a.c_str(), &end_a);
    const double v = std::strtod(b.c_str(), &end_b);
    const bool parsed = end_a != a.c_str() && end_b != b.c_str();
    if (!parsed) {
      if (header_allowed) {  // one non-numeric header row
        header_allowed = false;
        continue;
      }
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": cannot parse numbers");
    }
    header_allowed = false;
    ts.t.push_back(t);
    ts.value.push_back(v);
  }
  if (ts.t.empty())
    throw std::runtime_error(path.string() + ": no data rows");
  return ts;
}

std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t file_digest(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  return fnv1a64(text.data(), text.size());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ringlat
