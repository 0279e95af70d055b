#pragma once

#include <fstream>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace lde::cli {

/// Shortest text that round-trips the double; "nan"/"inf" for non-finite values.
std::string fmt(double v);
std::string fmt(const std::optional<double>& v);

/// RFC-4180 quoting when the cell contains a comma, quote or newline.
std::string quote(const std::string& cell);

/// stdout when path is empty or "-", else the named file.
class Output {
 public:
  explicit Output(const std::string& path);
  std::ostream& stream();
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::optional<std::ofstream> file_;
};

/// CSV with a leading "# config: {json}" comment and a header row.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const nlohmann::json& config, std::vector<std::string> header);

  void row(const std::vector<std::string>& cells);
  void comment(const std::string& text);

 private:
  std::ostream& os_;
  std::size_t columns_;
};

}  // namespace lde::cli
