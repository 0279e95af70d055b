#include "cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <iostream>

#include "lde/error.hpp"

namespace lde::cli {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::string quote(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char ch : cell) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

Output::Output(const std::string& path) : path_(path) {
  if (!path.empty() && path != "-") {
    file_.emplace(path, std::ios::binary);
    if (!*file_) throw InvalidArgument("cannot open '" + path + "' for writing");
  }
}

std::ostream& Output::stream() { return file_ ? static_cast<std::ostream&>(*file_) : std::cout; }

CsvWriter::CsvWriter(std::ostream& os, const nlohmann::json& config, std::vector<std::string> header)
    : os_(os), columns_(header.size()) {
  os_ << "# config: " << config.dump() << '\n';
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::logic_error("CSV row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os_ << ',';
    os_ << quote(cells[i]);
  }
  os_ << '\n';
}

void CsvWriter::comment(const std::string& text) { os_ << "# " << text << '\n'; }

}  // namespace lde::cli
