#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace qnpg {

/// 17 significant digits, locale independent; "nan", "inf", "-inf".
std::string format_number(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  const std::vector<std::string>& header() const noexcept { return header_; }
  std::size_t rows() const noexcept { return rows_.size(); }
  const std::vector<std::string>& row(std::size_t i) const { return rows_.at(i); }

  /// Throws std::invalid_argument if the width differs from the header.
  void add_row(std::vector<std::string> cells);

  /// Comma separated, header first, LF line endings.
  std::string str() const;
  void write(const std::filesystem::path& path) const;

  /// Inverse of str(); no quoting support.
  static CsvTable parse(const std::string& text);
  static CsvTable read(const std::filesystem::path& path);

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace qnpg
