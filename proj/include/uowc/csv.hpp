#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace uowc {

/// Numeric CSV with `#`-prefixed comment lines (comments keep their text after "# ").
struct CsvTable {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    [[nodiscard]] std::size_t column(const std::string& name) const;
};

/// Shortest decimal text that is exact to 17 significant digits.
[[nodiscard]] std::string format_double(double value);

[[nodiscard]] std::string join_header(const std::vector<std::string>& names);

[[nodiscard]] CsvTable read_csv(const std::filesystem::path& path);

}  // namespace uowc
