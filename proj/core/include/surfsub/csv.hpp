/**
 * @file csv.hpp
 * @brief Minimal CSV writer with round-trip floating-point output.
 *
 * Doubles are written with 17 significant digits; an empty optional is
 * written as `nan`.
 */
#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace surfsub::csv {

using Cell = std::variant<double, long long, std::string, std::optional<double>>;

std::string format_cell(const Cell& cell);

class Writer {
public:
    /// Creates parent directories and writes the header row.
    Writer(const std::filesystem::path& path, const std::vector<std::string>& header);

    void row(const std::vector<Cell>& cells);
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
};

}  // namespace surfsub::csv
