#include "surfsub/csv.hpp"

#include <fmt/format.h>

#include "surfsub/error.hpp"

namespace surfsub::csv {

namespace {

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

struct CellFormatter {
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(const std::string& v) const { return v; }
    std::string operator()(const std::optional<double>& v) const { return v ? format_double(*v) : "nan"; }
};

}  // namespace

std::string format_cell(const Cell& cell) { return std::visit(CellFormatter{}, cell); }

Writer::Writer(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path);
    if (!out_) throw Error("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void Writer::row(const std::vector<Cell>& cells) {
    if (cells.size() != columns_) throw Error("CSV row width does not match the header of " + path_.string());
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << format_cell(cells[i]);
    out_ << '\n';
    if (!out_) throw Error("write failed for " + path_.string());
}

}  // namespace surfsub::csv
