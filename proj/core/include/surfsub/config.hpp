/**
 * @file config.hpp
 * @brief INI-style configuration documents and time-unit conversion.
 *
 * Files hold `[section]` headers and `key = value` lines; `;` and `#` start
 * comments. Every key must be consumed by a reader, otherwise
 * require_all_consumed() reports it, so typos never pass silently.
 */
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>

namespace surfsub::config {

enum class TimeUnit { Second, Minute };

/// Physical dimension of a time-bearing input.
enum class Quantity {
    Time,      ///< [T]
    Velocity,  ///< [L / T], also rainfall rates and conductivities
    Manning,   ///< [L^{-1/3} T]
};

TimeUnit parse_time_unit(std::string_view text);
double seconds_per(TimeUnit unit) noexcept;
double to_si(double value, Quantity q, TimeUnit unit) noexcept;
double from_si(double value, Quantity q, TimeUnit unit) noexcept;

class Document {
public:
    static Document parse_file(const std::filesystem::path& path);
    static Document parse_string(const std::string& text);

    /// Applies `section.key=value`; the key need not exist yet.
    void apply_override(std::string_view assignment);

    bool has(const std::string& section, const std::string& key) const;
    bool has_section(const std::string& section) const;

    /// Raw value; marks the key as consumed.
    std::optional<std::string> get(const std::string& section, const std::string& key) const;

    double number(const std::string& section, const std::string& key, double fallback) const;
    int integer(const std::string& section, const std::string& key, int fallback) const;
    std::string text(const std::string& section, const std::string& key, const std::string& fallback) const;

    /// Throws ConfigError naming every key nobody asked for.
    void require_all_consumed() const;

private:
    std::map<std::string, std::map<std::string, std::string>> values_;
    mutable std::set<std::pair<std::string, std::string>> consumed_;
};

/// Strict numeric parsing: the whole string must be a finite number.
double parse_number(std::string_view text, std::string_view what);
int parse_integer(std::string_view text, std::string_view what);

}  // namespace surfsub::config
