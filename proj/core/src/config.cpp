#include "surfsub/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "surfsub/error.hpp"

namespace surfsub::config {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// Strips trailing `;` or `#` comments that Boost leaves in values.
std::string strip_comment(const std::string& value) {
    const auto pos = value.find_first_of(";#");
    return trim(pos == std::string::npos ? value : value.substr(0, pos));
}

std::string qualified(const std::string& section, const std::string& key) { return section + "." + key; }

}  // namespace

TimeUnit parse_time_unit(std::string_view text) {
    if (text == "s") return TimeUnit::Second;
    if (text == "min") return TimeUnit::Minute;
    throw ConfigError("unknown time unit '" + std::string(text) + "' (expected s or min)");
}

double seconds_per(TimeUnit unit) noexcept { return unit == TimeUnit::Minute ? 60.0 : 1.0; }

double to_si(double value, Quantity q, TimeUnit unit) noexcept {
    const double f = seconds_per(unit);
    return q == Quantity::Velocity ? value / f : value * f;
}

double from_si(double value, Quantity q, TimeUnit unit) noexcept {
    const double f = seconds_per(unit);
    return q == Quantity::Velocity ? value * f : value / f;
}

double parse_number(std::string_view text, std::string_view what) {
    const std::string s = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ConfigError(std::string(what) + ": '" + s + "' is not a finite number");
    }
    return v;
}

int parse_integer(std::string_view text, std::string_view what) {
    const std::string s = trim(text);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError(std::string(what) + ": '" + s + "' is not an integer");
    }
    return v;
}

Document Document::parse_string(const std::string& text) {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    }
    Document doc;
    for (const auto& [section, body] : tree) {
        if (!body.data().empty()) throw ConfigError("key '" + section + "' appears outside a section");
        auto& target = doc.values_[section];
        for (const auto& [key, value] : body) target[key] = strip_comment(value.data());
    }
    return doc;
}

Document Document::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

void Document::apply_override(std::string_view assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.substr(0, eq).find('.');
    if (eq == std::string_view::npos || dot == std::string_view::npos) {
        throw ConfigError("override '" + std::string(assignment) + "' must look like section.key=value");
    }
    const std::string section = trim(assignment.substr(0, dot));
    const std::string key = trim(assignment.substr(dot + 1, eq - dot - 1));
    if (section.empty() || key.empty()) throw ConfigError("override '" + std::string(assignment) + "' lacks a name");
    values_[section][key] = trim(assignment.substr(eq + 1));
}

bool Document::has(const std::string& section, const std::string& key) const {
    const auto s = values_.find(section);
    return s != values_.end() && s->second.contains(key);
}

bool Document::has_section(const std::string& section) const { return values_.contains(section); }

std::optional<std::string> Document::get(const std::string& section, const std::string& key) const {
    const auto s = values_.find(section);
    if (s == values_.end()) return std::nullopt;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    consumed_.emplace(section, key);
    return k->second;
}

double Document::number(const std::string& section, const std::string& key, double fallback) const {
    const auto v = get(section, key);
    return v ? parse_number(*v, qualified(section, key)) : fallback;
}

int Document::integer(const std::string& section, const std::string& key, int fallback) const {
    const auto v = get(section, key);
    return v ? parse_integer(*v, qualified(section, key)) : fallback;
}

std::string Document::text(const std::string& section, const std::string& key, const std::string& fallback) const {
    return get(section, key).value_or(fallback);
}

void Document::require_all_consumed() const {
    std::string unknown;
    for (const auto& [section, body] : values_) {
        for (const auto& [key, value] : body) {
            if (consumed_.contains({section, key})) continue;
            if (!unknown.empty()) unknown += ", ";
            unknown += qualified(section, key);
        }
    }
    if (!unknown.empty()) throw ConfigError("unknown configuration keys: " + unknown);
}

}  // namespace surfsub::config
