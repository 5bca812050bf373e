#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "surfsub/config.hpp"

namespace surfsub::cli {

struct CommonOptions {
    std::optional<std::filesystem::path> config;
    std::vector<std::string> overrides;
    std::filesystem::path out = "out";
    unsigned workers = 1;
};

/// Configuration file (if any) with command-line overrides applied.
config::Document load_document(const CommonOptions& opts);

int cmd_presets();
int cmd_analyze(const CommonOptions& opts);
int cmd_linrun(const CommonOptions& opts);
int cmd_simulate(const CommonOptions& opts, const std::optional<std::string>& preset,
                 std::optional<double> cr_exclude_threshold);

}  // namespace surfsub::cli
