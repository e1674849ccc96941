#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cellguard::lang {

    struct cell_source {
        std::string id;
        std::string source;

        bool operator==(const cell_source&) const = default;
    };

    // Accepts either {"cells": [{"id", "source"}]} or plain text split on
    // lines starting with `# %%` (ids c1, c2, ...).
    std::vector<cell_source> parse_notebook(std::string_view text);
    std::vector<cell_source> load_notebook(const std::filesystem::path& path);

    std::string notebook_to_json(const std::vector<cell_source>& cells);

}  // namespace cellguard::lang
