#include "cellguard/lang/notebook_file.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cellguard::lang {

    namespace {

        std::vector<cell_source> parse_percent_format(std::string_view text) {
            std::vector<cell_source> cells;
            std::string current;
            bool open = false;
            auto flush = [&] {
                if (open) {
                    cells.push_back({"c" + std::to_string(cells.size() + 1), current});
                }
                current.clear();
            };
            std::size_t pos = 0;
            while (pos <= text.size()) {
                auto end = text.find('\n', pos);
                if (end == std::string_view::npos) {
                    end = text.size();
                }
                auto line = text.substr(pos, end - pos);
                if (line.starts_with("# %%")) {
                    flush();
                    open = true;
                }
                else {
                    if (!open && !line.empty()) {
                        open = true;
                    }
                    if (open) {
                        current.append(line);
                        current.push_back('\n');
                    }
                }
                pos = end + 1;
            }
            flush();
            for (auto& c : cells) {
                while (!c.source.empty() && c.source.back() == '\n') {
                    c.source.pop_back();
                }
            }
            return cells;
        }

    }  // namespace

    std::vector<cell_source> parse_notebook(std::string_view text) {
        auto first = text.find_first_not_of(" \t\r\n");
        if (first != std::string_view::npos && text[first] == '{') {
            auto doc = nlohmann::json::parse(text);
            std::vector<cell_source> cells;
            for (const auto& c : doc.at("cells")) {
                cells.push_back({c.at("id").get<std::string>(), c.at("source").get<std::string>()});
            }
            return cells;
        }
        return parse_percent_format(text);
    }

    std::vector<cell_source> load_notebook(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) {
            throw std::runtime_error("cannot open notebook " + path.string());
        }
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_notebook(ss.str());
    }

    std::string notebook_to_json(const std::vector<cell_source>& cells) {
        nlohmann::json doc;
        doc["cells"] = nlohmann::json::array();
        for (const auto& c : cells) {
            doc["cells"].push_back({{"id", c.id}, {"source", c.source}});
        }
        return doc.dump(2);
    }

}  // namespace cellguard::lang
