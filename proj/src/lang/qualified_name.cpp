#include "cellguard/lang/qualified_name.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>
#include <stdexcept>

namespace cellguard::lang {

    bool is_identifier(std::string_view text) {
        if (text.empty()) {
            return false;
        }
        auto head = static_cast<unsigned char>(text.front());
        if (!(std::isalpha(head) || head == '_')) {
            return false;
        }
        return std::all_of(text.begin() + 1, text.end(), [](char c) {
            auto u = static_cast<unsigned char>(c);
            return std::isalnum(u) || u == '_';
        });
    }

    accessor accessor::attribute(std::string name) {
        return accessor{kind::attribute, std::move(name), 0};
    }

    accessor accessor::at(std::int64_t index) {
        return accessor{kind::index, {}, index};
    }

    accessor accessor::string_key(std::string key) {
        if (is_identifier(key)) {
            return attribute(std::move(key));
        }
        return accessor{kind::key, std::move(key), 0};
    }

    std::string accessor::to_string() const {
        switch (k) {
            case kind::attribute:
                return "." + name;
            case kind::index:
                return "[" + std::to_string(index) + "]";
            case kind::key: {
                std::string out = "[\"";
                for (char c : name) {
                    if (c == '"' || c == '\\') {
                        out.push_back('\\');
                    }
                    out.push_back(c);
                }
                out += "\"]";
                return out;
            }
        }
        return {};
    }

    qualified_name::qualified_name(std::string base) : base_(std::move(base)) { rebuild(); }

    qualified_name::qualified_name(std::string base, std::vector<accessor> path)
        : base_(std::move(base)), path_(std::move(path)) {
        rebuild();
    }

    qualified_name qualified_name::parse(std::string_view text) {
        auto bad = [&]() { return std::invalid_argument("malformed symbol name '" + std::string{text} + "'"); };
        std::size_t pos = 0;
        auto ident = [&]() {
            std::size_t start = pos;
            while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
                ++pos;
            }
            auto out = std::string{text.substr(start, pos - start)};
            if (!is_identifier(out)) {
                throw bad();
            }
            return out;
        };
        std::string base = ident();
        std::vector<accessor> path;
        while (pos < text.size()) {
            if (text[pos] == '.') {
                ++pos;
                path.push_back(accessor::attribute(ident()));
            }
            else if (text[pos] == '[' && pos + 1 < text.size() && text[pos + 1] == '"') {
                pos += 2;
                std::string key;
                while (pos < text.size() && text[pos] != '"') {
                    if (text[pos] == '\\' && pos + 1 < text.size()) {
                        ++pos;
                    }
                    key.push_back(text[pos++]);
                }
                if (pos + 1 >= text.size() || text[pos + 1] != ']') {
                    throw bad();
                }
                pos += 2;
                path.push_back(accessor::string_key(std::move(key)));
            }
            else if (text[pos] == '[') {
                auto close = text.find(']', pos);
                if (close == std::string_view::npos) {
                    throw bad();
                }
                std::string digits{text.substr(pos + 1, close - pos - 1)};
                std::size_t used = 0;
                std::int64_t index = 0;
                try {
                    index = std::stoll(digits, &used);
                }
                catch (const std::exception&) {
                    throw bad();
                }
                if (used != digits.size()) {
                    throw bad();
                }
                pos = close + 1;
                path.push_back(accessor::at(index));
            }
            else {
                throw bad();
            }
        }
        return qualified_name{std::move(base), std::move(path)};
    }

    void qualified_name::rebuild() {
        text_ = base_;
        for (const auto& a : path_) {
            text_ += a.to_string();
        }
    }

    qualified_name qualified_name::child(accessor a) const {
        auto path = path_;
        path.push_back(std::move(a));
        return qualified_name{base_, std::move(path)};
    }

    qualified_name qualified_name::parent() const {
        if (path_.empty()) {
            return *this;
        }
        auto path = path_;
        path.pop_back();
        return qualified_name{base_, std::move(path)};
    }

    std::vector<qualified_name> qualified_name::prefixes() const {
        std::vector<qualified_name> out;
        out.reserve(path_.size() + 1);
        std::vector<accessor> path;
        out.emplace_back(base_);
        for (const auto& a : path_) {
            path.push_back(a);
            out.emplace_back(base_, path);
        }
        return out;
    }

    name_set set_union(const name_set& a, const name_set& b) {
        name_set out = a;
        out.insert(b.begin(), b.end());
        return out;
    }

    name_set set_difference(const name_set& a, const name_set& b) {
        name_set out;
        std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
        return out;
    }

    name_set set_intersection(const name_set& a, const name_set& b) {
        name_set out;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
        return out;
    }

    std::vector<std::string> to_strings(const name_set& names) {
        std::vector<std::string> out;
        out.reserve(names.size());
        for (const auto& n : names) {
            out.push_back(n.str());
        }
        return out;
    }

}  // namespace cellguard::lang
