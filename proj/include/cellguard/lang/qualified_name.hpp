#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cellguard::lang {

    bool is_identifier(std::string_view text);

    // One step of a qualified name: `.name`, `[3]` or `["some key"]`.
    struct accessor {
        enum class kind : std::uint8_t { attribute, index, key };

        kind k{kind::attribute};
        std::string name{};  // attribute name or string key
        std::int64_t index{};

        static accessor attribute(std::string name);
        static accessor at(std::int64_t index);
        // String keys that are identifiers collapse to the attribute form.
        static accessor string_key(std::string key);

        std::string to_string() const;

        bool operator==(const accessor&) const = default;
    };

    // A (possibly qualified) symbol name, e.g. `x`, `df.col`, `lst[0]`.
    // Ordering and equality use the canonical text form.
    class qualified_name {
      public:
        qualified_name() = default;
        explicit qualified_name(std::string base);
        qualified_name(std::string base, std::vector<accessor> path);
        // Inverse of str(): `df.col`, `lst[0]`, `d["two words"]`. Throws
        // std::invalid_argument on malformed text.
        static qualified_name parse(std::string_view text);

        const std::string& base() const { return base_; }
        const std::vector<accessor>& path() const { return path_; }
        const std::string& str() const { return text_; }

        bool is_simple() const { return path_.empty(); }
        qualified_name child(accessor a) const;
        qualified_name parent() const;
        // x, x.a, x.a[0] for `x.a[0]`
        std::vector<qualified_name> prefixes() const;

        bool operator==(const qualified_name& o) const { return text_ == o.text_; }
        std::strong_ordering operator<=>(const qualified_name& o) const { return text_ <=> o.text_; }

      private:
        void rebuild();

        std::string base_{};
        std::vector<accessor> path_{};
        std::string text_{};
    };

    using name_set = std::set<qualified_name>;

    name_set set_union(const name_set& a, const name_set& b);
    name_set set_difference(const name_set& a, const name_set& b);
    name_set set_intersection(const name_set& a, const name_set& b);
    std::vector<std::string> to_strings(const name_set& names);

}  // namespace cellguard::lang

template <>
struct std::hash<cellguard::lang::qualified_name> {
    std::size_t operator()(const cellguard::lang::qualified_name& n) const noexcept {
        return std::hash<std::string>{}(n.str());
    }
};
