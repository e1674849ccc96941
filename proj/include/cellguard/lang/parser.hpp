#pragma once

#include "cellguard/lang/ast.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace cellguard::lang {

    class syntax_error : public std::runtime_error {
      public:
        syntax_error(std::string message, int line, int column);

        int line() const { return line_; }
        int column() const { return column_; }
        const std::string& message() const { return message_; }

      private:
        std::string message_;
        int line_;
        int column_;
    };

    // Parses one cell. Indentation uses a fixed 4-space unit; tabs are rejected.
    program parse_cell(std::string_view text);

    // Canonical source rendering; parse_cell(pretty_print(p)) is structurally equal to p.
    std::string pretty_print(const program& p);
    std::string pretty_print(const expr& e);

    // Structural dump that ignores source spans; equal dumps mean equal trees.
    std::string to_sexpr(const program& p);
    std::string to_sexpr(const expr& e);

}  // namespace cellguard::lang
