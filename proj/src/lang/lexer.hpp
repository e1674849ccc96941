#pragma once

#include "cellguard/lang/ast.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace cellguard::lang::detail {

    enum class token_kind { name, integer, floating, string, op, newline, indent, dedent, end };

    struct token {
        token_kind kind{token_kind::end};
        std::string text{};
        source_span span{};
        std::int64_t int_value{};
        double float_value{};
    };

    // Splits a cell into tokens, synthesising NEWLINE/INDENT/DEDENT from
    // layout. Newlines inside brackets are ignored.
    std::vector<token> tokenize(std::string_view text);

}  // namespace cellguard::lang::detail
