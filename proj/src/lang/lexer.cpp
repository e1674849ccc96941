#include "lexer.hpp"

#include "cellguard/lang/parser.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

namespace cellguard::lang::detail {

    namespace {

        constexpr int indent_unit = 4;

        class lexer {
          public:
            explicit lexer(std::string_view text) : src_(text) {}

            std::vector<token> run() {
                bool at_line_start = true;
                while (pos_ < src_.size()) {
                    if (at_line_start && depth_ == 0) {
                        if (!handle_indentation()) {
                            continue;  // blank or comment-only line consumed
                        }
                        at_line_start = false;
                    }
                    char c = src_[pos_];
                    if (c == '\n') {
                        advance();
                        if (depth_ == 0) {
                            emit_newline();
                            at_line_start = true;
                        }
                        continue;
                    }
                    if (c == '\r' || c == ' ') {
                        advance();
                        continue;
                    }
                    if (c == '\t') {
                        throw syntax_error("tab characters are not allowed", line_, col_);
                    }
                    if (c == '#') {
                        skip_comment();
                        continue;
                    }
                    if (c == '\\' && peek(1) == '\n') {
                        advance();
                        advance();
                        continue;
                    }
                    if (std::isdigit(static_cast<unsigned char>(c)) ||
                        (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
                        lex_number();
                    }
                    else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                        lex_name();
                    }
                    else if (c == '"' || c == '\'') {
                        lex_string(c);
                    }
                    else {
                        lex_operator();
                    }
                }
                if (depth_ > 0) {
                    throw syntax_error("unexpected end of input inside brackets", line_, col_);
                }
                if (!tokens_.empty() && tokens_.back().kind != token_kind::newline &&
                    tokens_.back().kind != token_kind::dedent) {
                    emit_newline();
                }
                while (indents_.size() > 1) {
                    indents_.pop_back();
                    tokens_.push_back(token{token_kind::dedent, {}, {line_, col_}});
                }
                tokens_.push_back(token{token_kind::end, {}, {line_, col_}});
                return std::move(tokens_);
            }

          private:
            char peek(std::size_t ahead = 0) const {
                return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
            }

            void advance() {
                if (src_[pos_] == '\n') {
                    ++line_;
                    col_ = 1;
                }
                else {
                    ++col_;
                }
                ++pos_;
            }

            void emit_newline() {
                if (tokens_.empty() || tokens_.back().kind == token_kind::newline) {
                    return;
                }
                tokens_.push_back(token{token_kind::newline, {}, {line_, col_}});
            }

            void skip_comment() {
                while (pos_ < src_.size() && src_[pos_] != '\n') {
                    advance();
                }
            }

            // Returns false when the line was blank/comment-only and has been consumed.
            bool handle_indentation() {
                int width = 0;
                int start_col = col_;
                while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\r')) {
                    if (src_[pos_] == '\t') {
                        throw syntax_error("tab characters are not allowed in indentation", line_, col_);
                    }
                    if (src_[pos_] == ' ') {
                        ++width;
                    }
                    advance();
                }
                if (pos_ >= src_.size()) {
                    return false;
                }
                if (src_[pos_] == '\n') {
                    advance();
                    return false;
                }
                if (src_[pos_] == '#') {
                    skip_comment();
                    if (pos_ < src_.size()) {
                        advance();
                    }
                    return false;
                }
                if (width % indent_unit != 0) {
                    throw syntax_error("indentation must be a multiple of 4 spaces", line_, start_col);
                }
                int current = indents_.back();
                if (width > current) {
                    if (width != current + indent_unit) {
                        throw syntax_error("unexpected indent", line_, col_);
                    }
                    indents_.push_back(width);
                    tokens_.push_back(token{token_kind::indent, {}, {line_, col_}});
                }
                else {
                    while (width < indents_.back()) {
                        indents_.pop_back();
                        tokens_.push_back(token{token_kind::dedent, {}, {line_, col_}});
                    }
                    if (width != indents_.back()) {
                        throw syntax_error("unindent does not match any outer indentation level", line_, col_);
                    }
                }
                return true;
            }

            void lex_number() {
                source_span span{line_, col_};
                std::size_t start = pos_;
                bool is_float = false;
                while (std::isdigit(static_cast<unsigned char>(peek()))) {
                    advance();
                }
                if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
                    is_float = true;
                    advance();
                    while (std::isdigit(static_cast<unsigned char>(peek()))) {
                        advance();
                    }
                }
                else if (peek() == '.' && !std::isalpha(static_cast<unsigned char>(peek(1)))) {
                    is_float = true;
                    advance();
                }
                if (peek() == 'e' || peek() == 'E') {
                    std::size_t save = pos_;
                    int save_col = col_;
                    advance();
                    if (peek() == '+' || peek() == '-') {
                        advance();
                    }
                    if (std::isdigit(static_cast<unsigned char>(peek()))) {
                        is_float = true;
                        while (std::isdigit(static_cast<unsigned char>(peek()))) {
                            advance();
                        }
                    }
                    else {
                        pos_ = save;
                        col_ = save_col;
                    }
                }
                std::string text{src_.substr(start, pos_ - start)};
                token t{is_float ? token_kind::floating : token_kind::integer, text, span};
                if (is_float) {
                    t.float_value = std::strtod(text.c_str(), nullptr);
                }
                else {
                    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), t.int_value);
                    if (ec != std::errc{}) {
                        throw syntax_error("integer literal out of range", span.line, span.column);
                    }
                }
                tokens_.push_back(std::move(t));
            }

            void lex_name() {
                source_span span{line_, col_};
                std::size_t start = pos_;
                while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
                    advance();
                }
                tokens_.push_back(token{token_kind::name, std::string{src_.substr(start, pos_ - start)}, span});
            }

            void lex_string(char quote) {
                source_span span{line_, col_};
                advance();
                std::string value;
                while (true) {
                    if (pos_ >= src_.size() || peek() == '\n') {
                        throw syntax_error("unterminated string literal", span.line, span.column);
                    }
                    char c = peek();
                    if (c == quote) {
                        advance();
                        break;
                    }
                    if (c == '\\') {
                        advance();
                        char e = peek();
                        switch (e) {
                            case 'n':
                                value.push_back('\n');
                                break;
                            case 't':
                                value.push_back('\t');
                                break;
                            case '\\':
                            case '\'':
                            case '"':
                                value.push_back(e);
                                break;
                            default:
                                throw syntax_error("unknown escape sequence", line_, col_);
                        }
                        advance();
                        continue;
                    }
                    value.push_back(c);
                    advance();
                }
                tokens_.push_back(token{token_kind::string, std::move(value), span});
            }

            void lex_operator() {
                source_span span{line_, col_};
                static constexpr std::string_view two_char[] = {
                        "==", "!=", "<=", ">=", "//", "+=", "-=", "*=", "/="};
                for (auto op : two_char) {
                    if (src_.substr(pos_, 2) == op) {
                        // `//=` is not supported; `//` followed by `=` lexes as two tokens.
                        advance();
                        advance();
                        tokens_.push_back(token{token_kind::op, std::string{op}, span});
                        return;
                    }
                }
                char c = peek();
                static constexpr std::string_view singles = "+-*/%<>=()[]{}:,.";
                if (singles.find(c) == std::string_view::npos) {
                    throw syntax_error(std::string{"unexpected character '"} + c + "'", span.line, span.column);
                }
                if (c == '(' || c == '[' || c == '{') {
                    ++depth_;
                }
                else if (c == ')' || c == ']' || c == '}') {
                    if (depth_ == 0) {
                        throw syntax_error(std::string{"unmatched '"} + c + "'", span.line, span.column);
                    }
                    --depth_;
                }
                advance();
                tokens_.push_back(token{token_kind::op, std::string(1, c), span});
            }

            std::string_view src_;
            std::size_t pos_{0};
            int line_{1};
            int col_{1};
            int depth_{0};
            std::vector<int> indents_{0};
            std::vector<token> tokens_;
        };

    }  // namespace

    std::vector<token> tokenize(std::string_view text) {
        return lexer{text}.run();
    }

}  // namespace cellguard::lang::detail
