#include "pansr/expr/parser.hpp"

#include <cctype>
#include <charconv>
#include <numbers>
#include <optional>
#include <vector>

namespace pansr::expr {

ParseError::ParseError(Kind kind, std::size_t position, std::string const& message)
    : std::runtime_error(message + " at position " + std::to_string(position))
    , kind_(kind)
    , position_(position)
{
}

namespace {

    enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Pow, LParen, RParen, Comma, End };

    struct Token {
        Tok type;
        std::size_t pos;
        std::string_view text;
        double number = 0.0;
    };

    std::vector<Token> tokenize(std::string_view s)
    {
        std::vector<Token> out;
        std::size_t i = 0;
        while (i < s.size()) {
            char const c = s[i];
            if (std::isspace(static_cast<unsigned char>(c)) != 0) {
                ++i;
                continue;
            }
            std::size_t const start = i;
            if (std::isdigit(static_cast<unsigned char>(c)) != 0 || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])) != 0)) {
                while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) != 0 || s[i] == '.')) {
                    ++i;
                }
                if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
                    std::size_t j = i + 1;
                    if (j < s.size() && (s[j] == '+' || s[j] == '-')) {
                        ++j;
                    }
                    if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])) != 0) {
                        i = j;
                        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])) != 0) {
                            ++i;
                        }
                    }
                }
                Token t { Tok::Number, start, s.substr(start, i - start) };
                auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
                if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
                    throw ParseError(ParseError::Kind::Syntax, start, "malformed number '" + std::string(t.text) + "'");
                }
                out.push_back(t);
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_') {
                while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) != 0 || s[i] == '_')) {
                    ++i;
                }
                out.push_back({ Tok::Ident, start, s.substr(start, i - start) });
                continue;
            }
            Tok type {};
            switch (c) {
            case '+': type = Tok::Plus; break;
            case '-': type = Tok::Minus; break;
            case '/': type = Tok::Slash; break;
            case '^': type = Tok::Pow; break;
            case '(': type = Tok::LParen; break;
            case ')': type = Tok::RParen; break;
            case ',': type = Tok::Comma; break;
            case '*':
                if (i + 1 < s.size() && s[i + 1] == '*') {
                    out.push_back({ Tok::Pow, start, s.substr(start, 2) });
                    i += 2;
                    continue;
                }
                type = Tok::Star;
                break;
            default:
                throw ParseError(ParseError::Kind::Syntax, start, std::string("unexpected character '") + c + "'");
            }
            out.push_back({ type, start, s.substr(start, 1) });
            ++i;
        }
        out.push_back({ Tok::End, s.size(), {} });
        return out;
    }

    class Parser {
    public:
        Parser(std::string_view text, std::span<std::string const> names)
            : tokens_(tokenize(text))
            , names_(names)
        {
        }

        Expression parse()
        {
            auto e = parse_sum();
            if (peek().type != Tok::End) {
                fail_unexpected();
            }
            return e;
        }

    private:
        Token const& peek(std::size_t ahead = 0) const
        {
            auto const i = std::min(pos_ + ahead, tokens_.size() - 1);
            return tokens_[i];
        }

        Token const& advance() { return tokens_[pos_++]; }

        bool accept(Tok t)
        {
            if (peek().type == t) {
                ++pos_;
                return true;
            }
            return false;
        }

        [[noreturn]] void fail_unexpected() const
        {
            auto const& t = peek();
            if (t.type == Tok::End) {
                throw ParseError(ParseError::Kind::Syntax, t.pos, "unexpected end of input");
            }
            throw ParseError(ParseError::Kind::Syntax, t.pos, "unexpected token '" + std::string(t.text) + "'");
        }

        void expect(Tok t)
        {
            if (!accept(t)) {
                fail_unexpected();
            }
        }

        Expression parse_sum()
        {
            auto lhs = parse_product();
            for (;;) {
                if (accept(Tok::Plus)) {
                    lhs = Expression::binary(BinaryOp::Add, std::move(lhs), parse_product());
                } else if (accept(Tok::Minus)) {
                    lhs = Expression::binary(BinaryOp::Sub, std::move(lhs), parse_product());
                } else {
                    return lhs;
                }
            }
        }

        Expression parse_product()
        {
            auto lhs = parse_prefix();
            for (;;) {
                if (accept(Tok::Star)) {
                    lhs = Expression::binary(BinaryOp::Mul, std::move(lhs), parse_prefix());
                } else if (accept(Tok::Slash)) {
                    lhs = Expression::binary(BinaryOp::Div, std::move(lhs), parse_prefix());
                } else {
                    return lhs;
                }
            }
        }

        Expression parse_prefix()
        {
            if (accept(Tok::Plus)) {
                return parse_prefix();
            }
            if (accept(Tok::Minus)) {
                if (peek().type == Tok::Number && peek(1).type != Tok::Pow) {
                    return Expression::constant(-advance().number);
                }
                return Expression::unary(UnaryOp::Neg, parse_prefix());
            }
            return parse_power();
        }

        Expression parse_power()
        {
            auto base = parse_primary();
            if (accept(Tok::Pow)) {
                return Expression::binary(BinaryOp::Pow, std::move(base), parse_prefix());
            }
            return base;
        }

        Expression parse_primary()
        {
            auto const& t = peek();
            switch (t.type) {
            case Tok::Number:
                advance();
                return Expression::constant(t.number);
            case Tok::LParen: {
                advance();
                auto e = parse_sum();
                expect(Tok::RParen);
                return e;
            }
            case Tok::Ident:
                return parse_identifier();
            default:
                fail_unexpected();
            }
        }

        Expression parse_identifier()
        {
            auto const t = advance();
            if (peek().type == Tok::LParen) {
                auto op = unary_from_name(t.text);
                if (!op) {
                    throw ParseError(ParseError::Kind::UnknownIdentifier, t.pos, "unknown function '" + std::string(t.text) + "'");
                }
                advance();
                auto arg = parse_sum();
                if (peek().type == Tok::Comma) {
                    throw ParseError(ParseError::Kind::Arity, peek().pos, "function '" + std::string(t.text) + "' takes exactly one argument");
                }
                expect(Tok::RParen);
                return Expression::unary(*op, std::move(arg));
            }
            if (t.text == "pi") {
                return Expression::constant(std::numbers::pi);
            }
            for (std::size_t j = 0; j < names_.size(); ++j) {
                if (names_[j] == t.text) {
                    return Expression::variable(j, names_[j]);
                }
            }
            if (unary_from_name(t.text)) {
                throw ParseError(ParseError::Kind::Arity, t.pos, "function '" + std::string(t.text) + "' requires an argument");
            }
            throw ParseError(ParseError::Kind::UnknownIdentifier, t.pos, "unknown identifier '" + std::string(t.text) + "'");
        }

        std::vector<Token> tokens_;
        std::span<std::string const> names_;
        std::size_t pos_ = 0;
    };

} // namespace

Expression parse_expression(std::string_view text, std::span<std::string const> variable_names)
{
    return Parser(text, variable_names).parse();
}

} // namespace pansr::expr
