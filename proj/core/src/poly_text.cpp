#include "srl/poly_text.hpp"

#include <cctype>
#include <charconv>

#include "srl/errors.hpp"
#include "srl/vector_field.hpp"

namespace srl {

VariableNames default_names(std::size_t dim, char prefix) {
    VariableNames names;
    names.reserve(dim);
    for (std::size_t k = 0; k < dim; ++k) names.push_back(prefix + std::to_string(k + 1));
    return names;
}

Rational parse_rational(std::string_view text) {
    std::string s(text);
    auto trim = [](std::string& str) {
        const auto b = str.find_first_not_of(" \t");
        const auto e = str.find_last_not_of(" \t");
        str = b == std::string::npos ? std::string() : str.substr(b, e - b + 1);
    };
    trim(s);
    if (s.empty()) throw InvalidArgument("empty rational literal");
    bool negative = false;
    std::size_t pos = 0;
    if (s[0] == '-' || s[0] == '+') {
        negative = s[0] == '-';
        pos = 1;
    }
    std::string body = s.substr(pos);
    Rational q;
    try {
        if (auto dot = body.find('.'); dot != std::string::npos) {
            std::string digits = body.substr(0, dot) + body.substr(dot + 1);
            if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
                throw InvalidArgument("bad decimal literal '" + s + "'");
            }
            mpz_class num(digits, 10);
            mpz_class den;
            mpz_ui_pow_ui(den.get_mpz_t(), 10, body.size() - dot - 1);
            q = Rational(num, den);
        } else {
            const auto slash = body.find('/');
            auto check = [&](const std::string& part) {
                if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos) {
                    throw InvalidArgument("bad rational literal '" + s + "'");
                }
            };
            if (slash == std::string::npos) {
                check(body);
                q = Rational(mpz_class(body, 10));
            } else {
                const std::string num = body.substr(0, slash);
                const std::string den = body.substr(slash + 1);
                check(num);
                check(den);
                if (mpz_class(den, 10) == 0) throw InvalidArgument("zero denominator in '" + s + "'");
                q = Rational(mpz_class(num, 10), mpz_class(den, 10));
            }
        }
    } catch (const std::invalid_argument&) {
        throw InvalidArgument("bad rational literal '" + s + "'");
    }
    q.canonicalize();
    return negative ? Rational(-q) : q;
}

namespace {

class Parser {
public:
    Parser(std::string_view text, std::size_t dim, const VariableNames& names, std::size_t line,
           std::size_t column_offset)
        : text_(text), dim_(dim), names_(names), line_(line), offset_(column_offset) {}

    Polynomial parse() {
        skip_ws();
        if (at_end()) fail("empty expression");
        Polynomial p = expr();
        skip_ws();
        if (!at_end()) fail(std::string("unexpected '") + text_[pos_] + "'");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, line_, offset_ + pos_ + 1);
    }

    bool at_end() const { return pos_ >= text_.size(); }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (!at_end() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Polynomial expr() {
        Polynomial acc = term();
        for (;;) {
            if (accept('+')) {
                acc += term();
            } else if (accept('-')) {
                acc -= term();
            } else {
                return acc;
            }
        }
    }

    Polynomial term() {
        Polynomial acc = unary();
        for (;;) {
            if (accept('*')) {
                acc *= unary();
            } else if (accept('/')) {
                const std::size_t at = pos_;
                Polynomial divisor = unary();
                if (!divisor.is_constant() || divisor.is_zero()) {
                    pos_ = at;
                    fail("division only by a nonzero constant");
                }
                acc *= Rational(1 / divisor.constant_term());
            } else {
                return acc;
            }
        }
    }

    Polynomial unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Polynomial power() {
        Polynomial base = primary();
        if (accept('^')) {
            skip_ws();
            const std::size_t start = pos_;
            while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (start == pos_) fail("expected non-negative integer exponent");
            unsigned n = 0;
            auto res = std::from_chars(text_.data() + start, text_.data() + pos_, n);
            if (res.ec != std::errc() || n > 1000) {
                pos_ = start;
                fail("exponent out of range");
            }
            return base.pow(n);
        }
        return base;
    }

    Polynomial primary() {
        skip_ws();
        if (at_end()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Polynomial inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const std::size_t start = pos_;
            while (!at_end() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
                ++pos_;
            }
            try {
                return Polynomial::constant(dim_, parse_rational(text_.substr(start, pos_ - start)));
            } catch (const InvalidArgument&) {
                pos_ = start;
                fail("bad number literal");
            }
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
            const std::string_view name = text_.substr(start, pos_ - start);
            for (std::size_t k = 0; k < names_.size(); ++k) {
                if (names_[k] == name) return Polynomial::variable(dim_, k);
            }
            if (name.size() >= 2 && (name[0] == 'x' || name[0] == 'y')) {
                std::size_t idx = 0;
                auto res = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
                if (res.ec == std::errc() && res.ptr == name.data() + name.size() && idx >= 1 && idx <= dim_) {
                    return Polynomial::variable(dim_, idx - 1);
                }
            }
            pos_ = start;
            fail("unknown variable '" + std::string(name) + "'");
        }
        fail(std::string("unexpected '") + c + "'");
    }

    std::string_view text_;
    std::size_t dim_;
    const VariableNames& names_;
    std::size_t line_;
    std::size_t offset_;
    std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(std::string_view text, std::size_t dim, const VariableNames& names,
                            std::size_t line, std::size_t column_offset) {
    return Parser(text, dim, names, line, column_offset).parse();
}

std::string to_string(const Rational& q) {
    return q.get_str();
}

std::string to_string(const Polynomial& p, const VariableNames& names) {
    if (p.is_zero()) return "0";
    const VariableNames& vars = names.empty() ? default_names(p.dim()) : names;
    std::string out;
    bool first = true;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto& [e, c] = *it;
        std::string mono;
        for (std::size_t j = 0; j < e.size(); ++j) {
            if (e[j] == 0) continue;
            if (!mono.empty()) mono += "*";
            mono += vars[j];
            if (e[j] > 1) mono += "^" + std::to_string(e[j]);
        }
        const bool negative = c < 0;
        const Rational mag = abs(c);
        std::string term;
        if (mono.empty()) {
            term = to_string(mag);
        } else if (mag == 1) {
            term = mono;
        } else {
            term = to_string(mag) + "*" + mono;
        }
        if (first) {
            out = negative ? "-" + term : term;
            first = false;
        } else {
            out += negative ? " - " : " + ";
            out += term;
        }
    }
    return out;
}

std::vector<Polynomial> parse_polynomial_list(std::string_view text, std::size_t dim,
                                              const VariableNames& names, std::size_t line,
                                              std::size_t column_offset) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    if (begin < end && text[begin] == '(' && text[end - 1] == ')') {
        // only strip when the outer parentheses enclose the whole list
        int depth = 0;
        bool encloses = true;
        for (std::size_t i = begin; i < end; ++i) {
            if (text[i] == '(') ++depth;
            if (text[i] == ')') --depth;
            if (depth == 0 && i + 1 < end) {
                encloses = false;
                break;
            }
        }
        if (encloses) {
            ++begin;
            --end;
        }
    }
    std::vector<Polynomial> out;
    int depth = 0;
    std::size_t start = begin;
    for (std::size_t i = begin; i <= end; ++i) {
        const bool at_split = i == end || (text[i] == ',' && depth == 0);
        if (i < end) {
            if (text[i] == '(') ++depth;
            if (text[i] == ')') --depth;
        }
        if (at_split) {
            out.push_back(parse_polynomial(text.substr(start, i - start), dim, names, line, column_offset + start));
            start = i + 1;
        }
    }
    return out;
}

PolyVectorField parse_field(std::string_view text, std::size_t dim, const VariableNames& names,
                            std::size_t line, std::size_t column_offset) {
    auto comps = parse_polynomial_list(text, dim, names, line, column_offset);
    if (comps.size() != dim) {
        throw ParseError("vector field needs " + std::to_string(dim) + " components, got " +
                             std::to_string(comps.size()),
                         line, column_offset + 1);
    }
    return PolyVectorField(std::move(comps));
}

std::string to_string(const PolyVectorField& field, const VariableNames& names) {
    std::string out = "(";
    for (std::size_t k = 0; k < field.dim(); ++k) {
        if (k) out += ", ";
        out += to_string(field[k], names);
    }
    return out + ")";
}

}  // namespace srl
