#pragma once

#include "system.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace pdisc {

/// Syntax or binding error with a 1-based source position.
class ParseError : public InputError {
  public:
    ParseError(const std::string &msg, std::size_t line, std::size_t col)
        : InputError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg), line_(line),
          col_(col) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return col_; }

  private:
    std::size_t line_;
    std::size_t col_;
};

using Bindings = std::map<std::string, Rat>;

/// Parses "A=1, B=2/3" into name/value pairs.
inline Bindings parse_bindings(std::string_view text, std::size_t line = 1, std::size_t col0 = 1) {
    Bindings out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string_view item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        std::size_t item_col = col0 + pos;
        std::size_t first = item.find_first_not_of(" \t");
        if (first == std::string_view::npos) {
            if (comma == std::string_view::npos && out.empty() && pos == 0) break;
            throw ParseError("empty parameter binding", line, item_col);
        }
        std::size_t eq = item.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected NAME=RATIONAL", line, item_col + first);
        std::string name(item.substr(0, eq));
        name.erase(0, name.find_first_not_of(" \t"));
        name.erase(name.find_last_not_of(" \t") + 1);
        bool ident = !name.empty() && (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_');
        for (char c : name) ident = ident && (std::isalnum(static_cast<unsigned char>(c)) || c == '_');
        if (!ident) throw ParseError("invalid parameter name '" + name + "'", line, item_col + first);
        try {
            out[name] = parse_rat(item.substr(eq + 1));
        } catch (const InputError &e) {
            throw ParseError(e.what(), line, item_col + eq + 1);
        }
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

namespace detail {

class ExprParser {
  public:
    ExprParser(std::string_view src, std::size_t line, std::size_t col0, const std::array<std::string, 2> &vars,
               const Bindings &params)
        : src_(src), line_(line), col0_(col0), vars_(vars), params_(params) {}

    MPoly parse() {
        MPoly e = expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
        return e;
    }

  private:
    [[noreturn]] void fail(const std::string &msg) const { throw ParseError(msg, line_, col0_ + pos_); }

    void skip_ws() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\r')) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    MPoly expr() {
        MPoly acc = term();
        while (true) {
            char c = peek();
            if (c == '+') {
                ++pos_;
                acc += term();
            } else if (c == '-') {
                ++pos_;
                acc -= term();
            } else {
                return acc;
            }
        }
    }

    MPoly term() {
        MPoly acc = factor();
        while (true) {
            char c = peek();
            if (c == '*') {
                ++pos_;
                acc *= factor();
            } else if (c == '/') {
                fail("division is only allowed inside rational literals");
            } else {
                return acc;
            }
        }
    }

    // Unary minus binds looser than '^' so that -x^2 reads as -(x^2).
    MPoly factor() {
        if (peek() == '-') {
            ++pos_;
            return -factor();
        }
        MPoly b = base();
        if (peek() == '^') {
            ++pos_;
            skip_ws();
            std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            if (start == pos_) fail("exponent must be a non-negative integer");
            if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == '/'))
                fail("exponent must be a non-negative integer");
            unsigned long e = std::stoul(std::string(src_.substr(start, pos_ - start)));
            if (e > 64) fail("exponent too large");
            b = b.pow(static_cast<unsigned>(e));
        }
        return b;
    }

    MPoly base() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            MPoly e = expr();
            if (peek() != ')') fail("expected ')'");
            ++pos_;
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return literal();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        if (c == '\0') fail("unexpected end of expression");
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    MPoly literal() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        Int num(std::string(src_.substr(start, pos_ - start)));
        if (pos_ < src_.size() && src_[pos_] == '.') fail("decimal literals are not supported; use p/q");
        std::size_t save = pos_;
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '/') {
            ++pos_;
            skip_ws();
            std::size_t dstart = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            if (dstart == pos_) fail("division is only allowed inside rational literals");
            Int den(std::string(src_.substr(dstart, pos_ - dstart)));
            if (den == 0) {
                pos_ = dstart;
                fail("zero denominator in rational literal");
            }
            Rat r(num, den);
            r.canonicalize();
            return MPoly(r);
        }
        pos_ = save;
        return MPoly(Rat(num));
    }

    MPoly identifier() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
        std::string name(src_.substr(start, pos_ - start));
        if (name == vars_[0]) return MPoly::x();
        if (name == vars_[1]) return MPoly::y();
        auto it = params_.find(name);
        if (it == params_.end()) {
            pos_ = start;
            fail("unbound identifier '" + name + "'");
        }
        return MPoly(it->second);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_;
    std::size_t col0_;
    const std::array<std::string, 2> &vars_;
    const Bindings &params_;
};

struct EquationLine {
    std::string var;
    std::string expr;
    std::size_t line = 0;
    std::size_t expr_col = 0;
};

} // namespace detail

/// Parses a vector-field source. `overrides` replace (or add to) the file's
/// parameter bindings before the right-hand sides are instantiated.
inline PlanarSystem parse_system(std::string_view source, const Bindings &overrides = {}) {
    Bindings params;
    std::vector<detail::EquationLine> eqs;
    std::istringstream in{std::string(source)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw.substr(0, raw.find('#'));
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        std::string_view body(line);
        body.remove_prefix(first);
        if (body.starts_with("params:")) {
            Bindings b = parse_bindings(body.substr(7), line_no, first + 8);
            for (auto &[k, v] : b) params[k] = v;
            continue;
        }
        if (body[0] != 'd') throw ParseError("expected 'params:' or an equation 'dx = ...'", line_no, first + 1);
        std::size_t i = 1;
        while (i < body.size() && (std::isalnum(static_cast<unsigned char>(body[i])) || body[i] == '_')) ++i;
        std::string var(body.substr(1, i - 1));
        if (var.empty() || !(std::isalpha(static_cast<unsigned char>(var[0])) || var[0] == '_'))
            throw ParseError("expected a variable name after 'd'", line_no, first + 2);
        if (body.substr(i).starts_with("/dt")) i += 3;
        while (i < body.size() && (body[i] == ' ' || body[i] == '\t')) ++i;
        if (i >= body.size() || body[i] != '=') throw ParseError("expected '='", line_no, first + i + 1);
        ++i;
        for (const auto &e : eqs)
            if (e.var == var) throw ParseError("duplicate equation for '" + var + "'", line_no, first + 1);
        if (eqs.size() == 2) throw ParseError("more than two equations", line_no, first + 1);
        eqs.push_back({var, std::string(body.substr(i)), line_no, first + i + 1});
    }
    if (eqs.size() < 2) {
        std::string which = eqs.empty() ? "dx and dy equations" : "second equation (only d" + eqs[0].var + " given)";
        throw ParseError("missing " + which, line_no == 0 ? 1 : line_no, 1);
    }
    if (eqs[0].var == "y" && eqs[1].var == "x") std::swap(eqs[0], eqs[1]);
    for (auto &[k, v] : overrides) params[k] = v;

    PlanarSystem sys;
    sys.variables = {eqs[0].var, eqs[1].var};
    for (const auto &[k, v] : params)
        if (k == eqs[0].var || k == eqs[1].var) throw InputError("parameter '" + k + "' shadows a state variable");
    sys.params = params;
    sys.field.p = detail::ExprParser(eqs[0].expr, eqs[0].line, eqs[0].expr_col, sys.variables, params).parse();
    sys.field.q = detail::ExprParser(eqs[1].expr, eqs[1].line, eqs[1].expr_col, sys.variables, params).parse();
    return sys;
}

} // namespace pdisc
