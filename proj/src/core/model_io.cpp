#include "model_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace hyreach {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : ModelError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      detail_(message) {}

std::string format_number(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, end) : std::to_string(v);
}

namespace {

enum class Tok { ident, number, symbol, end };

struct Token {
    Tok kind = Tok::end;
    std::string text;
    double value = 0.0;
    std::size_t line = 1;
    std::size_t column = 1;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;
    auto advance = [&](std::size_t k) {
        for (std::size_t j = 0; j < k; ++j) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < s.size()) {
        const char c = s[i];
        if (c == '#') {
            while (i < s.size() && s[i] != '\n') advance(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.column = col;
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < s.size() && ident_char(s[j])) ++j;
            t.kind = Tok::ident;
            t.text = std::string(s.substr(i, j - i));
            advance(j - i);
        } else if (digit(c) || (c == '.' && i + 1 < s.size() && digit(s[i + 1]))) {
            std::size_t j = i;
            while (j < s.size() && (digit(s[j]) || s[j] == '.')) ++j;
            if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
                if (k < s.size() && digit(s[k])) {
                    while (k < s.size() && digit(s[k])) ++k;
                    j = k;
                }
            }
            t.kind = Tok::number;
            t.text = std::string(s.substr(i, j - i));
            auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
            if (ec != std::errc{} || p != t.text.data() + t.text.size()) {
                throw ParseError(line, col, "malformed number '" + t.text + "'");
            }
            advance(j - i);
        } else {
            static const char* two[] = {"->", ":=", "<=", ">=", "&&", "=="};
            t.kind = Tok::symbol;
            for (const char* op : two) {
                if (s.substr(i, 2) == op) t.text = op;
            }
            if (t.text.empty()) {
                if (std::string_view("{};,'=<>+-*&").find(c) == std::string_view::npos) {
                    throw ParseError(line, col, std::string("unexpected character '") + c + "'");
                }
                t.text = std::string(1, c);
            }
            advance(t.text.size());
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.line = line;
    end.column = col;
    out.push_back(end);
    return out;
}

struct LinearExpr {
    std::vector<std::pair<std::string, double>> terms;
    double constant = 0.0;
};

class Parser {
public:
    explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

    const Token& peek() const { return toks_[pos_]; }
    bool at_end() const { return peek().kind == Tok::end; }
    Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const Token& t, const std::string& msg) const { throw ParseError(t.line, t.column, msg); }

    bool accept(std::string_view sym) {
        if (peek().kind == Tok::symbol && peek().text == sym) {
            ++pos_;
            return true;
        }
        return false;
    }
    bool accept_word(std::string_view w) {
        if (peek().kind == Tok::ident && peek().text == w) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(std::string_view sym) {
        if (!accept(sym)) fail(peek(), "expected '" + std::string(sym) + "'" + found());
    }
    std::string ident(const char* what) {
        if (peek().kind != Tok::ident) fail(peek(), std::string("expected ") + what + found());
        return next().text;
    }
    std::string found() const {
        if (at_end()) return ", found end of input";
        return ", found '" + peek().text + "'";
    }

    double number() {
        double sign = 1.0;
        while (peek().kind == Tok::symbol && (peek().text == "-" || peek().text == "+")) {
            if (next().text == "-") sign = -sign;
        }
        if (peek().kind != Tok::number) fail(peek(), "expected number" + found());
        return sign * next().value;
    }

    LinearExpr expr() {
        LinearExpr e;
        bool first = true;
        while (true) {
            double sign = 1.0;
            bool had_sign = false;
            while (peek().kind == Tok::symbol && (peek().text == "+" || peek().text == "-")) {
                if (next().text == "-") sign = -sign;
                had_sign = true;
            }
            if (!first && !had_sign) break;
            double coeff = sign;
            std::optional<std::string> var;
            while (true) {
                const Token& t = peek();
                if (t.kind == Tok::number) {
                    coeff *= next().value;
                } else if (t.kind == Tok::ident && t.text != "true" && t.text != "false") {
                    if (var) fail(t, "nonlinear term");
                    var = next().text;
                } else {
                    fail(t, "expected number or variable" + found());
                }
                if (!accept("*")) break;
            }
            if (var) {
                e.terms.emplace_back(*var, coeff);
            } else {
                e.constant += coeff;
            }
            first = false;
        }
        return e;
    }

    Relation relation() {
        const Token& t = peek();
        if (t.kind == Tok::symbol) {
            if (accept("<=")) return Relation::le;
            if (accept(">=")) return Relation::ge;
            if (accept("<")) return Relation::lt;
            if (accept(">")) return Relation::gt;
            if (accept("=") || accept("==")) return Relation::eq;
        }
        fail(t, "expected relation" + found());
    }

    using Resolver = std::function<VarIndex(const std::string&, const Token&)>;

    LinearConstraint constraint(const Resolver& resolve) {
        if (accept_word("true")) return LinearConstraint::always_true();
        if (accept_word("false")) return LinearConstraint::always_false();
        const Token start = peek();
        LinearExpr lhs = expr();
        Relation rel = relation();
        LinearExpr rhs = expr();
        std::vector<Term> terms;
        for (auto& [name, c] : lhs.terms) terms.push_back({resolve(name, start), c});
        for (auto& [name, c] : rhs.terms) terms.push_back({resolve(name, start), -c});
        return LinearConstraint(std::move(terms), rel, rhs.constant - lhs.constant);
    }

    NamedConstraint named_constraint() {
        NamedConstraint out;
        if (accept_word("true")) return out;
        if (accept_word("false")) {
            out.bound = -1.0;
            return out;
        }
        LinearExpr lhs = expr();
        out.rel = relation();
        LinearExpr rhs = expr();
        std::map<std::string, double> coeffs;
        std::vector<std::string> order;
        auto add = [&](const std::string& name, double c) {
            if (!coeffs.count(name)) order.push_back(name);
            coeffs[name] += c;
        };
        for (auto& [name, c] : lhs.terms) add(name, c);
        for (auto& [name, c] : rhs.terms) add(name, -c);
        for (const auto& name : order) {
            if (coeffs[name] != 0.0) out.terms.push_back({name, coeffs[name]});
        }
        out.bound = rhs.constant - lhs.constant;
        return out;
    }

    /// constraint (&& constraint)*
    void conjunction(Condition& cond, const Resolver& resolve) {
        do {
            cond.add(constraint(resolve));
        } while (accept("&&") || accept("&"));
    }

    Network network() {
        Network net;
        while (!at_end()) {
            const Token t = peek();
            const std::string kw = ident("declaration");
            if (kw == "automaton") {
                HybridAutomaton a;
                a.name = ident("automaton name");
                net.components.push_back(std::move(a));
                continue;
            }
            if (net.components.empty()) fail(t, "'" + kw + "' outside of an automaton");
            HybridAutomaton& a = net.components.back();
            if (kw == "var") {
                variable(a);
            } else if (kw == "loc") {
                location(a);
            } else if (kw == "jump") {
                jump(a);
            } else if (kw == "init") {
                init(a);
            } else {
                fail(t, "unknown declaration '" + kw + "'");
            }
        }
        return net;
    }

    std::vector<BadSet> bad_sets() {
        std::vector<BadSet> out;
        while (!at_end()) {
            const Token t = peek();
            if (!accept_word("bad")) fail(t, "expected 'bad'" + found());
            BadSet b;
            if (accept("*")) {
                b.location = "*";
            } else {
                b.location = ident("location name or '*'");
            }
            expect("{");
            while (!accept("}")) {
                if (at_end()) fail(peek(), "unterminated block");
                do {
                    b.constraints.push_back(named_constraint());
                } while (accept("&&") || accept("&"));
                expect(";");
            }
            out.push_back(std::move(b));
        }
        return out;
    }

private:
    Resolver resolver(const HybridAutomaton& a) const {
        return [this, &a](const std::string& name, const Token& at) -> VarIndex {
            auto v = a.variable_index(name);
            if (!v) fail(at, "unknown variable '" + name + "'");
            return *v;
        };
    }

    void variable(HybridAutomaton& a) {
        const Token at = peek();
        std::string name = ident("variable name");
        VarKind kind = VarKind::local;
        if (accept_word("shared")) {
            kind = VarKind::shared;
        } else if (accept_word("time")) {
            kind = VarKind::time;
        } else if (accept_word("local")) {
            kind = VarKind::local;
        }
        if (a.variable_index(name)) fail(at, "duplicate variable '" + name + "'");
        a.add_variable(std::move(name), kind);
        accept(";");
    }

    void location(HybridAutomaton& a) {
        const LocIndex l = a.add_location(ident("location name"));
        expect("{");
        while (!accept("}")) {
            const Token t = peek();
            if (at_end()) fail(t, "unterminated location block");
            const std::string kw = ident("'flow' or 'inv'");
            if (kw == "flow") {
                do {
                    const Token vt = peek();
                    const std::string name = ident("variable");
                    expect("'");
                    expect("=");
                    const double rate = number();
                    auto v = a.variable_index(name);
                    if (!v) fail(vt, "unknown variable '" + name + "'");
                    a.locations[l].flow.rates[*v] = rate;
                } while (accept(","));
            } else if (kw == "inv") {
                conjunction(a.locations[l].invariant, resolver(a));
            } else {
                fail(t, "unknown location statement '" + kw + "'");
            }
            expect(";");
        }
    }

    void jump(HybridAutomaton& a) {
        Jump j;
        j.source = ident("source location");
        expect("->");
        j.target = ident("target location");
        expect("{");
        while (!accept("}")) {
            const Token t = peek();
            if (at_end()) fail(t, "unterminated jump block");
            const std::string kw = ident("jump statement");
            if (kw == "guard") {
                conjunction(j.guard, resolver(a));
            } else if (kw == "reset") {
                do {
                    const Token vt = peek();
                    const std::string name = ident("variable");
                    auto v = a.variable_index(name);
                    if (!v) fail(vt, "unknown variable '" + name + "'");
                    expect(":=");
                    const Token et = peek();
                    LinearExpr e = expr();
                    double scale = 0.0;
                    for (auto& [n, c] : e.terms) {
                        if (n != name) fail(et, "reset of '" + name + "' must be affine in '" + name + "'");
                        scale += c;
                    }
                    j.reset.assign(*v, scale, e.constant);
                } while (accept(","));
            } else if (kw == "label") {
                j.label = ident("label");
            } else if (kw == "urgent") {
                j.urgent = true;
            } else {
                fail(t, "unknown jump statement '" + kw + "'");
            }
            expect(";");
        }
        a.jumps.push_back(std::move(j));
    }

    void init(HybridAutomaton& a) {
        InitEntry e;
        e.location = ident("location name");
        expect("{");
        while (!accept("}")) {
            if (at_end()) fail(peek(), "unterminated init block");
            conjunction(e.condition, resolver(a));
            expect(";");
        }
        a.init.push_back(std::move(e));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

std::string linear_text(const std::vector<std::pair<std::string, double>>& terms) {
    std::string out;
    for (const auto& [name, c] : terms) {
        double mag = c;
        if (out.empty()) {
            if (c < 0) {
                out += "-";
                mag = -c;
            }
        } else {
            out += c < 0 ? " - " : " + ";
            mag = c < 0 ? -c : c;
        }
        if (mag != 1.0) out += format_number(mag) + "*";
        out += name;
    }
    return out;
}

std::string constraint_text(const std::vector<std::pair<std::string, double>>& terms, Relation rel, double bound) {
    if (terms.empty()) {
        bool holds = false;
        switch (rel) {
            case Relation::le: holds = 0 <= bound; break;
            case Relation::lt: holds = 0 < bound; break;
            case Relation::eq: holds = bound == 0; break;
            case Relation::ge: holds = 0 >= bound; break;
            case Relation::gt: holds = 0 > bound; break;
        }
        return holds ? "true" : "false";
    }
    return linear_text(terms) + " " + to_string(rel) + " " + format_number(bound);
}

std::string condition_text(const HybridAutomaton& a, const Condition& c) {
    std::string out;
    for (const LinearConstraint& lc : c.constraints) {
        std::vector<std::pair<std::string, double>> terms;
        for (const Term& t : lc.terms) terms.emplace_back(a.variables[t.var].name, t.coeff);
        if (!out.empty()) out += " && ";
        out += constraint_text(terms, lc.rel, lc.bound);
    }
    return out;
}

std::string reset_text(const std::string& var, const Assignment& as) {
    std::string out = var + " := ";
    if (as.scale == 0.0) return out + format_number(as.offset);
    out += linear_text({{var, as.scale}});
    if (as.offset > 0) out += " + " + format_number(as.offset);
    if (as.offset < 0) out += " - " + format_number(-as.offset);
    return out;
}

}  // namespace

Network parse_model(std::string_view text) {
    Parser p(text);
    return p.network();
}

std::string write_model(const HybridAutomaton& a) {
    std::ostringstream os;
    os << "automaton " << a.name << "\n";
    for (const Variable& v : a.variables) {
        os << "var " << v.name;
        if (v.kind == VarKind::shared) os << " shared";
        if (v.kind == VarKind::time) os << " time";
        os << "\n";
    }
    for (const Location& l : a.locations) {
        os << "loc " << l.name << " {";
        std::string flow;
        for (VarIndex v = 0; v < a.variables.size(); ++v) {
            const double r = l.flow.rate(v);
            if (r == 0.0 && !std::signbit(r)) continue;
            if (!flow.empty()) flow += ", ";
            flow += a.variables[v].name + "'=" + format_number(r);
        }
        if (!flow.empty()) os << " flow " << flow << ";";
        for (const LinearConstraint& c : l.invariant.constraints) {
            Condition single;
            single.add(c);
            os << " inv " << condition_text(a, single) << ";";
        }
        os << " }\n";
    }
    for (const Jump& j : a.jumps) {
        os << "jump " << j.source << " -> " << j.target << " {";
        if (!j.guard.is_true()) os << " guard " << condition_text(a, j.guard) << ";";
        for (const Assignment& as : j.reset.assignments()) {
            os << " reset " << reset_text(a.variables[as.var].name, as) << ";";
        }
        if (j.label) os << " label " << *j.label << ";";
        if (j.urgent) os << " urgent;";
        os << " }\n";
    }
    for (const InitEntry& e : a.init) {
        os << "init " << e.location << " {";
        for (const LinearConstraint& c : e.condition.constraints) {
            Condition single;
            single.add(c);
            os << " " << condition_text(a, single) << ";";
        }
        os << " }\n";
    }
    return os.str();
}

std::string write_model(const Network& network) {
    std::string out;
    for (const HybridAutomaton& a : network.components) {
        if (!out.empty()) out += "\n";
        out += write_model(a);
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Network read_model_files(const std::vector<std::filesystem::path>& paths) {
    Network net;
    for (const auto& p : paths) {
        Network part;
        try {
            part = parse_model(read_file(p));
        } catch (const ParseError& e) {
            throw ParseError(e.line(), e.column(), e.detail() + " in " + p.string());
        }
        for (auto& a : part.components) net.components.push_back(std::move(a));
    }
    return net;
}

std::vector<std::filesystem::path> write_model_dir(const Network& network, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> out;
    for (const HybridAutomaton& a : network.components) {
        auto p = dir / (a.name + ".ha");
        write_file(p, write_model(a));
        out.push_back(p);
    }
    return out;
}

std::vector<BadSet> parse_bad_sets(std::string_view text) {
    Parser p(text);
    return p.bad_sets();
}

std::string write_bad_sets(const std::vector<BadSet>& bad) {
    std::ostringstream os;
    for (const BadSet& b : bad) {
        os << "bad " << b.location << " {";
        for (const NamedConstraint& c : b.constraints) {
            std::vector<std::pair<std::string, double>> terms;
            for (const NamedTerm& t : c.terms) terms.emplace_back(t.var, t.coeff);
            os << " " << constraint_text(terms, c.rel, c.bound) << ";";
        }
        os << " }\n";
    }
    return os.str();
}

}  // namespace hyreach
