#include <closurekb/model_dsl.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace closurekb::dsl {

namespace {

std::string describe_expected(const std::vector<std::string>& expected) {
    std::string out;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i > 0) out += ", ";
        out += expected[i];
    }
    return out;
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, std::vector<std::string> expected,
                       std::string found)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": expected " +
            describe_expected(expected) + ", found " + found),
      line_(line),
      column_(column),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

DuplicateDeclaration::DuplicateDeclaration(std::string name)
    : Error("duplicate declaration: " + name), name_(std::move(name)) {}

bool is_keyword(std::string_view word) {
    static const std::set<std::string_view> keywords = {
        "set", "param", "var",     "con",     "max",        "min", "in",
        "sum", "and",   "binary",  "integer", "continuous",
    };
    return keywords.count(word) > 0;
}

namespace {

enum class Tok { ident, number, punct, end };

struct Token {
    Tok type = Tok::end;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

std::string quote(const Token& t) {
    if (t.type == Tok::end) return "end of input";
    return "'" + t.text + "'";
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.line = line_;
            t.column = col_;
            if (pos_ >= src_.size()) {
                t.type = Tok::end;
                out.push_back(t);
                return out;
            }
            char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c))) {
                std::size_t start = pos_;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                    advance();
                t.type = Tok::ident;
                t.text = std::string(src_.substr(start, pos_ - start));
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                t.type = Tok::number;
                t.text = lex_number();
            } else {
                t.type = Tok::punct;
                t.text = lex_punct(t);
            }
            out.push_back(std::move(t));
        }
    }

private:
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '!') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    bool digit_at(std::size_t p) const {
        return p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]));
    }

    std::string lex_number() {
        std::size_t start = pos_;
        while (digit_at(pos_)) advance();
        // A '.' only starts a fraction when a digit follows; "1..2" is a range.
        if (pos_ < src_.size() && src_[pos_] == '.' && digit_at(pos_ + 1)) {
            advance();
            while (digit_at(pos_)) advance();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (digit_at(p)) {
                while (pos_ < p) advance();
                while (digit_at(pos_)) advance();
            }
        }
        return std::string(src_.substr(start, pos_ - start));
    }

    std::string lex_punct(const Token& at) {
        static const char* two[] = {"<=", ">=", "<>", ".."};
        for (const char* op : two) {
            if (src_.substr(pos_, 2) == op) {
                advance();
                advance();
                return op;
            }
        }
        static const std::string_view single = ";,{}[]():=<>+-*/";
        char c = src_[pos_];
        if (single.find(c) == std::string_view::npos) {
            throw ParseError(at.line, at.column, {"token"}, std::string("'") + c + "'");
        }
        advance();
        return std::string(1, c);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    ModelAst parse() {
        ModelAst ast;
        std::set<std::string> names;
        auto declare = [&](const std::string& name) {
            if (!names.insert(name).second) throw DuplicateDeclaration(name);
        };
        while (peek().type != Tok::end) {
            const Token& t = peek();
            if (is_word("set")) {
                ast.sets.push_back(parse_set());
                declare(ast.sets.back().name);
            } else if (is_word("param")) {
                ast.params.push_back(parse_param());
                declare(ast.params.back().name);
            } else if (is_word("var")) {
                ast.vars.push_back(parse_var());
                declare(ast.vars.back().name);
            } else if (is_word("con")) {
                ast.constraints.push_back(parse_constraint());
                declare(ast.constraints.back().name);
            } else if (is_word("max") || is_word("min")) {
                if (ast.objective) fail({"at most one objective"});
                ast.objective = parse_objective();
                declare(ast.objective->name);
            } else {
                throw ParseError(t.line, t.column, {"set", "param", "var", "con", "max", "min"},
                                 quote(t));
            }
        }
        return ast;
    }

    DataLiteral parse_data_only() {
        DataLiteral d = parse_data();
        if (peek().type != Tok::end) fail({"end of input"});
        return d;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    Token next() {
        Token t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }
    bool is_word(std::string_view w, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.type == Tok::ident && t.text == w;
    }
    bool is_punct(std::string_view p, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.type == Tok::punct && t.text == p;
    }
    [[noreturn]] void fail(std::vector<std::string> expected) const {
        const Token& t = peek();
        throw ParseError(t.line, t.column, std::move(expected), quote(t));
    }
    void expect_punct(std::string_view p) {
        if (!is_punct(p)) fail({"'" + std::string(p) + "'"});
        next();
    }
    void expect_word(std::string_view w) {
        if (!is_word(w)) fail({"'" + std::string(w) + "'"});
        next();
    }
    std::string expect_ident() {
        const Token& t = peek();
        if (t.type != Tok::ident || is_keyword(t.text)) fail({"identifier"});
        return next().text;
    }
    long expect_int() {
        const Token& t = peek();
        long v = 0;
        if (t.type == Tok::number) {
            auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
            if (ec == std::errc() && p == t.text.data() + t.text.size()) {
                next();
                return v;
            }
        }
        fail({"integer"});
    }
    double expect_number() {
        const Token& t = peek();
        if (t.type != Tok::number) fail({"number"});
        double v = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() || p != t.text.data() + t.text.size()) fail({"finite number"});
        next();
        return v;
    }
    double signed_number() {
        bool neg = false;
        if (is_punct("-")) {
            next();
            neg = true;
        }
        double v = expect_number();
        return neg ? -v : v;
    }

    std::vector<std::string> parse_index_sets() {
        std::vector<std::string> sets;
        if (!is_punct("{")) return sets;
        next();
        sets.push_back(expect_ident());
        while (is_punct(",")) {
            next();
            sets.push_back(expect_ident());
        }
        expect_punct("}");
        return sets;
    }

    SetDecl parse_set() {
        expect_word("set");
        SetDecl s;
        s.name = expect_ident();
        expect_punct("=");
        if (is_punct("{")) {
            next();
            s.is_range = false;
            s.members.push_back(expect_ident());
            while (is_punct(",")) {
                next();
                s.members.push_back(expect_ident());
            }
            expect_punct("}");
        } else if (peek().type == Tok::number) {
            s.lo = expect_int();
            expect_punct("..");
            s.hi = expect_int();
        } else {
            fail({"integer", "'{'"});
        }
        expect_punct(";");
        return s;
    }

    DataLiteral parse_data() {
        DataLiteral d;
        if (is_punct("[")) {
            next();
            d.is_list = true;
            if (!is_punct("]")) {
                d.values.push_back(signed_number());
                while (is_punct(",")) {
                    next();
                    d.values.push_back(signed_number());
                }
            }
            expect_punct("]");
        } else {
            d.values.push_back(signed_number());
        }
        return d;
    }

    ParamDecl parse_param() {
        expect_word("param");
        ParamDecl p;
        p.name = expect_ident();
        p.index_sets = parse_index_sets();
        if (is_punct("=")) {
            next();
            p.data = parse_data();
        }
        expect_punct(";");
        return p;
    }

    VarDecl parse_var() {
        expect_word("var");
        VarDecl v;
        v.name = expect_ident();
        v.index_sets = parse_index_sets();
        if (is_word("binary")) {
            v.domain = VarDomain::binary;
        } else if (is_word("integer")) {
            v.domain = VarDomain::integer;
        } else if (is_word("continuous")) {
            v.domain = VarDomain::continuous;
        } else {
            fail({"binary", "integer", "continuous"});
        }
        next();
        if (is_word("in")) {
            next();
            expect_punct("[");
            double lo = signed_number();
            expect_punct(",");
            double hi = signed_number();
            expect_punct("]");
            v.bounds = std::make_pair(lo, hi);
        }
        expect_punct(";");
        return v;
    }

    Quantifier parse_quantifier() {
        expect_punct("{");
        Quantifier q;
        for (;;) {
            Binding b;
            b.var = expect_ident();
            expect_word("in");
            b.set = expect_ident();
            q.bindings.push_back(std::move(b));
            if (!is_punct(",")) break;
            next();
        }
        if (is_punct(":")) {
            next();
            q.filter.push_back(parse_comparison());
            while (is_word("and")) {
                next();
                q.filter.push_back(parse_comparison());
            }
        }
        expect_punct("}");
        return q;
    }

    Comparison parse_comparison() {
        Comparison c;
        c.lhs = parse_expr();
        static const std::pair<const char*, CmpOp> ops[] = {
            {"<", CmpOp::lt},  {"<=", CmpOp::le}, {"=", CmpOp::eq},
            {"<>", CmpOp::ne}, {">=", CmpOp::ge}, {">", CmpOp::gt},
        };
        bool found = false;
        for (auto [text, op] : ops) {
            if (is_punct(text)) {
                c.op = op;
                found = true;
                break;
            }
        }
        if (!found) fail({"'<'", "'<='", "'='", "'<>'", "'>='", "'>'"});
        next();
        c.rhs = parse_expr();
        return c;
    }

    ConstraintDecl parse_constraint() {
        expect_word("con");
        ConstraintDecl c;
        c.name = expect_ident();
        if (is_punct("{")) c.quantifier = parse_quantifier();
        expect_punct(":");
        c.lhs = parse_expr();
        if (is_punct("<=")) {
            c.rel = RelOp::le;
        } else if (is_punct("=")) {
            c.rel = RelOp::eq;
        } else if (is_punct(">=")) {
            c.rel = RelOp::ge;
        } else {
            fail({"'<='", "'='", "'>='"});
        }
        next();
        c.rhs = parse_expr();
        expect_punct(";");
        return c;
    }

    ObjectiveDecl parse_objective() {
        ObjectiveDecl o;
        o.sense = is_word("max") ? ObjectiveSense::max : ObjectiveSense::min;
        next();
        o.name = expect_ident();
        expect_punct(":");
        o.expr = parse_expr();
        expect_punct(";");
        return o;
    }

    Expr parse_expr() {
        Expr lhs = parse_term();
        while (is_punct("+") || is_punct("-")) {
            Expr::Kind k = is_punct("+") ? Expr::Kind::add : Expr::Kind::sub;
            next();
            lhs = Expr::binary(k, std::move(lhs), parse_term());
        }
        return lhs;
    }

    Expr parse_term() {
        Expr lhs = parse_unary();
        while (is_punct("*") || is_punct("/")) {
            Expr::Kind k = is_punct("*") ? Expr::Kind::mul : Expr::Kind::div;
            next();
            lhs = Expr::binary(k, std::move(lhs), parse_unary());
        }
        return lhs;
    }

    Expr parse_unary() {
        if (is_punct("-")) {
            next();
            return Expr::negate(parse_unary());
        }
        return parse_primary();
    }

    IndexExpr parse_index() {
        IndexExpr ix;
        if (peek().type == Tok::number) {
            ix.offset = expect_int();
            return ix;
        }
        if (peek().type != Tok::ident || is_keyword(peek().text)) fail({"identifier", "integer"});
        ix.name = next().text;
        if (is_punct("+") || is_punct("-")) {
            bool minus = is_punct("-");
            next();
            long k = expect_int();
            ix.offset = minus ? -k : k;
        }
        return ix;
    }

    Expr parse_primary() {
        const Token& t = peek();
        if (t.type == Tok::number) return Expr::number(expect_number());
        if (is_punct("(")) {
            next();
            Expr e = parse_expr();
            expect_punct(")");
            return e;
        }
        if (is_word("sum")) {
            next();
            Quantifier q = parse_quantifier();
            return Expr::sum(std::move(q), parse_term());
        }
        if (t.type == Tok::ident && !is_keyword(t.text)) {
            std::string name = next().text;
            std::vector<IndexExpr> idx;
            if (is_punct("[")) {
                next();
                idx.push_back(parse_index());
                while (is_punct(",")) {
                    next();
                    idx.push_back(parse_index());
                }
                expect_punct("]");
            }
            return Expr::ref(std::move(name), std::move(idx));
        }
        fail({"number", "identifier", "'('", "'sum'", "'-'"});
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr Expr::number(double v) {
    Expr e;
    e.kind = Kind::number;
    e.value = v;
    return e;
}

Expr Expr::ref(std::string name, std::vector<IndexExpr> indices) {
    Expr e;
    e.kind = Kind::ref;
    e.name = std::move(name);
    e.indices = std::move(indices);
    return e;
}

Expr Expr::binary(Kind kind, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = kind;
    e.operands.push_back(std::move(lhs));
    e.operands.push_back(std::move(rhs));
    return e;
}

Expr Expr::negate(Expr operand) {
    Expr e;
    e.kind = Kind::neg;
    e.operands.push_back(std::move(operand));
    return e;
}

Expr Expr::sum(Quantifier over, Expr body) {
    Expr e;
    e.kind = Kind::sum;
    e.over = std::move(over);
    e.operands.push_back(std::move(body));
    return e;
}

bool operator==(const Quantifier& a, const Quantifier& b) {
    return a.bindings == b.bindings && a.filter == b.filter;
}

bool operator==(const Expr& a, const Expr& b) {
    return a.kind == b.kind && a.value == b.value && a.name == b.name && a.indices == b.indices &&
           a.operands == b.operands && a.over == b.over;
}

bool operator==(const Comparison& a, const Comparison& b) {
    return a.op == b.op && a.lhs == b.lhs && a.rhs == b.rhs;
}

bool ModelAst::empty() const noexcept {
    return sets.empty() && params.empty() && vars.empty() && constraints.empty() && !objective;
}

ModelAst parse_model(std::string_view source) {
    return Parser(Lexer(source).run()).parse();
}

DataLiteral parse_data_literal(std::string_view text) {
    return Parser(Lexer(text).run()).parse_data_only();
}

std::string_view to_string(VarDomain d) {
    switch (d) {
        case VarDomain::binary: return "binary";
        case VarDomain::integer: return "integer";
        case VarDomain::continuous: return "continuous";
    }
    return "continuous";
}

std::optional<VarDomain> var_domain_from_string(std::string_view s) {
    if (s == "binary") return VarDomain::binary;
    if (s == "integer") return VarDomain::integer;
    if (s == "continuous") return VarDomain::continuous;
    return std::nullopt;
}

std::string_view to_string(SymbolKind k) {
    switch (k) {
        case SymbolKind::set: return "set";
        case SymbolKind::param: return "param";
        case SymbolKind::var: return "var";
        case SymbolKind::constraint: return "constraint";
        case SymbolKind::objective: return "objective";
    }
    return "set";
}

std::string_view to_string(Usage u) {
    return u == Usage::value ? "value" : "iteration";
}

}  // namespace closurekb::dsl
