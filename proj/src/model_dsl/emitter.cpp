#include <closurekb/model_dsl.hpp>

#include <charconv>
#include <cmath>
#include <sstream>

namespace closurekb::dsl {

std::string emit_number(double value) {
    if (!std::isfinite(value)) throw UnsupportedConstruct("non-finite number");
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw UnsupportedConstruct("number formatting failed");
    return std::string(buf, p);
}

namespace {

int precedence(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::add:
        case Expr::Kind::sub: return 1;
        case Expr::Kind::mul:
        case Expr::Kind::div: return 2;
        case Expr::Kind::neg: return 3;
        default: return 4;
    }
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string index_text(const IndexExpr& ix) {
    if (ix.is_literal()) return std::to_string(ix.offset);
    if (ix.offset == 0) return ix.name;
    return ix.name + (ix.offset > 0 ? "+" : "-") + std::to_string(std::labs(ix.offset));
}

std::string_view cmp_canonical(CmpOp op) {
    switch (op) {
        case CmpOp::lt: return "<";
        case CmpOp::le: return "<=";
        case CmpOp::eq: return "=";
        case CmpOp::ne: return "<>";
        case CmpOp::ge: return ">=";
        case CmpOp::gt: return ">";
    }
    return "=";
}

std::string_view cmp_lingo(CmpOp op) {
    switch (op) {
        case CmpOp::lt: return "#lt#";
        case CmpOp::le: return "#le#";
        case CmpOp::eq: return "#eq#";
        case CmpOp::ne: return "#ne#";
        case CmpOp::ge: return "#ge#";
        case CmpOp::gt: return "#gt#";
    }
    return "#eq#";
}

std::string_view rel_text(RelOp op) {
    switch (op) {
        case RelOp::le: return " <= ";
        case RelOp::eq: return " = ";
        case RelOp::ge: return " >= ";
    }
    return " = ";
}

class ExprWriter {
public:
    explicit ExprWriter(Dialect d) : dialect_(d) {}

    std::string write(const Expr& e) const {
        switch (e.kind) {
            case Expr::Kind::number:
                return emit_number(e.value);
            case Expr::Kind::ref:
                return ref(e);
            case Expr::Kind::add:
            case Expr::Kind::sub:
            case Expr::Kind::mul:
            case Expr::Kind::div: {
                int p = precedence(e);
                // A sum absorbs the term to its right, so it is wrapped inside products.
                bool term = p == 2;
                std::string lhs = wrap(e.operands[0], precedence(e.operands[0]) < p ||
                                                          (term && absorbs(e.operands[0])));
                std::string rhs = wrap(e.operands[1], precedence(e.operands[1]) <= p ||
                                                          (term && absorbs(e.operands[1])));
                std::string_view op = e.kind == Expr::Kind::add   ? " + "
                                      : e.kind == Expr::Kind::sub ? " - "
                                      : e.kind == Expr::Kind::mul ? "*"
                                                                  : "/";
                return lhs + std::string(op) + rhs;
            }
            case Expr::Kind::neg:
                return "-" + wrap(e.operands[0],
                                  precedence(e.operands[0]) < 3 || absorbs(e.operands[0]));
            case Expr::Kind::sum:
                return sum(e);
        }
        return {};
    }

    std::string filter(const std::vector<Comparison>& cmps) const {
        std::vector<std::string> parts;
        for (const Comparison& c : cmps) {
            if (dialect_ == Dialect::canonical) {
                parts.push_back(write(c.lhs) + " " + std::string(cmp_canonical(c.op)) + " " +
                                write(c.rhs));
            } else {
                std::string one = write(c.lhs) + std::string(cmp_lingo(c.op)) + write(c.rhs);
                parts.push_back(cmps.size() > 1 ? "(" + one + ")" : one);
            }
        }
        return join(parts, dialect_ == Dialect::canonical ? " and " : "#and#");
    }

    std::string canonical_quantifier(const Quantifier& q) const {
        std::vector<std::string> binds;
        for (const Binding& b : q.bindings) binds.push_back(b.var + " in " + b.set);
        std::string out = "{" + join(binds, ", ");
        if (!q.filter.empty()) out += " : " + filter(q.filter);
        return out + "}";
    }

    // LINGO loops bind one set each; multi-set quantifiers nest, with the
    // filter attached to the innermost loop.
    std::string lingo_loop(std::string_view fn, const Quantifier& q, const std::string& body) const {
        std::string out = body;
        for (std::size_t i = q.bindings.size(); i-- > 0;) {
            const Binding& b = q.bindings[i];
            std::string head = std::string(fn) + "(" + b.set + "(" + b.var + ")";
            if (i + 1 == q.bindings.size() && !q.filter.empty()) head += "|" + filter(q.filter);
            out = head + ": " + out + ")";
        }
        return out;
    }

private:
    // Canonical sums extend over the following term; @sum(...) is self-delimiting.
    bool absorbs(const Expr& e) const {
        return dialect_ == Dialect::canonical && e.kind == Expr::Kind::sum;
    }

    std::string wrap(const Expr& e, bool parens) const {
        std::string s = write(e);
        return parens ? "(" + s + ")" : s;
    }

    std::string ref(const Expr& e) const {
        if (e.indices.empty()) return e.name;
        std::vector<std::string> idx;
        for (const IndexExpr& ix : e.indices) idx.push_back(index_text(ix));
        if (dialect_ == Dialect::canonical) return e.name + "[" + join(idx, ",") + "]";
        return e.name + "(" + join(idx, ",") + ")";
    }

    std::string sum(const Expr& e) const {
        const Expr& body = e.operands.front();
        if (dialect_ == Dialect::lingo_flavored) return lingo_loop("@sum", e.over, write(body));
        return "sum" + canonical_quantifier(e.over) + " " + wrap(body, precedence(body) < 2);
    }

    Dialect dialect_;
};

std::string index_sets_text(const std::vector<std::string>& sets) {
    if (sets.empty()) return {};
    return "{" + join(sets, ", ") + "}";
}

}  // namespace

std::string emit_expr(const Expr& expr) {
    return ExprWriter(Dialect::canonical).write(expr);
}

std::string emit_data_literal(const DataLiteral& data) {
    if (!data.is_list) {
        if (data.values.size() != 1) throw UnsupportedConstruct("scalar data needs one value");
        return emit_number(data.values.front());
    }
    std::vector<std::string> parts;
    parts.reserve(data.values.size());
    for (double v : data.values) parts.push_back(emit_number(v));
    return "[" + join(parts, ", ") + "]";
}

std::string emit_set(const SetDecl& s) {
    if (s.is_range) {
        return "set " + s.name + " = " + std::to_string(s.lo) + ".." + std::to_string(s.hi) + ";";
    }
    return "set " + s.name + " = {" + join(s.members, ", ") + "};";
}

std::string emit_param(const ParamDecl& p) {
    std::string out = "param " + p.name + index_sets_text(p.index_sets);
    if (p.data) out += " = " + emit_data_literal(*p.data);
    return out + ";";
}

std::string emit_var(const VarDecl& v) {
    std::string out =
        "var " + v.name + index_sets_text(v.index_sets) + " " + std::string(to_string(v.domain));
    if (v.bounds) {
        out += " in [" + emit_number(v.bounds->first) + ", " + emit_number(v.bounds->second) + "]";
    }
    return out + ";";
}

std::string emit_constraint(const ConstraintDecl& c) {
    ExprWriter w(Dialect::canonical);
    std::string out = "con " + c.name;
    if (c.quantifier) out += w.canonical_quantifier(*c.quantifier);
    return out + ": " + w.write(c.lhs) + std::string(rel_text(c.rel)) + w.write(c.rhs) + ";";
}

std::string emit_objective(const ObjectiveDecl& o) {
    return std::string(o.sense == ObjectiveSense::max ? "max " : "min ") + o.name + ": " +
           emit_expr(o.expr) + ";";
}

namespace {

std::string emit_canonical(const ModelAst& ast) {
    std::ostringstream out;
    for (const auto& s : ast.sets) out << emit_set(s) << "\n";
    for (const auto& p : ast.params) out << emit_param(p) << "\n";
    for (const auto& v : ast.vars) out << emit_var(v) << "\n";
    for (const auto& c : ast.constraints) out << emit_constraint(c) << "\n";
    if (ast.objective) out << emit_objective(*ast.objective) << "\n";
    return out.str();
}

// LINGO attaches attributes to the set that indexes them; attributes over
// several sets would need derived sets, which this emitter does not produce.
std::string emit_lingo(const ModelAst& ast) {
    ExprWriter w(Dialect::lingo_flavored);
    std::ostringstream out;

    std::map<std::string, std::vector<std::string>> attributes;
    auto attach = [&](const std::string& name, const std::vector<std::string>& sets) {
        if (sets.size() > 1) {
            throw UnsupportedConstruct("'" + name +
                                       "' is indexed by several sets; LINGO needs a derived set");
        }
        if (sets.size() == 1) attributes[sets.front()].push_back(name);
    };
    for (const auto& p : ast.params) attach(p.name, p.index_sets);
    for (const auto& v : ast.vars) attach(v.name, v.index_sets);

    if (!ast.sets.empty()) {
        out << "SETS:\n";
        for (const auto& s : ast.sets) {
            out << s.name << " /";
            if (s.is_range) {
                out << s.lo << ".." << s.hi;
            } else {
                out << join(s.members, ", ");
            }
            out << "/";
            auto it = attributes.find(s.name);
            if (it != attributes.end()) out << ": " << join(it->second, ", ");
            out << ";\n";
        }
        out << "ENDSETS\n";
    }

    bool any_data = false;
    for (const auto& p : ast.params) any_data = any_data || p.data.has_value();
    if (any_data) {
        out << "DATA:\n";
        for (const auto& p : ast.params) {
            if (!p.data) continue;
            std::vector<std::string> vals;
            for (double v : p.data->values) vals.push_back(emit_number(v));
            out << p.name << " = " << join(vals, ", ") << ";\n";
        }
        out << "ENDDATA\n";
    }

    for (const auto& v : ast.vars) {
        std::string target = v.name;
        std::string loop_head;
        if (!v.index_sets.empty()) {
            target = v.name + "(i)";
            loop_head = "@for(" + v.index_sets.front() + "(i): ";
        }
        std::string stmt;
        if (v.domain == VarDomain::binary) {
            stmt = "@bin(" + target + ")";
        } else if (v.domain == VarDomain::integer) {
            stmt = "@gin(" + target + ")";
        }
        std::string bnd;
        if (v.bounds) {
            bnd = "@bnd(" + emit_number(v.bounds->first) + ", " + target + ", " +
                  emit_number(v.bounds->second) + ")";
        } else if (v.domain == VarDomain::continuous) {
            bnd = "@free(" + target + ")";
        }
        for (const std::string& s : {stmt, bnd}) {
            if (s.empty()) continue;
            out << (loop_head.empty() ? s : loop_head + s + ")") << ";\n";
        }
    }

    for (const auto& c : ast.constraints) {
        std::string body = w.write(c.lhs) + std::string(rel_text(c.rel)) + w.write(c.rhs);
        if (c.quantifier) {
            out << "! " << c.name << "\n" << w.lingo_loop("@for", *c.quantifier, body) << ";\n";
        } else {
            out << "[" << c.name << "] " << body << ";\n";
        }
    }

    if (ast.objective) {
        out << (ast.objective->sense == ObjectiveSense::max ? "max = " : "min = ")
            << w.write(ast.objective->expr) << ";\n";
    }
    return out.str();
}

}  // namespace

std::string emit_model(const ModelAst& ast, Dialect dialect) {
    return dialect == Dialect::canonical ? emit_canonical(ast) : emit_lingo(ast);
}

}  // namespace closurekb::dsl
