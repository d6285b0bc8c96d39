#include <closurekb/model_dsl.hpp>

#include <set>
#include <tuple>

namespace closurekb::dsl {

namespace {

class ReferenceCollector {
public:
    explicit ReferenceCollector(std::vector<Reference>& out) : out_(out) {}

    void quantifier(const Quantifier& q, const std::string& site, std::vector<std::string>& scope) {
        for (const Binding& b : q.bindings) {
            add({b.set, 0, site, Usage::iteration});
            scope.push_back(b.var);
        }
        for (const Comparison& c : q.filter) {
            expr(c.lhs, site, scope);
            expr(c.rhs, site, scope);
        }
    }

    void expr(const Expr& e, const std::string& site, std::vector<std::string>& scope) {
        switch (e.kind) {
            case Expr::Kind::number:
                return;
            case Expr::Kind::ref:
                if (!(e.indices.empty() && bound(e.name, scope))) {
                    add({e.name, e.indices.size(), site, Usage::value});
                }
                for (const IndexExpr& ix : e.indices) {
                    if (!ix.is_literal() && !bound(ix.name, scope)) {
                        add({ix.name, 0, site, Usage::value});
                    }
                }
                return;
            case Expr::Kind::sum: {
                std::size_t mark = scope.size();
                quantifier(e.over, site, scope);
                expr(e.operands.front(), site, scope);
                scope.resize(mark);
                return;
            }
            default:
                for (const Expr& op : e.operands) expr(op, site, scope);
                return;
        }
    }

private:
    static bool bound(const std::string& name, const std::vector<std::string>& scope) {
        for (const auto& s : scope)
            if (s == name) return true;
        return false;
    }

    void add(Reference r) {
        auto key = std::make_tuple(r.name, r.arity, r.site, r.usage);
        if (seen_.insert(key).second) out_.push_back(std::move(r));
    }

    std::vector<Reference>& out_;
    std::set<std::tuple<std::string, std::size_t, std::string, Usage>> seen_;
};

}  // namespace

SymbolTable extract_symbols(const ModelAst& ast) {
    SymbolTable table;
    for (const SetDecl& s : ast.sets) {
        table.declarations[s.name] = Declaration{SymbolKind::set, "", 0, {}};
    }
    for (const ParamDecl& p : ast.params) {
        table.declarations[p.name] =
            Declaration{SymbolKind::param, "", p.index_sets.size(), p.index_sets};
    }
    for (const VarDecl& v : ast.vars) {
        table.declarations[v.name] = Declaration{SymbolKind::var, std::string(to_string(v.domain)),
                                                 v.index_sets.size(), v.index_sets};
    }
    ReferenceCollector collect(table.references);
    for (const ConstraintDecl& c : ast.constraints) {
        Declaration d{SymbolKind::constraint, "", 0, {}};
        std::vector<std::string> scope;
        if (c.quantifier) {
            d.arity = c.quantifier->bindings.size();
            for (const Binding& b : c.quantifier->bindings) d.index_sets.push_back(b.set);
            collect.quantifier(*c.quantifier, c.name, scope);
        }
        collect.expr(c.lhs, c.name, scope);
        collect.expr(c.rhs, c.name, scope);
        table.declarations[c.name] = std::move(d);
    }
    if (ast.objective) {
        const ObjectiveDecl& o = *ast.objective;
        table.declarations[o.name] = Declaration{
            SymbolKind::objective, o.sense == ObjectiveSense::max ? "max" : "min", 0, {}};
        std::vector<std::string> scope;
        collect.expr(o.expr, o.name, scope);
    }
    return table;
}

namespace {

std::string mapped(const std::string& name, const std::map<std::string, std::string>& m) {
    auto it = m.find(name);
    return it == m.end() ? name : it->second;
}

void rename_quantifier(Quantifier& q, const std::map<std::string, std::string>& m,
                       std::vector<std::string>& scope);

bool in_scope(const std::string& name, const std::vector<std::string>& scope) {
    for (const auto& s : scope)
        if (s == name) return true;
    return false;
}

void rename_expr(Expr& e, const std::map<std::string, std::string>& m,
                 std::vector<std::string>& scope) {
    if (e.kind == Expr::Kind::ref) {
        if (!(e.indices.empty() && in_scope(e.name, scope))) e.name = mapped(e.name, m);
        for (IndexExpr& ix : e.indices) {
            if (!ix.is_literal() && !in_scope(ix.name, scope)) ix.name = mapped(ix.name, m);
        }
        return;
    }
    if (e.kind == Expr::Kind::sum) {
        std::size_t mark = scope.size();
        rename_quantifier(e.over, m, scope);
        rename_expr(e.operands.front(), m, scope);
        scope.resize(mark);
        return;
    }
    for (Expr& op : e.operands) rename_expr(op, m, scope);
}

void rename_quantifier(Quantifier& q, const std::map<std::string, std::string>& m,
                       std::vector<std::string>& scope) {
    for (Binding& b : q.bindings) {
        b.set = mapped(b.set, m);
        scope.push_back(b.var);
    }
    for (Comparison& c : q.filter) {
        rename_expr(c.lhs, m, scope);
        rename_expr(c.rhs, m, scope);
    }
}

void rename_sets(std::vector<std::string>& sets, const std::map<std::string, std::string>& m) {
    for (auto& s : sets) s = mapped(s, m);
}

}  // namespace

ModelAst rename_symbols(const ModelAst& ast, const std::map<std::string, std::string>& mapping) {
    ModelAst out = ast;
    for (SetDecl& s : out.sets) s.name = mapped(s.name, mapping);
    for (ParamDecl& p : out.params) {
        p.name = mapped(p.name, mapping);
        rename_sets(p.index_sets, mapping);
    }
    for (VarDecl& v : out.vars) {
        v.name = mapped(v.name, mapping);
        rename_sets(v.index_sets, mapping);
    }
    for (ConstraintDecl& c : out.constraints) {
        c.name = mapped(c.name, mapping);
        std::vector<std::string> scope;
        if (c.quantifier) rename_quantifier(*c.quantifier, mapping, scope);
        rename_expr(c.lhs, mapping, scope);
        rename_expr(c.rhs, mapping, scope);
    }
    if (out.objective) {
        out.objective->name = mapped(out.objective->name, mapping);
        std::vector<std::string> scope;
        rename_expr(out.objective->expr, mapping, scope);
    }
    return out;
}

}  // namespace closurekb::dsl
