#include <closurekb/model_eval.hpp>

#include <cmath>

namespace closurekb::dsl {

struct ModelEvaluator::Env {
    std::vector<std::pair<std::string, long>> bound;

    const long* find(const std::string& name) const {
        for (auto it = bound.rbegin(); it != bound.rend(); ++it)
            if (it->first == name) return &it->second;
        return nullptr;
    }
};

ModelEvaluator::ModelEvaluator(ModelAst ast) : ast_(std::move(ast)) {
    for (const auto& s : ast_.sets) sets_[s.name] = &s;
    for (const auto& p : ast_.params) params_[p.name] = &p;
    for (const auto& v : ast_.vars) vars_[v.name] = &v;
}

std::vector<long> ModelEvaluator::set_values(const std::string& name) const {
    auto it = sets_.find(name);
    if (it == sets_.end()) throw EvalError("unknown set '" + name + "'");
    const SetDecl& s = *it->second;
    std::vector<long> out;
    if (s.is_range) {
        for (long v = s.lo; v <= s.hi; ++v) out.push_back(v);
    } else {
        for (std::size_t i = 0; i < s.members.size(); ++i) out.push_back(static_cast<long>(i + 1));
    }
    return out;
}

std::size_t ModelEvaluator::flat_position(const std::string& name,
                                          const std::vector<std::string>& sets,
                                          std::span<const long> index) const {
    if (index.size() != sets.size()) {
        throw EvalError("'" + name + "' used with " + std::to_string(index.size()) +
                        " indices, declared with " + std::to_string(sets.size()));
    }
    std::size_t pos = 0;
    for (std::size_t d = 0; d < sets.size(); ++d) {
        auto it = sets_.find(sets[d]);
        if (it == sets_.end()) throw EvalError("unknown set '" + sets[d] + "'");
        const SetDecl& s = *it->second;
        long lo = s.is_range ? s.lo : 1;
        long hi = s.is_range ? s.hi : static_cast<long>(s.members.size());
        if (index[d] < lo || index[d] > hi) {
            throw EvalError("index " + std::to_string(index[d]) + " of '" + name +
                            "' outside set '" + s.name + "'");
        }
        pos = pos * static_cast<std::size_t>(hi - lo + 1) + static_cast<std::size_t>(index[d] - lo);
    }
    return pos;
}

double ModelEvaluator::param(const std::string& name, std::span<const long> index) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw EvalError("unknown parameter '" + name + "'");
    const ParamDecl& p = *it->second;
    if (!p.data) throw EvalError("parameter '" + name + "' has no data");
    std::size_t pos = flat_position(name, p.index_sets, index);
    if (!p.index_sets.empty() && !p.data->is_list) return p.data->values.front();
    if (pos >= p.data->values.size()) throw EvalError("parameter '" + name + "' data too short");
    return p.data->values[pos];
}

std::size_t ModelEvaluator::column_count(const std::string& var) const {
    auto it = vars_.find(var);
    if (it == vars_.end()) throw EvalError("unknown variable '" + var + "'");
    std::size_t n = 1;
    for (const auto& s : it->second->index_sets) n *= set_values(s).size();
    return n;
}

long ModelEvaluator::eval_index(const IndexExpr& ix, const Env& env) const {
    if (ix.is_literal()) return ix.offset;
    if (const long* v = env.find(ix.name)) return *v + ix.offset;
    auto it = params_.find(ix.name);
    if (it != params_.end() && it->second->index_sets.empty()) {
        double v = param(ix.name, {});
        if (v != std::floor(v)) throw EvalError("non-integral index '" + ix.name + "'");
        return static_cast<long>(v) + ix.offset;
    }
    throw EvalError("unbound index '" + ix.name + "'");
}

double ModelEvaluator::eval(const Expr& e, Env& env, const Assignment* x) const {
    switch (e.kind) {
        case Expr::Kind::number:
            return e.value;
        case Expr::Kind::ref: {
            if (e.indices.empty()) {
                if (const long* v = env.find(e.name)) return static_cast<double>(*v);
            }
            std::vector<long> idx;
            idx.reserve(e.indices.size());
            for (const auto& ix : e.indices) idx.push_back(eval_index(ix, env));
            if (params_.count(e.name)) return param(e.name, idx);
            auto vit = vars_.find(e.name);
            if (vit != vars_.end()) {
                if (!x) throw EvalError("variable '" + e.name + "' in a data-only context");
                flat_position(e.name, vit->second->index_sets, idx);
                return (*x)(e.name, idx);
            }
            throw EvalError("unknown symbol '" + e.name + "'");
        }
        case Expr::Kind::add: return eval(e.operands[0], env, x) + eval(e.operands[1], env, x);
        case Expr::Kind::sub: return eval(e.operands[0], env, x) - eval(e.operands[1], env, x);
        case Expr::Kind::mul: return eval(e.operands[0], env, x) * eval(e.operands[1], env, x);
        case Expr::Kind::div: return eval(e.operands[0], env, x) / eval(e.operands[1], env, x);
        case Expr::Kind::neg: return -eval(e.operands[0], env, x);
        case Expr::Kind::sum: {
            double total = 0.0;
            for_each(e.over, env, x, [&](Env& inner) { total += eval(e.operands[0], inner, x); });
            return total;
        }
    }
    return 0.0;
}

bool ModelEvaluator::passes(const std::vector<Comparison>& filter, Env& env,
                            const Assignment* x) const {
    for (const Comparison& c : filter) {
        double a = eval(c.lhs, env, x);
        double b = eval(c.rhs, env, x);
        bool ok = false;
        switch (c.op) {
            case CmpOp::lt: ok = a < b; break;
            case CmpOp::le: ok = a <= b; break;
            case CmpOp::eq: ok = a == b; break;
            case CmpOp::ne: ok = a != b; break;
            case CmpOp::ge: ok = a >= b; break;
            case CmpOp::gt: ok = a > b; break;
        }
        if (!ok) return false;
    }
    return true;
}

void ModelEvaluator::for_each(const Quantifier& q, Env& env, const Assignment* x,
                              const std::function<void(Env&)>& fn) const {
    std::vector<std::vector<long>> domains;
    for (const Binding& b : q.bindings) domains.push_back(set_values(b.set));
    std::size_t mark = env.bound.size();
    for (const Binding& b : q.bindings) env.bound.emplace_back(b.var, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t d) {
        if (d == domains.size()) {
            if (passes(q.filter, env, x)) fn(env);
            return;
        }
        for (long v : domains[d]) {
            env.bound[mark + d].second = v;
            rec(d + 1);
        }
    };
    rec(0);
    env.bound.resize(mark);
}

std::size_t ModelEvaluator::row_count(const std::string& constraint) const {
    for (const auto& c : ast_.constraints) {
        if (c.name != constraint) continue;
        if (!c.quantifier) return 1;
        Env env;
        std::size_t n = 0;
        for_each(*c.quantifier, env, nullptr, [&](Env&) { ++n; });
        return n;
    }
    throw EvalError("unknown constraint '" + constraint + "'");
}

std::vector<RowViolation> ModelEvaluator::violations(const Assignment& x, double tolerance) const {
    std::vector<RowViolation> out;
    for (const auto& c : ast_.constraints) {
        auto check = [&](Env& env) {
            std::vector<long> where;
            for (const auto& [name, v] : env.bound) where.push_back(v);
            try {
                double lhs = eval(c.lhs, env, &x);
                double rhs = eval(c.rhs, env, &x);
                bool ok = c.rel == RelOp::le   ? lhs <= rhs + tolerance
                          : c.rel == RelOp::ge ? lhs >= rhs - tolerance
                                               : std::fabs(lhs - rhs) <= tolerance;
                if (!ok) {
                    out.push_back({c.name, where,
                                   "lhs " + emit_number(lhs) + " vs rhs " + emit_number(rhs)});
                }
            } catch (const EvalError& e) {
                out.push_back({c.name, where, e.what()});
            }
        };
        Env env;
        if (c.quantifier) {
            for_each(*c.quantifier, env, &x, check);
        } else {
            check(env);
        }
    }
    return out;
}

double ModelEvaluator::objective(const Assignment& x) const {
    if (!ast_.objective) throw EvalError("model has no objective");
    Env env;
    return eval(ast_.objective->expr, env, &x);
}

}  // namespace closurekb::dsl
