#pragma once
// Random MiniModel ASTs shaped like parser output (non-negative number
// literals, unique declaration names), for round-trip property tests.

#include <closurekb/model_dsl.hpp>

#include <cmath>
#include <random>
#include <string>

namespace closurekb::testing {

class RandomModel {
public:
    explicit RandomModel(std::uint64_t seed) : rng_(seed) {}

    dsl::ModelAst make() {
        dsl::ModelAst ast;
        counter_ = 0;
        set_names_.clear();
        int n_sets = pick(0, 3);
        for (int i = 0; i < n_sets; ++i) {
            dsl::SetDecl s;
            s.name = fresh("S");
            if (coin()) {
                s.is_range = true;
                s.lo = pick(0, 3);
                s.hi = s.lo + pick(0, 5);
            } else {
                s.is_range = false;
                int n = pick(1, 3);
                for (int k = 0; k < n; ++k) s.members.push_back("e" + std::to_string(k));
            }
            set_names_.push_back(s.name);
            ast.sets.push_back(std::move(s));
        }
        for (int i = pick(0, 3); i > 0; --i) {
            dsl::ParamDecl p;
            p.name = fresh("p");
            p.index_sets = some_sets();
            if (coin()) {
                dsl::DataLiteral d;
                d.is_list = coin();
                int n = d.is_list ? pick(0, 4) : 1;
                for (int k = 0; k < n; ++k) d.values.push_back(signed_value());
                p.data = d;
            }
            ast.params.push_back(std::move(p));
        }
        for (int i = pick(0, 3); i > 0; --i) {
            dsl::VarDecl v;
            v.name = fresh("x");
            v.index_sets = some_sets();
            v.domain = static_cast<dsl::VarDomain>(pick(0, 2));
            if (coin()) v.bounds = std::make_pair(signed_value(), signed_value());
            ast.vars.push_back(std::move(v));
        }
        for (int i = pick(0, 3); i > 0; --i) {
            dsl::ConstraintDecl c;
            c.name = fresh("c");
            if (coin()) c.quantifier = quantifier(2);
            c.lhs = expr(3);
            c.rel = static_cast<dsl::RelOp>(pick(0, 2));
            c.rhs = expr(3);
            ast.constraints.push_back(std::move(c));
        }
        if (coin()) {
            dsl::ObjectiveDecl o;
            o.sense = coin() ? dsl::ObjectiveSense::max : dsl::ObjectiveSense::min;
            o.name = fresh("obj");
            o.expr = expr(3);
            ast.objective = std::move(o);
        }
        return ast;
    }

private:
    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin() { return pick(0, 1) == 1; }

    std::string fresh(const std::string& prefix) { return prefix + std::to_string(counter_++); }

    std::string any_set() {
        if (set_names_.empty() || pick(0, 4) == 0) return "U" + std::to_string(pick(0, 2));
        return set_names_[static_cast<std::size_t>(pick(0, static_cast<int>(set_names_.size()) - 1))];
    }

    std::vector<std::string> some_sets() {
        std::vector<std::string> out;
        for (int i = pick(0, 2); i > 0; --i) out.push_back(any_set());
        return out;
    }

    double value() {
        switch (pick(0, 3)) {
            case 0: return pick(0, 100);
            case 1: return pick(0, 1000) / 8.0;
            case 2: return std::uniform_real_distribution<double>(0.0, 10.0)(rng_);
            default: return std::ldexp(static_cast<double>(pick(1, 9)), -pick(10, 40));
        }
    }
    double signed_value() { return coin() ? value() : -value(); }

    dsl::Quantifier quantifier(int depth) {
        dsl::Quantifier q;
        for (int i = pick(1, 2); i > 0; --i) {
            q.bindings.push_back({"i" + std::to_string(counter_++), any_set()});
        }
        for (int i = pick(0, 2); i > 0; --i) {
            dsl::Comparison c;
            c.lhs = expr(depth - 1);
            c.op = static_cast<dsl::CmpOp>(pick(0, 5));
            c.rhs = expr(depth - 1);
            q.filter.push_back(std::move(c));
        }
        return q;
    }

    dsl::Expr leaf() {
        if (coin()) return dsl::Expr::number(value());
        std::vector<dsl::IndexExpr> idx;
        for (int i = pick(0, 3); i > 0; --i) {
            dsl::IndexExpr ix;
            if (coin()) {
                ix.offset = pick(0, 9);
            } else {
                ix.name = "k" + std::to_string(pick(0, 3));
                ix.offset = pick(-2, 2);
            }
            idx.push_back(ix);
        }
        return dsl::Expr::ref("v" + std::to_string(pick(0, 5)), std::move(idx));
    }

    dsl::Expr expr(int depth) {
        if (depth <= 0) return leaf();
        switch (pick(0, 7)) {
            case 0:
            case 1: return leaf();
            case 2: return dsl::Expr::binary(dsl::Expr::Kind::add, expr(depth - 1), expr(depth - 1));
            case 3: return dsl::Expr::binary(dsl::Expr::Kind::sub, expr(depth - 1), expr(depth - 1));
            case 4: return dsl::Expr::binary(dsl::Expr::Kind::mul, expr(depth - 1), expr(depth - 1));
            case 5: return dsl::Expr::binary(dsl::Expr::Kind::div, expr(depth - 1), expr(depth - 1));
            case 6: return dsl::Expr::negate(expr(depth - 1));
            default: return dsl::Expr::sum(quantifier(depth - 1), expr(depth - 1));
        }
    }

    std::mt19937_64 rng_;
    int counter_ = 0;
    std::vector<std::string> set_names_;
};

}  // namespace closurekb::testing
