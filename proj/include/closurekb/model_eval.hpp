#pragma once
// Ground evaluation of MiniModel programs: expands quantifiers over the
// declared sets, reads parameter data, and evaluates constraints and the
// objective at a caller-supplied variable assignment. Used to cross-check
// emitted models against the direct case evaluators.

#include <closurekb/model_dsl.hpp>

#include <functional>
#include <span>

namespace closurekb::dsl {

class EvalError : public Error {
public:
    using Error::Error;
};

// Value of variable `name` at the given index tuple (empty for scalars).
using Assignment = std::function<double(const std::string& name, std::span<const long> index)>;

struct RowViolation {
    std::string constraint;
    std::vector<long> index;
    std::string detail;
};

class ModelEvaluator {
public:
    explicit ModelEvaluator(ModelAst ast);

    // Range sets yield lo..hi; member sets yield their 1-based positions.
    std::vector<long> set_values(const std::string& name) const;
    double param(const std::string& name, std::span<const long> index) const;

    // Number of ground rows of a constraint (quantifier tuples passing the filter).
    std::size_t row_count(const std::string& constraint) const;
    // Number of ground columns of a variable (product of its index-set sizes).
    std::size_t column_count(const std::string& var) const;

    std::vector<RowViolation> violations(const Assignment& x, double tolerance = 1e-9) const;
    double objective(const Assignment& x) const;

    const ModelAst& ast() const noexcept { return ast_; }

private:
    struct Env;
    double eval(const Expr& e, Env& env, const Assignment* x) const;
    long eval_index(const IndexExpr& ix, const Env& env) const;
    bool passes(const std::vector<Comparison>& filter, Env& env, const Assignment* x) const;
    void for_each(const Quantifier& q, Env& env, const Assignment* x,
                  const std::function<void(Env&)>& fn) const;
    std::size_t flat_position(const std::string& name, const std::vector<std::string>& sets,
                              std::span<const long> index) const;

    ModelAst ast_;
    std::map<std::string, const SetDecl*> sets_;
    std::map<std::string, const ParamDecl*> params_;
    std::map<std::string, const VarDecl*> vars_;
};

}  // namespace closurekb::dsl
