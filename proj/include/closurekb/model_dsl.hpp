#pragma once
// MiniModel: the canonical modeling language used internally.
//
//   set T = 1..144;                 set M = {a, b};
//   param price{T} = [0.1, 0.2];    param dLmin = 10;
//   var y{T} binary;                var s{J,O} continuous in [0, 100];
//   con c{t in T : t >= 2}: y[t] <= B13[t-1];
//   max obj: sum{t in T} (price[t]*y[t]);
//
// `!` starts a comment running to the end of the line. Parsing only accepts
// this dialect; LINGO is an emission target.

#include <closurekb/error.hpp>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace closurekb::dsl {

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, std::vector<std::string> expected,
               std::string found);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }
    const std::string& found() const noexcept { return found_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::vector<std::string> expected_;
    std::string found_;
};

class DuplicateDeclaration : public Error {
public:
    explicit DuplicateDeclaration(std::string name);
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class UnsupportedConstruct : public Error {
public:
    using Error::Error;
};

enum class VarDomain { binary, integer, continuous };
enum class ObjectiveSense { max, min };
enum class RelOp { le, eq, ge };
enum class CmpOp { lt, le, eq, ne, ge, gt };

// Index position inside `name[...]`: either an integer literal (name empty)
// or `name + offset`.
struct IndexExpr {
    std::string name;
    long offset = 0;

    bool is_literal() const noexcept { return name.empty(); }
    bool operator==(const IndexExpr&) const = default;
};

struct Binding {
    std::string var;
    std::string set;
    bool operator==(const Binding&) const = default;
};

struct Comparison;

// `{ i in I, j in J : filter }`, filter is a conjunction of comparisons.
struct Quantifier {
    std::vector<Binding> bindings;
    std::vector<Comparison> filter;
};

struct Expr {
    enum class Kind { number, ref, add, sub, mul, div, neg, sum };

    Kind kind = Kind::number;
    double value = 0.0;              // number
    std::string name;                // ref
    std::vector<IndexExpr> indices;  // ref
    std::vector<Expr> operands;      // add/sub/mul/div: 2, neg/sum: 1
    Quantifier over;                 // sum

    static Expr number(double v);
    static Expr ref(std::string name, std::vector<IndexExpr> indices = {});
    static Expr binary(Kind kind, Expr lhs, Expr rhs);
    static Expr negate(Expr operand);
    static Expr sum(Quantifier over, Expr body);
};

struct Comparison {
    Expr lhs;
    CmpOp op = CmpOp::eq;
    Expr rhs;
};

bool operator==(const Quantifier& a, const Quantifier& b);
bool operator==(const Expr& a, const Expr& b);
bool operator==(const Comparison& a, const Comparison& b);

struct DataLiteral {
    bool is_list = false;
    std::vector<double> values;
    bool operator==(const DataLiteral&) const = default;
};

struct SetDecl {
    std::string name;
    bool is_range = true;
    long lo = 0;
    long hi = 0;
    std::vector<std::string> members;
    bool operator==(const SetDecl&) const = default;
};

struct ParamDecl {
    std::string name;
    std::vector<std::string> index_sets;
    std::optional<DataLiteral> data;
    bool operator==(const ParamDecl&) const = default;
};

struct VarDecl {
    std::string name;
    std::vector<std::string> index_sets;
    VarDomain domain = VarDomain::continuous;
    std::optional<std::pair<double, double>> bounds;
    bool operator==(const VarDecl&) const = default;
};

struct ConstraintDecl {
    std::string name;
    std::optional<Quantifier> quantifier;
    Expr lhs;
    RelOp rel = RelOp::le;
    Expr rhs;
    bool operator==(const ConstraintDecl&) const = default;
};

struct ObjectiveDecl {
    ObjectiveSense sense = ObjectiveSense::max;
    std::string name;
    Expr expr;
    bool operator==(const ObjectiveDecl&) const = default;
};

struct ModelAst {
    std::vector<SetDecl> sets;
    std::vector<ParamDecl> params;
    std::vector<VarDecl> vars;
    std::vector<ConstraintDecl> constraints;
    std::optional<ObjectiveDecl> objective;

    bool operator==(const ModelAst&) const = default;
    bool empty() const noexcept;
};

enum class SymbolKind { set, param, var, constraint, objective };
// value: the name is read as a number (var/param); iteration: the name is
// iterated over as an index set.
enum class Usage { value, iteration };

struct Declaration {
    SymbolKind kind = SymbolKind::set;
    std::string domain;  // binary/integer/continuous for vars, max/min for objectives
    std::size_t arity = 0;
    std::vector<std::string> index_sets;
    bool operator==(const Declaration&) const = default;
};

struct Reference {
    std::string name;
    std::size_t arity = 0;
    std::string site;
    Usage usage = Usage::value;
    bool operator==(const Reference&) const = default;
};

struct SymbolTable {
    std::map<std::string, Declaration> declarations;
    std::vector<Reference> references;  // deduplicated, first-occurrence order
};

enum class Dialect { canonical, lingo_flavored };

ModelAst parse_model(std::string_view source);
SymbolTable extract_symbols(const ModelAst& ast);
std::string emit_model(const ModelAst& ast, Dialect dialect = Dialect::canonical);

// Single-statement helpers shared with the knowledge graph and code generator.
std::string emit_expr(const Expr& expr);
std::string emit_data_literal(const DataLiteral& data);
std::string emit_number(double value);
std::string emit_set(const SetDecl& set);
std::string emit_param(const ParamDecl& param);
std::string emit_var(const VarDecl& var);
std::string emit_constraint(const ConstraintDecl& con);
std::string emit_objective(const ObjectiveDecl& obj);
DataLiteral parse_data_literal(std::string_view text);

std::string_view to_string(VarDomain d);
std::string_view to_string(SymbolKind k);
std::string_view to_string(Usage u);
std::optional<VarDomain> var_domain_from_string(std::string_view s);

// Renames every declared and referenced symbol according to `mapping`
// (names absent from the map are kept). Bound index variables are untouched.
ModelAst rename_symbols(const ModelAst& ast, const std::map<std::string, std::string>& mapping);

bool is_keyword(std::string_view word);

}  // namespace closurekb::dsl
