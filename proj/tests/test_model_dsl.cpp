#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <closurekb/model_dsl.hpp>
#include <closurekb/model_eval.hpp>

#include "support/random_model.hpp"

using namespace closurekb::dsl;

namespace {

const char* kListing6 = "set T = 1..3;\n"
                        "var y{T} binary;\n"
                        "var B13{T} integer;\n"
                        "con c{t in T : t >= 2}: y[t] <= B13[t-1];\n";

bool has_ref(const SymbolTable& t, const std::string& name, std::size_t arity,
             const std::string& site) {
    for (const auto& r : t.references)
        if (r.name == name && r.arity == arity && r.site == site) return true;
    return false;
}

}  // namespace

TEST_CASE("parse_model: minimal model") {
    ModelAst ast = parse_model("set T = 1..2; var y{T} binary; max obj: y[1];");
    REQUIRE(ast.sets.size() == 1);
    REQUIRE(ast.vars.size() == 1);
    CHECK(ast.vars[0].domain == VarDomain::binary);
    CHECK(ast.vars[0].index_sets.size() == 1);
    REQUIRE(ast.objective.has_value());
    CHECK(ast.objective->sense == ObjectiveSense::max);
}

TEST_CASE("parse_model: quantified constraint with filter") {
    ModelAst ast = parse_model("con c{t in T : t >= 2}: y[t] <= B13[t-1];");
    REQUIRE(ast.constraints.size() == 1);
    const ConstraintDecl& c = ast.constraints[0];
    REQUIRE(c.quantifier.has_value());
    REQUIRE(c.quantifier->bindings.size() == 1);
    CHECK(c.quantifier->bindings[0] == Binding{"t", "T"});
    REQUIRE(c.quantifier->filter.size() == 1);
    const Comparison& f = c.quantifier->filter[0];
    CHECK(f.op == CmpOp::ge);
    CHECK(f.lhs == Expr::ref("t"));
    CHECK(f.rhs == Expr::number(2));
    CHECK(c.rhs == Expr::ref("B13", {IndexExpr{"t", -1}}));
}

TEST_CASE("parse_model: duplicate declaration") {
    try {
        parse_model("var y binary; var y binary; min obj: y;");
        FAIL("expected DuplicateDeclaration");
    } catch (const DuplicateDeclaration& e) {
        CHECK(e.name() == "y");
    }
}

TEST_CASE("parse_model: errors carry position and expected tokens") {
    try {
        parse_model("set T = 1..2;\nvar y{T} boolean;");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 10);
        CHECK(e.expected() == std::vector<std::string>{"binary", "integer", "continuous"});
    }
    CHECK_THROWS_AS(parse_model("con c: y[t*2] <= 1;"), ParseError);
    CHECK_THROWS_AS(parse_model("con c: y <= 1"), ParseError);
    CHECK_THROWS_AS(parse_model("max a: x; min b: x;"), ParseError);
    CHECK_THROWS_AS(parse_model("var sum binary;"), ParseError);
    CHECK_THROWS_AS(parse_model("param p = 1e999;"), ParseError);
    CHECK_THROWS_AS(parse_model("param p = 1 @"), ParseError);
}

TEST_CASE("parse_model: comments and whitespace") {
    ModelAst a = parse_model("! header\nset T = 1..2; ! trailing\n\n  var y{T} binary;");
    ModelAst b = parse_model("set T=1..2;var y{T} binary;");
    CHECK(a == b);
    CHECK(parse_model("").empty());
    CHECK(parse_model("! only a comment\n").empty());
}

TEST_CASE("extract_symbols: direct readback") {
    SymbolTable t = extract_symbols(parse_model("set T = 1..2; var y{T} binary; max obj: y[1];"));
    REQUIRE(t.declarations.size() == 3);
    CHECK(t.declarations.at("T").kind == SymbolKind::set);
    CHECK(t.declarations.at("T").arity == 0);
    CHECK(t.declarations.at("y").kind == SymbolKind::var);
    CHECK(t.declarations.at("y").arity == 1);
    CHECK(t.declarations.at("y").domain == "binary");
    CHECK(t.declarations.at("obj").kind == SymbolKind::objective);
    REQUIRE(t.references.size() == 1);
    CHECK(t.references[0] == Reference{"y", 1, "obj", Usage::value});
}

TEST_CASE("extract_symbols: undeclared reference is still recorded") {
    SymbolTable t = extract_symbols(parse_model("con c{t in T : t >= 2}: y[t] <= B13[t-1];"));
    CHECK(has_ref(t, "B13", 1, "c"));
    CHECK(t.declarations.count("B13") == 0);
    CHECK(t.declarations.at("c").kind == SymbolKind::constraint);
    CHECK(t.declarations.at("c").arity == 1);
    // the bound variable t is local, the set T is an iteration reference
    CHECK_FALSE(has_ref(t, "t", 0, "c"));
    bool iter = false;
    for (const auto& r : t.references) iter = iter || (r.name == "T" && r.usage == Usage::iteration);
    CHECK(iter);
}

TEST_CASE("extract_symbols: empty model") {
    SymbolTable t = extract_symbols(parse_model(""));
    CHECK(t.declarations.empty());
    CHECK(t.references.empty());
}

TEST_CASE("extract_symbols: index positions and nested sums") {
    SymbolTable t = extract_symbols(
        parse_model("con c{i in I}: sum{j in J : j <= n[i]} x[i,j+1,N] >= cap;"));
    CHECK(has_ref(t, "x", 3, "c"));
    CHECK(has_ref(t, "N", 0, "c"));
    CHECK(has_ref(t, "n", 1, "c"));
    CHECK(has_ref(t, "cap", 0, "c"));
    CHECK_FALSE(has_ref(t, "i", 0, "c"));
    CHECK_FALSE(has_ref(t, "j", 0, "c"));
}

TEST_CASE("emit_model: lingo-flavored quantified constraint") {
    ModelAst ast = parse_model("set T = 1..3; var y{T} binary; var B13{T} integer;"
                               "con c{i in T : i >= 2}: y[i] <= B13[i-1];");
    std::string text = emit_model(ast, Dialect::lingo_flavored);
    CHECK(text.find("@for(T(i)|i#ge#2: y(i) <= B13(i-1));") != std::string::npos);
    CHECK(text.find("T /1..3/: y, B13;") != std::string::npos);
}

TEST_CASE("emit_model: lingo objective form") {
    std::string text = emit_model(parse_model("max obj: 5*x;"), Dialect::lingo_flavored);
    CHECK(text.rfind("max = 5*x", 0) == 0);
}

TEST_CASE("emit_model: lingo sums, filters and unsupported forms") {
    std::string text = emit_model(
        parse_model("set T = 1..12; param P{T}; var y{T} binary;"
                    "con h: sum{t in T : t > 6 and t <= 12} (P[t]*y[t]) <= 3;"),
        Dialect::lingo_flavored);
    CHECK(text.find("[h] @sum(T(t)|(t#gt#6)#and#(t#le#12): P(t)*y(t)) <= 3;") != std::string::npos);
    CHECK_THROWS_AS(emit_model(parse_model("set A = 1..2; var x{A, A} binary;"),
                               Dialect::lingo_flavored),
                    UnsupportedConstruct);
}

TEST_CASE("emit_model: canonical round trip on the Listing-6 transcription") {
    ModelAst ast = parse_model(kListing6);
    std::string once = emit_model(ast);
    CHECK(parse_model(once) == ast);
    CHECK(emit_model(parse_model(once)) == once);
}

TEST_CASE("emit_model: precedence and associativity survive") {
    for (const char* src : {"con c: a - (b - c) <= (a - b) - c;", "con c: a/(b*c) = -(x + y)*2;",
                            "con c: sum{t in T} (y[t]*2) >= (sum{t in T} y[t])*2;",
                            "con c: a*(sum{t in T} y[t])*b - sum{t in T} sum{s in T} y[t]*x[s] = 0;",
                            "con c: -(sum{t in T} y[t])*2 + sum{t in T} (y[t] + 1) <= 0;",
                            "con c: --x >= a - -b;", "con c: sum{t in T} (-y[t]) <= 0;"}) {
        ModelAst ast = parse_model(src);
        CHECK(parse_model(emit_model(ast)) == ast);
    }
}

TEST_CASE("sum extends over the following multiplicative term") {
    Expr e = parse_model("max o: sum{t in T} p[t]*x[t] + 1;").objective->expr;
    REQUIRE(e.kind == Expr::Kind::add);
    REQUIRE(e.operands[0].kind == Expr::Kind::sum);
    CHECK(e.operands[0].operands[0].kind == Expr::Kind::mul);
    CHECK(emit_expr(e) == "sum{t in T} p[t]*x[t] + 1");
}

TEST_CASE("property: canonical emission round-trips random models") {
    closurekb::testing::RandomModel gen(20261016);
    for (int i = 0; i < 1000; ++i) {
        ModelAst ast = gen.make();
        std::string text = emit_model(ast);
        ModelAst back = parse_model(text);
        REQUIRE_MESSAGE(back == ast, text);
        CHECK(emit_model(back) == text);
    }
}

TEST_CASE("property: every identifier in a constraint is referenced with its arity") {
    closurekb::testing::RandomModel gen(7);
    for (int i = 0; i < 200; ++i) {
        ModelAst ast = gen.make();
        SymbolTable t = extract_symbols(ast);
        for (const auto& c : ast.constraints) {
            // every v* identifier the generator emits is a free symbol
            std::string text = emit_constraint(c);
            for (std::size_t pos = text.find('v'); pos != std::string::npos;
                 pos = text.find('v', pos + 1)) {
                if (pos > 0 && std::isalnum(static_cast<unsigned char>(text[pos - 1]))) continue;
                std::size_t end = pos + 1;
                while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
                if (end == pos + 1) continue;
                std::string name = text.substr(pos, end - pos);
                std::size_t arity = 0;
                if (end < text.size() && text[end] == '[') {
                    arity = 1;
                    for (std::size_t k = end + 1; text[k] != ']'; ++k) arity += text[k] == ',';
                }
                CHECK_MESSAGE(has_ref(t, name, arity, c.name), text);
            }
        }
    }
}

TEST_CASE("rename_symbols renames declarations and uses but not bound indices") {
    ModelAst ast = parse_model(kListing6);
    ModelAst renamed = rename_symbols(ast, {{"T", "Slots"}, {"y", "run"}, {"t", "nope"}});
    std::string text = emit_model(renamed);
    CHECK(text.find("con c{t in Slots : t >= 2}: run[t] <= B13[t-1];") != std::string::npos);
    CHECK(rename_symbols(renamed, {{"Slots", "T"}, {"run", "y"}}) == ast);
}

TEST_CASE("ModelEvaluator: ground rows, parameters and violations") {
    ModelEvaluator ev(parse_model("set T = 1..4; param P{T} = [1, 2, 3, 4];"
                                  "var y{T} binary;"
                                  "con cap{t in T : t >= 2}: P[t]*y[t] <= 3;"
                                  "max obj: sum{t in T} (P[t]*y[t]);"));
    CHECK(ev.row_count("cap") == 3);
    CHECK(ev.column_count("y") == 4);
    std::vector<long> at3{3};
    CHECK(ev.param("P", at3) == 3.0);
    auto all_on = [](const std::string&, std::span<const long>) { return 1.0; };
    CHECK(ev.objective(all_on) == 10.0);
    auto v = ev.violations(all_on);
    REQUIRE(v.size() == 1);
    CHECK(v[0].constraint == "cap");
    CHECK(v[0].index == std::vector<long>{4});
}

TEST_CASE("ModelEvaluator: out-of-range index is reported as a violation") {
    ModelEvaluator ev(parse_model("set T = 1..2; var y{T} binary; con c{t in T}: y[t+1] <= 1;"));
    auto v = ev.violations([](const std::string&, std::span<const long>) { return 0.0; });
    REQUIRE(v.size() == 1);
    CHECK(v[0].index == std::vector<long>{2});
}
