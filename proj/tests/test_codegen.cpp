#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <closurekb/codegen.hpp>

#include "support/wellformed_model.hpp"

#include <cstdlib>
#include <fstream>

using namespace closurekb;
using namespace closurekb::codegen;
using kg::EntityKind;

namespace {

const char* kModel =
    "set T = 1..4; set Tstar = 2..3;"
    "param Bref{Tstar} = [5, 5]; param dLmin = 3; param lambda = 0.5; param cap = 2;"
    "var m01{T} binary; var B13{T} integer in [0, 4];"
    "con loadReduction: sum{t in Tstar} (Bref[t] - 4*m01[t]) >= dLmin;"
    "con m01_from_B13{i in T : i >= 2}: m01[i] <= B13[i-1];"
    "max profit: sum{t in T} m01[t] + lambda*sum{t in Tstar} (Bref[t] - 4*m01[t]);";

kg::KnowledgeGraph graph_with_cards() {
    kg::KnowledgeGraph g;
    dsl::ModelAst ast = dsl::parse_model(kModel);
    kg::ingest_model(ast, dsl::extract_symbols(ast), g);
    g.add_edge({"loadReduction", "lambda", kg::EdgeKind::depends_on});
    std::vector<kg::ConceptCard> cards{
        {"load-reduction constraint", EntityKind::constraint, "Event consumption must drop by a minimum.",
         "loadReduction", "", {}, {}},
        {"demand-response event", EntityKind::concept_, "A curtailment request window.", std::nullopt, "", {}, {}},
        {"incentive rate", EntityKind::parameter, "Payment per kWh of reduction during the event.",
         "lambda", "", {}, {}},
        {"peak tariff rule", EntityKind::constraint, "A tariff constraint known only from the literature.",
         std::nullopt, "", {}, {}},
    };
    kg::ingest_concept_cards(cards, g);
    kg::align(g);
    g.freeze();
    return g;
}

retrieval::RetrievalResult closed(const kg::KnowledgeGraph& g, std::vector<std::string> seeds) {
    retrieval::RetrievalResult r;
    r.structural = retrieval::structural_retrieve(g, seeds);
    r.seed_ids = std::move(seeds);
    return r;
}

}  // namespace

TEST_CASE("build_context: ordering, sections, targets") {
    kg::KnowledgeGraph g = graph_with_cards();
    ContextPackage p = build_context(g, closed(g, {"paper:load-reduction-constraint"}), "add it");
    CHECK(p.targets == std::vector<std::string>{"loadReduction"});
    std::vector<std::string> order;
    for (const auto& t : p.typed_entities) order.push_back(t.entity.id);
    CHECK(order == std::vector<std::string>{"T", "Tstar", "Bref", "dLmin", "lambda", "m01", "loadReduction",
                                            "paper:load-reduction-constraint"});
    CHECK(p.typed_entities[0].definition == "T : index_set : - : {} : T");
    CHECK(p.typed_entities[5].definition == "m01 : decision_variable : binary : {T} : m01");
    std::string text = p.to_text();
    auto at = [&](const char* s) { return text.find(s); };
    CHECK(at("=== TYPED ENTITIES ===") < at("=== DEPENDENCY SUBGRAPH ==="));
    CHECK(at("=== DEPENDENCY SUBGRAPH ===") < at("=== BACKGROUND SNIPPETS ==="));
    CHECK(at("=== BACKGROUND SNIPPETS ===") < at("=== INSTRUCTION ==="));
    CHECK(text.find("loadReduction -> m01 [used_in]") != std::string::npos);
    CHECK(text.find("Target entities: loadReduction") != std::string::npos);
    CHECK(build_context(g, closed(g, {"paper:load-reduction-constraint"}), "add it").to_text() == text);
}

TEST_CASE("build_context: every subgraph endpoint is a typed entity") {
    kg::KnowledgeGraph g = graph_with_cards();
    ContextPackage p = build_context(g, closed(g, {"profit", "m01_from_B13"}), "x");
    for (const auto& line : p.subgraph_lines) {
        std::string src = line.substr(0, line.find(" -> "));
        std::string rest = line.substr(line.find(" -> ") + 4);
        std::string dst = rest.substr(0, rest.find(' '));
        CHECK(p.contains(src));
        CHECK(p.contains(dst));
    }
}

TEST_CASE("build_context: isolated entity, unclosed input") {
    kg::KnowledgeGraph g = graph_with_cards();
    ContextPackage p = build_context(g, closed(g, {"dLmin"}), "what is dLmin");
    CHECK(p.typed_entities.size() == 1);
    CHECK(p.subgraph_lines.empty());
    CHECK(p.targets.empty());
    retrieval::RetrievalResult open{{"loadReduction"}, {"loadReduction"}, {}};
    CHECK_THROWS_AS(build_context(g, open, "x"), retrieval::NotClosed);
    CHECK_NOTHROW(build_context(g, open, "x", {.require_closed = false}));
}

TEST_CASE("template generator") {
    kg::KnowledgeGraph g = graph_with_cards();
    TemplateGenerator t;
    SUBCASE("closed package renders and validates") {
        std::string code = t.generate(build_context(g, closed(g, {"loadReduction"}), "add"));
        CHECK(code.find("param dLmin = 3;") != std::string::npos);
        CHECK(code.find("param lambda = 0.5;") != std::string::npos);
        CHECK(code.find("var m01{T} binary;") != std::string::npos);
        CHECK(code.find("con loadReduction: sum{t in Tstar} (Bref[t] - 4*m01[t]) >= dLmin;") != std::string::npos);
        CHECK(validate(code, kg::KnowledgeGraph{}).ok());
        CHECK(validate(code, g).ok());
    }
    SUBCASE("single scalar parameter") {
        std::string code = t.generate(build_context(g, closed(g, {"dLmin"}), "what is dLmin"));
        CHECK(code == "param dLmin = 3;\n");
    }
    SUBCASE("paper concepts become comments") {
        std::string code = t.generate(build_context(g, closed(g, {"paper:load-reduction-constraint"}), "add"));
        CHECK(code.find("! constraint concept: load-reduction constraint\n") != std::string::npos);
    }
    SUBCASE("unaligned paper constraint has no expression") {
        ContextPackage p = build_context(g, closed(g, {"paper:peak-tariff-rule"}), "add");
        CHECK(p.targets == std::vector<std::string>{"paper:peak-tariff-rule"});
        CHECK_THROWS_AS(t.generate(p), MissingExpression);
    }
}

TEST_CASE("external generators pass text through") {
    kg::KnowledgeGraph g = graph_with_cards();
    ContextPackage p = build_context(g, closed(g, {"dLmin"}), "q");
    FunctionGenerator fixed("mock", [](const ContextPackage&) { return std::string("param z = 1;\n"); });
    CHECK(fixed.generate(p) == "param z = 1;\n");

    CommandGenerator echo("printf 'param w = 2;\\n'");
    CHECK(echo.generate(p) == "param w = 2;\n");
    CommandGenerator reads_stdin("grep -c 'dLmin : parameter'");
    CHECK(reads_stdin.generate(p) == "1\n");
    CHECK_THROWS_AS(CommandGenerator("exit 7").generate(p), GeneratorUnavailable);
    CHECK_THROWS_AS(HttpGenerator("http://127.0.0.1:9/gen", std::chrono::milliseconds(300)).generate(p),
                    GeneratorUnavailable);
    CHECK_THROWS_AS(make_external_generator("ftp://x"), GeneratorUnavailable);
    CHECK(make_external_generator("exec:cat")->name() == "exec:cat");
}

TEST_CASE("validate") {
    kg::KnowledgeGraph g = graph_with_cards();
    kg::KnowledgeGraph empty;
    SUBCASE("undeclared upstream buffer") {
        ValidationReport r = validate("set T = 1..3; var m01{T} binary;"
                                      "con s{i in T : i >= 2}: m01[i] <= B13[i-1];",
                                      empty);
        CHECK_FALSE(r.ok());
        CHECK(r.missing_declarations == std::vector<std::string>{"B13"});
        // the graph supplies it
        CHECK(validate("con s{i in T : i >= 2}: m01[i] <= B13[i-1];", g).ok());
    }
    SUBCASE("iterating over a parameter") {
        ValidationReport r = validate("param P = 3; var x binary; con c: sum{t in P} x <= 1;", empty);
        REQUIRE(r.kind_mismatches.size() == 1);
        CHECK(r.kind_mismatches[0] == KindMismatch{"P", "index_set", "parameter"});
    }
    SUBCASE("declaration over a non-set") {
        ValidationReport r = validate("param P = 3; var x{P} binary;", empty);
        CHECK(r.kind_mismatches == std::vector<KindMismatch>{{"P", "index_set", "parameter"}});
    }
    SUBCASE("set in value position") {
        ValidationReport r = validate("set T = 1..2; con c: T <= 1;", empty);
        CHECK(r.kind_mismatches == std::vector<KindMismatch>{{"T", "decision_variable|parameter", "index_set"}});
    }
    SUBCASE("arity") {
        ValidationReport r = validate("set T = 1..2; var x{T} binary; con c: x[1, 2] + x <= 1;", empty);
        CHECK(r.arity_mismatches ==
              std::vector<ArityMismatch>{{"x", 1, 2}, {"x", 1, 0}});
        CHECK_FALSE(validate("con c: m01[1] <= 1;", g).ok() == false);
        CHECK(validate("con c: m01 <= 1;", g).arity_mismatches.size() == 1);
    }
    SUBCASE("parse errors land in the report") {
        ValidationReport r = validate("con c: x <= ;", empty);
        CHECK_FALSE(r.ok());
        CHECK(r.parse_error.has_value());
        CHECK(validate("param a = 1; param a = 2;", empty).parse_error.has_value());
    }
    SUBCASE("paper entities carry no solver symbols") {
        CHECK_FALSE(validate("con c: x <= 1;", g).ok());
    }
    SUBCASE("json twin") {
        ValidationReport r = validate("con c: q <= 1;", empty);
        CHECK(to_json(r).find("\"missing_declarations\": [\n    \"q\"\n  ]") != std::string::npos);
    }
}

TEST_CASE("property: validate is sound") {
    kg::KnowledgeGraph g = graph_with_cards();
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        dsl::ModelAst ast = testing::WellFormedModel(seed).make();
        // drop declarations at random to create undeclared references
        std::mt19937 rng(static_cast<std::uint32_t>(seed));
        if (!ast.params.empty() && rng() % 2) ast.params.erase(ast.params.begin());
        if (ast.vars.size() > 1 && rng() % 2) ast.vars.erase(ast.vars.begin());
        std::string code = dsl::emit_model(ast);
        ValidationReport r = validate(code, g);
        dsl::SymbolTable table = dsl::extract_symbols(dsl::parse_model(code));
        for (const std::string& name : r.missing_declarations) {
            CHECK(table.declarations.count(name) == 0);
            CHECK(g.by_symbol(name).empty());
        }
    }
}

TEST_CASE("property: closure-complete packages always validate") {
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
        kg::KnowledgeGraph g;
        testing::WellFormedModel gen(seed);
        std::vector<kg::ParsedModel> models;
        for (int m = 0; m < 2; ++m) {
            dsl::ModelAst ast = gen.make("m" + std::to_string(m) + "_");
            REQUIRE(validate(dsl::emit_model(ast), kg::KnowledgeGraph{}).ok());
            models.push_back({ast, dsl::extract_symbols(ast)});
        }
        kg::ingest_models(models, g);
        g.freeze();
        for (const auto& [id, e] : g.entities()) {
            ContextPackage p = build_context(g, closed(g, {id}), "generate");
            std::string code = TemplateGenerator().generate(p);
            ValidationReport r = validate(code, kg::KnowledgeGraph{});
            CHECK_MESSAGE(r.ok(), code);
        }
    }
}

TEST_CASE("repair_loop") {
    kg::KnowledgeGraph g = graph_with_cards();
    retrieval::SemanticIndex idx = retrieval::index_snippets(g);
    const char* query = "Add a load-reduction constraint for the demand-response event";

    SUBCASE("template succeeds in round 1") {
        RepairOutcome o = repair_loop(query, g, idx, TemplateGenerator());
        CHECK(o.report.ok());
        CHECK(o.rounds == 1);
    }
    SUBCASE("mock that needs dLmin in context recovers in round 2") {
        // Round 1 context lacks dLmin: the mock hides it from the package.
        int calls = 0;
        FunctionGenerator mock("mock", [&](const ContextPackage& p) {
            ++calls;
            ContextPackage trimmed = p;
            if (calls == 1) {
                std::erase_if(trimmed.typed_entities,
                              [](const TypedEntity& t) { return t.entity.id == "dLmin"; });
            }
            return TemplateGenerator().generate(trimmed);
        });
        RepairOutcome o = repair_loop(query, g, idx, mock);
        CHECK(o.report.ok());
        CHECK(o.rounds == 2);
        CHECK(std::is_sorted(o.context_sizes.begin(), o.context_sizes.end()));
    }
    SUBCASE("missing symbol absent from the graph exhausts the budget") {
        FunctionGenerator bad("bad", [](const ContextPackage& p) {
            return TemplateGenerator().generate(p) + "con extra: ghost >= 1;\n";
        });
        RepairOutcome o = repair_loop(query, g, idx, bad, {.max_rounds = 3});
        CHECK_FALSE(o.report.ok());
        CHECK(o.rounds == 3);
        CHECK(o.report.missing_declarations == std::vector<std::string>{"ghost"});
        CHECK(repair_loop(query, g, idx, bad, {.max_rounds = 1}).rounds == 1);
    }
    SUBCASE("unaligned paper target fails without throwing") {
        RepairOutcome o = repair_loop("add the peak tariff rule constraint", g, idx, TemplateGenerator());
        CHECK_FALSE(o.report.ok());
        CHECK(o.generation_error.has_value());
    }
}
