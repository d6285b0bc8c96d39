#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <closurekb/knowledge_graph.hpp>

#include "support/random_graph.hpp"

#include <random>

using namespace closurekb;
using namespace closurekb::kg;

namespace {

const char* kListing6 = "set T = 1..3;\n"
                        "var y{T} binary;\n"
                        "var B13{T} integer;\n"
                        "con c{t in T : t >= 2}: y[t] <= B13[t-1];\n";

KnowledgeGraph ingest_text(const std::string& text) {
    KnowledgeGraph g;
    dsl::ModelAst ast = dsl::parse_model(text);
    ingest_model(ast, dsl::extract_symbols(ast), g);
    return g;
}

bool has_edge(const KnowledgeGraph& g, const std::string& s, const std::string& d, EdgeKind k) {
    return g.edges().count(Edge{s, d, k}) > 0;
}

Entity code_entity(const std::string& id, EntityKind kind) {
    Entity e;
    e.id = id;
    e.name = id;
    e.kind = kind;
    e.fields[field::solver_symbol] = id;
    return e;
}

}  // namespace

TEST_CASE("ingest_model: Listing-6 transcription") {
    KnowledgeGraph g = ingest_text(kListing6);
    CHECK(g.size() == 4);
    CHECK(g.entity("c").kind == EntityKind::constraint);
    CHECK(g.entity("y").kind == EntityKind::decision_variable);
    CHECK(g.entity("T").kind == EntityKind::index_set);
    CHECK(has_edge(g, "c", "y", EdgeKind::used_in));
    CHECK(has_edge(g, "c", "B13", EdgeKind::used_in));
    CHECK(has_edge(g, "c", "T", EdgeKind::depends_on));
    CHECK(has_edge(g, "y", "T", EdgeKind::depends_on));
    CHECK(has_edge(g, "B13", "T", EdgeKind::depends_on));
    CHECK(g.edges().size() == 5);
    CHECK(g.entity("c").field_or(field::expression) ==
          "con c{t in T : t >= 2}: y[t] <= B13[t-1];");
    CHECK(g.entity("y").field_or(field::domain) == "binary");
    for (const auto& [id, e] : g.entities()) CHECK(e.field_or(field::solver_symbol) == id);
    CHECK(g.audit().empty());
}

TEST_CASE("ingest_model: lone set has no edges") {
    KnowledgeGraph g = ingest_text("set T = 1..2;");
    CHECK(g.size() == 1);
    CHECK(g.edges().empty());
    CHECK(g.entity("T").field_or(field::range) == "1..2");
}

TEST_CASE("ingest_model: parameters are used_in their sites") {
    KnowledgeGraph g = ingest_text("set T = 1..2; param p{T} = [1, 2]; var x{T} binary;"
                                   "max obj: sum{t in T} p[t]*x[t];");
    CHECK(has_edge(g, "obj", "p", EdgeKind::used_in));
    CHECK(has_edge(g, "obj", "x", EdgeKind::used_in));
    CHECK(has_edge(g, "obj", "T", EdgeKind::depends_on));
    CHECK(has_edge(g, "p", "T", EdgeKind::depends_on));
    CHECK(g.entity("obj").kind == EntityKind::objective);
    CHECK(g.entity("p").field_or(field::data) == "[1, 2]");
}

TEST_CASE("ingest_model: kind conflict") {
    KnowledgeGraph g = ingest_text("set T = 1..2; var y{T} binary;");
    dsl::ModelAst ast = dsl::parse_model("param y = 3;");
    CHECK_THROWS_AS(ingest_model(ast, dsl::extract_symbols(ast), g), ConflictingEntity);
    CHECK(g.entity("y").kind == EntityKind::decision_variable);
}

TEST_CASE("ingest_model: unresolved references are rejected") {
    KnowledgeGraph g;
    dsl::ModelAst ast = dsl::parse_model("var x binary; con c: x <= cap;");
    CHECK_THROWS_AS(ingest_model(ast, dsl::extract_symbols(ast), g), UnresolvedReference);
}

TEST_CASE("ingest_models: cross-model references resolve in any order") {
    dsl::ModelAst a = dsl::parse_model("con c: x <= cap;");
    dsl::ModelAst b = dsl::parse_model("var x binary; param cap = 1;");
    KnowledgeGraph g;
    ingest_models({{a, dsl::extract_symbols(a)}, {b, dsl::extract_symbols(b)}}, g);
    CHECK(has_edge(g, "c", "x", EdgeKind::used_in));
    CHECK(has_edge(g, "c", "cap", EdgeKind::used_in));
}

TEST_CASE("ingest_concept_cards") {
    KnowledgeGraph g;
    SUBCASE("single card") {
        ConceptCard c;
        c.name = "incentive price";
        c.kind = EntityKind::parameter;
        c.snippet = "Compensation paid per unit of reduced load.";
        auto ids = ingest_concept_cards({c}, g);
        REQUIRE(ids.size() == 1);
        CHECK(ids[0] == "paper:incentive-price");
        CHECK(g.entity(ids[0]).source == Source::paper);
        CHECK(g.entity(ids[0]).kind == EntityKind::parameter);
    }
    SUBCASE("dangling relation leaves the graph untouched") {
        ConceptCard c;
        c.name = "load reduction";
        c.kind = EntityKind::constraint;
        c.relations.push_back({EdgeKind::depends_on, "baseline load"});
        CHECK_THROWS_AS(ingest_concept_cards({c}, g), DanglingRelation);
        CHECK(g.size() == 0);
    }
    SUBCASE("empty list") {
        CHECK(ingest_concept_cards({}, g).empty());
        CHECK(g.size() == 0);
    }
    SUBCASE("relations are stored in requirement direction") {
        ConceptCard power{"machine power", EntityKind::parameter, "", std::nullopt, "", {}, {}};
        ConceptCard status{"machine status", EntityKind::decision_variable, "", std::nullopt, "", {}, {}};
        ConceptCard load{"load reduction", EntityKind::constraint, "", std::nullopt, "", {}, {}};
        power.relations.push_back({EdgeKind::used_in, "load reduction"});
        load.relations.push_back({EdgeKind::depends_on, "machine status"});
        ingest_concept_cards({power, status, load}, g);
        CHECK(has_edge(g, "paper:load-reduction", "paper:machine-power", EdgeKind::used_in));
        CHECK(has_edge(g, "paper:load-reduction", "paper:machine-status", EdgeKind::depends_on));
    }
}

TEST_CASE("parse_concept_cards") {
    auto cards = parse_concept_cards(R"([
      {"name": "machine power", "kind": "parameter", "description": "rated draw",
       "solver_symbol_hint": "m11Power", "snippet": "power", "aliases": ["P_m"],
       "relations": [{"kind": "used_in", "target": "load reduction"}]}
    ])");
    REQUIRE(cards.size() == 1);
    CHECK(cards[0].solver_symbol_hint == std::optional<std::string>("m11Power"));
    CHECK(cards[0].aliases == std::vector<std::string>{"P_m"});
    CHECK(cards[0].relations[0].kind == EdgeKind::used_in);
    CHECK_THROWS_AS(parse_concept_cards(R"([{"name": "x", "kind": "variabel"}])"), SchemaViolation);
    CHECK_THROWS_AS(parse_concept_cards(R"([{"name": "x", "kind": "parameter", "extra": 1}])"),
                    SchemaViolation);
    CHECK_THROWS_AS(parse_concept_cards(
                        R"([{"name": "x", "kind": "parameter", "relations": [{"kind": "aligns_to", "target": "y"}]}])"),
                    SchemaViolation);
}

TEST_CASE("align: hint, ambiguity, empty") {
    KnowledgeGraph g;
    g.add_entity(code_entity("m11Power", EntityKind::parameter));
    g.add_entity(code_entity("m12Power", EntityKind::parameter));
    SUBCASE("hint gives one edge") {
        ConceptCard c{"machine power", EntityKind::parameter, "", "m11Power", "", {}, {}};
        ingest_concept_cards({c}, g);
        AlignmentResult r = align(g);
        REQUIRE(r.edges.size() == 1);
        CHECK(r.edges[0] == Edge{"paper:machine-power", "m11Power", EdgeKind::aligns_to});
        CHECK(r.ambiguities.empty());
        CHECK(has_edge(g, "paper:machine-power", "m11Power", EdgeKind::aligns_to));
    }
    SUBCASE("name collision is reported, not linked") {
        ConceptCard c{"m_Power", EntityKind::parameter, "", std::nullopt, "", {}, {}};
        ingest_concept_cards({c}, g);
        AlignmentResult r = align(g);
        CHECK(r.edges.empty());
        REQUIRE(r.ambiguities.size() == 1);
        CHECK(r.ambiguities[0].candidates == std::vector<std::string>{"m11Power", "m12Power"});
    }
    SUBCASE("exact name wins over digit-stripped match") {
        ConceptCard c{"M11_power", EntityKind::parameter, "", std::nullopt, "", {}, {}};
        ingest_concept_cards({c}, g);
        AlignmentResult r = align(g);
        REQUIRE(r.edges.size() == 1);
        CHECK(r.edges[0].dst == "m11Power");
    }
    SUBCASE("no paper entities") {
        AlignmentResult r = align(g);
        CHECK(r.edges.empty());
        CHECK(r.ambiguities.empty());
    }
}

TEST_CASE("lift_card_relations copies paper edges onto unique realizations") {
    KnowledgeGraph g;
    g.add_entity(code_entity("cap", EntityKind::constraint));
    g.add_entity(code_entity("rate", EntityKind::parameter));
    g.add_entity(code_entity("m11Power", EntityKind::parameter));
    g.add_entity(code_entity("m12Power", EntityKind::parameter));
    ingest_concept_cards({{"cap rule", EntityKind::constraint, "", "cap", "",
                           {{EdgeKind::depends_on, "tariff"}, {EdgeKind::depends_on, "m power"}}, {}},
                          {"tariff", EntityKind::parameter, "", "rate", "", {}, {}},
                          {"m power", EntityKind::parameter, "", std::nullopt, "", {}, {}}},
                         g);
    align(g);
    std::vector<Edge> lifted = lift_card_relations(g);
    // "m power" is ambiguous between the two power params, so only one edge lifts.
    CHECK(lifted == std::vector<Edge>{{"cap", "rate", EdgeKind::depends_on}});
    CHECK(has_edge(g, "cap", "rate", EdgeKind::depends_on));
    CHECK(lift_card_relations(g).empty());
}

TEST_CASE("align never links an ambiguous match (property)") {
    std::mt19937 rng(7);
    for (int round = 0; round < 200; ++round) {
        KnowledgeGraph g;
        std::string stem = "v";
        for (int r = round; r > 0; r /= 26) stem += static_cast<char>('a' + r % 26);
        int copies = 1 + static_cast<int>(rng() % 4);
        for (int k = 0; k < copies; ++k) {
            g.add_entity(code_entity(stem + std::to_string(10 + k), EntityKind::decision_variable));
        }
        bool hinted = rng() % 2;
        ConceptCard c{stem, EntityKind::decision_variable, "", std::nullopt, "", {}, {}};
        if (hinted) c.solver_symbol_hint = stem + "10";
        ingest_concept_cards({c}, g);
        AlignmentResult r = align(g);
        if (hinted || copies == 1) {
            CHECK(r.edges.size() == 1);
            CHECK(r.ambiguities.empty());
        } else {
            CHECK(r.edges.empty());
            REQUIRE(r.ambiguities.size() == 1);
            CHECK(r.ambiguities[0].candidates.size() == static_cast<std::size_t>(copies));
            CHECK(g.neighbors(card_id(stem), {EdgeKind::aligns_to}, Direction::out).empty());
        }
        CHECK(g.audit().empty());
    }
}

TEST_CASE("neighbors") {
    KnowledgeGraph g = ingest_text(kListing6);
    CHECK(neighbors(g, "c", {EdgeKind::used_in}, Direction::out) ==
          std::vector<std::string>{"B13", "y"});
    CHECK(neighbors(g, "T", kExecutability, Direction::in) ==
          std::vector<std::string>{"B13", "c", "y"});
    CHECK(neighbors(g, "c", {}, Direction::out).empty());
    CHECK_THROWS_AS(neighbors(g, "nope", kExecutability, Direction::out), UnknownEntity);
}

TEST_CASE("edge invariants") {
    KnowledgeGraph g = ingest_text(kListing6);
    CHECK_THROWS_AS(g.add_edge({"c", "c", EdgeKind::used_in}), InvalidEdge);
    CHECK_THROWS_AS(g.add_edge({"c", "ghost", EdgeKind::used_in}), UnknownEntity);
    CHECK_FALSE(g.add_edge({"c", "y", EdgeKind::used_in}));
    CHECK(g.audit().empty());
}

TEST_CASE("freeze blocks mutation") {
    KnowledgeGraph g = ingest_text(kListing6);
    g.freeze();
    CHECK(g.frozen());
    CHECK_THROWS_AS(g.add_entity(code_entity("z", EntityKind::parameter)), FrozenGraph);
    CHECK_THROWS_AS(g.add_edge({"y", "c", EdgeKind::used_in}), FrozenGraph);
}

TEST_CASE("save/load round trip") {
    SUBCASE("Listing-6 graph") {
        KnowledgeGraph g = ingest_text(kListing6);
        CHECK(load(save(g)) == g);
        CHECK(save(load(save(g))) == save(g));
    }
    SUBCASE("empty graph") {
        KnowledgeGraph g;
        KnowledgeGraph back = load(save(g));
        CHECK(back.size() == 0);
        CHECK(back.edges().empty());
    }
    SUBCASE("random graphs up to 200 entities") {
        for (std::uint32_t seed = 0; seed < 40; ++seed) {
            KnowledgeGraph g = closurekb::testing::random_graph(seed, 5 * seed + 1 > 200 ? 200 : 5 * seed + 1);
            KnowledgeGraph back = load(save(g));
            CHECK(back == g);
            CHECK(back.audit().empty());
        }
        KnowledgeGraph big = closurekb::testing::random_graph(99, 200);
        CHECK(load(save(big)) == big);
    }
}

TEST_CASE("load rejects malformed documents") {
    const std::string entity =
        R"({"id":"x","kind":"%K","name":"x","description":"","source":"code","fields":{}})";
    auto doc = [&](const std::string& kind, const std::string& extra = "",
                   const std::string& edges = "[]") {
        std::string e = entity;
        e.replace(e.find("%K"), 2, kind);
        return R"({"version":1,"entities":[)" + e + R"(],"edges":)" + edges + extra + "}";
    };
    CHECK_NOTHROW(load(doc("parameter")));
    CHECK_THROWS_AS(load(doc("variabel")), SchemaViolation);
    CHECK_THROWS_AS(load(doc("parameter", R"(,"extra":0)")), SchemaViolation);
    CHECK_THROWS_AS(load(doc("parameter", "", R"([{"src":"x","dst":"y","kind":"used_in"}])")),
                    SchemaViolation);
    CHECK_THROWS_AS(load(doc("parameter", "", R"([{"src":"x","dst":"x","kind":"used_in"}])")),
                    SchemaViolation);
    CHECK_THROWS_AS(load(R"({"version":1,"entities":[]})"), SchemaViolation);
    CHECK_THROWS_AS(load("not json"), SchemaViolation);
}
