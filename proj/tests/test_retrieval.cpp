#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <closurekb/retrieval.hpp>

#include <algorithm>
#include <random>

using namespace closurekb;
using namespace closurekb::retrieval;
using kg::EntityKind;

namespace {

// Small demand-response style graph: one constraint realized in code and
// two concept cards aligned to it.
kg::KnowledgeGraph dr_graph() {
    kg::KnowledgeGraph g;
    dsl::ModelAst ast = dsl::parse_model(
        "set T = 1..12; set Tstar = 4..6;"
        "param slots_per_hour = 2; param Bref{Tstar} = [5, 5, 5]; param dLmin = 3;"
        "var m01{T} binary;"
        "con loadReduction: sum{t in Tstar} (Bref[t] - 4*m01[t]) >= dLmin;"
        "con m01_init: m01[1] = 0;");
    kg::ingest_model(ast, dsl::extract_symbols(ast), g);
    std::vector<kg::ConceptCard> cards{
        {"load-reduction constraint", EntityKind::constraint,
         "Reduced consumption during the event must reach a minimum.", "loadReduction",
         "Baseline minus actual load summed over event slots is at least the target.", {}, {}},
        {"demand-response event", EntityKind::concept_, "A window of requested curtailment.",
         std::nullopt, "The utility announces an event window.", {}, {"DR event"}},
        {"incentive price", EntityKind::parameter,
         "Compensation paid per kWh of verified reduction.", std::nullopt,
         "The incentive mechanism rewards reduction relative to the baseline.", {}, {}},
    };
    cards[0].relations.push_back({kg::EdgeKind::depends_on, "demand-response event"});
    kg::ingest_concept_cards(cards, g);
    kg::align(g);
    return g;
}

std::vector<std::string> ids_of(const std::vector<Snippet>& s) {
    std::vector<std::string> out;
    for (const auto& x : s) out.push_back(x.id);
    return out;
}

}  // namespace

TEST_CASE("understand_query: add constraint for the event") {
    kg::KnowledgeGraph g = dr_graph();
    ParsedQuery q = understand_query("Add a load-reduction constraint for the demand-response event", g);
    CHECK(q.intents == std::vector<Intent>{Intent::add_constraint});
    CHECK(q.resolved_ids() ==
          std::vector<std::string>{"paper:load-reduction-constraint", "paper:demand-response-event"});
    CHECK(q.entities[0].surface == "load-reduction constraint");
}

TEST_CASE("understand_query: explain and generate") {
    kg::KnowledgeGraph g = dr_graph();
    ParsedQuery q = understand_query(
        "explain the constraints of machine m01 and generate corresponding LINGO code", g);
    CHECK(q.intents == std::vector<Intent>{Intent::explain_constraint, Intent::generate_model});
    CHECK(q.resolved_ids() == std::vector<std::string>{"m01"});
    // explain swaps the variable for the constraints that use it
    CHECK(select_seeds(q, g) == std::vector<std::string>{"loadReduction", "m01_init"});
}

TEST_CASE("select_seeds: explaining an aligned concept uses its code realization") {
    kg::KnowledgeGraph g = dr_graph();
    std::vector<kg::ConceptCard> cards{
        {"machine m01", EntityKind::decision_variable, "On/off state of the first core machine.", "m01", "", {}, {}},
        {"m01 starvation rule", EntityKind::constraint, "The machine needs stocked upstream buffers.",
         std::nullopt, "", {}, {}},
    };
    cards[0].relations.push_back({kg::EdgeKind::used_in, "m01 starvation rule"});
    kg::ingest_concept_cards(cards, g);
    kg::align(g);
    ParsedQuery q = understand_query("explain the constraints of machine m01", g);
    CHECK(q.resolved_ids() == std::vector<std::string>{"paper:machine-m01"});
    CHECK(select_seeds(q, g) == std::vector<std::string>{"loadReduction", "m01_init"});

    // Without a realization the literature relation is followed.
    kg::KnowledgeGraph papers;
    kg::ingest_concept_cards(cards, papers);
    ParsedQuery p = understand_query("explain the constraints of machine m01", papers);
    CHECK(select_seeds(p, papers) == std::vector<std::string>{"paper:m01-starvation-rule"});
}

TEST_CASE("understand_query: fallback, empty, aliases") {
    kg::KnowledgeGraph empty;
    ParsedQuery q = understand_query("zzzz qqqq", empty);
    CHECK(q.intents == std::vector<Intent>{Intent::unknown});
    CHECK(q.entities.empty());
    CHECK_THROWS_AS(understand_query("  ", empty), EmptyQuery);
    CHECK_THROWS_AS(understand_query("", empty), EmptyQuery);

    kg::KnowledgeGraph g = dr_graph();
    CHECK(understand_query("during the DR event", g).resolved_ids() ==
          std::vector<std::string>{"paper:demand-response-event"});
}

TEST_CASE("understand_query: intent ordering and table") {
    kg::KnowledgeGraph g;
    auto intents = [&](const char* s) { return understand_query(s, g).intents; };
    CHECK(intents("generate the model, then introduce constraints") ==
          std::vector<Intent>{Intent::generate_model, Intent::add_constraint});
    CHECK(intents("change the profit objective") == std::vector<Intent>{Intent::modify_objective});
    CHECK(intents("what is the value of lambda") == std::vector<Intent>{Intent::parameter_query});
    CHECK(intents("add a bonus") == std::vector<Intent>{Intent::unknown});
    CHECK(intents("reward in the profit") == std::vector<Intent>{Intent::modify_objective});
}

TEST_CASE("understand_query: numbers with units and hour windows") {
    kg::KnowledgeGraph g = dr_graph();
    ParsedQuery q = understand_query("reduce 120 kW (at least 30.5 kWh) at $0.3/kWh during hours 2-3", g);
    REQUIRE(q.numbers.size() == 3);
    CHECK(q.numbers[0].value == 120.0);
    CHECK(q.numbers[0].unit == "kW");
    CHECK(q.numbers[1].value == 30.5);
    CHECK(q.numbers[1].unit == "kWh");
    CHECK(q.numbers[2].value == doctest::Approx(0.3));
    CHECK(q.numbers[2].unit == "$/kWh");
    REQUIRE(q.windows.size() == 1);
    CHECK(q.windows[0].first_hour == 2);
    CHECK(q.windows[0].last_hour == 3);
    CHECK(q.windows[0].first_slot == 3);
    CHECK(q.windows[0].last_slot == 6);

    ParsedQuery nth = understand_query("shed load in the 5th hour", g);
    REQUIRE(nth.windows.size() == 1);
    CHECK(nth.windows[0].first_slot == 9);
    CHECK(nth.windows[0].last_slot == 10);

    ParsedQuery no_slots = understand_query("hours 16\xe2\x80\x93" "17", kg::KnowledgeGraph{});
    REQUIRE(no_slots.windows.size() == 1);
    CHECK(no_slots.windows[0].last_hour == 17);
    CHECK_FALSE(no_slots.windows[0].first_slot.has_value());
}

TEST_CASE("semantic_search: TF-IDF basics") {
    SemanticIndex two({{"a", "battery buffer level", "a"}, {"b", "machine power draw", "b"}});
    CHECK(semantic_search(two, "buffer", 2).front().id == "a");
    SemanticIndex three({{"x", "one", "x"}, {"y", "two", "y"}, {"z", "three", "z"}});
    CHECK(semantic_search(three, "one", 10).size() == 3);
    SemanticIndex twins({{"q2", "same text", "q2"}, {"q1", "same text", "q1"}});
    auto hits = semantic_search(twins, "same", 2);
    CHECK(hits[0].id == "q1");
    CHECK(hits[0].score == hits[1].score);
}

TEST_CASE("semantic_search: smooth idf by hand") {
    TfidfEmbedder e({"a b", "a c"});
    REQUIRE(e.vocabulary() == std::vector<std::string>{"a", "b", "c"});
    auto v = e.embed("a b");
    double idf_a = std::log(3.0 / 3.0) + 1.0, idf_b = std::log(3.0 / 2.0) + 1.0;
    double norm = std::sqrt(idf_a * idf_a + idf_b * idf_b);
    CHECK(v[0] == doctest::Approx(idf_a / norm));
    CHECK(v[1] == doctest::Approx(idf_b / norm));
    CHECK(v[2] == 0.0);
}

TEST_CASE("property: ranking independent of insertion order") {
    std::vector<Document> docs;
    const char* words[] = {"buffer", "machine", "price", "event", "load", "slot", "profit"};
    std::mt19937 rng(3);
    for (int i = 0; i < 40; ++i) {
        std::string text;
        for (int w = 0; w < 5; ++w) text += std::string(words[rng() % 7]) + " ";
        docs.push_back({"d" + std::to_string(i), text, text});
    }
    auto baseline = semantic_search(SemanticIndex(docs), "machine load price", 40);
    for (int round = 0; round < 20; ++round) {
        std::shuffle(docs.begin(), docs.end(), rng);
        auto again = semantic_search(SemanticIndex(docs), "machine load price", 40);
        REQUIRE(ids_of(again) == ids_of(baseline));
        for (std::size_t i = 1; i < again.size(); ++i) CHECK(again[i - 1].score >= again[i].score);
    }
}

TEST_CASE("custom embedder plugs in") {
    struct LengthEmbedder : Embedder {
        std::size_t dimension() const override { return 2; }
        std::vector<double> embed(std::string_view t) const override {
            return {1.0, static_cast<double>(t.size())};
        }
    };
    SemanticIndex idx({{"short", "ab", "ab"}, {"long", "abcdefghij", "abcdefghij"}},
                      std::make_shared<LengthEmbedder>());
    CHECK(semantic_search(idx, "abcdefghi", 1).front().id == "long");
}

TEST_CASE("structural_retrieve") {
    kg::KnowledgeGraph g = dr_graph();
    CHECK(structural_retrieve(g, {}).empty());
    std::set<std::string> code = structural_retrieve(g, {"loadReduction"});
    CHECK(code == std::set<std::string>{"Bref", "T", "Tstar", "dLmin", "loadReduction", "m01"});
    std::set<std::string> via_paper = structural_retrieve(g, {"paper:load-reduction-constraint"});
    std::set<std::string> expected = code;
    expected.insert("paper:load-reduction-constraint");
    expected.insert("paper:demand-response-event");
    CHECK(via_paper == expected);
    CHECK_THROWS_AS(structural_retrieve(g, {"nope"}), kg::UnknownEntity);
}

TEST_CASE("fuse: end to end on the demand-response graph") {
    kg::KnowledgeGraph g = dr_graph();
    g.freeze();
    SemanticIndex idx = index_snippets(g);
    const char* text = "Add a load-reduction constraint for the demand-response event with incentive payments";
    RetrievalResult r = retrieve(text, g, idx);
    CHECK(dep::is_well_defined(g, r.structural).ok);
    CHECK(r.structural.count("loadReduction"));
    CHECK(ids_of(r.snippets) == std::vector<std::string>{"paper:incentive-price"});
    CHECK(to_json(retrieve(text, g, idx)) == to_json(r));
}

TEST_CASE("fuse: isolated seed, no snippets; unclosed input") {
    kg::KnowledgeGraph g = dr_graph();
    ParsedQuery q = understand_query("dLmin", g);
    RetrievalResult r = fuse(q, {"dLmin"}, {}, g);
    CHECK(r.structural == std::set<std::string>{"dLmin"});
    CHECK(r.snippets.empty());
    CHECK_THROWS_AS(fuse(q, {"loadReduction"}, {}, g), NotClosed);
}

TEST_CASE("fuse: truncation and dedup") {
    kg::KnowledgeGraph g = dr_graph();
    std::vector<Snippet> hits;
    for (int i = 0; i < 9; ++i) hits.push_back({"s" + std::to_string(i), 1.0 - i * 0.1, "t"});
    hits.insert(hits.begin(), Snippet{"dLmin", 2.0, "x"});
    ParsedQuery q = understand_query("dLmin", g);
    RetrievalResult r = fuse(q, {"dLmin"}, hits, g);
    CHECK(ids_of(r.snippets) == std::vector<std::string>{"s0", "s1", "s2", "s3", "s4"});
    CHECK(fuse(q, {"dLmin"}, hits, g, 2).snippets.size() == 2);
}
