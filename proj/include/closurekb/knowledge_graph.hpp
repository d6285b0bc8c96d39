#pragma once
// Typed knowledge graph of optimization-modeling entities.
//
// Executability edges (used_in, depends_on) are stored in requirement
// direction: src needs dst to be well-defined (constraint -> variable,
// constraint -> parameter, variable -> index set). aligns_to links a paper
// concept to the code entity that realizes it.

#include <closurekb/error.hpp>
#include <closurekb/model_dsl.hpp>

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace closurekb::kg {

class UnknownEntity : public Error {
public:
    explicit UnknownEntity(const std::string& id) : Error("unknown entity: " + id), id_(id) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class ConflictingEntity : public Error {
public:
    explicit ConflictingEntity(const std::string& id)
        : Error("entity re-ingested with a different kind: " + id), id_(id) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class DanglingRelation : public Error {
public:
    using Error::Error;
};
class SchemaViolation : public Error {
public:
    using Error::Error;
};
class UnresolvedReference : public Error {
public:
    using Error::Error;
};
class InvalidEdge : public Error {
public:
    using Error::Error;
};
class FrozenGraph : public Error {
public:
    FrozenGraph() : Error("graph is frozen") {}
};

enum class EntityKind {
    decision_variable,
    parameter,
    index_set,
    constraint,
    objective,
    auxiliary_rule,
    concept_,
};
enum class Source { code, paper };
enum class EdgeKind { used_in, depends_on, aligns_to };
enum class Direction { out, in };

std::string_view to_string(EntityKind k);
std::string_view to_string(Source s);
std::string_view to_string(EdgeKind k);
std::optional<EntityKind> entity_kind_from_string(std::string_view s);
std::optional<Source> source_from_string(std::string_view s);
std::optional<EdgeKind> edge_kind_from_string(std::string_view s);

class EdgeKinds {
public:
    constexpr EdgeKinds() = default;
    constexpr EdgeKinds(std::initializer_list<EdgeKind> kinds) {
        for (EdgeKind k : kinds) bits_ |= bit(k);
    }
    constexpr bool contains(EdgeKind k) const { return (bits_ & bit(k)) != 0; }
    constexpr bool empty() const { return bits_ == 0; }

private:
    static constexpr unsigned bit(EdgeKind k) { return 1u << static_cast<unsigned>(k); }
    unsigned bits_ = 0;
};

inline constexpr EdgeKinds kExecutability{EdgeKind::used_in, EdgeKind::depends_on};

// Well-known keys of Entity::fields.
namespace field {
inline constexpr const char* solver_symbol = "solver_symbol";
inline constexpr const char* solver_symbol_hint = "solver_symbol_hint";
inline constexpr const char* domain = "domain";
inline constexpr const char* index_sets = "index_sets";  // comma separated
inline constexpr const char* arity = "arity";
inline constexpr const char* range = "range";      // "lo..hi"
inline constexpr const char* members = "members";  // comma separated
inline constexpr const char* data = "data";        // MiniModel data literal
inline constexpr const char* bounds = "bounds";    // "lo,hi"
inline constexpr const char* expression = "expression";  // full MiniModel statement
inline constexpr const char* snippet = "snippet";
inline constexpr const char* aliases = "aliases";  // comma separated
}  // namespace field

struct Entity {
    std::string id;
    EntityKind kind = EntityKind::concept_;
    std::string name;
    std::string description;
    std::map<std::string, std::string> fields;
    Source source = Source::code;

    std::string field_or(const std::string& key, std::string fallback = {}) const;
    bool operator==(const Entity&) const = default;
};

struct Edge {
    std::string src;
    std::string dst;
    EdgeKind kind = EdgeKind::used_in;
    auto operator<=>(const Edge&) const = default;
};

class KnowledgeGraph {
public:
    // Adds or refreshes an entity. Re-adding an id with a different kind
    // raises ConflictingEntity; same kind replaces the record.
    void add_entity(Entity entity);
    // Returns false when the edge already exists.
    bool add_edge(Edge edge);

    const Entity& entity(const std::string& id) const;
    const Entity* find(const std::string& id) const;
    bool contains(const std::string& id) const { return entities_.count(id) > 0; }

    const std::map<std::string, Entity>& entities() const noexcept { return entities_; }
    const std::set<Edge>& edges() const noexcept { return edges_; }
    std::size_t size() const noexcept { return entities_.size(); }

    // Endpoint ids of matching edges incident to `id`, sorted and unique.
    std::vector<std::string> neighbors(const std::string& id, EdgeKinds kinds,
                                       Direction direction) const;

    // Code entities whose solver_symbol equals `symbol`, sorted by id.
    std::vector<const Entity*> by_symbol(const std::string& symbol) const;

    void freeze() noexcept { frozen_ = true; }
    bool frozen() const noexcept { return frozen_; }

    // Referential-integrity audit; empty when the graph is consistent.
    std::vector<std::string> audit() const;

    bool operator==(const KnowledgeGraph& other) const {
        return entities_ == other.entities_ && edges_ == other.edges_;
    }

private:
    void check_writable() const {
        if (frozen_) throw FrozenGraph();
    }

    std::map<std::string, Entity> entities_;
    std::set<Edge> edges_;
    std::map<std::string, std::vector<Edge>> out_;
    std::map<std::string, std::vector<Edge>> in_;
    bool frozen_ = false;
};

std::vector<std::string> neighbors(const KnowledgeGraph& graph, const std::string& id,
                                   EdgeKinds kinds, Direction direction);

// ---- ingestion ------------------------------------------------------------

EntityKind entity_kind_for(dsl::SymbolKind kind);

// One entity per declaration, used_in edges to referenced variables and
// parameters, depends_on edges to referenced index sets and from indexed
// declarations to their index sets. References must resolve within the
// model or to code entities already in the graph.
std::vector<std::string> ingest_model(const dsl::ModelAst& ast, const dsl::SymbolTable& table,
                                      KnowledgeGraph& graph);

struct ParsedModel {
    dsl::ModelAst ast;
    dsl::SymbolTable table;
};
// Ingests all declarations first, then all references, so models may refer
// to each other's symbols regardless of order.
std::vector<std::string> ingest_models(const std::vector<ParsedModel>& models,
                                       KnowledgeGraph& graph);

struct CardRelation {
    EdgeKind kind = EdgeKind::depends_on;
    std::string target;  // concept name
};

// Structured description of a modeling concept from the literature.
// Relations read naturally: "A used_in B" (A is used in B), "A depends_on B".
struct ConceptCard {
    std::string name;
    EntityKind kind = EntityKind::concept_;
    std::string description;
    std::optional<std::string> solver_symbol_hint;
    std::string snippet;
    std::vector<CardRelation> relations;
    std::vector<std::string> aliases;
};

std::string card_id(std::string_view name);
std::vector<std::string> ingest_concept_cards(const std::vector<ConceptCard>& cards,
                                              KnowledgeGraph& graph);
std::vector<ConceptCard> parse_concept_cards(std::string_view json_text);
// Inverse of parse_concept_cards; empty optional fields are omitted.
std::string concept_cards_to_json(const std::vector<ConceptCard>& cards);

// ---- alignment ------------------------------------------------------------

struct Ambiguity {
    std::string paper_id;
    std::vector<std::string> candidates;
};

struct AlignmentResult {
    std::vector<Edge> edges;
    std::vector<Ambiguity> ambiguities;
};

// Case-fold and drop `_`, `-`, whitespace and subscript braces.
std::string normalize_name(std::string_view name);

AlignmentResult align(KnowledgeGraph& graph);

// Copies each used_in/depends_on edge between two paper entities onto their
// code realizations when both ends carry exactly one aligns_to edge. Returns
// the edges that were new. Run after align.
std::vector<Edge> lift_card_relations(KnowledgeGraph& graph);

// ---- persistence ----------------------------------------------------------

std::string save(const KnowledgeGraph& graph);
KnowledgeGraph load(std::string_view document);

}  // namespace closurekb::kg
