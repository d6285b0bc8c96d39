#include <closurekb/knowledge_graph.hpp>

#include <algorithm>

namespace closurekb::kg {

namespace {

constexpr std::pair<EntityKind, std::string_view> kEntityKinds[] = {
    {EntityKind::decision_variable, "decision_variable"},
    {EntityKind::parameter, "parameter"},
    {EntityKind::index_set, "index_set"},
    {EntityKind::constraint, "constraint"},
    {EntityKind::objective, "objective"},
    {EntityKind::auxiliary_rule, "auxiliary_rule"},
    {EntityKind::concept_, "concept"},
};

constexpr std::pair<EdgeKind, std::string_view> kEdgeKinds[] = {
    {EdgeKind::used_in, "used_in"},
    {EdgeKind::depends_on, "depends_on"},
    {EdgeKind::aligns_to, "aligns_to"},
};

}  // namespace

std::string_view to_string(EntityKind k) {
    for (auto [kind, name] : kEntityKinds)
        if (kind == k) return name;
    return "concept";
}

std::string_view to_string(Source s) {
    return s == Source::code ? "code" : "paper";
}

std::string_view to_string(EdgeKind k) {
    for (auto [kind, name] : kEdgeKinds)
        if (kind == k) return name;
    return "used_in";
}

std::optional<EntityKind> entity_kind_from_string(std::string_view s) {
    for (auto [kind, name] : kEntityKinds)
        if (name == s) return kind;
    return std::nullopt;
}

std::optional<Source> source_from_string(std::string_view s) {
    if (s == "code") return Source::code;
    if (s == "paper") return Source::paper;
    return std::nullopt;
}

std::optional<EdgeKind> edge_kind_from_string(std::string_view s) {
    for (auto [kind, name] : kEdgeKinds)
        if (name == s) return kind;
    return std::nullopt;
}

std::string Entity::field_or(const std::string& key, std::string fallback) const {
    auto it = fields.find(key);
    return it == fields.end() ? fallback : it->second;
}

void KnowledgeGraph::add_entity(Entity entity) {
    check_writable();
    auto it = entities_.find(entity.id);
    if (it != entities_.end()) {
        if (it->second.kind != entity.kind) throw ConflictingEntity(entity.id);
        it->second = std::move(entity);
        return;
    }
    std::string id = entity.id;
    entities_.emplace(std::move(id), std::move(entity));
}

bool KnowledgeGraph::add_edge(Edge edge) {
    check_writable();
    if (!contains(edge.src)) throw UnknownEntity(edge.src);
    if (!contains(edge.dst)) throw UnknownEntity(edge.dst);
    if (edge.src == edge.dst) throw InvalidEdge("self-loop on " + edge.src);
    if (!edges_.insert(edge).second) return false;
    out_[edge.src].push_back(edge);
    in_[edge.dst].push_back(edge);
    return true;
}

const Entity& KnowledgeGraph::entity(const std::string& id) const {
    auto it = entities_.find(id);
    if (it == entities_.end()) throw UnknownEntity(id);
    return it->second;
}

const Entity* KnowledgeGraph::find(const std::string& id) const {
    auto it = entities_.find(id);
    return it == entities_.end() ? nullptr : &it->second;
}

std::vector<std::string> KnowledgeGraph::neighbors(const std::string& id, EdgeKinds kinds,
                                                   Direction direction) const {
    if (!contains(id)) throw UnknownEntity(id);
    const auto& adjacency = direction == Direction::out ? out_ : in_;
    std::vector<std::string> out;
    auto it = adjacency.find(id);
    if (it == adjacency.end()) return out;
    for (const Edge& e : it->second) {
        if (kinds.contains(e.kind)) out.push_back(direction == Direction::out ? e.dst : e.src);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<const Entity*> KnowledgeGraph::by_symbol(const std::string& symbol) const {
    std::vector<const Entity*> out;
    for (const auto& [id, e] : entities_) {
        if (e.source != Source::code) continue;
        auto it = e.fields.find(field::solver_symbol);
        if (it != e.fields.end() && it->second == symbol) out.push_back(&e);
    }
    return out;
}

std::vector<std::string> KnowledgeGraph::audit() const {
    std::vector<std::string> problems;
    for (const Edge& e : edges_) {
        if (!contains(e.src)) problems.push_back("edge source missing: " + e.src);
        if (!contains(e.dst)) problems.push_back("edge target missing: " + e.dst);
        if (e.src == e.dst) problems.push_back("self-loop: " + e.src);
    }
    for (const auto& [id, e] : entities_) {
        if (id != e.id) problems.push_back("id mismatch: " + id);
        if (e.source == Source::code && !e.fields.count(field::solver_symbol)) {
            problems.push_back("code entity without solver_symbol: " + id);
        }
    }
    return problems;
}

std::vector<std::string> neighbors(const KnowledgeGraph& graph, const std::string& id,
                                   EdgeKinds kinds, Direction direction) {
    return graph.neighbors(id, kinds, direction);
}

}  // namespace closurekb::kg
