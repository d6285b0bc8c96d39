#include <closurekb/knowledge_graph.hpp>

#include <json.hpp>

namespace closurekb::kg {

using nlohmann::json;

namespace {

void require_keys(const json& obj, std::initializer_list<const char*> keys, const char* what) {
    if (!obj.is_object()) throw SchemaViolation(std::string(what) + ": expected an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) {
            throw SchemaViolation(std::string(what) + ": unknown key '" + key + "'");
        }
    }
    for (const char* key : keys) {
        if (!obj.contains(key)) {
            throw SchemaViolation(std::string(what) + ": missing key '" + key + "'");
        }
    }
}

std::string string_at(const json& obj, const char* key, const char* what) {
    const json& v = obj.at(key);
    if (!v.is_string()) {
        throw SchemaViolation(std::string(what) + ": '" + key + "' must be a string");
    }
    return v.get<std::string>();
}

}  // namespace

std::string save(const KnowledgeGraph& graph) {
    json entities = json::array();
    for (const auto& [id, e] : graph.entities()) {
        json fields = json::object();
        for (const auto& [k, v] : e.fields) fields[k] = v;
        entities.push_back({{"id", e.id},
                            {"kind", std::string(to_string(e.kind))},
                            {"name", e.name},
                            {"description", e.description},
                            {"source", std::string(to_string(e.source))},
                            {"fields", std::move(fields)}});
    }
    json edges = json::array();
    for (const Edge& e : graph.edges()) {
        edges.push_back({{"src", e.src}, {"dst", e.dst}, {"kind", std::string(to_string(e.kind))}});
    }
    json doc = {{"version", 1}, {"entities", std::move(entities)}, {"edges", std::move(edges)}};
    return doc.dump(2) + "\n";
}

KnowledgeGraph load(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw SchemaViolation(std::string("knowledge-unit file: ") + e.what());
    }
    require_keys(doc, {"version", "entities", "edges"}, "knowledge-unit file");
    if (doc.at("version") != 1) throw SchemaViolation("knowledge-unit file: unsupported version");
    if (!doc.at("entities").is_array() || !doc.at("edges").is_array()) {
        throw SchemaViolation("knowledge-unit file: entities and edges must be arrays");
    }

    KnowledgeGraph graph;
    for (const json& item : doc.at("entities")) {
        require_keys(item, {"id", "kind", "name", "description", "source", "fields"}, "entity");
        Entity e;
        e.id = string_at(item, "id", "entity");
        auto kind = entity_kind_from_string(string_at(item, "kind", "entity"));
        if (!kind) throw SchemaViolation("entity '" + e.id + "': unknown kind");
        auto source = source_from_string(string_at(item, "source", "entity"));
        if (!source) throw SchemaViolation("entity '" + e.id + "': unknown source");
        e.kind = *kind;
        e.source = *source;
        e.name = string_at(item, "name", "entity");
        e.description = string_at(item, "description", "entity");
        const json& fields = item.at("fields");
        if (!fields.is_object()) throw SchemaViolation("entity '" + e.id + "': fields must be an object");
        for (const auto& [k, v] : fields.items()) {
            if (!v.is_string()) throw SchemaViolation("entity '" + e.id + "': field values are strings");
            e.fields[k] = v.get<std::string>();
        }
        if (graph.contains(e.id)) throw SchemaViolation("duplicate entity id '" + e.id + "'");
        graph.add_entity(std::move(e));
    }
    for (const json& item : doc.at("edges")) {
        require_keys(item, {"src", "dst", "kind"}, "edge");
        Edge e;
        e.src = string_at(item, "src", "edge");
        e.dst = string_at(item, "dst", "edge");
        auto kind = edge_kind_from_string(string_at(item, "kind", "edge"));
        if (!kind) throw SchemaViolation("edge " + e.src + "->" + e.dst + ": unknown kind");
        e.kind = *kind;
        if (!graph.contains(e.src) || !graph.contains(e.dst)) {
            throw SchemaViolation("edge " + e.src + "->" + e.dst + ": dangling endpoint");
        }
        if (e.src == e.dst) throw SchemaViolation("edge " + e.src + ": self-loop");
        if (!graph.add_edge(e)) throw SchemaViolation("duplicate edge " + e.src + "->" + e.dst);
    }
    return graph;
}

}  // namespace closurekb::kg
