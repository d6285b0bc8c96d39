#include <closurekb/knowledge_graph.hpp>

#include <json.hpp>

#include <cctype>

namespace closurekb::kg {

namespace {

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ",";
        out += parts[i];
    }
    return out;
}

Entity make_entity(const std::string& name, EntityKind kind) {
    Entity e;
    e.id = name;
    e.name = name;
    e.kind = kind;
    e.source = Source::code;
    e.fields[field::solver_symbol] = name;
    return e;
}

std::vector<Entity> declaration_entities(const dsl::ModelAst& ast) {
    std::vector<Entity> out;
    for (const auto& s : ast.sets) {
        Entity e = make_entity(s.name, EntityKind::index_set);
        e.fields[field::arity] = "0";
        if (s.is_range) {
            e.fields[field::range] = std::to_string(s.lo) + ".." + std::to_string(s.hi);
        } else {
            e.fields[field::members] = join(s.members);
        }
        out.push_back(std::move(e));
    }
    for (const auto& p : ast.params) {
        Entity e = make_entity(p.name, EntityKind::parameter);
        e.fields[field::arity] = std::to_string(p.index_sets.size());
        if (!p.index_sets.empty()) e.fields[field::index_sets] = join(p.index_sets);
        if (p.data) e.fields[field::data] = dsl::emit_data_literal(*p.data);
        out.push_back(std::move(e));
    }
    for (const auto& v : ast.vars) {
        Entity e = make_entity(v.name, EntityKind::decision_variable);
        e.fields[field::arity] = std::to_string(v.index_sets.size());
        e.fields[field::domain] = std::string(dsl::to_string(v.domain));
        if (!v.index_sets.empty()) e.fields[field::index_sets] = join(v.index_sets);
        if (v.bounds) {
            e.fields[field::bounds] =
                dsl::emit_number(v.bounds->first) + "," + dsl::emit_number(v.bounds->second);
        }
        out.push_back(std::move(e));
    }
    for (const auto& c : ast.constraints) {
        Entity e = make_entity(c.name, EntityKind::constraint);
        std::vector<std::string> sets;
        if (c.quantifier)
            for (const auto& b : c.quantifier->bindings) sets.push_back(b.set);
        e.fields[field::arity] = std::to_string(sets.size());
        if (!sets.empty()) e.fields[field::index_sets] = join(sets);
        e.fields[field::expression] = dsl::emit_constraint(c);
        out.push_back(std::move(e));
    }
    if (ast.objective) {
        Entity e = make_entity(ast.objective->name, EntityKind::objective);
        e.fields[field::arity] = "0";
        e.fields[field::domain] =
            ast.objective->sense == dsl::ObjectiveSense::max ? "max" : "min";
        e.fields[field::expression] = dsl::emit_objective(*ast.objective);
        out.push_back(std::move(e));
    }
    return out;
}

const Entity& resolve_code(const KnowledgeGraph& graph, const std::string& symbol,
                           const std::string& site) {
    if (const Entity* e = graph.find(symbol); e && e->source == Source::code) return *e;
    auto hits = graph.by_symbol(symbol);
    if (hits.size() == 1) return *hits.front();
    throw UnresolvedReference("'" + symbol + "' referenced by '" + site +
                              "' is not declared in the model or the graph");
}

void link_references(const dsl::ModelAst& ast, const dsl::SymbolTable& table,
                     KnowledgeGraph& graph) {
    for (const auto& [name, decl] : table.declarations) {
        for (const auto& set : decl.index_sets) {
            const Entity& target = resolve_code(graph, set, name);
            if (target.id != name) graph.add_edge({name, target.id, EdgeKind::depends_on});
        }
    }
    for (const auto& ref : table.references) {
        const Entity& target = resolve_code(graph, ref.name, ref.site);
        if (target.id == ref.site) continue;
        EdgeKind kind =
            target.kind == EntityKind::index_set ? EdgeKind::depends_on : EdgeKind::used_in;
        graph.add_edge({ref.site, target.id, kind});
    }
    (void)ast;
}

std::vector<std::string> add_declarations(const dsl::ModelAst& ast, KnowledgeGraph& graph) {
    std::vector<Entity> entities = declaration_entities(ast);
    for (const Entity& e : entities) {
        if (const Entity* existing = graph.find(e.id); existing && existing->kind != e.kind) {
            throw ConflictingEntity(e.id);
        }
    }
    std::vector<std::string> ids;
    for (Entity& e : entities) {
        ids.push_back(e.id);
        graph.add_entity(std::move(e));
    }
    return ids;
}

}  // namespace

EntityKind entity_kind_for(dsl::SymbolKind kind) {
    switch (kind) {
        case dsl::SymbolKind::set: return EntityKind::index_set;
        case dsl::SymbolKind::param: return EntityKind::parameter;
        case dsl::SymbolKind::var: return EntityKind::decision_variable;
        case dsl::SymbolKind::constraint: return EntityKind::constraint;
        case dsl::SymbolKind::objective: return EntityKind::objective;
    }
    return EntityKind::concept_;
}

std::vector<std::string> ingest_model(const dsl::ModelAst& ast, const dsl::SymbolTable& table,
                                      KnowledgeGraph& graph) {
    return ingest_models({ParsedModel{ast, table}}, graph);
}

std::vector<std::string> ingest_models(const std::vector<ParsedModel>& models,
                                       KnowledgeGraph& graph) {
    std::vector<std::string> ids;
    for (const auto& m : models) {
        auto added = add_declarations(m.ast, graph);
        ids.insert(ids.end(), added.begin(), added.end());
    }
    for (const auto& m : models) link_references(m.ast, m.table, graph);
    return ids;
}

std::string card_id(std::string_view name) {
    std::string slug;
    bool dash = false;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            if (dash && !slug.empty()) slug += '-';
            slug += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            dash = false;
        } else {
            dash = true;
        }
    }
    return "paper:" + slug;
}

std::vector<std::string> ingest_concept_cards(const std::vector<ConceptCard>& cards,
                                              KnowledgeGraph& graph) {
    std::map<std::string, std::string> by_name;  // card name -> id
    for (const auto& [id, e] : graph.entities()) {
        if (e.source == Source::paper) by_name[e.name] = id;
    }
    for (const ConceptCard& c : cards) {
        if (c.name.empty()) throw SchemaViolation("concept card without a name");
        by_name[c.name] = card_id(c.name);
    }
    std::vector<Edge> edges;
    for (const ConceptCard& c : cards) {
        std::string id = card_id(c.name);
        if (const Entity* existing = graph.find(id); existing && existing->kind != c.kind) {
            throw ConflictingEntity(id);
        }
        for (const CardRelation& r : c.relations) {
            if (r.kind == EdgeKind::aligns_to) {
                throw SchemaViolation("card '" + c.name + "': aligns_to is not a card relation");
            }
            auto it = by_name.find(r.target);
            if (it == by_name.end()) {
                throw DanglingRelation("card '" + c.name + "' relates to unknown concept '" +
                                       r.target + "'");
            }
            // "A used_in B" is stored as the requirement B -> A.
            if (r.kind == EdgeKind::used_in) {
                edges.push_back({it->second, id, EdgeKind::used_in});
            } else {
                edges.push_back({id, it->second, EdgeKind::depends_on});
            }
        }
    }
    std::vector<std::string> ids;
    for (const ConceptCard& c : cards) {
        Entity e;
        e.id = card_id(c.name);
        e.kind = c.kind;
        e.name = c.name;
        e.description = c.description;
        e.source = Source::paper;
        if (!c.snippet.empty()) e.fields[field::snippet] = c.snippet;
        if (c.solver_symbol_hint) e.fields[field::solver_symbol_hint] = *c.solver_symbol_hint;
        if (!c.aliases.empty()) e.fields[field::aliases] = join(c.aliases);
        ids.push_back(e.id);
        graph.add_entity(std::move(e));
    }
    for (Edge& e : edges) {
        if (e.src != e.dst) graph.add_edge(std::move(e));
    }
    return ids;
}

std::vector<ConceptCard> parse_concept_cards(std::string_view json_text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SchemaViolation(std::string("concept cards: ") + e.what());
    }
    if (doc.is_object() && doc.contains("cards")) doc = doc.at("cards");
    if (!doc.is_array()) throw SchemaViolation("concept cards: expected an array");

    auto str = [](const json& obj, const char* key, bool required) -> std::string {
        if (!obj.contains(key)) {
            if (required) throw SchemaViolation(std::string("concept card: missing '") + key + "'");
            return {};
        }
        if (!obj.at(key).is_string()) {
            throw SchemaViolation(std::string("concept card: '") + key + "' must be a string");
        }
        return obj.at(key).get<std::string>();
    };

    static const std::set<std::string> allowed = {
        "name", "kind", "description", "solver_symbol_hint", "snippet", "relations", "aliases"};
    std::vector<ConceptCard> cards;
    for (const json& item : doc) {
        if (!item.is_object()) throw SchemaViolation("concept card: expected an object");
        for (const auto& [key, _] : item.items()) {
            if (!allowed.count(key)) throw SchemaViolation("concept card: unknown key '" + key + "'");
        }
        ConceptCard c;
        c.name = str(item, "name", true);
        auto kind = entity_kind_from_string(str(item, "kind", true));
        if (!kind) throw SchemaViolation("concept card '" + c.name + "': unknown kind");
        c.kind = *kind;
        c.description = str(item, "description", false);
        c.snippet = str(item, "snippet", false);
        if (item.contains("solver_symbol_hint")) c.solver_symbol_hint = str(item, "solver_symbol_hint", true);
        if (item.contains("aliases")) {
            for (const json& a : item.at("aliases")) {
                if (!a.is_string()) throw SchemaViolation("concept card: aliases must be strings");
                c.aliases.push_back(a.get<std::string>());
            }
        }
        if (item.contains("relations")) {
            for (const json& r : item.at("relations")) {
                if (!r.is_object()) throw SchemaViolation("concept card: relation must be an object");
                auto k = edge_kind_from_string(str(r, "kind", true));
                if (!k || *k == EdgeKind::aligns_to) {
                    throw SchemaViolation("concept card '" + c.name + "': bad relation kind");
                }
                c.relations.push_back({*k, str(r, "target", true)});
            }
        }
        cards.push_back(std::move(c));
    }
    return cards;
}

std::string concept_cards_to_json(const std::vector<ConceptCard>& cards) {
    using nlohmann::ordered_json;
    ordered_json doc = ordered_json::array();
    for (const ConceptCard& c : cards) {
        ordered_json item;
        item["name"] = c.name;
        item["kind"] = std::string(to_string(c.kind));
        if (!c.description.empty()) item["description"] = c.description;
        if (c.solver_symbol_hint) item["solver_symbol_hint"] = *c.solver_symbol_hint;
        if (!c.snippet.empty()) item["snippet"] = c.snippet;
        if (!c.aliases.empty()) item["aliases"] = c.aliases;
        if (!c.relations.empty()) {
            ordered_json rels = ordered_json::array();
            for (const CardRelation& r : c.relations) {
                rels.push_back({{"kind", std::string(to_string(r.kind))}, {"target", r.target}});
            }
            item["relations"] = std::move(rels);
        }
        doc.push_back(std::move(item));
    }
    return doc.dump(2) + "\n";
}

}  // namespace closurekb::kg
