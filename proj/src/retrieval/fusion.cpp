#include <closurekb/retrieval.hpp>

#include <json.hpp>

namespace closurekb::retrieval {

std::set<std::string> structural_retrieve(const kg::KnowledgeGraph& graph,
                                          const std::vector<std::string>& seeds) {
    std::vector<std::string> targets;
    for (const std::string& s : seeds) {
        const kg::Entity& e = graph.entity(s);
        targets.push_back(s);
        if (e.source != kg::Source::paper) continue;
        for (auto& code : graph.neighbors(s, {kg::EdgeKind::aligns_to}, kg::Direction::out)) {
            targets.push_back(std::move(code));
        }
    }
    if (targets.empty()) return {};
    return dep::closure(graph, targets).members;
}

RetrievalResult fuse(const ParsedQuery& query, const std::set<std::string>& structural,
                     const std::vector<Snippet>& snippets, const kg::KnowledgeGraph& graph,
                     std::size_t k) {
    dep::WellDefinedness w = dep::is_well_defined(graph, structural);
    if (!w.ok) {
        throw NotClosed("structural set escapes via " + w.violations.front().first + " -> " +
                        w.violations.front().second);
    }
    RetrievalResult r;
    r.seed_ids = select_seeds(query, graph);
    r.structural = structural;
    std::set<std::string> member_texts;
    for (const std::string& id : structural) {
        if (const kg::Entity* e = graph.find(id); e && !e->description.empty()) {
            member_texts.insert(e->description);
        }
    }
    std::set<std::string> seen;
    for (const Snippet& s : snippets) {
        if (r.snippets.size() >= k) break;
        if (s.score <= 0.0 || structural.count(s.id) || member_texts.count(s.text)) continue;
        if (!seen.insert(s.id).second) continue;
        r.snippets.push_back(s);
    }
    return r;
}

RetrievalResult retrieve(std::string_view text, const kg::KnowledgeGraph& graph,
                         const SemanticIndex& index, std::size_t k) {
    ParsedQuery q = understand_query(text, graph);
    std::set<std::string> structural = structural_retrieve(graph, select_seeds(q, graph));
    // Oversample so deduplication can still fill k slots.
    std::vector<Snippet> hits = semantic_search(index, text, k + structural.size());
    return fuse(q, structural, hits, graph, k);
}

std::string to_json(const ParsedQuery& query) {
    using nlohmann::json;
    json intents = json::array();
    for (Intent i : query.intents) intents.push_back(std::string(to_string(i)));
    json entities = json::array();
    for (const auto& e : query.entities) {
        entities.push_back({{"surface", e.surface},
                            {"id", e.id ? json(*e.id) : json(nullptr)},
                            {"kind", std::string(to_string(e.kind))}});
    }
    json numbers = json::array();
    for (const auto& n : query.numbers) numbers.push_back({{"value", n.value}, {"unit", n.unit}});
    json windows = json::array();
    for (const auto& w : query.windows) {
        json jw = {{"first_hour", w.first_hour}, {"last_hour", w.last_hour}};
        if (w.first_slot) jw["first_slot"] = *w.first_slot;
        if (w.last_slot) jw["last_slot"] = *w.last_slot;
        windows.push_back(std::move(jw));
    }
    json doc = {{"raw", query.raw},
                {"intents", std::move(intents)},
                {"entities", std::move(entities)},
                {"numbers", std::move(numbers)},
                {"windows", std::move(windows)}};
    return doc.dump(2);
}

std::string to_json(const RetrievalResult& result) {
    using nlohmann::json;
    json snippets = json::array();
    for (const auto& s : result.snippets) {
        snippets.push_back({{"id", s.id}, {"score", s.score}, {"text", s.text}});
    }
    json doc = {{"seed_ids", result.seed_ids},
                {"structural", result.structural},
                {"snippets", std::move(snippets)}};
    return doc.dump(2);
}

}  // namespace closurekb::retrieval
