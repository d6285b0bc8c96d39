#include <closurekb/knowledge_graph.hpp>

#include <cctype>

namespace closurekb::kg {

namespace {

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string strip_digits(std::string_view s) {
    std::string out;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) out += c;
    return out;
}

// Candidates tiered by strength: exact normalized match first, then match
// against the code symbol with numeric subscripts removed.
std::vector<std::string> name_candidates(const KnowledgeGraph& graph, const Entity& paper) {
    std::set<std::string> keys;
    keys.insert(normalize_name(paper.name));
    for (const auto& a : split_commas(paper.field_or(field::aliases))) keys.insert(normalize_name(a));
    keys.erase("");

    std::vector<std::string> exact, stripped;
    for (const auto& [id, e] : graph.entities()) {
        if (e.source != Source::code) continue;
        std::string symbol = e.field_or(field::solver_symbol, e.name);
        if (keys.count(normalize_name(symbol))) {
            exact.push_back(id);
        } else if (keys.count(normalize_name(strip_digits(symbol)))) {
            stripped.push_back(id);
        }
    }
    return exact.empty() ? stripped : exact;
}

}  // namespace

std::string normalize_name(std::string_view name) {
    std::string out;
    for (char c : name) {
        auto u = static_cast<unsigned char>(c);
        if (c == '_' || c == '-' || c == '{' || c == '}' || c == '^' || std::isspace(u)) continue;
        out += static_cast<char>(std::tolower(u));
    }
    return out;
}

AlignmentResult align(KnowledgeGraph& graph) {
    AlignmentResult result;
    std::vector<std::pair<std::string, std::vector<std::string>>> decisions;
    for (const auto& [id, e] : graph.entities()) {
        if (e.source != Source::paper) continue;
        std::vector<std::string> candidates;
        if (auto hint = e.fields.find(field::solver_symbol_hint); hint != e.fields.end()) {
            for (const Entity* c : graph.by_symbol(hint->second)) candidates.push_back(c->id);
        }
        if (candidates.empty()) candidates = name_candidates(graph, e);
        if (!candidates.empty()) decisions.emplace_back(id, std::move(candidates));
    }
    for (auto& [id, candidates] : decisions) {
        if (candidates.size() == 1) {
            Edge edge{id, candidates.front(), EdgeKind::aligns_to};
            graph.add_edge(edge);
            result.edges.push_back(std::move(edge));
        } else {
            result.ambiguities.push_back({id, std::move(candidates)});
        }
    }
    return result;
}

std::vector<Edge> lift_card_relations(KnowledgeGraph& graph) {
    auto realization = [&](const std::string& id) -> std::optional<std::string> {
        if (graph.entity(id).source != Source::paper) return std::nullopt;
        auto targets = graph.neighbors(id, {EdgeKind::aligns_to}, Direction::out);
        if (targets.size() != 1) return std::nullopt;
        return targets.front();
    };
    std::vector<Edge> lifted;
    const std::set<Edge> snapshot = graph.edges();
    for (const Edge& e : snapshot) {
        if (e.kind == EdgeKind::aligns_to) continue;
        auto src = realization(e.src);
        auto dst = realization(e.dst);
        if (!src || !dst || *src == *dst) continue;
        Edge edge{*src, *dst, e.kind};
        if (graph.add_edge(edge)) lifted.push_back(std::move(edge));
    }
    return lifted;
}

}  // namespace closurekb::kg
