#include <closurekb/codegen.hpp>

#include <algorithm>
#include <cstdio>
#include <queue>
#include <sstream>

namespace closurekb::codegen {

namespace {

bool renders(kg::EntityKind k) {
    return k == kg::EntityKind::constraint || k == kg::EntityKind::objective;
}

void push_unique(std::vector<std::string>& v, const std::string& id) {
    if (std::find(v.begin(), v.end(), id) == v.end()) v.push_back(id);
}

std::string or_dash(const std::string& s) {
    return s.empty() ? "-" : s;
}

}  // namespace

bool ContextPackage::contains(const std::string& id) const {
    return std::any_of(typed_entities.begin(), typed_entities.end(),
                       [&](const TypedEntity& t) { return t.entity.id == id; });
}

std::string ContextPackage::to_text() const {
    std::ostringstream out;
    out << "=== TYPED ENTITIES ===\n";
    for (const auto& t : typed_entities) out << t.definition << "\n";
    out << "=== DEPENDENCY SUBGRAPH ===\n";
    for (const auto& line : subgraph_lines) out << line << "\n";
    out << "=== BACKGROUND SNIPPETS ===\n";
    for (std::size_t i = 0; i < snippets.size(); ++i) {
        char score[32];
        std::snprintf(score, sizeof score, "%.6f", snippets[i].score);
        out << "[" << (i + 1) << "] " << snippets[i].id << " (" << score << "): " << snippets[i].text
            << "\n";
    }
    out << "=== INSTRUCTION ===\n" << instruction << "\n";
    out << "Target entities:";
    for (const auto& t : targets) out << " " << t;
    out << "\n";
    return out.str();
}

std::string definition_line(const kg::Entity& e) {
    return e.name + " : " + std::string(kg::to_string(e.kind)) + " : " +
           or_dash(e.field_or(kg::field::domain)) + " : {" + e.field_or(kg::field::index_sets) +
           "} : " + or_dash(e.field_or(kg::field::solver_symbol));
}

std::vector<std::string> dependency_order(const kg::KnowledgeGraph& graph,
                                          const std::set<std::string>& members) {
    std::map<std::string, std::size_t> pending;  // unemitted dependencies per member
    std::map<std::string, std::vector<std::string>> dependents;
    for (const std::string& id : members) {
        pending[id] = 0;
        for (const std::string& dep : graph.neighbors(id, kg::kExecutability, kg::Direction::out)) {
            if (!members.count(dep)) continue;
            ++pending[id];
            dependents[dep].push_back(id);
        }
    }
    std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
    for (const auto& [id, n] : pending)
        if (n == 0) ready.push(id);
    std::vector<std::string> order;
    std::set<std::string> done;
    while (order.size() < members.size()) {
        if (ready.empty()) {
            for (const auto& [id, n] : pending) {
                if (!done.count(id)) {
                    ready.push(id);  // cycle: smallest remaining id
                    break;
                }
            }
        }
        std::string id = ready.top();
        ready.pop();
        if (!done.insert(id).second) continue;
        order.push_back(id);
        for (const std::string& d : dependents[id]) {
            if (!done.count(d) && --pending[d] == 0) ready.push(d);
        }
    }
    return order;
}

ContextPackage build_context(const kg::KnowledgeGraph& graph,
                             const retrieval::RetrievalResult& retrieval,
                             const std::string& instruction, ContextOptions options) {
    if (options.require_closed) {
        dep::WellDefinedness w = dep::is_well_defined(graph, retrieval.structural);
        if (!w.ok) {
            throw retrieval::NotClosed("context escapes via " + w.violations.front().first +
                                       " -> " + w.violations.front().second);
        }
    }
    ContextPackage p;
    p.instruction = instruction;
    for (const std::string& id : dependency_order(graph, retrieval.structural)) {
        const kg::Entity& e = graph.entity(id);
        p.typed_entities.push_back({e, definition_line(e)});
    }
    for (const kg::Edge& e : graph.edges()) {
        if (!kg::kExecutability.contains(e.kind)) continue;
        if (!retrieval.structural.count(e.src) || !retrieval.structural.count(e.dst)) continue;
        p.subgraph_lines.push_back(e.src + " -> " + e.dst + " [" + std::string(kg::to_string(e.kind)) + "]");
    }
    p.snippets = retrieval.snippets;

    for (const std::string& id : retrieval.seed_ids) {
        const kg::Entity& e = graph.entity(id);
        if (e.source == kg::Source::code) {
            if (renders(e.kind)) push_unique(p.targets, id);
            continue;
        }
        bool aligned = false;
        for (const std::string& code : graph.neighbors(id, {kg::EdgeKind::aligns_to}, kg::Direction::out)) {
            if (!retrieval.structural.count(code)) continue;
            aligned = true;
            if (renders(graph.entity(code).kind)) push_unique(p.targets, code);
        }
        if (!aligned && renders(e.kind)) push_unique(p.targets, id);
    }
    return p;
}

}  // namespace closurekb::codegen
