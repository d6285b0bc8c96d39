#include <closurekb/closure.hpp>

#include <algorithm>
#include <deque>

namespace closurekb::dep {

using kg::Direction;
using kg::kExecutability;

namespace {

std::size_t internal_edges(const kg::KnowledgeGraph& graph, const std::set<std::string>& members) {
    std::size_t n = 0;
    for (const kg::Edge& e : graph.edges()) {
        if (kExecutability.contains(e.kind) && members.count(e.src) && members.count(e.dst)) ++n;
    }
    return n;
}

}  // namespace

ClosureResult closure(const kg::KnowledgeGraph& graph, const std::string& target) {
    return closure(graph, std::vector<std::string>{target});
}

ClosureResult closure(const kg::KnowledgeGraph& graph, const std::vector<std::string>& targets) {
    ClosureResult r;
    for (const std::string& t : targets) {
        if (!graph.contains(t)) throw kg::UnknownEntity(t);
    }
    for (const std::string& t : targets) {
        if (std::find(r.targets.begin(), r.targets.end(), t) == r.targets.end()) r.targets.push_back(t);
        if (!r.members.insert(t).second) continue;
        r.visit_order.push_back(t);
        std::deque<std::string> queue{t};
        while (!queue.empty()) {
            std::string id = std::move(queue.front());
            queue.pop_front();
            for (std::string& next : graph.neighbors(id, kExecutability, Direction::out)) {
                if (!r.members.insert(next).second) continue;
                r.visit_order.push_back(next);
                queue.push_back(std::move(next));
            }
        }
    }
    r.edge_count = internal_edges(graph, r.members);
    return r;
}

kg::KnowledgeGraph induced_subgraph(const kg::KnowledgeGraph& graph,
                                    const std::set<std::string>& members) {
    kg::KnowledgeGraph sub;
    for (const std::string& id : members) sub.add_entity(graph.entity(id));
    for (const kg::Edge& e : graph.edges()) {
        if (kExecutability.contains(e.kind) && members.count(e.src) && members.count(e.dst)) {
            sub.add_edge(e);
        }
    }
    return sub;
}

WellDefinedness is_well_defined(const kg::KnowledgeGraph& graph,
                                const std::set<std::string>& members) {
    WellDefinedness w;
    for (const std::string& id : members) {
        if (!graph.contains(id)) continue;
        for (const std::string& dst : graph.neighbors(id, kExecutability, Direction::out)) {
            if (!members.count(dst)) w.violations.emplace_back(id, dst);
        }
    }
    w.ok = w.violations.empty();
    return w;
}

}  // namespace closurekb::dep
