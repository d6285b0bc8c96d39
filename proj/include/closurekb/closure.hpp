#pragma once
// Dependency-closed contexts over executability edges (used_in, depends_on).

#include <closurekb/knowledge_graph.hpp>

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace closurekb::dep {

struct ClosureResult {
    std::vector<std::string> targets;
    std::set<std::string> members;
    std::vector<std::string> visit_order;  // BFS discovery order
    std::size_t edge_count = 0;            // executability edges internal to members
};

// Forward reachability from `target`; neighbors expanded in sorted-id order.
ClosureResult closure(const kg::KnowledgeGraph& graph, const std::string& target);
// Union of per-target closures; visit_order concatenates first discoveries.
ClosureResult closure(const kg::KnowledgeGraph& graph, const std::vector<std::string>& targets);

// Entities in `members` plus the executability edges internal to them.
kg::KnowledgeGraph induced_subgraph(const kg::KnowledgeGraph& graph,
                                    const std::set<std::string>& members);

struct WellDefinedness {
    bool ok = true;
    std::vector<std::pair<std::string, std::string>> violations;  // escaping (src, dst)
};

WellDefinedness is_well_defined(const kg::KnowledgeGraph& graph,
                                const std::set<std::string>& members);

}  // namespace closurekb::dep
