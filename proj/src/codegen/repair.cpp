#include <closurekb/codegen.hpp>

namespace closurekb::codegen {

retrieval::RetrievalResult window_retrieve(std::string_view text, const kg::KnowledgeGraph& graph,
                                           const retrieval::SemanticIndex& index, std::size_t k) {
    retrieval::RetrievalResult r;
    for (const retrieval::Snippet& s : retrieval::semantic_search(index, text, k)) {
        if (s.score <= 0.0) continue;
        r.seed_ids.push_back(s.id);
        r.structural.insert(s.id);
        r.snippets.push_back(s);
        if (graph.entity(s.id).source != kg::Source::paper) continue;
        for (const std::string& code : graph.neighbors(s.id, {kg::EdgeKind::aligns_to}, kg::Direction::out)) {
            r.structural.insert(code);
        }
    }
    return r;
}

RepairOutcome repair_loop(std::string_view query, const kg::KnowledgeGraph& graph,
                          const retrieval::SemanticIndex& index, const Generator& generator,
                          RepairOptions options) {
    if (options.max_rounds < 1) throw Error("max_rounds must be at least 1");
    const bool window = options.mode == RetrievalMode::window;
    retrieval::RetrievalResult context = window
                                             ? window_retrieve(query, graph, index, options.window_k)
                                             : retrieval::retrieve(query, graph, index, options.k);
    const kg::KnowledgeGraph self_contained;
    RepairOutcome out;
    for (int round = 1; round <= options.max_rounds; ++round) {
        out.rounds = round;
        out.context_sizes.push_back(context.structural.size());
        out.package = build_context(graph, context, std::string(query), {.require_closed = !window});
        try {
            out.code = generator.generate(out.package);
        } catch (const MissingExpression& e) {
            out.code.clear();
            out.generation_error = e.what();
            out.report = ValidationReport{};
            out.report.status = Status::failed;
            out.report.parse_error = std::string("generation failed: ") + e.what();
            break;
        }
        out.report = validate(out.code, self_contained);
        if (out.report.ok() || round == options.max_rounds) break;

        std::vector<std::string> found;
        for (const std::string& name : out.report.missing_declarations) {
            if (const kg::Entity* e = graph.find(name); e && e->source == kg::Source::code) {
                found.push_back(name);
            } else if (auto hits = graph.by_symbol(name); hits.size() == 1) {
                found.push_back(hits.front()->id);
            }
        }
        if (!found.empty()) {
            auto grown = dep::closure(graph, found).members;
            context.structural.insert(grown.begin(), grown.end());
        }
    }
    return out;
}

}  // namespace closurekb::codegen
