#include <closurekb/cli.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace closurekb::cli {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<fs::path> files_with(const fs::path& dir, const std::string& ext) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ext) out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::string_view to_string(KnowledgeSources s) {
    switch (s) {
        case KnowledgeSources::papers_only: return "papers_only";
        case KnowledgeSources::code_only: return "code_only";
        case KnowledgeSources::heterogeneous: return "heterogeneous";
    }
    return "heterogeneous";
}

KnowledgeSources knowledge_sources_from_string(std::string_view s) {
    if (s == "papers_only") return KnowledgeSources::papers_only;
    if (s == "code_only") return KnowledgeSources::code_only;
    if (s == "heterogeneous") return KnowledgeSources::heterogeneous;
    throw UsageError("unknown knowledge sources '" + std::string(s) + "'");
}

Corpus load_corpus(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw UsageError("corpus directory not found: " + dir.string());
    Corpus c;
    c.models = files_with(dir / "models", ".mm");
    c.cards = files_with(dir / "cards", ".json");
    std::string q = read_file(dir / "query.txt");
    while (!q.empty() && (q.back() == '\n' || q.back() == '\r' || q.back() == ' ')) q.pop_back();
    c.query = q;
    return c;
}

kg::KnowledgeGraph build_graph(const std::vector<fs::path>& models, const std::vector<fs::path>& cards) {
    std::vector<kg::ParsedModel> parsed;
    for (const fs::path& p : models) {
        try {
            dsl::ModelAst ast = dsl::parse_model(read_file(p));
            dsl::SymbolTable table = dsl::extract_symbols(ast);
            parsed.push_back({std::move(ast), std::move(table)});
        } catch (const dsl::ParseError& e) {
            throw Error(p.string() + ":" + e.what());
        } catch (const UsageError&) {
            throw;
        } catch (const Error& e) {
            throw Error(p.string() + ": " + e.what());
        }
    }
    std::vector<kg::ConceptCard> all_cards;
    for (const fs::path& p : cards) {
        try {
            auto some = kg::parse_concept_cards(read_file(p));
            all_cards.insert(all_cards.end(), some.begin(), some.end());
        } catch (const UsageError&) {
            throw;
        } catch (const Error& e) {
            throw Error(p.string() + ": " + e.what());
        }
    }
    kg::KnowledgeGraph graph;
    kg::ingest_models(parsed, graph);
    kg::ingest_concept_cards(all_cards, graph);
    if (!parsed.empty() && !all_cards.empty()) {
        kg::align(graph);
        kg::lift_card_relations(graph);
    }
    graph.freeze();
    return graph;
}

kg::KnowledgeGraph build_graph(const Corpus& corpus, KnowledgeSources sources) {
    static const std::vector<fs::path> none;
    return build_graph(sources == KnowledgeSources::papers_only ? none : corpus.models,
                       sources == KnowledgeSources::code_only ? none : corpus.cards);
}

}  // namespace closurekb::cli
