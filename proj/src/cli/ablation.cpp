#include <closurekb/cli.hpp>

#include <json.hpp>

#include <sstream>

namespace closurekb::cli {

namespace fs = std::filesystem;

void AblationConfig::check() const {
    if (runs < 1) throw UsageError("runs must be at least 1");
    if (retrieval_mode == codegen::RetrievalMode::window && window_k < 1) {
        throw UsageError("window_k must be at least 1 in window mode");
    }
}

std::unique_ptr<codegen::Generator> make_generator(const std::string& spec) {
    if (spec.empty() || spec == "template") return std::make_unique<codegen::TemplateGenerator>();
    if (spec.rfind("exec:", 0) == 0 || spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0) {
        return codegen::make_external_generator(spec);
    }
    if (fs::is_regular_file(spec)) {
        return std::make_unique<codegen::CommandGenerator>("'" + spec + "'");
    }
    throw UsageError("unknown generator '" + spec + "' (template, exec:<cmd>, http://..., or a script path)");
}

std::string render(const std::string& code, dsl::Dialect dialect) {
    if (dialect == dsl::Dialect::canonical) return code;
    return dsl::emit_model(dsl::parse_model(code), dialect);
}

int AblationReport::ok_count() const {
    int n = 0;
    for (const AblationRun& r : runs) n += r.ok ? 1 : 0;
    return n;
}

namespace {

std::string mode_name(codegen::RetrievalMode m) {
    return m == codegen::RetrievalMode::closure ? "closure" : "window";
}

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
    return out;
}

}  // namespace

std::string AblationReport::to_text() const {
    std::ostringstream out;
    out << "sources=" << cli::to_string(config.knowledge_sources) << "\n";
    out << "mode=" << mode_name(config.retrieval_mode) << "\n";
    if (config.retrieval_mode == codegen::RetrievalMode::window) out << "window_k=" << config.window_k << "\n";
    out << "generator=" << config.generator << "\n";
    out << "runs=" << runs.size() << "\n";
    out << "ok=" << ok_count() << "/" << runs.size() << "\n";
    for (const AblationRun& r : runs) {
        std::string p = "run." + std::to_string(r.run) + ".";
        out << p << "status=" << (r.ok ? "ok" : "failed") << "\n";
        out << p << "missing=" << r.missing_declarations.size() << "\n";
        if (!r.missing_declarations.empty()) out << p << "missing_names=" << join(r.missing_declarations) << "\n";
        out << p << "kind_mismatches=" << r.kind_mismatches << "\n";
        out << p << "arity_mismatches=" << r.arity_mismatches << "\n";
        out << p << "snippets_empty=" << (r.snippets_empty ? "true" : "false") << "\n";
        out << p << "context_size=" << r.context_size << "\n";
        if (r.generation_error) out << p << "generation_error=" << *r.generation_error << "\n";
    }
    return out.str();
}

std::string AblationReport::to_json() const {
    nlohmann::json doc;
    doc["sources"] = std::string(cli::to_string(config.knowledge_sources));
    doc["mode"] = mode_name(config.retrieval_mode);
    doc["window_k"] = config.window_k;
    doc["generator"] = config.generator;
    doc["ok"] = ok_count();
    doc["runs"] = nlohmann::json::array();
    for (const AblationRun& r : runs) {
        nlohmann::json row;
        row["run"] = r.run;
        row["status"] = r.ok ? "ok" : "failed";
        row["missing_declarations"] = r.missing_declarations;
        row["kind_mismatches"] = r.kind_mismatches;
        row["arity_mismatches"] = r.arity_mismatches;
        row["snippets_empty"] = r.snippets_empty;
        row["context_size"] = r.context_size;
        row["generation_error"] = r.generation_error ? nlohmann::json(*r.generation_error) : nlohmann::json();
        row["code"] = r.code;
        doc["runs"].push_back(std::move(row));
    }
    return doc.dump(2);
}

AblationReport run_ablation(const AblationConfig& config, const fs::path& corpus_dir) {
    config.check();
    Corpus corpus = load_corpus(corpus_dir);
    kg::KnowledgeGraph graph = build_graph(corpus, config.knowledge_sources);
    retrieval::SemanticIndex index = retrieval::index_snippets(graph);
    std::unique_ptr<codegen::Generator> generator = make_generator(config.generator);

    codegen::RepairOptions options;
    options.max_rounds = 1;
    options.mode = config.retrieval_mode;
    options.window_k = config.window_k;

    AblationReport report;
    report.config = config;
    for (int i = 1; i <= config.runs; ++i) {
        AblationRun row;
        row.run = i;
        try {
            codegen::RepairOutcome o = codegen::repair_loop(corpus.query, graph, index, *generator, options);
            row.ok = o.report.ok();
            row.missing_declarations = o.report.missing_declarations;
            row.kind_mismatches = o.report.kind_mismatches.size();
            row.arity_mismatches = o.report.arity_mismatches.size();
            row.generation_error = o.generation_error;
            row.snippets_empty = o.package.snippets_empty();
            row.context_size = o.context_sizes.empty() ? 0 : o.context_sizes.back();
            row.code = o.code;
            if (row.ok) {
                try {
                    row.code = render(o.code, config.dialect);
                } catch (const dsl::UnsupportedConstruct&) {
                    // Multi-index models have no LINGO form here; keep MiniModel.
                }
            }
        } catch (const Error& e) {
            row.ok = false;
            row.generation_error = e.what();
        }
        report.runs.push_back(std::move(row));
    }
    return report;
}

}  // namespace closurekb::cli
