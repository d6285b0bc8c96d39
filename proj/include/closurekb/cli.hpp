#pragma once
// Command-line surface and the knowledge-source / retrieval ablation harness.
//
// Exit codes: 0 success, 1 validation or feasibility failure, 2 usage or
// parse error, 3 generator unavailable.

#include <closurekb/codegen.hpp>

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace closurekb::cli {

enum ExitCode : int { kOk = 0, kFailed = 1, kUsage = 2, kGeneratorUnavailable = 3 };

class UsageError : public Error {
public:
    using Error::Error;
};

enum class KnowledgeSources { papers_only, code_only, heterogeneous };

std::string_view to_string(KnowledgeSources s);
KnowledgeSources knowledge_sources_from_string(std::string_view s);

// A corpus directory holds models/*.mm, cards/*.json and query.txt.
struct Corpus {
    std::vector<std::filesystem::path> models;
    std::vector<std::filesystem::path> cards;
    std::string query;
};

Corpus load_corpus(const std::filesystem::path& dir);

// Ingests the selected sources (both are aligned when combined) and freezes
// the graph. Module errors are rethrown with the file name prefixed.
kg::KnowledgeGraph build_graph(const std::vector<std::filesystem::path>& models,
                               const std::vector<std::filesystem::path>& cards);
kg::KnowledgeGraph build_graph(const Corpus& corpus, KnowledgeSources sources);

// "template", an endpoint ("exec:<cmd>", "http://..."), or a path to an
// executable mock script.
std::unique_ptr<codegen::Generator> make_generator(const std::string& spec);

struct AblationConfig {
    KnowledgeSources knowledge_sources = KnowledgeSources::heterogeneous;
    codegen::RetrievalMode retrieval_mode = codegen::RetrievalMode::closure;
    std::size_t window_k = 3;  // window mode only; no closure expansion
    int runs = 1;
    std::string generator = "template";
    dsl::Dialect dialect = dsl::Dialect::lingo_flavored;

    void check() const;
};

struct AblationRun {
    int run = 0;
    bool ok = false;
    std::vector<std::string> missing_declarations;
    std::size_t kind_mismatches = 0;
    std::size_t arity_mismatches = 0;
    std::optional<std::string> generation_error;
    bool snippets_empty = false;
    std::size_t context_size = 0;
    std::string code;  // in the configured dialect when it validated
};

struct AblationReport {
    AblationConfig config;
    std::vector<AblationRun> runs;

    int ok_count() const;
    std::string to_text() const;  // key=value lines
    std::string to_json() const;
};

// Every run is one retrieval -> context -> generation -> validation pass
// with no repair rounds, so runs differ only through the generator.
AblationReport run_ablation(const AblationConfig& config, const std::filesystem::path& corpus_dir);

// Converts validated MiniModel code to the requested dialect.
std::string render(const std::string& code, dsl::Dialect dialect);

// Checked-in corpus fixtures, keyed by path relative to the corpus root.
// Files ending in ".sh" are mock generator scripts and must be executable.
std::map<std::string, std::string> corpus_fixtures();

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace closurekb::cli
