#pragma once
// Query understanding plus the two retrieval streams: lexical-semantic
// snippet search and structural closure over the knowledge graph.

#include <closurekb/closure.hpp>
#include <closurekb/knowledge_graph.hpp>

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace closurekb::retrieval {

class EmptyQuery : public Error {
public:
    EmptyQuery() : Error("query text is empty") {}
};
class NotClosed : public Error {
public:
    using Error::Error;
};

enum class Intent {
    add_constraint,
    modify_objective,
    explain_constraint,
    parameter_query,
    generate_model,
    unknown,
};
std::string_view to_string(Intent i);

enum class ExtractionKind { name_match, numeric_with_unit, time_window };
std::string_view to_string(ExtractionKind k);

struct ExtractedEntity {
    std::string surface;
    std::optional<std::string> id;
    ExtractionKind kind = ExtractionKind::name_match;
};

struct NumericValue {
    double value = 0.0;
    std::string unit;  // "kW", "kWh" or "$/kWh"
};

// Inclusive hour range (1-based). Slots are filled when the graph carries
// a slots_per_hour parameter.
struct TimeWindow {
    long first_hour = 0;
    long last_hour = 0;
    std::optional<long> first_slot;
    std::optional<long> last_slot;
};

struct ParsedQuery {
    std::string raw;
    std::vector<Intent> intents;
    std::vector<ExtractedEntity> entities;
    std::vector<NumericValue> numbers;
    std::vector<TimeWindow> windows;

    bool has(Intent i) const;
    std::vector<std::string> resolved_ids() const;  // first-occurrence order, unique
};

// Lowercased alphanumeric runs.
std::vector<std::string> tokenize(std::string_view text);

ParsedQuery understand_query(std::string_view text, const kg::KnowledgeGraph& graph);

// Resolved ids; under explain_constraint, variable and parameter seeds are
// replaced by the constraints that use them.
std::vector<std::string> select_seeds(const ParsedQuery& query, const kg::KnowledgeGraph& graph);

// ---- semantic stream --------------------------------------------------------

// Plug-in contract: fixed-length vector of finite reals per text.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::size_t dimension() const = 0;
    virtual std::vector<double> embed(std::string_view text) const = 0;
};

// TF-IDF with smooth idf ln((1+N)/(1+df))+1 over a sorted vocabulary, L2-normalized.
class TfidfEmbedder : public Embedder {
public:
    explicit TfidfEmbedder(const std::vector<std::string>& corpus);
    std::size_t dimension() const override { return vocabulary_.size(); }
    std::vector<double> embed(std::string_view text) const override;
    const std::vector<std::string>& vocabulary() const noexcept { return vocabulary_; }

private:
    std::vector<std::string> vocabulary_;
    std::vector<double> idf_;
};

struct Document {
    std::string id;
    std::string text;     // indexed text
    std::string display;  // text returned to callers
};

struct Snippet {
    std::string id;
    double score = 0.0;
    std::string text;
};

class SemanticIndex {
public:
    // Without an embedder, a TF-IDF embedder is fitted on the documents.
    explicit SemanticIndex(std::vector<Document> documents,
                           std::shared_ptr<const Embedder> embedder = nullptr);

    // Cosine similarity, descending; ties by smaller id. k larger than the
    // corpus returns everything.
    std::vector<Snippet> search(std::string_view text, std::size_t k) const;
    std::size_t size() const noexcept { return documents_.size(); }

private:
    std::vector<Document> documents_;  // sorted by id
    std::shared_ptr<const Embedder> embedder_;
    std::vector<std::vector<double>> vectors_;
};

// One document per entity with a description or snippet.
std::vector<Document> snippet_documents(const kg::KnowledgeGraph& graph);
SemanticIndex index_snippets(const kg::KnowledgeGraph& graph,
                             std::shared_ptr<const Embedder> embedder = nullptr);
std::vector<Snippet> semantic_search(const SemanticIndex& index, std::string_view text,
                                     std::size_t k);

// ---- structural stream ------------------------------------------------------

// Paper seeds follow aligns_to one hop, then the union of closures is taken.
std::set<std::string> structural_retrieve(const kg::KnowledgeGraph& graph,
                                          const std::vector<std::string>& seeds);

// ---- fusion -----------------------------------------------------------------

inline constexpr std::size_t kDefaultSnippets = 5;

struct RetrievalResult {
    std::vector<std::string> seed_ids;
    std::set<std::string> structural;
    std::vector<Snippet> snippets;
};

// Streams stay separate. Snippets that are structural members, repeat a
// member's description, or score zero are dropped, then truncated to k.
RetrievalResult fuse(const ParsedQuery& query, const std::set<std::string>& structural,
                     const std::vector<Snippet>& snippets, const kg::KnowledgeGraph& graph,
                     std::size_t k = kDefaultSnippets);

// understand_query -> select_seeds -> both streams -> fuse.
RetrievalResult retrieve(std::string_view text, const kg::KnowledgeGraph& graph,
                         const SemanticIndex& index, std::size_t k = kDefaultSnippets);

std::string to_json(const ParsedQuery& query);
std::string to_json(const RetrievalResult& result);

}  // namespace closurekb::retrieval
