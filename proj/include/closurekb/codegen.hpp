#pragma once
// Context packages, code generators, static validation and the bounded
// corrective re-retrieval loop.

#include <closurekb/knowledge_graph.hpp>
#include <closurekb/retrieval.hpp>

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace closurekb::codegen {

class MissingExpression : public Error {
public:
    explicit MissingExpression(const std::string& id)
        : Error("target entity has no stored expression: " + id), id_(id) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class GeneratorUnavailable : public Error {
public:
    using Error::Error;
};

// ---- context package --------------------------------------------------------

struct TypedEntity {
    kg::Entity entity;
    std::string definition;  // NAME : KIND : DOMAIN : {INDEX SETS} : SOLVER_SYMBOL
};

struct ContextPackage {
    std::string instruction;
    std::vector<std::string> targets;        // constraint/objective ids to render
    std::vector<TypedEntity> typed_entities;  // dependencies first
    std::vector<std::string> subgraph_lines;  // "src -> dst [kind]", sorted
    std::vector<retrieval::Snippet> snippets;

    bool snippets_empty() const noexcept { return snippets.empty(); }
    bool contains(const std::string& id) const;
    // Sections: TYPED ENTITIES, DEPENDENCY SUBGRAPH, BACKGROUND SNIPPETS, INSTRUCTION.
    std::string to_text() const;
};

std::string definition_line(const kg::Entity& e);

// Members ordered so every entity follows its executability dependencies.
// Ready entities are taken smallest id first; a cycle is broken by taking
// the smallest remaining id.
std::vector<std::string> dependency_order(const kg::KnowledgeGraph& graph,
                                          const std::set<std::string>& members);

struct ContextOptions {
    bool require_closed = true;  // false only for the window baseline
};

// Targets: code constraint/objective seeds, code constraints/objectives
// aligned from paper seeds, and unaligned paper constraint/objective seeds.
ContextPackage build_context(const kg::KnowledgeGraph& graph,
                             const retrieval::RetrievalResult& retrieval,
                             const std::string& instruction, ContextOptions options = {});

// ---- generators -------------------------------------------------------------

class Generator {
public:
    virtual ~Generator() = default;
    virtual std::string name() const = 0;
    virtual std::string generate(const ContextPackage& package) const = 0;
};

// Declares code-source sets, params and vars in package order, comments
// paper concepts, then renders each target's stored expression.
class TemplateGenerator : public Generator {
public:
    std::string name() const override { return "template"; }
    std::string generate(const ContextPackage& package) const override;
};

class FunctionGenerator : public Generator {
public:
    using Fn = std::function<std::string(const ContextPackage&)>;
    FunctionGenerator(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}
    std::string name() const override { return name_; }
    std::string generate(const ContextPackage& package) const override { return fn_(package); }

private:
    std::string name_;
    Fn fn_;
};

// POSTs the package text to an http:// URL; the response body is the code.
class HttpGenerator : public Generator {
public:
    explicit HttpGenerator(std::string url,
                           std::chrono::milliseconds timeout = std::chrono::seconds(30));
    std::string name() const override { return url_; }
    std::string generate(const ContextPackage& package) const override;

private:
    std::string url_;
    std::chrono::milliseconds timeout_;
};

// Runs a shell command with the package text on stdin; stdout is the code.
class CommandGenerator : public Generator {
public:
    explicit CommandGenerator(std::string command) : command_(std::move(command)) {}
    std::string name() const override { return "exec:" + command_; }
    std::string generate(const ContextPackage& package) const override;

private:
    std::string command_;
};

inline constexpr const char* kEndpointEnv = "CLOSUREKB_GENERATOR_ENDPOINT";

// "http://..." or "exec:<command>".
std::unique_ptr<Generator> make_external_generator(const std::string& endpoint);
std::optional<std::string> endpoint_from_env();

// ---- validation -------------------------------------------------------------

enum class Status { ok, failed };

struct KindMismatch {
    std::string name;
    std::string expected;
    std::string actual;
    bool operator==(const KindMismatch&) const = default;
};

struct ArityMismatch {
    std::string name;
    std::size_t declared = 0;
    std::size_t used = 0;
    bool operator==(const ArityMismatch&) const = default;
};

struct ValidationReport {
    Status status = Status::ok;
    std::vector<std::string> missing_declarations;
    std::vector<KindMismatch> kind_mismatches;
    std::vector<ArityMismatch> arity_mismatches;
    std::optional<std::string> parse_error;

    bool ok() const noexcept { return status == Status::ok; }
};

// Symbols resolve against declarations in `code`, then against code
// entities of `graph`. Pass an empty graph to require self-contained code.
ValidationReport validate(std::string_view code, const kg::KnowledgeGraph& graph);

std::string to_json(const ValidationReport& report);

// ---- corrective loop --------------------------------------------------------

enum class RetrievalMode { closure, window };

struct RepairOptions {
    int max_rounds = 3;
    std::size_t k = retrieval::kDefaultSnippets;
    RetrievalMode mode = RetrievalMode::closure;
    std::size_t window_k = 3;
};

struct RepairOutcome {
    std::string code;
    ValidationReport report;
    int rounds = 0;
    std::vector<std::size_t> context_sizes;  // structural set size per round
    ContextPackage package;                   // last package built
    std::optional<std::string> generation_error;
};

// Top-k positive semantic hits plus one aligns_to hop from paper hits; no closure.
retrieval::RetrievalResult window_retrieve(std::string_view text, const kg::KnowledgeGraph& graph,
                                           const retrieval::SemanticIndex& index, std::size_t k);

// retrieve -> build_context -> generate -> validate (self-contained). Missing
// names found in the graph have their closures unioned into the structural
// set before the next round.
RepairOutcome repair_loop(std::string_view query, const kg::KnowledgeGraph& graph,
                          const retrieval::SemanticIndex& index, const Generator& generator,
                          RepairOptions options = {});

}  // namespace closurekb::codegen
