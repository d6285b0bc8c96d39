#include <closurekb/retrieval.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace closurekb::retrieval {

namespace {

void normalize(std::vector<double>& v) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm <= 0.0) return;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

TfidfEmbedder::TfidfEmbedder(const std::vector<std::string>& corpus) {
    std::map<std::string, std::size_t> df;
    for (const std::string& doc : corpus) {
        std::vector<std::string> toks = tokenize(doc);
        std::sort(toks.begin(), toks.end());
        toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
        for (const auto& t : toks) ++df[t];
    }
    const double n = static_cast<double>(corpus.size());
    for (const auto& [term, count] : df) {
        vocabulary_.push_back(term);
        idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    }
}

std::vector<double> TfidfEmbedder::embed(std::string_view text) const {
    std::vector<double> v(vocabulary_.size(), 0.0);
    for (const std::string& t : tokenize(text)) {
        auto it = std::lower_bound(vocabulary_.begin(), vocabulary_.end(), t);
        if (it != vocabulary_.end() && *it == t) {
            std::size_t i = static_cast<std::size_t>(it - vocabulary_.begin());
            v[i] += idf_[i];
        }
    }
    normalize(v);
    return v;
}

SemanticIndex::SemanticIndex(std::vector<Document> documents, std::shared_ptr<const Embedder> embedder)
    : documents_(std::move(documents)), embedder_(std::move(embedder)) {
    std::sort(documents_.begin(), documents_.end(),
              [](const Document& a, const Document& b) { return a.id < b.id; });
    if (!embedder_) {
        std::vector<std::string> corpus;
        for (const auto& d : documents_) corpus.push_back(d.text);
        embedder_ = std::make_shared<TfidfEmbedder>(corpus);
    }
    for (const auto& d : documents_) {
        std::vector<double> v = embedder_->embed(d.text);
        if (v.size() != embedder_->dimension()) throw Error("embedder returned a vector of wrong dimension");
        for (double x : v)
            if (!std::isfinite(x)) throw Error("embedder returned a non-finite value");
        normalize(v);
        vectors_.push_back(std::move(v));
    }
}

std::vector<Snippet> SemanticIndex::search(std::string_view text, std::size_t k) const {
    std::vector<double> q = embedder_->embed(text);
    normalize(q);
    std::vector<Snippet> out;
    for (std::size_t i = 0; i < documents_.size(); ++i) {
        out.push_back({documents_[i].id, dot(q, vectors_[i]), documents_[i].display});
    }
    std::stable_sort(out.begin(), out.end(), [](const Snippet& a, const Snippet& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    if (out.size() > k) out.resize(k);
    return out;
}

std::vector<Document> snippet_documents(const kg::KnowledgeGraph& graph) {
    std::vector<Document> docs;
    for (const auto& [id, e] : graph.entities()) {
        std::string snippet = e.field_or(kg::field::snippet);
        if (e.description.empty() && snippet.empty()) continue;
        std::string display = e.description;
        if (!snippet.empty()) display += (display.empty() ? "" : " ") + snippet;
        docs.push_back({id, e.name + " " + display, display});
    }
    return docs;
}

SemanticIndex index_snippets(const kg::KnowledgeGraph& graph, std::shared_ptr<const Embedder> embedder) {
    return SemanticIndex(snippet_documents(graph), std::move(embedder));
}

std::vector<Snippet> semantic_search(const SemanticIndex& index, std::string_view text, std::size_t k) {
    return index.search(text, k);
}

}  // namespace closurekb::retrieval
