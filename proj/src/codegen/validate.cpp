#include <closurekb/codegen.hpp>

#include <json.hpp>

#include <algorithm>

namespace closurekb::codegen {

namespace {

struct Known {
    std::string kind;  // knowledge-graph kind name
    std::size_t arity = 0;
};

std::string kind_of(dsl::SymbolKind k) {
    return std::string(kg::to_string(kg::entity_kind_for(k)));
}

std::optional<Known> lookup(const std::string& name, const dsl::SymbolTable& table,
                            const kg::KnowledgeGraph& graph) {
    if (auto it = table.declarations.find(name); it != table.declarations.end()) {
        return Known{kind_of(it->second.kind), it->second.arity};
    }
    const kg::Entity* e = graph.find(name);
    if (!e || e->source != kg::Source::code) {
        auto hits = graph.by_symbol(name);
        e = hits.size() == 1 ? hits.front() : nullptr;
    }
    if (!e) return std::nullopt;
    std::size_t arity = 0;
    try {
        arity = std::stoul(e->field_or(kg::field::arity, "0"));
    } catch (const std::exception&) {
    }
    return Known{std::string(kg::to_string(e->kind)), arity};
}

template <class T>
void push_unique(std::vector<T>& v, T item) {
    if (std::find(v.begin(), v.end(), item) == v.end()) v.push_back(std::move(item));
}

}  // namespace

ValidationReport validate(std::string_view code, const kg::KnowledgeGraph& graph) {
    ValidationReport r;
    dsl::SymbolTable table;
    try {
        table = dsl::extract_symbols(dsl::parse_model(code));
    } catch (const Error& e) {
        r.parse_error = e.what();
        r.status = Status::failed;
        return r;
    }
    const std::string set_kind(kg::to_string(kg::EntityKind::index_set));
    const std::string var_kind(kg::to_string(kg::EntityKind::decision_variable));
    const std::string param_kind(kg::to_string(kg::EntityKind::parameter));

    auto check_set = [&](const std::string& name) {
        auto k = lookup(name, table, graph);
        if (!k) {
            push_unique(r.missing_declarations, name);
        } else if (k->kind != set_kind) {
            push_unique(r.kind_mismatches, KindMismatch{name, set_kind, k->kind});
        }
    };
    for (const auto& [name, decl] : table.declarations) {
        for (const std::string& set : decl.index_sets) check_set(set);
    }
    for (const dsl::Reference& ref : table.references) {
        if (ref.usage == dsl::Usage::iteration) {
            check_set(ref.name);
            continue;
        }
        auto k = lookup(ref.name, table, graph);
        if (!k) {
            push_unique(r.missing_declarations, ref.name);
            continue;
        }
        if (k->kind != var_kind && k->kind != param_kind) {
            push_unique(r.kind_mismatches, KindMismatch{ref.name, var_kind + "|" + param_kind, k->kind});
            continue;
        }
        if (k->arity != ref.arity) push_unique(r.arity_mismatches, ArityMismatch{ref.name, k->arity, ref.arity});
    }
    bool clean = r.missing_declarations.empty() && r.kind_mismatches.empty() && r.arity_mismatches.empty();
    r.status = clean ? Status::ok : Status::failed;
    return r;
}

std::string to_json(const ValidationReport& report) {
    using nlohmann::json;
    json kinds = json::array();
    for (const auto& k : report.kind_mismatches) {
        kinds.push_back({{"name", k.name}, {"expected", k.expected}, {"actual", k.actual}});
    }
    json arities = json::array();
    for (const auto& a : report.arity_mismatches) {
        arities.push_back({{"name", a.name}, {"declared", a.declared}, {"used", a.used}});
    }
    json doc = {{"status", report.ok() ? "ok" : "failed"},
                {"missing_declarations", report.missing_declarations},
                {"kind_mismatches", std::move(kinds)},
                {"arity_mismatches", std::move(arities)},
                {"parse_error", report.parse_error ? json(*report.parse_error) : json(nullptr)}};
    return doc.dump(2);
}

}  // namespace closurekb::codegen
