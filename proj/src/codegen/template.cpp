#include <closurekb/codegen.hpp>

#include <charconv>
#include <sstream>

namespace closurekb::codegen {

namespace {

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

double to_double(const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw Error("bad number in entity field: " + s);
    return v;
}

std::string declaration(const kg::Entity& e) {
    const std::string symbol = e.field_or(kg::field::solver_symbol, e.name);
    const std::vector<std::string> sets = split_commas(e.field_or(kg::field::index_sets));
    switch (e.kind) {
        case kg::EntityKind::index_set: {
            dsl::SetDecl s;
            s.name = symbol;
            std::string range = e.field_or(kg::field::range);
            if (auto dots = range.find(".."); dots != std::string::npos) {
                s.lo = static_cast<long>(to_double(range.substr(0, dots)));
                s.hi = static_cast<long>(to_double(range.substr(dots + 2)));
            } else {
                s.is_range = false;
                s.members = split_commas(e.field_or(kg::field::members));
            }
            return dsl::emit_set(s);
        }
        case kg::EntityKind::parameter: {
            dsl::ParamDecl p;
            p.name = symbol;
            p.index_sets = sets;
            if (auto data = e.field_or(kg::field::data); !data.empty()) p.data = dsl::parse_data_literal(data);
            return dsl::emit_param(p);
        }
        case kg::EntityKind::decision_variable: {
            dsl::VarDecl v;
            v.name = symbol;
            v.index_sets = sets;
            if (auto d = dsl::var_domain_from_string(e.field_or(kg::field::domain, "continuous"))) v.domain = *d;
            if (auto b = e.field_or(kg::field::bounds); !b.empty()) {
                auto comma = b.find(',');
                v.bounds = std::make_pair(to_double(b.substr(0, comma)), to_double(b.substr(comma + 1)));
            }
            return dsl::emit_var(v);
        }
        default:
            return {};
    }
}

}  // namespace

std::string TemplateGenerator::generate(const ContextPackage& package) const {
    std::ostringstream out;
    for (const TypedEntity& t : package.typed_entities) {
        const kg::Entity& e = t.entity;
        if (e.source == kg::Source::paper) {
            out << "! " << kg::to_string(e.kind) << " concept: " << e.name << "\n";
            continue;
        }
        if (std::string d = declaration(e); !d.empty()) out << d << "\n";
    }
    for (const std::string& id : package.targets) {
        const TypedEntity* found = nullptr;
        for (const TypedEntity& t : package.typed_entities)
            if (t.entity.id == id) found = &t;
        if (!found || found->entity.source != kg::Source::code) throw MissingExpression(id);
        std::string expr = found->entity.field_or(kg::field::expression);
        if (expr.empty()) throw MissingExpression(id);
        out << expr << "\n";
    }
    return out.str();
}

}  // namespace closurekb::codegen
