#include <closurekb/fjsp.hpp>

#include <sstream>

namespace closurekb::fjsp {

namespace {

using dsl::emit_number;

std::string list_literal(const std::vector<double>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += emit_number(values[i]);
    }
    return out + "]";
}

std::string baseline_source(const FjspInstance& inst, bool with_windows) {
    const int n = inst.total_operations();
    const int m = inst.n_machines;
    std::vector<double> p, elig, next;
    for (int i = 0; i < inst.n_jobs; ++i) {
        for (std::size_t j = 0; j < inst.ops[i].size(); ++j) {
            for (int k = 0; k < m; ++k) {
                auto t = inst.time_on(i, static_cast<int>(j), k);
                p.push_back(t.value_or(0.0));
                elig.push_back(t ? 1.0 : 0.0);
            }
            next.push_back(j + 1 < inst.ops[i].size() ? 1.0 : 0.0);
        }
    }
    const double bigm = big_m(inst);
    std::ostringstream out;
    out << "! flexible job shop: operations numbered job-major\n";
    out << "set ops = 1.." << n << ";\n";
    out << "set machines = 1.." << m << ";\n";
    out << "param p{ops, machines} = " << list_literal(p) << ";\n";
    out << "param elig{ops, machines} = " << list_literal(elig) << ";\n";
    out << "param nextInJob{ops} = " << list_literal(next) << ";\n";
    out << "param bigM = " << emit_number(bigm) << ";\n";
    if (with_windows) {
        std::vector<double> wm, ws, we;
        for (int k = 0; k < m && k < static_cast<int>(inst.windows.size()); ++k) {
            for (const Window& w : inst.windows[k]) {
                wm.push_back(k + 1);
                ws.push_back(w.start);
                we.push_back(w.end);
            }
        }
        out << "set windows = 1.." << wm.size() << ";\n";
        out << "param winMachine{windows} = " << list_literal(wm) << ";\n";
        out << "param winStart{windows} = " << list_literal(ws) << ";\n";
        out << "param winEnd{windows} = " << list_literal(we) << ";\n";
    }
    out << "var x{ops, machines} binary;\n";
    out << "var s{ops} continuous in [0, " << emit_number(bigm) << "];\n";
    out << "var y{ops, ops} binary;\n";
    if (with_windows) out << "var z{ops, machines, windows} binary;\n";
    out << "var Cmax continuous in [0, " << emit_number(bigm) << "];\n";
    out << "con assign{o in ops}: sum{k in machines} x[o,k] = 1;\n";
    out << "con eligibility{o in ops, k in machines : elig[o,k] = 0}: x[o,k] = 0;\n";
    out << "con prec{o in ops : nextInJob[o] = 1}: s[o+1] >= s[o] + sum{k in machines} p[o,k]*x[o,k];\n";
    // y[o,q] = 1 orders o before q when both run on machine k.
    out << "con capA{o in ops, q in ops, k in machines : o < q and elig[o,k] = 1 and elig[q,k] = 1}: "
           "s[q] >= s[o] + p[o,k] - bigM*(3 - y[o,q] - x[o,k] - x[q,k]);\n";
    out << "con capB{o in ops, q in ops, k in machines : o < q and elig[o,k] = 1 and elig[q,k] = 1}: "
           "s[o] >= s[q] + p[q,k] - bigM*(2 + y[o,q] - x[o,k] - x[q,k]);\n";
    out << "con makespan{o in ops}: Cmax >= s[o] + sum{k in machines} p[o,k]*x[o,k];\n";
    if (with_windows) {
        // z = 1: the operation finishes before the window; z = 0: it starts after.
        out << "con winBefore{o in ops, k in machines, w in windows : winMachine[w] = k and elig[o,k] = 1}: "
               "s[o] + p[o,k] <= winStart[w] + bigM*(1 - z[o,k,w]) + bigM*(1 - x[o,k]);\n";
        out << "con winAfter{o in ops, k in machines, w in windows : winMachine[w] = k and elig[o,k] = 1}: "
               "s[o] >= winEnd[w] - bigM*z[o,k,w] - bigM*(1 - x[o,k]);\n";
    }
    out << "min minMakespan: Cmax;\n";
    return out.str();
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& alternate_lexicon() {
    static const std::vector<std::pair<std::string, std::string>> table = {
        {"ops", "tasks"},
        {"machines", "workcenters"},
        {"p", "runTime"},
        {"elig", "capable"},
        {"nextInJob", "nextInWorkOrder"},
        {"x", "route"},
        {"s", "startTime"},
        {"y", "sequence"},
        {"Cmax", "leadTime"},
        {"assign", "routeOnce"},
        {"eligibility", "capability"},
        {"prec", "workOrderFlow"},
        {"capA", "workcenterLoadA"},
        {"capB", "workcenterLoadB"},
        {"makespan", "leadTimeBound"},
        {"minMakespan", "minLeadTime"},
    };
    return table;
}

kg::KnowledgeGraph build_fjsp_kg(const FjspInstance& inst) {
    kg::KnowledgeGraph graph;
    dsl::ModelAst ast = dsl::parse_model(baseline_source(inst, false));
    kg::ingest_model(ast, dsl::extract_symbols(ast), graph);
    std::vector<kg::ConceptCard> cards;
    for (const auto& [standard, alternate] : alternate_lexicon()) {
        const kg::Entity& target = graph.entity(standard);
        kg::ConceptCard card;
        card.name = alternate;
        card.kind = target.kind;
        card.description = "Shop-floor term for the scheduling symbol it aligns to.";
        card.solver_symbol_hint = standard;
        cards.push_back(std::move(card));
    }
    kg::ingest_concept_cards(cards, graph);
    kg::align(graph);
    return graph;
}

dsl::ModelAst build_fjsp_model(const FjspInstance& inst, Variant variant) {
    inst.check();
    switch (variant) {
        case Variant::baseline:
            return dsl::parse_model(baseline_source(inst, false));
        case Variant::unavailability:
            if (!inst.has_windows()) throw MissingWindows("unavailability variant needs machine windows");
            return dsl::parse_model(baseline_source(inst, true));
        case Variant::alt_terms: {
            // The renaming comes from the graph's alignment links, so a term
            // only applies when its card aligned to exactly one symbol.
            kg::KnowledgeGraph graph = build_fjsp_kg(inst);
            std::map<std::string, std::string> mapping;
            for (const auto& [standard, alternate] : alternate_lexicon()) {
                auto hits = graph.neighbors(kg::card_id(alternate), kg::EdgeKinds{kg::EdgeKind::aligns_to},
                                            kg::Direction::out);
                if (hits.size() == 1) mapping[hits.front()] = alternate;
            }
            return dsl::rename_symbols(dsl::parse_model(baseline_source(inst, false)), mapping);
        }
    }
    return {};
}

}  // namespace closurekb::fjsp
