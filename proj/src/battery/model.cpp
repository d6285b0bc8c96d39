#include <closurekb/battery.hpp>

#include <sstream>

namespace closurekb::battery {

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

// Sum over machines of P_on*y + P_off*(1 - y) at slot variable `t`.
std::string energy_expr(const BatteryCaseData& data, const std::string& t) {
    if (data.machines.empty()) return "0";
    std::string out;
    for (const Machine& m : data.machines) {
        if (!out.empty()) out += " + ";
        out += power_on_symbol(m) + "*" + m.name + "[" + t + "] + " + power_off_symbol(m) + "*(1 - " +
               m.name + "[" + t + "])";
    }
    return out;
}

std::string fixed_terms_expr(const BatteryCaseData& data) {
    std::string out;
    if (!data.products.empty()) out += "sum{k in products} prodPrice[k]*prodQty[k]";
    if (!data.materials.empty()) {
        out += out.empty() ? "-" : " - ";
        out += "sum{k in materials} matCost[k]*matQty[k]";
    }
    return out;
}

std::string energy_cost_expr(const BatteryCaseData& data) {
    return "sum{t in timeSequence} price[t]*(" + energy_expr(data, "t") + ")";
}

std::string reduction_expr(const BatteryCaseData& data) {
    return "sum{t in Tstar} Bref[t] - sum{t in Tstar} (" + energy_expr(data, "t") + ")";
}

std::string base_source(const BatteryCaseData& data, bool with_objective) {
    data.check();
    std::ostringstream out;
    out << "! battery module line: machines, buffers, starvation\n";
    out << "set timeSequence = 1.." << data.slots << ";\n";
    if (!data.products.empty()) out << "set products = 1.." << data.products.size() << ";\n";
    if (!data.materials.empty()) out << "set materials = 1.." << data.materials.size() << ";\n";
    if (!data.products.empty()) {
        std::vector<double> r, q;
        for (const Product& p : data.products) {
            r.push_back(p.price);
            q.push_back(p.quantity);
        }
        out << "param prodPrice{products} = " << list_literal(r) << ";\n";
        out << "param prodQty{products} = " << list_literal(q) << ";\n";
    }
    if (!data.materials.empty()) {
        std::vector<double> c, n;
        for (const Material& m : data.materials) {
            c.push_back(m.cost);
            n.push_back(m.quantity);
        }
        out << "param matCost{materials} = " << list_literal(c) << ";\n";
        out << "param matQty{materials} = " << list_literal(n) << ";\n";
    }
    out << "param price{timeSequence} = " << list_literal(data.price) << ";\n";
    for (const Machine& m : data.machines) {
        out << "param " << power_on_symbol(m) << " = " << emit_number(m.p_on) << ";\n";
        out << "param " << power_off_symbol(m) << " = " << emit_number(m.p_off) << ";\n";
    }
    for (const Machine& m : data.machines) out << "var " << m.name << "{timeSequence} binary;\n";
    for (const std::string& b : data.buffers) out << "var " << b << "{timeSequence} integer;\n";
    for (const Machine& m : data.machines) {
        if (m.upstream.empty()) continue;
        out << "con " << m.name << "_init: " << m.name << "[1] = 0;\n";
        for (const std::string& b : m.upstream) {
            out << "con " << m.name << "_from_" << b << "{i in timeSequence : i >= 2}: " << m.name
                << "[i] <= " << b << "[i-1];\n";
        }
    }
    if (with_objective) {
        std::string fixed = fixed_terms_expr(data);
        out << "max profitBase: " << (fixed.empty() ? "-" : fixed + " - ") << energy_cost_expr(data)
            << ";\n";
    }
    return out.str();
}

// The model language has range sets only, so the event window must be a
// contiguous run of slots.
std::pair<int, int> event_range(const DrEvent& event) {
    if (event.t_star.empty()) throw InvalidCase("model emission needs a non-empty event window");
    for (std::size_t k = 1; k < event.t_star.size(); ++k) {
        if (event.t_star[k] != event.t_star[k - 1] + 1) {
            throw InvalidCase("model emission needs contiguous ascending event slots");
        }
    }
    return {event.t_star.front(), event.t_star.back()};
}

kg::ParsedModel parsed(const std::string& source) {
    dsl::ModelAst ast = dsl::parse_model(source);
    dsl::SymbolTable table = dsl::extract_symbols(ast);
    return {std::move(ast), std::move(table)};
}

}  // namespace

std::string power_on_symbol(const Machine& m) {
    return m.name + "Power";
}

std::string power_off_symbol(const Machine& m) {
    return m.name + "Idle";
}

std::string base_model_source(const BatteryCaseData& data) {
    return base_source(data, true);
}

std::string dr_model_source(const BatteryCaseData& data, const DrEvent& event) {
    event.check(data);
    auto [lo, hi] = event_range(event);
    std::ostringstream out;
    out << "! demand-response event: window, baseline, incentive\n";
    out << "set Tstar = " << lo << ".." << hi << ";\n";
    out << "param Bref{Tstar} = " << list_literal(event.b_ref) << ";\n";
    out << "param dLmin = " << emit_number(event.delta_l_min) << ";\n";
    out << "param lambda = " << emit_number(event.lambda) << ";\n";
    out << "con loadReduction: " << reduction_expr(data) << " >= dLmin;\n";
    std::string fixed = fixed_terms_expr(data);
    out << "max profitDR: " << (fixed.empty() ? "-" : fixed + " - ") << energy_cost_expr(data)
        << " + lambda*(" << reduction_expr(data) << ");\n";
    return out.str();
}

dsl::ModelAst full_dr_model(const BatteryCaseData& data, const DrEvent& event) {
    return dsl::parse_model(base_source(data, false) + dr_model_source(data, event));
}

std::vector<kg::ConceptCard> concept_cards() {
    using kg::EdgeKind;
    using kg::EntityKind;
    return {
        {"demand-response event", EntityKind::concept_,
         "Incentive-based demand-response event: a utility-announced window during which the "
         "manufacturer is paid for consuming less than its baseline.",
         std::nullopt,
         "During an incentive-based event the utility pays a fixed rate per kWh of reduction "
         "below the customer baseline, provided a minimum reduction is reached.",
         {},
         {"DR event", "IBDR event"}},
        {"event window", EntityKind::index_set,
         "Time slots covered by the demand-response event.", std::string("Tstar"), "", {}, {}},
        {"incentive rate", EntityKind::parameter,
         "Payment per kWh of load reduction offered during the demand-response event under the "
         "incentive mechanism.",
         std::string("lambda"), "", {{EdgeKind::depends_on, "event window"}}, {"incentive price"}},
        {"customer baseline load", EntityKind::parameter,
         "Reference consumption per event slot, estimated from historical consumption.",
         std::string("Bref"), "", {{EdgeKind::depends_on, "event window"}}, {"reference consumption"}},
        {"minimum load reduction", EntityKind::parameter,
         "Least total reduction over the event window that qualifies for incentive payments.",
         std::string("dLmin"), "", {}, {}},
        {"energy price", EntityKind::parameter, "Day-ahead electricity price per slot.",
         std::string("price"), "", {}, {"electricity price"}},
        {"machine status", EntityKind::decision_variable,
         "Binary on/off state of a machine in a time slot; off machines draw idle power.",
         std::nullopt, "", {}, {}},
        {"buffer level", EntityKind::decision_variable,
         "Integer inventory of intermediate products held between two machines.", std::nullopt, "",
         {}, {}},
        {"load-reduction constraint", EntityKind::constraint,
         "Baseline minus actual consumption summed over the event window must reach the minimum "
         "load reduction.",
         std::string("loadReduction"),
         "Participation is only paid when the reduction over the window meets the required minimum.",
         {{EdgeKind::depends_on, "customer baseline load"},
          {EdgeKind::depends_on, "minimum load reduction"},
          {EdgeKind::depends_on, "incentive rate"},
          {EdgeKind::depends_on, "machine status"},
          {EdgeKind::depends_on, "event window"}},
         {}},
        {"starvation constraint", EntityKind::constraint,
         "A machine may run in a slot only if each upstream buffer held material at the end of "
         "the previous slot; in the first slot it stays off.",
         std::nullopt,
         "Starvation couples machine status to the inventory of the buffers feeding it one slot "
         "earlier.",
         {{EdgeKind::depends_on, "machine status"}, {EdgeKind::depends_on, "buffer level"}},
         {"starvation"}},
        {"baseline profit objective", EntityKind::objective,
         "Revenue minus material cost minus energy cost over the horizon.",
         std::string("profitBase"), "",
         {{EdgeKind::depends_on, "energy price"}, {EdgeKind::depends_on, "machine status"}},
         {"baseline profit"}},
        {"demand-response profit objective", EntityKind::objective,
         "Baseline profit plus the incentive payment earned for reducing load during the event.",
         std::string("profitDR"), "",
         {{EdgeKind::depends_on, "energy price"},
          {EdgeKind::depends_on, "incentive rate"},
          {EdgeKind::depends_on, "customer baseline load"},
          {EdgeKind::depends_on, "machine status"}},
         {"DR objective", "incentive objective"}},
    };
}

kg::KnowledgeGraph build_battery_kg(const BatteryCaseData& data, const DrEvent& event,
                                    bool with_cards) {
    kg::KnowledgeGraph graph;
    kg::ingest_models({parsed(base_model_source(data)), parsed(dr_model_source(data, event))}, graph);
    if (with_cards) {
        kg::ingest_concept_cards(concept_cards(), graph);
        kg::align(graph);
        // The card ties the reduction to the incentive rate, which the
        // inequality itself never mentions.
        kg::lift_card_relations(graph);
    }
    return graph;
}

}  // namespace closurekb::battery
