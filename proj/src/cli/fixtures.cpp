#include <closurekb/battery.hpp>
#include <closurekb/cli.hpp>
#include <closurekb/fjsp.hpp>

namespace closurekb::cli {

namespace {

using kg::CardRelation;
using kg::ConceptCard;
using kg::EdgeKind;
using kg::EntityKind;

// Paper side names the machine and its starvation rule; only the code
// side knows the upstream buffers.
std::vector<ConceptCard> m01_cards() {
    return {
        {"machine m01", EntityKind::decision_variable,
         "Module assembly machine m01 at the end of the line; it consumes stock from three "
         "upstream buffers.",
         std::string("m01"), "", {{EdgeKind::used_in, "m01 starvation constraint"}}, {}},
        {"m01 starvation constraint", EntityKind::constraint,
         "Assembly may run in a slot only if every feeding buffer held stock one slot earlier.",
         std::nullopt, "Starved machines idle: a line stage without input stock cannot produce.",
         {}, {}},
    };
}

// The window constraint's dependencies (start times, assignments, big-M,
// window bounds) carry descriptions sharing no token with the query.
std::vector<ConceptCard> window_cards() {
    return {
        {"unavailability window constraint", EntityKind::constraint,
         "An operation assigned to a machine under maintenance must finish before the window opens.",
         std::string("winBefore"), "", {}, {"maintenance window constraint"}},
        {"window release constraint", EntityKind::constraint,
         "Otherwise the operation may only start once the machine is released after the window.",
         std::string("winAfter"), "", {}, {}},
        {"big-M constant", EntityKind::parameter,
         "Large bound deactivating disjunctive inequalities; sized from total processing time.",
         std::string("bigM"), "", {}, {}},
    };
}

fjsp::FjspInstance window_instance() {
    fjsp::FjspInstance inst = fjsp::parse_fjs("2 2\n2 2 1 3 2 4 1 2 2\n1 2 1 2 2 3\n");
    inst.windows = {{{2.0, 5.0}}, {}};
    return inst;
}

}  // namespace

std::map<std::string, std::string> corpus_fixtures() {
    std::map<std::string, std::string> files;
    const battery::BatteryCaseData data = battery::reference_layout();
    const battery::DrEvent event = battery::reference_event(data);
    const std::string base = battery::base_model_source(data);

    files["battery_dr/models/battery_base.mm"] = base;
    files["battery_dr/models/battery_dr.mm"] = battery::dr_model_source(data, event);
    files["battery_dr/cards/battery_concepts.json"] = kg::concept_cards_to_json(battery::concept_cards());
    files["battery_dr/query.txt"] =
        "Add a load-reduction constraint for the demand-response event in the battery production case\n";

    files["battery_m01/models/battery_base.mm"] = base;
    files["battery_m01/cards/m01.json"] = kg::concept_cards_to_json(m01_cards());
    files["battery_m01/query.txt"] = "explain the constraints of machine m01 and generate corresponding LINGO code\n";

    const fjsp::FjspInstance inst = window_instance();
    files["fjsp_window/models/fjsp_unavailability.mm"] =
        dsl::emit_model(fjsp::build_fjsp_model(inst, fjsp::Variant::unavailability), dsl::Dialect::canonical);
    files["fjsp_window/cards/window.json"] = kg::concept_cards_to_json(window_cards());
    files["fjsp_window/query.txt"] = "Add the unavailability window constraint for machine maintenance\n";
    files["fjsp_window/instance.fjs"] = fjsp::to_fjs(inst);
    files["fjsp_window/windows.json"] = fjsp::windows_to_json(inst) + "\n";

    // Emits code with a symbol no graph can supply.
    files["mocks/missing_symbol.sh"] =
        "#!/bin/sh\n"
        "cat >/dev/null\n"
        "printf 'var x binary;\\ncon extra: x + ghost >= 1;\\nmax obj: x;\\n'\n";
    return files;
}

}  // namespace closurekb::cli
