#pragma once
// Lithium-ion battery module line under incentive-based demand response:
// data model, profit evaluators, load-reduction and starvation checks, the
// MiniModel/knowledge-graph builders and a desk-scale enumeration oracle.
//
// Energies are kWh per slot and prices $/kWh per slot; hourly prices are
// expanded to slots when the case is constructed.

#include <closurekb/knowledge_graph.hpp>
#include <closurekb/model_dsl.hpp>

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace closurekb::battery {

class DimensionMismatch : public Error {
public:
    using Error::Error;
};
class MissingBufferSeries : public Error {
public:
    using Error::Error;
};
class TooLarge : public Error {
public:
    using Error::Error;
};
class InvalidCase : public Error {
public:
    using Error::Error;
};

struct Product {
    double price = 0.0;     // r_k, $/unit
    double quantity = 0.0;  // q_k, units
};

struct Material {
    double cost = 0.0;      // c_k, $/unit
    double quantity = 0.0;  // n_k, units
};

struct Machine {
    std::string name;                   // m<branch><position>, e.g. m13
    double p_on = 0.0;                  // kWh per slot when on
    double p_off = 0.0;                 // kWh per slot when off
    std::vector<std::string> upstream;  // buffers feeding this machine
    std::string buffer;                 // buffer this machine fills
};

struct BatteryCaseData {
    std::vector<Product> products;
    std::vector<Material> materials;
    int slots = 0;
    int minutes_per_slot = 10;
    int slots_per_hour = 6;
    std::vector<Machine> machines;
    std::vector<std::string> buffers;
    std::vector<double> price;  // per slot, size == slots

    // Throws InvalidCase on negative powers/prices, P_on < P_off, wrong price
    // length, or references to undeclared buffers.
    void check() const;
};

struct DrEvent {
    std::vector<int> t_star;  // 1-based slots
    double lambda = 0.0;      // $/kWh
    std::vector<double> b_ref;  // kWh, aligned with t_star
    double delta_l_min = 0.0;   // kWh over the event window

    void check(const BatteryCaseData& data) const;
};

struct Schedule {
    std::map<std::string, std::vector<int>> y;  // machine -> on/off per slot
    std::map<std::string, std::vector<double>> buffers;  // buffer -> level per slot
};

// ---- data construction ------------------------------------------------------

// Slot s (1-based) takes the price of hour floor((s-1)/slots_per_hour)+1.
std::vector<double> expand_hourly_prices(const std::vector<double>& hourly, int slots_per_hour);
double kw_to_slot_kwh(double kw, int minutes_per_slot);
// Inclusive hour range (1-based) to its slots.
std::vector<int> hour_slots(int first_hour, int last_hour, int slots_per_hour);

// Three upstream branches converging on a four-machine core line, 144
// ten-minute slots, event in hours 16-17. Power and price figures are
// illustrative, not measured.
BatteryCaseData reference_layout();
DrEvent reference_event(const BatteryCaseData& data);
// Two machines, few slots: small enough for exhaustive enumeration.
BatteryCaseData toy_case(int slots);

// ---- evaluators -------------------------------------------------------------

double lambda_energy(double p_on, double p_off, int y);
// Total machine energy in a slot (1-based).
double slot_energy(const BatteryCaseData& data, const Schedule& sched, int slot);
double objective_baseline(const BatteryCaseData& data, const Schedule& sched);
double incentive_payment(const BatteryCaseData& data, const Schedule& sched, const DrEvent& event);
double objective_dr(const BatteryCaseData& data, const Schedule& sched, const DrEvent& event);
// Sum over event slots of baseline minus actual energy.
double load_reduction(const BatteryCaseData& data, const Schedule& sched, const DrEvent& event);
bool check_load_reduction(const BatteryCaseData& data, const Schedule& sched, const DrEvent& event);

struct StarvationReport {
    bool feasible = true;
    std::optional<std::string> machine;
    std::optional<int> slot;
};
StarvationReport starvation_feasible(const BatteryCaseData& data, const Schedule& sched);

Schedule all_on(const BatteryCaseData& data);

// ---- models and knowledge graph ---------------------------------------------

// Base model: sets, prices, powers, machine and buffer variables, starvation
// constraints and the baseline profit objective.
std::string base_model_source(const BatteryCaseData& data);
// Event declarations, the load-reduction constraint and the DR objective;
// refers to base-model symbols.
std::string dr_model_source(const BatteryCaseData& data, const DrEvent& event);
// Self-contained DR model: base declarations, constraints, DR objective.
dsl::ModelAst full_dr_model(const BatteryCaseData& data, const DrEvent& event);

std::vector<kg::ConceptCard> concept_cards();

// Code entities for both models plus concept cards, aligned, with card
// relations lifted onto the code side. The lift makes the load-reduction
// constraint depend on the incentive rate.
kg::KnowledgeGraph build_battery_kg(const BatteryCaseData& data, const DrEvent& event,
                                    bool with_cards = true);

// Machine variable/parameter naming shared by the builders.
std::string power_on_symbol(const Machine& m);
std::string power_off_symbol(const Machine& m);

// ---- oracle -----------------------------------------------------------------

inline constexpr int kMaxEnumerationBits = 20;

struct Optimum {
    Schedule schedule;
    double objective = 0.0;
};
struct Infeasible {};
using OptimumResult = std::variant<Optimum, Infeasible>;

// Enumerates every on/off schedule (machine-major, slot-minor bit order) and
// keeps the first maximizer, i.e. the lexicographically smallest. With an
// event, schedules failing the load-reduction constraint are skipped. Fixed
// buffer series, when given, add the starvation filter.
OptimumResult brute_force_optimum(const BatteryCaseData& data, const std::optional<DrEvent>& event,
                                  const std::map<std::string, std::vector<double>>& buffers = {});

// ---- files ------------------------------------------------------------------

struct BatteryInstance {
    BatteryCaseData data;
    std::optional<DrEvent> event;
};

BatteryInstance parse_instance(std::string_view json_text);
std::string instance_to_json(const BatteryInstance& instance);
Schedule parse_schedule(std::string_view json_text);
std::string schedule_to_json(const Schedule& sched);

}  // namespace closurekb::battery
