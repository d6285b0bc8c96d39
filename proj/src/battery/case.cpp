#include <closurekb/battery.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace closurekb::battery {

namespace {

const std::vector<int>& machine_series(const Schedule& sched, const Machine& m, int slots) {
    auto it = sched.y.find(m.name);
    if (it == sched.y.end()) throw DimensionMismatch("schedule has no series for '" + m.name + "'");
    if (static_cast<int>(it->second.size()) != slots) {
        throw DimensionMismatch("series for '" + m.name + "' has " +
                                std::to_string(it->second.size()) + " slots, expected " +
                                std::to_string(slots));
    }
    return it->second;
}

void check_schedule(const BatteryCaseData& data, const Schedule& sched) {
    if (static_cast<int>(data.price.size()) != data.slots) {
        throw DimensionMismatch("price has " + std::to_string(data.price.size()) +
                                " entries for " + std::to_string(data.slots) + " slots");
    }
    for (const Machine& m : data.machines) machine_series(sched, m, data.slots);
    if (sched.y.size() != data.machines.size()) {
        throw DimensionMismatch("schedule names machines absent from the case");
    }
}

void check_event_dims(const BatteryCaseData& data, const DrEvent& event) {
    if (event.b_ref.size() != event.t_star.size()) {
        throw DimensionMismatch("b_ref must have one entry per event slot");
    }
    for (int t : event.t_star) {
        if (t < 1 || t > data.slots) {
            throw DimensionMismatch("event slot " + std::to_string(t) + " outside 1.." +
                                    std::to_string(data.slots));
        }
    }
}

double fixed_terms(const BatteryCaseData& data) {
    double v = 0.0;
    for (const Product& p : data.products) v += p.price * p.quantity;
    for (const Material& m : data.materials) v -= m.cost * m.quantity;
    return v;
}

double energy_cost(const BatteryCaseData& data, const Schedule& sched) {
    double cost = 0.0;
    for (int t = 1; t <= data.slots; ++t) cost += data.price[t - 1] * slot_energy(data, sched, t);
    return cost;
}

}  // namespace

void BatteryCaseData::check() const {
    if (slots < 0) throw InvalidCase("negative slot count");
    if (minutes_per_slot <= 0 || slots_per_hour <= 0) throw InvalidCase("slot length must be positive");
    if (static_cast<int>(price.size()) != slots) {
        throw InvalidCase("price has " + std::to_string(price.size()) + " entries for " +
                          std::to_string(slots) + " slots");
    }
    for (double p : price)
        if (!(p >= 0.0)) throw InvalidCase("negative price");
    for (const Product& p : products)
        if (!(p.price >= 0.0) || !(p.quantity >= 0.0)) throw InvalidCase("negative product data");
    for (const Material& m : materials)
        if (!(m.cost >= 0.0) || !(m.quantity >= 0.0)) throw InvalidCase("negative material data");
    std::set<std::string> declared(buffers.begin(), buffers.end());
    std::set<std::string> names;
    for (const Machine& m : machines) {
        if (m.name.empty()) throw InvalidCase("machine without a name");
        if (!names.insert(m.name).second) throw InvalidCase("duplicate machine '" + m.name + "'");
        if (!(m.p_off >= 0.0) || !(m.p_on >= 0.0)) throw InvalidCase("negative power on " + m.name);
        // Switching off must never raise consumption.
        if (m.p_on < m.p_off) throw InvalidCase("P_on < P_off on " + m.name);
        for (const std::string& b : m.upstream)
            if (!declared.count(b)) throw InvalidCase(m.name + " reads undeclared buffer '" + b + "'");
        if (!m.buffer.empty() && !declared.count(m.buffer)) {
            throw InvalidCase(m.name + " fills undeclared buffer '" + m.buffer + "'");
        }
    }
}

void DrEvent::check(const BatteryCaseData& data) const {
    if (!(lambda >= 0.0)) throw InvalidCase("negative incentive rate");
    if (b_ref.size() != t_star.size()) throw InvalidCase("b_ref must cover every event slot");
    std::set<int> seen;
    for (int t : t_star) {
        if (t < 1 || t > data.slots) throw InvalidCase("event slot outside the horizon");
        if (!seen.insert(t).second) throw InvalidCase("repeated event slot");
    }
}

std::vector<double> expand_hourly_prices(const std::vector<double>& hourly, int slots_per_hour) {
    if (slots_per_hour <= 0) throw InvalidCase("slots_per_hour must be positive");
    std::vector<double> out;
    out.reserve(hourly.size() * static_cast<std::size_t>(slots_per_hour));
    for (double p : hourly)
        for (int k = 0; k < slots_per_hour; ++k) out.push_back(p);
    return out;
}

double kw_to_slot_kwh(double kw, int minutes_per_slot) {
    return kw * minutes_per_slot / 60.0;
}

std::vector<int> hour_slots(int first_hour, int last_hour, int slots_per_hour) {
    std::vector<int> out;
    for (int s = (first_hour - 1) * slots_per_hour + 1; s <= last_hour * slots_per_hour; ++s) {
        out.push_back(s);
    }
    return out;
}

double lambda_energy(double p_on, double p_off, int y) {
    return p_on * y + p_off * (1 - y);
}

double slot_energy(const BatteryCaseData& data, const Schedule& sched, int slot) {
    double e = 0.0;
    for (const Machine& m : data.machines) {
        const auto& y = machine_series(sched, m, data.slots);
        e += lambda_energy(m.p_on, m.p_off, y[slot - 1]);
    }
    return e;
}

double objective_baseline(const BatteryCaseData& data, const Schedule& sched) {
    check_schedule(data, sched);
    return fixed_terms(data) - energy_cost(data, sched);
}

double load_reduction(const BatteryCaseData& data, const Schedule& sched, const DrEvent& event) {
    check_schedule(data, sched);
    check_event_dims(data, event);
    double r = 0.0;
    for (std::size_t k = 0; k < event.t_star.size(); ++k) {
        r += event.b_ref[k] - slot_energy(data, sched, event.t_star[k]);
    }
    return r;
}

double incentive_payment(const BatteryCaseData& data, const Schedule& sched, const DrEvent& event) {
    return event.lambda * load_reduction(data, sched, event);
}

double objective_dr(const BatteryCaseData& data, const Schedule& sched, const DrEvent& event) {
    return objective_baseline(data, sched) + incentive_payment(data, sched, event);
}

bool check_load_reduction(const BatteryCaseData& data, const Schedule& sched, const DrEvent& event) {
    return load_reduction(data, sched, event) >= event.delta_l_min;
}

StarvationReport starvation_feasible(const BatteryCaseData& data, const Schedule& sched) {
    check_schedule(data, sched);
    for (const Machine& m : data.machines) {
        if (m.upstream.empty()) continue;
        std::vector<const std::vector<double>*> levels;
        for (const std::string& b : m.upstream) {
            auto it = sched.buffers.find(b);
            if (it == sched.buffers.end()) {
                throw MissingBufferSeries("no level series for buffer '" + b + "' feeding " + m.name);
            }
            if (static_cast<int>(it->second.size()) < data.slots - 1) {
                throw DimensionMismatch("buffer '" + b + "' series too short");
            }
            levels.push_back(&it->second);
        }
        const auto& y = sched.y.at(m.name);
        for (int i = 1; i <= data.slots; ++i) {
            bool ok = i == 1 ? y[0] == 0 : std::all_of(levels.begin(), levels.end(), [&](auto* b) {
                return y[i - 1] <= (*b)[i - 2];
            });
            if (!ok) return {false, m.name, i};
        }
    }
    return {};
}

Schedule all_on(const BatteryCaseData& data) {
    Schedule s;
    for (const Machine& m : data.machines) s.y[m.name] = std::vector<int>(data.slots, 1);
    return s;
}

BatteryCaseData reference_layout() {
    BatteryCaseData d;
    d.slots = 144;
    d.minutes_per_slot = 10;
    d.slots_per_hour = 6;
    d.products = {{5.0, 828.0}};
    d.materials = {{1.2, 828.0}};
    d.buffers = {"B11", "B12", "B13", "B21", "B22", "B31", "B01", "B02", "B03", "B04"};
    // {name, kW on, kW off, upstream, output}
    struct Row {
        const char* name;
        double on, off;
        std::vector<std::string> up;
        const char* out;
    };
    const Row rows[] = {
        {"m11", 18, 3, {}, "B11"},      {"m12", 24, 4, {"B11"}, "B12"},
        {"m13", 15, 2, {"B12"}, "B13"}, {"m21", 21, 3, {}, "B21"},
        {"m22", 12, 2, {"B21"}, "B22"}, {"m31", 27, 5, {}, "B31"},
        {"m01", 30, 5, {"B13", "B22", "B31"}, "B01"},
        {"m02", 36, 6, {"B01"}, "B02"}, {"m03", 24, 4, {"B02"}, "B03"},
        {"m04", 12, 2, {"B03"}, "B04"},
    };
    for (const Row& r : rows) {
        d.machines.push_back({r.name, kw_to_slot_kwh(r.on, d.minutes_per_slot),
                              kw_to_slot_kwh(r.off, d.minutes_per_slot), r.up, r.out});
    }
    const std::vector<double> hourly = {0.08, 0.07, 0.07, 0.06, 0.06, 0.07, 0.09, 0.12,
                                        0.14, 0.15, 0.15, 0.14, 0.13, 0.13, 0.15, 0.19,
                                        0.21, 0.18, 0.16, 0.14, 0.12, 0.11, 0.10, 0.09};
    d.price = expand_hourly_prices(hourly, d.slots_per_hour);
    return d;
}

DrEvent reference_event(const BatteryCaseData& data) {
    DrEvent e;
    e.t_star = hour_slots(16, 17, data.slots_per_hour);
    e.lambda = 0.54;
    e.delta_l_min = 10.0;
    // Baseline: the whole line running during the event window.
    Schedule on = all_on(data);
    for (int t : e.t_star) e.b_ref.push_back(slot_energy(data, on, t));
    return e;
}

BatteryCaseData toy_case(int slots) {
    BatteryCaseData d;
    d.slots = slots;
    d.minutes_per_slot = 60;
    d.slots_per_hour = 1;
    d.products = {{5.0, 2.0}};
    d.materials = {{1.0, 3.0}};
    d.buffers = {"B11", "B01"};
    d.machines = {{"m11", 2.0, 0.5, {}, "B11"}, {"m01", 3.0, 1.0, {"B11"}, "B01"}};
    for (int t = 1; t <= slots; ++t) d.price.push_back(0.1 * t);
    return d;
}

OptimumResult brute_force_optimum(const BatteryCaseData& data, const std::optional<DrEvent>& event,
                                  const std::map<std::string, std::vector<double>>& buffers) {
    const int n_machines = static_cast<int>(data.machines.size());
    const long long bits = static_cast<long long>(n_machines) * data.slots;
    if (bits > kMaxEnumerationBits) {
        throw TooLarge(std::to_string(bits) + " binary decisions exceed the enumeration bound of " +
                       std::to_string(kMaxEnumerationBits));
    }
    Schedule sched;
    for (const Machine& m : data.machines) sched.y[m.name] = std::vector<int>(data.slots, 0);
    sched.buffers = buffers;
    const bool starvation = !buffers.empty();

    std::optional<Optimum> best;
    const unsigned long long count = 1ULL << bits;
    for (unsigned long long mask = 0; mask < count; ++mask) {
        // The first decision is the most significant bit, so ascending masks
        // visit schedules in lexicographic order.
        for (int m = 0; m < n_machines; ++m) {
            auto& y = sched.y[data.machines[m].name];
            for (int t = 0; t < data.slots; ++t) {
                long long pos = bits - 1 - (static_cast<long long>(m) * data.slots + t);
                y[t] = static_cast<int>((mask >> pos) & 1ULL);
            }
        }
        if (event && !check_load_reduction(data, sched, *event)) continue;
        if (starvation && !starvation_feasible(data, sched).feasible) continue;
        double v = event ? objective_dr(data, sched, *event) : objective_baseline(data, sched);
        if (!best || v > best->objective) best = Optimum{sched, v};
    }
    if (!best) return Infeasible{};
    return *best;
}

}  // namespace closurekb::battery
