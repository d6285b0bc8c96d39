#include <closurekb/battery.hpp>

#include <json.hpp>

namespace closurekb::battery {

namespace {

using nlohmann::json;

json parse_json(std::string_view text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidCase(std::string(what) + ": " + e.what());
    }
}

template <typename T>
T get(const json& obj, const char* key) {
    if (!obj.contains(key)) throw InvalidCase(std::string("missing '") + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw InvalidCase(std::string("'") + key + "' has the wrong type");
    }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    return obj.contains(key) ? get<T>(obj, key) : fallback;
}

}  // namespace

// Prices come either per slot ("price") or per hour ("hourly_price"),
// the latter expanded with slots_per_hour.
BatteryInstance parse_instance(std::string_view json_text) {
    json doc = parse_json(json_text, "battery instance");
    if (!doc.is_object()) throw InvalidCase("battery instance must be an object");
    BatteryInstance inst;
    BatteryCaseData& d = inst.data;
    d.slots = get<int>(doc, "slots");
    d.minutes_per_slot = get_or<int>(doc, "minutes_per_slot", 10);
    d.slots_per_hour = get_or<int>(doc, "slots_per_hour", 60 / std::max(1, d.minutes_per_slot));
    for (const json& p : get_or<json>(doc, "products", json::array()))
        d.products.push_back({get<double>(p, "price"), get<double>(p, "quantity")});
    for (const json& m : get_or<json>(doc, "materials", json::array()))
        d.materials.push_back({get<double>(m, "cost"), get<double>(m, "quantity")});
    d.buffers = get_or<std::vector<std::string>>(doc, "buffers", {});
    for (const json& m : get<json>(doc, "machines")) {
        d.machines.push_back({get<std::string>(m, "name"), get<double>(m, "p_on"),
                              get<double>(m, "p_off"),
                              get_or<std::vector<std::string>>(m, "upstream", {}),
                              get_or<std::string>(m, "buffer", "")});
    }
    if (doc.contains("price") == doc.contains("hourly_price")) {
        throw InvalidCase("give exactly one of 'price' and 'hourly_price'");
    }
    d.price = doc.contains("price")
                  ? get<std::vector<double>>(doc, "price")
                  : expand_hourly_prices(get<std::vector<double>>(doc, "hourly_price"), d.slots_per_hour);
    d.check();
    if (doc.contains("event") && !doc.at("event").is_null()) {
        const json& e = doc.at("event");
        DrEvent ev;
        ev.t_star = get<std::vector<int>>(e, "t_star");
        ev.lambda = get<double>(e, "lambda");
        ev.b_ref = get<std::vector<double>>(e, "b_ref");
        ev.delta_l_min = get<double>(e, "delta_l_min");
        ev.check(d);
        inst.event = std::move(ev);
    }
    return inst;
}

std::string instance_to_json(const BatteryInstance& instance) {
    const BatteryCaseData& d = instance.data;
    json doc;
    doc["slots"] = d.slots;
    doc["minutes_per_slot"] = d.minutes_per_slot;
    doc["slots_per_hour"] = d.slots_per_hour;
    doc["products"] = json::array();
    for (const Product& p : d.products) doc["products"].push_back({{"price", p.price}, {"quantity", p.quantity}});
    doc["materials"] = json::array();
    for (const Material& m : d.materials) doc["materials"].push_back({{"cost", m.cost}, {"quantity", m.quantity}});
    doc["buffers"] = d.buffers;
    doc["machines"] = json::array();
    for (const Machine& m : d.machines) {
        doc["machines"].push_back({{"name", m.name}, {"p_on", m.p_on}, {"p_off", m.p_off},
                                   {"upstream", m.upstream}, {"buffer", m.buffer}});
    }
    doc["price"] = d.price;
    if (instance.event) {
        const DrEvent& e = *instance.event;
        doc["event"] = {{"t_star", e.t_star}, {"lambda", e.lambda}, {"b_ref", e.b_ref},
                        {"delta_l_min", e.delta_l_min}};
    }
    return doc.dump(2);
}

Schedule parse_schedule(std::string_view json_text) {
    json doc = parse_json(json_text, "schedule");
    if (!doc.is_object()) throw InvalidCase("schedule must be an object");
    Schedule s;
    s.y = get<std::map<std::string, std::vector<int>>>(doc, "y");
    for (const auto& [name, series] : s.y)
        for (int v : series)
            if (v != 0 && v != 1) throw InvalidCase("status of '" + name + "' must be 0 or 1");
    s.buffers = get_or<std::map<std::string, std::vector<double>>>(doc, "buffers", {});
    for (const auto& [name, series] : s.buffers)
        for (double v : series)
            if (!(v >= 0.0)) throw InvalidCase("buffer '" + name + "' level must be non-negative");
    return s;
}

std::string schedule_to_json(const Schedule& sched) {
    json doc;
    doc["y"] = sched.y;
    doc["buffers"] = sched.buffers;
    return doc.dump(2);
}

}  // namespace closurekb::battery
