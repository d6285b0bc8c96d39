#include <closurekb/fjsp.hpp>

#include <closurekb/model_dsl.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace closurekb::fjsp {

MalformedInstance::MalformedInstance(std::size_t line, const std::string& message)
    : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

int FjspInstance::total_operations() const {
    int n = 0;
    for (const auto& job : ops) n += static_cast<int>(job.size());
    return n;
}

bool FjspInstance::has_windows() const {
    for (const auto& w : windows)
        if (!w.empty()) return true;
    return false;
}

int FjspInstance::flat_index(int job, int op) const {
    int n = 0;
    for (int i = 0; i < job; ++i) n += static_cast<int>(ops[i].size());
    return n + op;
}

std::optional<double> FjspInstance::time_on(int job, int op, int machine) const {
    for (const Eligible& e : ops[job][op])
        if (e.machine == machine) return e.time;
    return std::nullopt;
}

void FjspInstance::check() const {
    if (n_jobs < 0 || n_machines < 1) throw DimensionMismatch("need at least one machine");
    if (static_cast<int>(ops.size()) != n_jobs) throw DimensionMismatch("job count mismatch");
    for (int i = 0; i < n_jobs; ++i) {
        for (std::size_t j = 0; j < ops[i].size(); ++j) {
            const auto& el = ops[i][j];
            if (el.empty()) {
                throw DimensionMismatch("operation (" + std::to_string(i + 1) + "," +
                                        std::to_string(j + 1) + ") has no eligible machine");
            }
            for (const Eligible& e : el) {
                if (e.machine < 0 || e.machine >= n_machines) throw DimensionMismatch("machine out of range");
                if (!(e.time > 0)) throw DimensionMismatch("processing times must be positive");
            }
        }
    }
    if (!windows.empty() && static_cast<int>(windows.size()) != n_machines) {
        throw DimensionMismatch("windows must be given per machine");
    }
    for (const auto& ws : windows)
        for (const Window& w : ws)
            if (!(w.start < w.end) || w.start < 0) throw DimensionMismatch("degenerate window");
}

FjspSolution FjspSolution::from_choices(const FjspInstance& inst,
                                        const std::vector<std::vector<int>>& machine,
                                        const std::vector<std::vector<double>>& start) {
    FjspSolution sol;
    sol.s = start;
    sol.x.resize(inst.n_jobs);
    for (int i = 0; i < inst.n_jobs; ++i) {
        for (std::size_t j = 0; j < inst.ops[i].size(); ++j) {
            std::vector<int> row(inst.n_machines, 0);
            row.at(machine[i][j]) = 1;
            sol.x[i].push_back(std::move(row));
            double p = inst.time_on(i, static_cast<int>(j), machine[i][j]).value_or(0.0);
            sol.makespan = std::max(sol.makespan, start[i][j] + p);
        }
    }
    return sol;
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    for (std::string t; in >> t;) out.push_back(t);
    return out;
}

long to_int(const std::string& tok, std::size_t line, const char* what) {
    try {
        std::size_t used = 0;
        long v = std::stol(tok, &used);
        if (used == tok.size()) return v;
    } catch (const std::exception&) {
    }
    throw MalformedInstance(line, std::string("expected integer ") + what + ", found '" + tok + "'");
}

double to_num(const std::string& tok, std::size_t line, const char* what) {
    try {
        std::size_t used = 0;
        double v = std::stod(tok, &used);
        if (used == tok.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw MalformedInstance(line, std::string("expected number ") + what + ", found '" + tok + "'");
}

}  // namespace

FjspInstance parse_fjs(std::string_view text) {
    std::vector<std::pair<std::size_t, std::vector<std::string>>> lines;
    std::istringstream in{std::string(text)};
    std::size_t no = 0;
    for (std::string line; std::getline(in, line);) {
        ++no;
        auto toks = split(line);
        if (!toks.empty()) lines.emplace_back(no, std::move(toks));
    }
    if (lines.empty()) throw MalformedInstance(1, "empty instance");

    FjspInstance inst;
    const auto& [hline, header] = lines.front();
    if (header.size() < 2 || header.size() > 3) {
        throw MalformedInstance(hline, "header must be 'n_jobs n_machines [flexibility]'");
    }
    inst.n_jobs = static_cast<int>(to_int(header[0], hline, "job count"));
    inst.n_machines = static_cast<int>(to_int(header[1], hline, "machine count"));
    if (header.size() == 3) to_num(header[2], hline, "flexibility");
    if (inst.n_jobs < 0 || inst.n_machines < 1) throw MalformedInstance(hline, "bad dimensions");

    if (static_cast<int>(lines.size()) - 1 < inst.n_jobs) {
        std::size_t at = lines.back().first + 1;
        throw MalformedInstance(at, "header declares " + std::to_string(inst.n_jobs) +
                                        " jobs, found " + std::to_string(lines.size() - 1));
    }
    if (static_cast<int>(lines.size()) - 1 > inst.n_jobs) {
        throw MalformedInstance(lines[inst.n_jobs + 1].first, "more job lines than declared");
    }

    for (int i = 0; i < inst.n_jobs; ++i) {
        const auto& [ln, toks] = lines[i + 1];
        std::size_t pos = 0;
        auto take = [&, ln = ln, &toks = toks]() -> const std::string& {
            if (pos >= toks.size()) throw MalformedInstance(ln, "job line ends early");
            return toks[pos++];
        };
        long n_ops = to_int(take(), ln, "operation count");
        if (n_ops < 1) throw MalformedInstance(ln, "a job needs at least one operation");
        std::vector<std::vector<Eligible>> job;
        for (long j = 0; j < n_ops; ++j) {
            long n_el = to_int(take(), ln, "eligible-machine count");
            if (n_el < 1) throw MalformedInstance(ln, "an operation needs an eligible machine");
            std::vector<Eligible> el;
            for (long e = 0; e < n_el; ++e) {
                long m = to_int(take(), ln, "machine index");
                double p = to_num(take(), ln, "processing time");
                if (m < 1 || m > inst.n_machines) {
                    throw MalformedInstance(ln, "machine index " + std::to_string(m) + " out of range");
                }
                if (!(p > 0)) throw MalformedInstance(ln, "processing time must be positive");
                el.push_back({static_cast<int>(m - 1), p});
            }
            job.push_back(std::move(el));
        }
        if (pos != toks.size()) throw MalformedInstance(ln, "trailing tokens on job line");
        inst.ops.push_back(std::move(job));
    }
    return inst;
}

std::string to_fjs(const FjspInstance& inst) {
    std::ostringstream out;
    std::size_t eligible = 0;
    int total = inst.total_operations();
    for (const auto& job : inst.ops)
        for (const auto& op : job) eligible += op.size();
    out << inst.n_jobs << " " << inst.n_machines << " "
        << dsl::emit_number(total ? static_cast<double>(eligible) / total : 0.0) << "\n";
    for (const auto& job : inst.ops) {
        out << job.size();
        for (const auto& op : job) {
            out << "  " << op.size();
            for (const Eligible& e : op) out << " " << e.machine + 1 << " " << dsl::emit_number(e.time);
        }
        out << "\n";
    }
    return out.str();
}

void attach_windows(FjspInstance& inst, std::string_view json_text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw MalformedInstance(0, std::string("windows: ") + e.what());
    }
    if (!doc.is_array()) throw MalformedInstance(0, "windows: expected a list");
    std::vector<std::vector<Window>> windows(inst.n_machines);
    for (const json& w : doc) {
        try {
            int m = w.at("machine").get<int>();
            Window win{w.at("w_start").get<double>(), w.at("w_end").get<double>()};
            if (m < 1 || m > inst.n_machines) throw MalformedInstance(0, "windows: machine out of range");
            if (!(win.start < win.end) || win.start < 0) throw MalformedInstance(0, "windows: degenerate window");
            windows[m - 1].push_back(win);
        } catch (const json::exception& e) {
            throw MalformedInstance(0, std::string("windows: ") + e.what());
        }
    }
    inst.windows = std::move(windows);
}

std::string windows_to_json(const FjspInstance& inst) {
    nlohmann::json doc = nlohmann::json::array();
    for (std::size_t k = 0; k < inst.windows.size(); ++k)
        for (const Window& w : inst.windows[k])
            doc.push_back({{"machine", k + 1}, {"w_start", w.start}, {"w_end", w.end}});
    return doc.dump(2);
}

FjspSolution parse_solution(const FjspInstance& inst, std::string_view json_text) {
    using nlohmann::json;
    FjspSolution sol;
    try {
        json doc = json::parse(json_text);
        sol.x = doc.at("x").get<std::vector<std::vector<std::vector<int>>>>();
        sol.s = doc.at("s").get<std::vector<std::vector<double>>>();
        sol.makespan = doc.value("makespan", 0.0);
    } catch (const json::exception& e) {
        throw DimensionMismatch(std::string("solution: ") + e.what());
    }
    if (static_cast<int>(sol.x.size()) != inst.n_jobs || static_cast<int>(sol.s.size()) != inst.n_jobs) {
        throw DimensionMismatch("solution: job count mismatch");
    }
    return sol;
}

std::string solution_to_json(const FjspSolution& sol) {
    nlohmann::json doc;
    doc["x"] = sol.x;
    doc["s"] = sol.s;
    doc["makespan"] = sol.makespan;
    return doc.dump(2);
}

double big_m(const FjspInstance& inst) {
    double m = 0.0;
    for (const auto& job : inst.ops)
        for (const auto& op : job) {
            double longest = 0.0;
            for (const Eligible& e : op) longest = std::max(longest, e.time);
            m += longest;
        }
    double last_end = 0.0;
    for (const auto& ws : inst.windows)
        for (const Window& w : ws) last_end = std::max(last_end, w.end);
    return m + last_end;
}

FjspInstance synthetic_instance(int jobs, int machines, int ops_per_job, int max_flex, int max_time,
                                unsigned seed) {
    std::mt19937 rng(seed);
    FjspInstance inst;
    inst.n_jobs = jobs;
    inst.n_machines = machines;
    std::vector<int> pool(machines);
    for (int k = 0; k < machines; ++k) pool[k] = k;
    for (int i = 0; i < jobs; ++i) {
        std::vector<std::vector<Eligible>> job;
        for (int j = 0; j < ops_per_job; ++j) {
            int flex = 1 + static_cast<int>(rng() % static_cast<unsigned>(std::min(max_flex, machines)));
            // Fisher-Yates with the raw engine; std::shuffle varies across libraries.
            for (int k = machines - 1; k > 0; --k) std::swap(pool[k], pool[rng() % static_cast<unsigned>(k + 1)]);
            std::vector<int> chosen(pool.begin(), pool.begin() + flex);
            std::sort(chosen.begin(), chosen.end());
            std::vector<Eligible> el;
            for (int k : chosen) el.push_back({k, static_cast<double>(1 + rng() % static_cast<unsigned>(max_time))});
            job.push_back(std::move(el));
        }
        inst.ops.push_back(std::move(job));
    }
    return inst;
}

}  // namespace closurekb::fjsp
