#include <closurekb/fjsp.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace closurekb::fjsp {

namespace {

constexpr double kTol = 1e-9;

std::string op_name(int job, int op) {
    return "(" + std::to_string(job + 1) + "," + std::to_string(op + 1) + ")";
}

bool overlaps(double a0, double a1, double b0, double b1) {
    return a0 < b1 - kTol && b0 < a1 - kTol;
}

}  // namespace

double earliest_clear_start(const std::vector<Window>& windows, double ready, double p) {
    double t = ready;
    for (bool moved = true; moved;) {
        moved = false;
        for (const Window& w : windows) {
            if (overlaps(t, t + p, w.start, w.end)) {
                t = w.end;
                moved = true;
            }
        }
    }
    return t;
}

FeasibilityReport check_solution(const FjspInstance& inst, const FjspSolution& sol) {
    if (static_cast<int>(sol.x.size()) != inst.n_jobs || static_cast<int>(sol.s.size()) != inst.n_jobs) {
        throw DimensionMismatch("solution has the wrong number of jobs");
    }
    struct Placed {
        int job, op, machine;
        double start, end;
    };
    FeasibilityReport report;
    auto fail = [&](std::string what) {
        report.feasible = false;
        report.violations.push_back(std::move(what));
    };

    std::vector<Placed> placed;
    for (int i = 0; i < inst.n_jobs; ++i) {
        const std::size_t n_ops = inst.ops[i].size();
        if (sol.x[i].size() != n_ops || sol.s[i].size() != n_ops) {
            throw DimensionMismatch("job " + std::to_string(i + 1) + " has the wrong number of operations");
        }
        for (std::size_t j = 0; j < n_ops; ++j) {
            const auto& row = sol.x[i][j];
            if (static_cast<int>(row.size()) != inst.n_machines) {
                throw DimensionMismatch("assignment row " + op_name(i, static_cast<int>(j)) + " has the wrong width");
            }
            const int op = static_cast<int>(j);
            int chosen = -1, count = 0;
            for (int k = 0; k < inst.n_machines; ++k) {
                if (row[k] != 0 && row[k] != 1) fail("assignment " + op_name(i, op) + " is not binary");
                if (row[k] == 1) {
                    ++count;
                    chosen = k;
                }
            }
            double s = sol.s[i][j];
            if (!std::isfinite(s) || s < -kTol) fail("start " + op_name(i, op) + " is negative or not finite");
            if (count != 1) {
                fail("assignment " + op_name(i, op) + " selects " + std::to_string(count) + " machines");
                continue;
            }
            auto p = inst.time_on(i, op, chosen);
            if (!p) {
                fail("assignment " + op_name(i, op) + " uses ineligible machine " + std::to_string(chosen + 1));
                continue;
            }
            placed.push_back({i, op, chosen, s, s + *p});
        }
    }

    for (std::size_t a = 0; a < placed.size(); ++a) {
        const Placed& u = placed[a];
        report.makespan = std::max(report.makespan, u.end);
        for (std::size_t b = a + 1; b < placed.size(); ++b) {
            const Placed& v = placed[b];
            if (v.job == u.job && v.op == u.op + 1 && v.start < u.end - kTol) {
                fail("precedence: " + op_name(v.job, v.op) + " starts before " + op_name(u.job, u.op) + " ends");
            }
            if (v.machine == u.machine && overlaps(u.start, u.end, v.start, v.end)) {
                fail("capacity: " + op_name(u.job, u.op) + " and " + op_name(v.job, v.op) +
                     " overlap on machine " + std::to_string(u.machine + 1));
            }
        }
        if (u.machine < static_cast<int>(inst.windows.size())) {
            for (const Window& w : inst.windows[u.machine]) {
                if (overlaps(u.start, u.end, w.start, w.end)) {
                    fail("window: " + op_name(u.job, u.op) + " intrudes into [" + std::to_string(w.start) +
                         ", " + std::to_string(w.end) + ") on machine " + std::to_string(u.machine + 1));
                }
            }
        }
    }
    if (sol.makespan < report.makespan - kTol) {
        fail("makespan: declared " + std::to_string(sol.makespan) + " is below completion " +
             std::to_string(report.makespan));
    }
    return report;
}

MakespanOptimum brute_force_makespan(const FjspInstance& inst) {
    inst.check();
    const int n = inst.total_operations();
    if (n > kMaxOracleOperations) {
        throw TooLarge(std::to_string(n) + " operations exceed the oracle bound of " +
                       std::to_string(kMaxOracleOperations));
    }
    std::vector<std::pair<int, int>> flat;  // flat index -> (job, op)
    for (int i = 0; i < inst.n_jobs; ++i)
        for (std::size_t j = 0; j < inst.ops[i].size(); ++j) flat.emplace_back(i, static_cast<int>(j));

    long long assignments = 1, orders = 1;
    for (const auto& [i, j] : flat) assignments *= static_cast<long long>(inst.ops[i][j].size());
    for (int k = 2; k <= n; ++k) orders *= k;
    if (assignments * orders > kMaxOracleCombinations) {
        throw TooLarge(std::to_string(assignments) + " assignments x " + std::to_string(orders) +
                       " orders exceed " + std::to_string(kMaxOracleCombinations));
    }

    static const std::vector<Window> kNone;
    auto windows_of = [&](int k) -> const std::vector<Window>& {
        return k < static_cast<int>(inst.windows.size()) ? inst.windows[k] : kNone;
    };

    std::optional<MakespanOptimum> best;
    std::vector<int> pick(n, 0);  // index into each operation's eligible list
    for (long long a = 0; a < assignments; ++a) {
        long long rest = a;
        for (int f = n - 1; f >= 0; --f) {
            auto size = static_cast<long long>(inst.ops[flat[f].first][flat[f].second].size());
            pick[f] = static_cast<int>(rest % size);
            rest /= size;
        }
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        do {
            // Job-major flat numbering: an order is precedence-consistent iff
            // each operation appears after its predecessor in the job.
            std::vector<int> seen(n, 0);
            bool consistent = true;
            for (int f : order) {
                if (flat[f].second > 0 && !seen[f - 1]) {
                    consistent = false;
                    break;
                }
                seen[f] = 1;
            }
            if (!consistent) continue;

            std::vector<double> machine_free(inst.n_machines, 0.0), job_ready(inst.n_jobs, 0.0);
            std::vector<std::vector<int>> machine(inst.n_jobs);
            std::vector<std::vector<double>> start(inst.n_jobs);
            for (int i = 0; i < inst.n_jobs; ++i) {
                machine[i].resize(inst.ops[i].size());
                start[i].resize(inst.ops[i].size());
            }
            double cmax = 0.0;
            for (int f : order) {
                auto [i, j] = flat[f];
                const Eligible& e = inst.ops[i][j][pick[f]];
                double s = earliest_clear_start(windows_of(e.machine),
                                                std::max(job_ready[i], machine_free[e.machine]), e.time);
                machine[i][j] = e.machine;
                start[i][j] = s;
                job_ready[i] = machine_free[e.machine] = s + e.time;
                cmax = std::max(cmax, s + e.time);
            }
            if (!best || cmax < best->makespan) {
                best = MakespanOptimum{cmax, FjspSolution::from_choices(inst, machine, start)};
            }
        } while (std::next_permutation(order.begin(), order.end()));
    }
    if (!best) return {0.0, FjspSolution::from_choices(inst, {}, {})};
    return *best;
}

}  // namespace closurekb::fjsp
