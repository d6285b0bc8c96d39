#pragma once
// Flexible job shop: .fjs ingestion, MiniModel emission for the baseline,
// unavailability-window and alternate-vocabulary variants, a schedule
// checker and a desk-scale makespan oracle.
//
// Jobs, operations and machines are 1-based in files and models and
// 0-based in the C++ structures. Windows are half-open [start, end).

#include <closurekb/knowledge_graph.hpp>
#include <closurekb/model_dsl.hpp>

#include <string>
#include <utility>
#include <vector>

namespace closurekb::fjsp {

class MalformedInstance : public Error {
public:
    MalformedInstance(std::size_t line, const std::string& message);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};
class MissingWindows : public Error {
public:
    using Error::Error;
};
class DimensionMismatch : public Error {
public:
    using Error::Error;
};
class TooLarge : public Error {
public:
    using Error::Error;
};

struct Eligible {
    int machine = 0;  // 0-based
    double time = 0.0;
    bool operator==(const Eligible&) const = default;
};

struct Window {
    double start = 0.0;
    double end = 0.0;
    bool operator==(const Window&) const = default;
};

enum class Terminology { standard, alternate };

struct FjspInstance {
    int n_jobs = 0;
    int n_machines = 0;
    std::vector<std::vector<std::vector<Eligible>>> ops;  // [job][op] -> eligible machines
    std::vector<std::vector<Window>> windows;             // [machine]
    Terminology terminology = Terminology::standard;

    int total_operations() const;
    bool has_windows() const;
    // Global 0-based index of operation (job, op), job-major.
    int flat_index(int job, int op) const;
    std::optional<double> time_on(int job, int op, int machine) const;
    void check() const;
    bool operator==(const FjspInstance&) const = default;
};

struct FjspSolution {
    std::vector<std::vector<std::vector<int>>> x;  // [job][op][machine]
    std::vector<std::vector<double>> s;            // [job][op]
    double makespan = 0.0;

    // One-hot assignment from a machine choice per operation.
    static FjspSolution from_choices(const FjspInstance& inst,
                                     const std::vector<std::vector<int>>& machine,
                                     const std::vector<std::vector<double>>& start);
};

struct FeasibilityReport {
    bool feasible = true;
    std::vector<std::string> violations;
    double makespan = 0.0;  // max completion time
};

enum class Variant { baseline, unavailability, alt_terms };

FjspInstance parse_fjs(std::string_view text);
std::string to_fjs(const FjspInstance& inst);
// JSON list of {machine (1-based), w_start, w_end}; replaces inst.windows.
void attach_windows(FjspInstance& inst, std::string_view json_text);
std::string windows_to_json(const FjspInstance& inst);
FjspSolution parse_solution(const FjspInstance& inst, std::string_view json_text);
std::string solution_to_json(const FjspSolution& sol);

// Sum over operations of the largest eligible time plus the latest window end.
double big_m(const FjspInstance& inst);

dsl::ModelAst build_fjsp_model(const FjspInstance& inst, Variant variant);

// Standard symbol -> alternate-vocabulary symbol (job/operation/machine
// become work order/task/workcenter).
const std::vector<std::pair<std::string, std::string>>& alternate_lexicon();
// Baseline model entities plus one concept card per alternate term, aligned
// to the standard symbol it renames.
kg::KnowledgeGraph build_fjsp_kg(const FjspInstance& inst);

FeasibilityReport check_solution(const FjspInstance& inst, const FjspSolution& sol);

struct MakespanOptimum {
    double makespan = 0.0;
    FjspSolution solution;
};

inline constexpr int kMaxOracleOperations = 6;
inline constexpr long long kMaxOracleCombinations = 1'000'000;

// Exhaustive over machine assignments and precedence-consistent operation
// orders; each order is scheduled at earliest feasible starts (after the job
// predecessor, the machine's previous operation and clear of windows).
MakespanOptimum brute_force_makespan(const FjspInstance& inst);

// Earliest t >= ready with [t, t+p) clear of every window.
double earliest_clear_start(const std::vector<Window>& windows, double ready, double p);

// Deterministic synthetic instance with Behnke-like shape: `ops_per_job`
// operations per job, each eligible on 1..max_flex machines, integer times
// in [1, max_time].
FjspInstance synthetic_instance(int jobs, int machines, int ops_per_job, int max_flex, int max_time,
                                unsigned seed);

}  // namespace closurekb::fjsp
