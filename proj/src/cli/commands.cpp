#include <closurekb/battery.hpp>
#include <closurekb/cli.hpp>
#include <closurekb/closure.hpp>
#include <closurekb/fjsp.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <sstream>

namespace closurekb::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path);
    out << text;
}

struct Globals {
    std::string graph;
    std::string out;
    std::string format = "text";
};

// Writes to --out when given, stdout otherwise.
void emit(const Globals& g, std::ostream& out, const std::string& text) {
    if (g.out.empty()) {
        out << text;
        if (!text.empty() && text.back() != '\n') out << "\n";
    } else {
        write_file(g.out, text);
    }
}

kg::KnowledgeGraph load_graph(const Globals& g) {
    if (g.graph.empty()) throw UsageError("--graph is required");
    return kg::load(read_file(g.graph));
}

dsl::Dialect dialect_from(const std::string& s) {
    if (s == "canonical" || s == "minimodel") return dsl::Dialect::canonical;
    if (s == "lingo") return dsl::Dialect::lingo_flavored;
    throw UsageError("unknown dialect '" + s + "'");
}

codegen::RetrievalMode mode_from(const std::string& s) {
    if (s == "closure") return codegen::RetrievalMode::closure;
    if (s == "window") return codegen::RetrievalMode::window;
    throw UsageError("unknown retrieval mode '" + s + "'");
}

fjsp::Variant variant_from(const std::string& s) {
    if (s == "baseline") return fjsp::Variant::baseline;
    if (s == "unavailability") return fjsp::Variant::unavailability;
    if (s == "alt_terms") return fjsp::Variant::alt_terms;
    throw UsageError("unknown variant '" + s + "'");
}

json parsed(const std::string& text) {
    return json::parse(text);
}

std::string key_values(const json& doc, const std::string& prefix = "") {
    std::string out;
    for (const auto& [k, v] : doc.items()) {
        std::string key = prefix.empty() ? k : prefix + "." + k;
        if (v.is_object()) {
            out += key_values(v, key);
        } else if (v.is_string()) {
            out += key + "=" + v.get<std::string>() + "\n";
        } else if (v.is_number_float()) {
            out += key + "=" + dsl::emit_number(v.get<double>()) + "\n";
        } else {
            out += key + "=" + v.dump() + "\n";
        }
    }
    return out;
}

std::string render_doc(const Globals& g, const json& doc) {
    return g.format == "json" ? doc.dump(2) + "\n" : key_values(doc);
}

void collect_inputs(const fs::path& p, std::vector<fs::path>& models, std::vector<fs::path>& cards) {
    if (fs::is_directory(p)) {
        std::vector<fs::path> entries;
        for (const auto& e : fs::recursive_directory_iterator(p))
            if (e.is_regular_file()) entries.push_back(e.path());
        std::sort(entries.begin(), entries.end());
        for (const auto& e : entries) {
            if (e.extension() == ".mm") models.push_back(e);
            if (e.extension() == ".json") cards.push_back(e);
        }
        return;
    }
    if (!fs::is_regular_file(p)) throw UsageError("no such input: " + p.string());
    if (p.extension() == ".json") {
        cards.push_back(p);
    } else {
        models.push_back(p);
    }
}

// ---- commands ---------------------------------------------------------------

int cmd_ingest(const Globals& g, const std::vector<std::string>& paths, std::ostream& out) {
    if (paths.empty()) throw UsageError("ingest needs at least one model or card file");
    std::vector<fs::path> models, cards;
    for (const auto& p : paths) collect_inputs(p, models, cards);
    kg::KnowledgeGraph graph = build_graph(models, cards);
    std::string doc = kg::save(graph);
    if (g.out.empty()) {
        out << doc << "\n";
    } else {
        write_file(g.out, doc);
        out << render_doc(g, {{"entities", graph.size()}, {"edges", graph.edges().size()}, {"graph", g.out}});
    }
    return kOk;
}

int cmd_query(const Globals& g, const std::string& text, std::size_t k, std::ostream& out) {
    kg::KnowledgeGraph graph = load_graph(g);
    retrieval::ParsedQuery q = retrieval::understand_query(text, graph);
    retrieval::RetrievalResult r = retrieval::retrieve(text, graph, retrieval::index_snippets(graph), k);
    json doc{{"query", parsed(retrieval::to_json(q))}, {"retrieval", parsed(retrieval::to_json(r))}};
    if (g.format == "json") {
        emit(g, out, doc.dump(2));
        return kOk;
    }
    std::ostringstream t;
    t << "intents:";
    for (const auto& i : doc["query"]["intents"]) t << " " << i.get<std::string>();
    t << "\nseeds:";
    for (const auto& s : r.seed_ids) t << " " << s;
    t << "\nstructural:";
    for (const auto& s : r.structural) t << " " << s;
    t << "\nsnippets:\n";
    for (const auto& s : r.snippets) t << "  " << s.id << " " << s.score << "\n";
    emit(g, out, t.str());
    return kOk;
}

int cmd_closure(const Globals& g, const std::vector<std::string>& ids, std::ostream& out) {
    if (ids.empty()) throw UsageError("closure needs at least one entity id");
    kg::KnowledgeGraph graph = load_graph(g);
    dep::ClosureResult c = dep::closure(graph, ids);
    if (g.format == "json") {
        emit(g, out, json{{"targets", ids}, {"members", c.members}, {"visit_order", c.visit_order}}.dump(2));
    } else {
        std::string text;
        for (const auto& m : c.members) text += m + "\n";
        emit(g, out, text);
    }
    return kOk;
}

struct GenerateArgs {
    std::string query;
    std::string dialect = "canonical";
    std::string generator;
    std::string report;
    std::string mode = "closure";
    int max_rounds = 3;
    std::size_t window_k = 3;
};

int cmd_generate(const Globals& g, const GenerateArgs& a, std::ostream& out, std::ostream& err) {
    kg::KnowledgeGraph graph = load_graph(g);
    std::string spec = a.generator;
    if (spec.empty()) spec = codegen::endpoint_from_env().value_or("template");
    auto generator = make_generator(spec);
    codegen::RepairOptions options;
    options.max_rounds = a.max_rounds;
    options.mode = mode_from(a.mode);
    options.window_k = a.window_k;
    dsl::Dialect dialect = dialect_from(a.dialect);
    codegen::RepairOutcome o =
        codegen::repair_loop(a.query, graph, retrieval::index_snippets(graph), *generator, options);

    std::string code = o.code;
    if (o.report.ok()) code = render(code, dialect);
    json doc;
    doc["status"] = o.report.ok() ? "ok" : "failed";
    doc["rounds"] = o.rounds;
    doc["context_sizes"] = o.context_sizes;
    doc["generator"] = generator->name();
    doc["snippets_empty"] = o.package.snippets_empty();
    doc["targets"] = o.package.targets;
    doc["validation"] = parsed(codegen::to_json(o.report));
    if (o.generation_error) doc["generation_error"] = *o.generation_error;

    if (g.out.empty()) {
        out << code;
        if (!code.empty() && code.back() != '\n') out << "\n";
    } else {
        write_file(g.out, code);
    }
    // stdout carries the code unless --out redirected it.
    if (!a.report.empty()) {
        write_file(a.report, doc.dump(2) + "\n");
    } else if (g.out.empty()) {
        err << render_doc(g, doc);
    } else {
        out << render_doc(g, doc);
    }
    return o.report.ok() ? kOk : kFailed;
}

int cmd_validate(const Globals& g, const std::string& file, std::ostream& out) {
    kg::KnowledgeGraph graph = g.graph.empty() ? kg::KnowledgeGraph{} : load_graph(g);
    codegen::ValidationReport r = codegen::validate(read_file(file), graph);
    emit(g, out, g.format == "json" ? codegen::to_json(r) : key_values(parsed(codegen::to_json(r))));
    return r.ok() ? kOk : kFailed;
}

struct EvalArgs {
    std::string case_name;
    std::string instance;
    std::string solution;
    std::string windows;
    bool brute_force = false;
};

int eval_battery(const Globals& g, const EvalArgs& a, std::ostream& out) {
    battery::BatteryInstance inst = battery::parse_instance(read_file(a.instance));
    json doc;
    bool feasible = true;
    if (a.brute_force) {
        auto r = battery::brute_force_optimum(inst.data, inst.event);
        if (std::holds_alternative<battery::Infeasible>(r)) {
            doc["feasible"] = false;
            doc["result"] = "infeasible";
            emit(g, out, render_doc(g, doc));
            return kFailed;
        }
        const auto& best = std::get<battery::Optimum>(r);
        doc["feasible"] = true;
        doc["optimum"] = best.objective;
        doc["schedule"] = parsed(battery::schedule_to_json(best.schedule));
        emit(g, out, g.format == "json" ? doc.dump(2) : key_values(doc));
        return kOk;
    }
    if (a.solution.empty()) throw UsageError("eval battery needs a schedule file or --brute-force");
    battery::Schedule s = battery::parse_schedule(read_file(a.solution));
    doc["objective_baseline"] = battery::objective_baseline(inst.data, s);
    if (inst.event) {
        doc["incentive_payment"] = battery::incentive_payment(inst.data, s, *inst.event);
        doc["objective_dr"] = battery::objective_dr(inst.data, s, *inst.event);
        doc["load_reduction"] = battery::load_reduction(inst.data, s, *inst.event);
        bool ok = battery::check_load_reduction(inst.data, s, *inst.event);
        doc["load_reduction_ok"] = ok;
        feasible = feasible && ok;
    }
    if (!s.buffers.empty()) {
        battery::StarvationReport st = battery::starvation_feasible(inst.data, s);
        doc["starvation_ok"] = st.feasible;
        if (!st.feasible) doc["starvation_violation"] = *st.machine + "@" + std::to_string(*st.slot);
        feasible = feasible && st.feasible;
    }
    doc["feasible"] = feasible;
    emit(g, out, render_doc(g, doc));
    return feasible ? kOk : kFailed;
}

int eval_fjsp(const Globals& g, const EvalArgs& a, std::ostream& out) {
    fjsp::FjspInstance inst = fjsp::parse_fjs(read_file(a.instance));
    if (!a.windows.empty()) fjsp::attach_windows(inst, read_file(a.windows));
    json doc;
    if (a.brute_force) {
        fjsp::MakespanOptimum opt = fjsp::brute_force_makespan(inst);
        doc["feasible"] = true;
        doc["makespan"] = opt.makespan;
        doc["solution"] = parsed(fjsp::solution_to_json(opt.solution));
        emit(g, out, g.format == "json" ? doc.dump(2) : key_values(json{{"feasible", true}, {"makespan", opt.makespan}}));
        return kOk;
    }
    if (a.solution.empty()) throw UsageError("eval fjsp needs a solution file or --brute-force");
    fjsp::FeasibilityReport r = fjsp::check_solution(inst, fjsp::parse_solution(inst, read_file(a.solution)));
    doc["feasible"] = r.feasible;
    doc["makespan"] = r.makespan;
    doc["violations"] = r.violations;
    if (g.format == "json") {
        emit(g, out, doc.dump(2));
    } else {
        std::string text = "feasible=" + std::string(r.feasible ? "true" : "false") + "\nmakespan=" +
                           dsl::emit_number(r.makespan) + "\n";
        for (const auto& v : r.violations) text += "violation=" + v + "\n";
        emit(g, out, text);
    }
    return r.feasible ? kOk : kFailed;
}

struct AblateArgs {
    std::string corpus;
    std::string sources = "heterogeneous";
    std::string mode = "closure";
    std::size_t window_k = 3;
    int runs = 1;
    std::string generator = "template";
    std::string dialect = "lingo";
};

int cmd_ablate(const Globals& g, const AblateArgs& a, std::ostream& out) {
    AblationConfig c;
    c.knowledge_sources = knowledge_sources_from_string(a.sources);
    c.retrieval_mode = mode_from(a.mode);
    c.window_k = a.window_k;
    c.runs = a.runs;
    c.generator = a.generator;
    c.dialect = dialect_from(a.dialect);
    AblationReport r = run_ablation(c, a.corpus);
    emit(g, out, g.format == "json" ? r.to_json() : r.to_text());
    return kOk;
}

struct FjspGenArgs {
    std::string instance;
    std::string windows;
    std::string variant = "baseline";
    std::string dialect = "canonical";
};

int cmd_fjsp_gen(const Globals& g, const FjspGenArgs& a, std::ostream& out) {
    fjsp::FjspInstance inst = fjsp::parse_fjs(read_file(a.instance));
    if (!a.windows.empty()) fjsp::attach_windows(inst, read_file(a.windows));
    dsl::ModelAst ast = fjsp::build_fjsp_model(inst, variant_from(a.variant));
    emit(g, out, dsl::emit_model(ast, dialect_from(a.dialect)));
    return kOk;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"closurekb: typed knowledge graph retrieval and optimization-model generation", "closurekb"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--graph", g.graph, "Knowledge-graph file");
    app.add_option("--out", g.out, "Output file (default: stdout)");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"text", "json"}));

    std::vector<std::string> ingest_paths;
    auto* ingest = app.add_subcommand("ingest", "Parse models and concept cards into a graph file");
    ingest->add_option("paths", ingest_paths, "Model (.mm) and card (.json) files or directories");

    std::string query_text;
    std::size_t query_k = retrieval::kDefaultSnippets;
    auto* query = app.add_subcommand("query", "Show query understanding and retrieval");
    query->add_option("text", query_text, "Query text")->required();
    query->add_option("-k", query_k, "Snippet count");

    std::vector<std::string> closure_ids;
    auto* closure = app.add_subcommand("closure", "Dependency closure of entities");
    closure->add_option("ids", closure_ids, "Entity ids");

    GenerateArgs ga;
    auto* generate = app.add_subcommand("generate", "Retrieve, generate, validate and repair");
    generate->add_option("query", ga.query, "Query text")->required();
    generate->add_option("--dialect", ga.dialect, "canonical or lingo");
    generate->add_option("--generator", ga.generator, "template, exec:<cmd>, http://..., or a script path");
    generate->add_option("--max-rounds", ga.max_rounds, "Generation rounds")->check(CLI::PositiveNumber);
    generate->add_option("--report", ga.report, "Report file");
    generate->add_option("--mode", ga.mode, "closure or window");
    generate->add_option("--window-k", ga.window_k, "Semantic hits in window mode");

    std::string validate_file;
    auto* validate = app.add_subcommand("validate", "Check code for symbolic completeness");
    validate->add_option("code", validate_file, "MiniModel code file")->required();

    EvalArgs ea;
    auto* eval = app.add_subcommand("eval", "Evaluate a schedule or run the desk-scale oracle");
    eval->add_option("case", ea.case_name, "battery or fjsp")->required()->check(CLI::IsMember({"battery", "fjsp"}));
    eval->add_option("instance", ea.instance, "Instance file")->required();
    eval->add_option("solution", ea.solution, "Schedule or solution file");
    eval->add_option("--windows", ea.windows, "FJSP windows file");
    eval->add_flag("--brute-force", ea.brute_force, "Enumerate for the optimum");

    AblateArgs aa;
    auto* ablate = app.add_subcommand("ablate", "Knowledge-source and retrieval ablation");
    ablate->add_option("--corpus", aa.corpus, "Corpus directory")->required();
    ablate->add_option("--sources", aa.sources, "papers_only, code_only or heterogeneous");
    ablate->add_option("--mode", aa.mode, "closure or window");
    ablate->add_option("--window-k", aa.window_k, "Semantic hits in window mode");
    ablate->add_option("--runs", aa.runs, "Runs");
    ablate->add_option("--generator", aa.generator, "Generator");
    ablate->add_option("--dialect", aa.dialect, "canonical or lingo");

    FjspGenArgs fa;
    auto* fjsp_gen = app.add_subcommand("fjsp-gen", "Emit an FJSP model from a .fjs instance");
    fjsp_gen->add_option("instance", fa.instance, ".fjs file")->required();
    fjsp_gen->add_option("--windows", fa.windows, "Windows file");
    fjsp_gen->add_option("--variant", fa.variant, "baseline, unavailability or alt_terms");
    fjsp_gen->add_option("--dialect", fa.dialect, "canonical or lingo");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*ingest) return cmd_ingest(g, ingest_paths, out);
        if (*query) return cmd_query(g, query_text, query_k, out);
        if (*closure) return cmd_closure(g, closure_ids, out);
        if (*generate) return cmd_generate(g, ga, out, err);
        if (*validate) return cmd_validate(g, validate_file, out);
        if (*eval) return ea.case_name == "battery" ? eval_battery(g, ea, out) : eval_fjsp(g, ea, out);
        if (*ablate) return cmd_ablate(g, aa, out);
        if (*fjsp_gen) return cmd_fjsp_gen(g, fa, out);
    } catch (const codegen::GeneratorUnavailable& e) {
        err << "error: generator unavailable: " << e.what() << "\n";
        return kGeneratorUnavailable;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

}  // namespace closurekb::cli
