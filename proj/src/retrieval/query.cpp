#include <closurekb/retrieval.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <regex>

namespace closurekb::retrieval {

namespace {

struct Token {
    std::string text;
    std::size_t begin = 0;
    std::size_t end = 0;
};

std::vector<Token> tokens_with_offsets(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!std::isalnum(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        Token t;
        t.begin = i;
        while (i < text.size() && std::isalnum(static_cast<unsigned char>(text[i]))) {
            t.text += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
            ++i;
        }
        t.end = i;
        out.push_back(std::move(t));
    }
    return out;
}

bool keyword_matches(const std::string& token, std::string_view kw) {
    if (token.size() < kw.size() || token.compare(0, kw.size(), kw) != 0) return false;
    std::string_view rest = std::string_view(token).substr(kw.size());
    return rest.empty() || rest == "s" || rest == "es" || rest == "d" || rest == "ed" || rest == "ing";
}

// Position of the first token matching any keyword, or npos.
std::size_t first_position(const std::vector<Token>& toks, std::initializer_list<std::string_view> kws) {
    for (std::size_t i = 0; i < toks.size(); ++i)
        for (std::string_view kw : kws)
            if (keyword_matches(toks[i].text, kw)) return i;
    return std::string::npos;
}

std::size_t phrase_position(const std::vector<Token>& toks,
                            std::initializer_list<std::initializer_list<std::string_view>> phrases) {
    std::size_t best = std::string::npos;
    for (const auto& phrase : phrases) {
        std::vector<std::string_view> words(phrase);
        for (std::size_t i = 0; i + words.size() <= toks.size(); ++i) {
            bool ok = true;
            for (std::size_t j = 0; j < words.size() && ok; ++j) ok = toks[i + j].text == words[j];
            if (ok) {
                best = std::min(best, i);
                break;
            }
        }
    }
    return best;
}

// Keyword table. An intent with a qualifier group needs both groups present;
// its position is the earliest keyword from either group.
std::vector<Intent> detect_intents(const std::vector<Token>& toks) {
    constexpr auto npos = std::string::npos;
    std::vector<std::pair<std::size_t, Intent>> found;
    auto both = [&](Intent intent, std::initializer_list<std::string_view> trigger,
                    std::initializer_list<std::string_view> qualifier) {
        std::size_t a = first_position(toks, trigger);
        std::size_t b = first_position(toks, qualifier);
        if (a != npos && b != npos) found.emplace_back(std::min(a, b), intent);
    };
    both(Intent::add_constraint, {"add", "introduce"}, {"constraint"});
    both(Intent::modify_objective, {"modify", "change", "incentive", "reward"}, {"objective", "profit"});
    if (auto p = first_position(toks, {"explain"}); p != npos) found.emplace_back(p, Intent::explain_constraint);
    if (auto p = phrase_position(toks, {{"what", "is"}, {"value", "of"}}); p != npos) {
        found.emplace_back(p, Intent::parameter_query);
    }
    if (auto p = first_position(toks, {"generate", "code", "model"}); p != npos) {
        found.emplace_back(p, Intent::generate_model);
    }
    std::stable_sort(found.begin(), found.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Intent> out;
    for (const auto& [pos, intent] : found) out.push_back(intent);
    if (out.empty()) out.push_back(Intent::unknown);
    return out;
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        if (comma > start) out.push_back(text.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

using Lexicon = std::map<std::vector<std::string>, std::set<std::string>>;

Lexicon build_lexicon(const kg::KnowledgeGraph& graph) {
    Lexicon lex;
    for (const auto& [id, e] : graph.entities()) {
        std::vector<std::string> surfaces{e.name};
        for (auto& a : split_commas(e.field_or(kg::field::aliases))) surfaces.push_back(a);
        if (auto s = e.field_or(kg::field::solver_symbol); !s.empty()) surfaces.push_back(s);
        for (const std::string& s : surfaces) {
            std::vector<std::string> toks = tokenize(s);
            if (toks.empty() || (toks.size() == 1 && toks[0].size() < 2)) continue;
            lex[toks].insert(id);
        }
    }
    return lex;
}

void extract_names(std::string_view text, const std::vector<Token>& toks,
                   const kg::KnowledgeGraph& graph, ParsedQuery& q) {
    Lexicon lex = build_lexicon(graph);
    std::size_t max_len = 0;
    for (const auto& [k, v] : lex) max_len = std::max(max_len, k.size());
    std::size_t i = 0;
    while (i < toks.size()) {
        std::size_t matched = 0;
        const std::set<std::string>* ids = nullptr;
        std::vector<std::string> key;
        for (std::size_t len = 1; len <= max_len && i + len <= toks.size(); ++len) {
            key.push_back(toks[i + len - 1].text);
            auto it = lex.find(key);
            if (it != lex.end()) {
                matched = len;
                ids = &it->second;
            }
        }
        if (!matched) {
            ++i;
            continue;
        }
        std::string surface(text.substr(toks[i].begin, toks[i + matched - 1].end - toks[i].begin));
        for (const std::string& id : *ids) q.entities.push_back({surface, id, ExtractionKind::name_match});
        i += matched;
    }
}

double to_double(const std::string& s) {
    double v = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    return v;
}

void extract_numbers(const std::string& text, ParsedQuery& q) {
    static const std::regex re(R"((\$\s*)?(\d+(?:\.\d+)?)\s*(\$/kwh|/kwh|kwh|kw)\b)", std::regex::icase);
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it) {
        const std::smatch& m = *it;
        std::string unit = m[3].str();
        std::transform(unit.begin(), unit.end(), unit.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        std::string canonical;
        if (unit == "kw") {
            canonical = "kW";
        } else if (unit == "kwh") {
            canonical = m[1].matched ? "$/kWh" : "kWh";
        } else if (unit == "/kwh" && !m[1].matched) {
            continue;
        } else {
            canonical = "$/kWh";
        }
        q.numbers.push_back({to_double(m[2].str()), canonical});
        q.entities.push_back({m[0].str(), std::nullopt, ExtractionKind::numeric_with_unit});
    }
}

std::optional<long> slots_per_hour(const kg::KnowledgeGraph& graph) {
    const kg::Entity* e = graph.find("slots_per_hour");
    if (!e) {
        auto hits = graph.by_symbol("slots_per_hour");
        if (hits.size() != 1) return std::nullopt;
        e = hits.front();
    }
    std::string data = e->field_or(kg::field::data);
    if (data.empty()) return std::nullopt;
    double v = to_double(data);
    if (v < 1 || v != static_cast<double>(static_cast<long>(v))) return std::nullopt;
    return static_cast<long>(v);
}

void extract_windows(const std::string& text, const kg::KnowledgeGraph& graph, ParsedQuery& q) {
    static const std::regex range(R"(hours?\s+(\d+)\s*(?:-|\xe2\x80\x93|to|through)\s*(\d+))",
                                  std::regex::icase);
    static const std::regex ordinal(R"((\d+)(?:st|nd|rd|th)\s+hour)", std::regex::icase);
    static const std::regex single(R"(\bhour\s+(\d+))", std::regex::icase);
    std::vector<std::pair<std::size_t, std::size_t>> used;
    auto overlaps = [&](std::size_t b, std::size_t e) {
        for (auto [ub, ue] : used)
            if (b < ue && ub < e) return true;
        return false;
    };
    std::optional<long> per_hour = slots_per_hour(graph);
    std::vector<std::pair<std::size_t, TimeWindow>> found;
    auto scan = [&](const std::regex& re, bool is_range) {
        for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it) {
            const std::smatch& m = *it;
            std::size_t b = static_cast<std::size_t>(m.position(0));
            std::size_t e = b + static_cast<std::size_t>(m.length(0));
            if (overlaps(b, e)) continue;
            used.emplace_back(b, e);
            TimeWindow w;
            w.first_hour = std::stol(m[1].str());
            w.last_hour = is_range ? std::stol(m[2].str()) : w.first_hour;
            if (w.last_hour < w.first_hour) std::swap(w.first_hour, w.last_hour);
            if (per_hour && w.first_hour >= 1) {
                w.first_slot = (w.first_hour - 1) * *per_hour + 1;
                w.last_slot = w.last_hour * *per_hour;
            }
            found.emplace_back(b, w);
            q.entities.push_back({m[0].str(), std::nullopt, ExtractionKind::time_window});
        }
    };
    scan(range, true);
    scan(ordinal, false);
    scan(single, false);
    std::stable_sort(found.begin(), found.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [pos, w] : found) q.windows.push_back(w);
}

}  // namespace

std::string_view to_string(Intent i) {
    switch (i) {
        case Intent::add_constraint: return "add_constraint";
        case Intent::modify_objective: return "modify_objective";
        case Intent::explain_constraint: return "explain_constraint";
        case Intent::parameter_query: return "parameter_query";
        case Intent::generate_model: return "generate_model";
        case Intent::unknown: return "unknown";
    }
    return "unknown";
}

std::string_view to_string(ExtractionKind k) {
    switch (k) {
        case ExtractionKind::name_match: return "name_match";
        case ExtractionKind::numeric_with_unit: return "numeric_with_unit";
        case ExtractionKind::time_window: return "time_window";
    }
    return "name_match";
}

bool ParsedQuery::has(Intent i) const {
    return std::find(intents.begin(), intents.end(), i) != intents.end();
}

std::vector<std::string> ParsedQuery::resolved_ids() const {
    std::vector<std::string> out;
    for (const auto& e : entities) {
        if (e.id && std::find(out.begin(), out.end(), *e.id) == out.end()) out.push_back(*e.id);
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    for (auto& t : tokens_with_offsets(text)) out.push_back(std::move(t.text));
    return out;
}

ParsedQuery understand_query(std::string_view text, const kg::KnowledgeGraph& graph) {
    std::vector<Token> toks = tokens_with_offsets(text);
    if (toks.empty()) throw EmptyQuery();
    ParsedQuery q;
    q.raw = std::string(text);
    q.intents = detect_intents(toks);
    extract_names(text, toks, graph, q);
    extract_numbers(q.raw, q);
    extract_windows(q.raw, graph, q);
    return q;
}

std::vector<std::string> select_seeds(const ParsedQuery& query, const kg::KnowledgeGraph& graph) {
    std::vector<std::string> ids = query.resolved_ids();
    if (!query.has(Intent::explain_constraint)) return ids;
    std::vector<std::string> out;
    auto push = [&](const std::string& id) {
        if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    };
    for (const std::string& id : ids) {
        const kg::Entity& e = graph.entity(id);
        if (e.kind != kg::EntityKind::decision_variable && e.kind != kg::EntityKind::parameter) {
            push(id);
            continue;
        }
        // A concept realized in code is explained through the constraints of
        // its realization; its own literature relations are the fallback.
        auto users_of = [&](const std::string& x) {
            std::vector<std::string> found;
            for (const std::string& u : graph.neighbors(x, {kg::EdgeKind::used_in}, kg::Direction::in)) {
                if (graph.entity(u).kind == kg::EntityKind::constraint) found.push_back(u);
            }
            return found;
        };
        std::vector<std::string> users;
        for (const std::string& code : graph.neighbors(id, {kg::EdgeKind::aligns_to}, kg::Direction::out)) {
            for (std::string& u : users_of(code)) users.push_back(std::move(u));
        }
        if (users.empty()) users = users_of(id);
        if (users.empty()) push(id);
        for (const std::string& u : users) push(u);
    }
    return out;
}

}  // namespace closurekb::retrieval
