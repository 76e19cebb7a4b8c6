#include "learnad/las_format.hpp"

#include <regex>
#include <set>
#include <sstream>

#include "learnad/format.hpp"

namespace learnad {

namespace {

// Labels appear in lowercase in ASP text.
std::string atom_name(Label l) { return l == Label::AD ? "ad" : "cn"; }

Label parse_atom_name(const std::string& s) {
    if (s == "ad") return Label::AD;
    if (s == "cn") return Label::CN;
    throw Error("unknown label atom '" + s + "'");
}

std::string edge_tag(EdgeId e) { return std::to_string(e.i) + "_" + std::to_string(e.j); }

// Closed-world default: a subject is CN unless some rule derives ad.
constexpr const char* kDefaultRule = "cn :- not ad.";

}  // namespace

std::string serialize_task(const LearningTask& task) {
    if (task.examples.empty()) throw Error("task has no examples");
    std::ostringstream out;
    std::size_t n_ad = 0;
    for (const auto& ex : task.examples) n_ad += ex.label == Label::AD ? 1 : 0;
    out << "% learning task: " << n_ad << " ad, " << task.examples.size() - n_ad << " cn examples\n";
    out << kDefaultRule << "\n";
    for (const auto& rule : task.background) out << rule << "\n";
    out << "\n";

    for (const auto& ex : task.examples) {
        out << "#pos(" << ex.id << "@" << ex.penalty << ", {" << atom_name(ex.inclusion()) << "}, {"
            << atom_name(ex.exclusion()) << "}, {";
        for (const auto& f : ex.context) {
            out << " connection(region(" << f.edge.i << "), region(" << f.edge.j << "), " << f.strength
                << ").";
        }
        out << " }).";
        if (!ex.subject_id.empty()) out << " % subject=" << ex.subject_id;
        out << "\n";
    }
    out << "\n#modeh(ad).\n";
    for (EdgeId e : task.space.edges) {
        const std::string tag = edge_tag(e);
        out << "#modeb(1, connection(region(" << e.i << "), region(" << e.j << "), var(s_" << tag
            << "))).\n";
        for (Comparator c : kComparators) {
            out << "#modeb(1, var(s_" << tag << ") " << comparator_symbol(c) << " const(t_" << tag
                << ")).\n";
        }
    }
    out << "\n";
    for (EdgeId e : task.space.edges) {
        auto it = task.space.threshold_domain.find(e);
        if (it == task.space.threshold_domain.end()) continue;
        for (ScaledStrength v : it->second) out << "#constant(t_" << edge_tag(e) << ", " << v << ").\n";
    }
    out << "\n#maxv(" << task.space.max_body_edges << ").\n";
    return out.str();
}

void write_task_file(const LearningTask& task, const std::filesystem::path& path) {
    write_text_file(path, serialize_task(task));
}

LearningTask parse_task_text(const std::string& text) {
    static const std::regex pos_re(
        R"(^#pos\(([A-Za-z0-9_]+)@(\d+), \{(ad|cn)\}, \{(ad|cn)\}, \{(.*)\}\)\.(?: % subject=(.*))?$)");
    static const std::regex fact_re(R"(connection\(region\((\d+)\), region\((\d+)\), (\d+)\)\.)");
    static const std::regex modeb_conn_re(
        R"(^#modeb\(1, connection\(region\((\d+)\), region\((\d+)\), var\(s_\d+_\d+\)\)\)\.$)");
    static const std::regex modeb_cmp_re(R"(^#modeb\(1, var\(s_\d+_\d+\) (>=|>|<|<=) const\(t_\d+_\d+\)\)\.$)");
    static const std::regex const_re(R"(^#constant\(t_(\d+)_(\d+), (-?\d+)\)\.$)");
    static const std::regex maxv_re(R"(^#maxv\((\d+)\)\.$)");

    LearningTask task;
    bool saw_maxv = false;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '%') continue;
        std::smatch m;
        if (line == kDefaultRule || line == "#modeh(ad).") continue;
        if (std::regex_match(line, m, pos_re)) {
            Example ex;
            ex.id = m[1];
            ex.penalty = std::stoll(m[2]);
            ex.label = parse_atom_name(m[3]);
            if (parse_atom_name(m[4]) != ex.exclusion()) {
                throw Error("line " + std::to_string(line_no) + ": inclusion and exclusion must differ");
            }
            const std::string ctx = m[5];
            for (auto it = std::sregex_iterator(ctx.begin(), ctx.end(), fact_re); it != std::sregex_iterator();
                 ++it) {
                ex.context.push_back({make_edge(std::stoi((*it)[1]), std::stoi((*it)[2])),
                                      std::stoll((*it)[3])});
            }
            std::sort(ex.context.begin(), ex.context.end());
            if (m[6].matched) ex.subject_id = m[6];
            task.examples.push_back(std::move(ex));
        } else if (std::regex_match(line, m, modeb_conn_re)) {
            task.space.edges.push_back(make_edge(std::stoi(m[1]), std::stoi(m[2])));
            task.space.threshold_domain[task.space.edges.back()];
        } else if (std::regex_match(line, m, modeb_cmp_re)) {
            continue;
        } else if (std::regex_match(line, m, const_re)) {
            const EdgeId e = make_edge(std::stoi(m[1]), std::stoi(m[2]));
            task.space.threshold_domain[e].push_back(std::stoll(m[3]));
        } else if (std::regex_match(line, m, maxv_re)) {
            task.space.max_body_edges = std::stoi(m[1]);
            saw_maxv = true;
        } else if (line[0] == '#') {
            throw Error("line " + std::to_string(line_no) + ": unknown directive");
        } else {
            task.background.push_back(line);
        }
    }
    if (!saw_maxv) throw Error("task text lacks a #maxv directive");
    for (auto& [e, values] : task.space.threshold_domain) {
        if (!task.space.contains_edge(e)) throw Error("constant for undeclared edge " + edge_to_string(e));
        if (!std::is_sorted(values.begin(), values.end())) throw Error("threshold constants out of order");
    }
    return task;
}

std::string hypothesis_to_text(const Hypothesis& hypothesis, const RegionAtlas* atlas) {
    std::ostringstream out;
    for (const auto& rule : hypothesis.rules) {
        out << "ad :- ";
        for (std::size_t k = 0; k < rule.body.size(); ++k) {
            const auto& lit = rule.body[k];
            if (k > 0) out << ", ";
            out << "connection(region(" << lit.edge.i << "), region(" << lit.edge.j << "), V" << k << "), V" << k
                << " " << comparator_symbol(lit.comparator) << " " << lit.threshold;
        }
        out << ".";
        if (atlas) {
            out << " %";
            for (std::size_t k = 0; k < rule.body.size(); ++k) {
                const auto& e = rule.body[k].edge;
                out << (k > 0 ? "; " : " ") << atlas->name(e.i) << " -- " << atlas->name(e.j);
            }
        }
        out << "\n";
    }
    return out.str();
}

Hypothesis parse_hypothesis_text(const std::string& text) {
    static const std::regex rule_re(R"(^ad :- (.*)\.(?:\s*%.*)?$)");
    static const std::regex lit_re(
        R"(^connection\(region\((\d+)\), region\((\d+)\), (V\d+)\), (V\d+) (>=|>|<|<=) (-?\d+)$)");

    std::vector<Rule> rules;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '%') continue;
        std::smatch m;
        if (!std::regex_match(line, m, rule_re)) {
            throw Error("line " + std::to_string(line_no) + ": not an ad rule");
        }
        // Literals are "connection(...), Vk op T" pairs; split after each threshold.
        const std::string body = m[1];
        std::vector<BodyLiteral> lits;
        static const std::regex pair_re(
            R"(connection\(region\(\d+\), region\(\d+\), V\d+\), V\d+ (?:>=|>|<|<=) -?\d+)");
        std::size_t consumed = 0;
        for (auto it = std::sregex_iterator(body.begin(), body.end(), pair_re); it != std::sregex_iterator(); ++it) {
            const std::string sep = body.substr(consumed, static_cast<std::size_t>(it->position()) - consumed);
            if (!(consumed == 0 ? sep.empty() : sep == ", ")) {
                throw Error("line " + std::to_string(line_no) + ": malformed rule body");
            }
            const std::string piece = it->str();
            std::smatch lm;
            std::regex_match(piece, lm, lit_re);
            if (lm[3] != lm[4]) throw Error("line " + std::to_string(line_no) + ": variable mismatch");
            lits.push_back({make_edge(std::stoi(lm[1]), std::stoi(lm[2])), parse_comparator(lm[5].str()),
                            std::stoll(lm[6])});
            consumed = static_cast<std::size_t>(it->position() + it->length());
        }
        if (lits.empty() || consumed != body.size()) {
            throw Error("line " + std::to_string(line_no) + ": malformed rule body");
        }
        rules.push_back(make_rule(std::move(lits)));
    }
    return make_hypothesis(std::move(rules));
}

}  // namespace learnad
