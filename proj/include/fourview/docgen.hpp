#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fourview/diag.hpp"
#include "fourview/loadsim.hpp"
#include "fourview/model.hpp"
#include "fourview/parser.hpp"
#include "fourview/render.hpp"

namespace fourview {

namespace detail {

inline std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

inline std::string md_cell(const std::string& s) {
    std::string out;
    for (char ch : s) {
        if (ch == '|') out += "\\|";
        else if (ch == '\n') out += ' ';
        else out += ch;
    }
    return out;
}

class Doc {
  public:
    void heading(const std::string& text) { out_ += "# " + text + "\n\n"; }
    void subheading(const std::string& text) { out_ += "## " + text + "\n\n"; }
    void subsubheading(const std::string& text) { out_ += "### " + text + "\n\n"; }
    void para(const std::string& text) { out_ += text + "\n\n"; }
    void bullet(const std::string& text) { out_ += "- " + text + "\n"; }
    void end_list() { out_ += "\n"; }
    void table(const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
        auto line = [&](const std::vector<std::string>& cells) {
            std::string l = "|";
            for (const auto& c : cells) l += " " + md_cell(c) + " |";
            out_ += l + "\n";
        };
        line(header);
        std::string sep = "|";
        for (std::size_t i = 0; i < header.size(); ++i) sep += " --- |";
        out_ += sep + "\n";
        for (const auto& r : rows) line(r);
        out_ += "\n";
    }
    void fenced(const std::string& lang, const std::string& body) {
        out_ += "```" + lang + "\n" + body;
        if (body.empty() || body.back() != '\n') out_ += "\n";
        out_ += "```\n\n";
    }
    void caption(const std::string& text) { out_ += "*" + text + "*\n\n"; }
    std::string str() const { return out_; }

  private:
    std::string out_;
};

inline std::string join_words(const std::vector<std::string>& words, const char* sep = ", ") {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out += sep;
        out += words[i];
    }
    return out;
}

} // namespace detail

/// Renders the model as a Software Architecture Document in Markdown. The
/// report parameter fills section 10 when given; diagnostics populate section
/// 11 (warnings and infos only). Output is byte-identical for identical
/// inputs; the only stamp is a content hash, never a timestamp.
inline std::string generate(const ArchitectureModel& m, const LoadReport* report,
                            const std::vector<Diagnostic>& diagnostics) {
    detail::Doc doc;
    std::string display = "'" + m.name + "'";

    // Figures are numbered in order of appearance: one per present view in
    // section order, then one per scenario.
    struct Figure {
        std::string caption;
        DotView view;
        std::string scenario;
    };
    std::vector<Figure> figures;
    if (m.logical) figures.push_back({"Logical view blueprint", DotView::Logical, ""});
    if (m.process) figures.push_back({"Process view blueprint", DotView::Process, ""});
    if (m.development)
        figures.push_back({"Development view blueprint", DotView::Development, ""});
    if (m.physical) figures.push_back({"Physical view blueprint", DotView::Physical, ""});
    if (m.scenarios) {
        std::vector<const Scenario*> sorted;
        for (const auto& s : m.scenarios->scenarios) sorted.push_back(&s);
        std::sort(sorted.begin(), sorted.end(),
                  [](const Scenario* a, const Scenario* b) { return a->id < b->id; });
        for (const Scenario* s : sorted)
            figures.push_back({"Scenario '" + s->id + "'", DotView::Scenario, s->id});
    }
    std::size_t next_figure = 0;
    auto emit_figure = [&](detail::Doc& d) {
        const Figure& f = figures[next_figure];
        ++next_figure;
        d.fenced("dot", to_dot(m, f.view, f.scenario));
        d.caption("Figure " + std::to_string(next_figure) + ". " + f.caption);
    };

    doc.heading("Title Page");
    doc.para("Software Architecture Document for " + display + ".");

    doc.heading("Change History");
    doc.para(m.name + " content hash fnv1a:" + detail::hex64(detail::fnv1a64(format(m))) + ".");

    doc.heading("Table of Contents");
    static const char* toc[] = {
        "1. Scope",          "2. References",           "3. Software Architecture",
        "4. Architectural Goals & Constraints",         "5. Logical Architecture",
        "6. Process Architecture",                      "7. Development Architecture",
        "8. Physical Architecture",                     "9. Scenarios",
        "10. Size and Performance",                     "11. Quality",
        "Appendices",
    };
    for (const char* entry : toc) doc.bullet(entry);
    doc.end_list();

    doc.heading("List of Figures");
    if (figures.empty()) {
        doc.para("No figures.");
    } else {
        for (std::size_t i = 0; i < figures.size(); ++i)
            doc.bullet("Figure " + std::to_string(i + 1) + ". " + figures[i].caption);
        doc.end_list();
    }

    doc.heading("1. Scope");
    doc.para("This document describes the software architecture of " + display +
             ". It covers the architecturally significant elements of the model and the "
             "views that were produced for it.");

    doc.heading("2. References");
    if (m.span.file.empty())
        doc.para("The architecture description was supplied in memory.");
    else
        doc.para("The architecture description this document is generated from: `" +
                 m.span.file + "`.");

    doc.heading("3. Software Architecture");
    {
        std::vector<std::string> present;
        if (m.logical) present.push_back("logical");
        if (m.process) present.push_back("process");
        if (m.development) present.push_back("development");
        if (m.physical) present.push_back("physical");
        if (m.scenarios) present.push_back("scenarios");
        doc.para("The architecture of " + display + " is described through " +
                 std::to_string(present.size()) +
                 (present.size() == 1 ? " view: " : " views: ") + detail::join_words(present) +
                 ". Each view addresses one set of concerns; the scenarios tie them together.");
    }

    doc.heading("4. Architectural Goals & Constraints");
    {
        std::vector<std::pair<std::string, std::string>> rats;
        if (!m.rationale.empty()) rats.emplace_back("architecture", m.rationale);
        if (m.logical && !m.logical->rationale.empty())
            rats.emplace_back("logical view", m.logical->rationale);
        if (m.process && !m.process->rationale.empty())
            rats.emplace_back("process view", m.process->rationale);
        if (m.development && !m.development->rationale.empty())
            rats.emplace_back("development view", m.development->rationale);
        if (m.physical && !m.physical->rationale.empty())
            rats.emplace_back("physical view", m.physical->rationale);
        if (rats.empty()) {
            doc.para("No rationale recorded.");
        } else {
            for (const auto& [scope, text] : rats) doc.bullet(scope + ": " + text);
            doc.end_list();
        }
    }

    doc.heading("5. Logical Architecture");
    if (!m.logical) {
        doc.para("View omitted (tailored out).");
    } else {
        const LogicalView& v = *m.logical;
        std::vector<const Class*> classes;
        for (const auto& c : v.classes) classes.push_back(&c);
        std::sort(classes.begin(), classes.end(),
                  [](const Class* a, const Class* b) { return a->id < b->id; });
        std::vector<std::vector<std::string>> rows;
        for (const Class* c : classes) {
            std::vector<std::string> traits;
            if (!c->subordinate_to.empty()) traits.push_back("subordinate to " + c->subordinate_to);
            if (c->distributed) traits.push_back("distributed");
            if (c->utility) traits.push_back("utility");
            if (c->est_cost) traits.push_back("est_cost " + format_number(*c->est_cost));
            rows.push_back({c->id, c->category, to_string(c->autonomy),
                            to_string(c->persistence), detail::join_words(traits),
                            detail::join_words(c->operations)});
        }
        doc.table({"class", "category", "autonomy", "persistence", "traits", "operations"}, rows);
        emit_figure(doc);
    }

    doc.heading("6. Process Architecture");
    if (!m.process) {
        doc.para("View omitted (tailored out).");
    } else {
        const ProcessView& v = *m.process;
        std::vector<const Process*> procs;
        for (const auto& p : v.processes) procs.push_back(&p);
        std::sort(procs.begin(), procs.end(),
                  [](const Process* a, const Process* b) { return a->id < b->id; });
        std::vector<std::vector<std::string>> rows;
        for (const Process* p : procs) {
            std::vector<std::string> tasks;
            for (const auto& t : p->tasks) {
                std::string cell = t.id + " (" + to_string(t.kind);
                if (t.period_ms) cell += ", period " + format_number(*t.period_ms) + " ms";
                cell += ")";
                tasks.push_back(cell);
            }
            rows.push_back({p->id, std::to_string(p->replicas), detail::join_words(tasks)});
        }
        doc.table({"process", "replicas", "tasks"}, rows);
        if (!v.connectors.empty()) {
            std::vector<const Connector*> conns;
            for (const auto& c : v.connectors) conns.push_back(&c);
            std::sort(conns.begin(), conns.end(), [](const Connector* a, const Connector* b) {
                return std::make_tuple(static_cast<int>(a->kind), a->from, a->to) <
                       std::make_tuple(static_cast<int>(b->kind), b->from, b->to);
            });
            std::vector<std::vector<std::string>> crows;
            for (const Connector* c : conns)
                crows.push_back({std::string(to_string(c->kind)), c->from, c->to});
            doc.table({"connector", "from", "to"}, crows);
        }
        emit_figure(doc);
    }

    doc.heading("7. Development Architecture");
    if (!m.development) {
        doc.para("View omitted (tailored out).");
    } else {
        const DevelopmentView& v = *m.development;
        std::vector<const Subsystem*> subs;
        for (const auto& s : v.subsystems) subs.push_back(&s);
        std::sort(subs.begin(), subs.end(),
                  [](const Subsystem* a, const Subsystem* b) { return a->id < b->id; });
        std::vector<std::vector<std::string>> rows;
        for (const Subsystem* s : subs)
            rows.push_back({s->id, std::to_string(s->layer),
                            s->ksloc ? format_number(*s->ksloc) : "",
                            detail::join_words(s->modules)});
        doc.table({"subsystem", "layer", "ksloc", "modules"}, rows);
        emit_figure(doc);
    }

    doc.heading("8. Physical Architecture");
    if (!m.physical) {
        doc.para("View omitted (tailored out).");
    } else {
        const PhysicalView& v = *m.physical;
        std::vector<const Node*> nodes;
        for (const auto& n : v.nodes) nodes.push_back(&n);
        std::sort(nodes.begin(), nodes.end(),
                  [](const Node* a, const Node* b) { return a->id < b->id; });
        std::vector<std::vector<std::string>> rows;
        for (const Node* n : nodes)
            rows.push_back({n->id, n->capacity ? format_number(*n->capacity) : ""});
        doc.table({"node", "capacity"}, rows);
        if (!v.configurations.empty()) {
            std::vector<const Configuration*> configs;
            for (const auto& c : v.configurations) configs.push_back(&c);
            std::sort(configs.begin(), configs.end(),
                      [](const Configuration* a, const Configuration* b) {
                          return a->name < b->name;
                      });
            std::vector<std::vector<std::string>> crows;
            for (const Configuration* c : configs) {
                std::vector<const Placement*> pls;
                for (const auto& p : c->placements) pls.push_back(&p);
                std::sort(pls.begin(), pls.end(), [](const Placement* a, const Placement* b) {
                    return a->process < b->process;
                });
                std::vector<std::string> cells;
                for (const Placement* p : pls)
                    cells.push_back(p->process + " on " + detail::join_words(p->nodes, " "));
                crows.push_back({c->name, detail::join_words(cells, "; ")});
            }
            doc.table({"configuration", "placements"}, crows);
        }
        emit_figure(doc);
    }

    doc.heading("9. Scenarios");
    if (!m.scenarios) {
        doc.para("View omitted (tailored out).");
    } else {
        std::vector<const Scenario*> sorted;
        for (const auto& s : m.scenarios->scenarios) sorted.push_back(&s);
        std::sort(sorted.begin(), sorted.end(),
                  [](const Scenario* a, const Scenario* b) { return a->id < b->id; });
        if (sorted.empty()) doc.para("No scenarios recorded.");
        for (const Scenario* s : sorted) {
            std::string title = s->id;
            if (!s->name.empty() && s->name != s->id) title += ": " + s->name;
            if (s->frequency_hz)
                title += " (" + format_number(*s->frequency_hz) + " per second)";
            doc.subsubheading(title);
            std::vector<std::vector<std::string>> rows;
            for (const auto& st : s->steps)
                rows.push_back({std::to_string(st.seq), st.from, st.to, st.operation,
                                st.connector_hint ? to_string(*st.connector_hint) : ""});
            doc.table({"step", "from", "to", "operation", "via"}, rows);
            emit_figure(doc);
        }
    }

    doc.heading("10. Size and Performance");
    {
        double total_ksloc = 0;
        int measured = 0;
        if (m.development)
            for (const auto& s : m.development->subsystems)
                if (s.ksloc) {
                    total_ksloc += *s.ksloc;
                    ++measured;
                }
        if (measured)
            doc.para("Estimated size: " + format_number(total_ksloc) + " KSLOC across " +
                     std::to_string(measured) + " measured subsystems.");
        if (report) {
            doc.para("Load estimate for configuration '" + report->config + "':");
            doc.fenced("", report_table(*report));
        } else if (!measured) {
            doc.para("No size or load figures available.");
        } else {
            doc.para("No load report supplied.");
        }
    }

    doc.heading("11. Quality");
    {
        std::vector<const Diagnostic*> kept;
        for (const auto& d : diagnostics)
            if (d.severity != Severity::Error) kept.push_back(&d);
        if (kept.empty()) {
            doc.para("No outstanding warnings.");
        } else {
            for (const Diagnostic* d : kept)
                doc.bullet(std::string(to_string(d->severity)) + " " + d->rule + ": " +
                           d->message);
            doc.end_list();
        }
    }

    doc.heading("Appendices");

    doc.subheading("A. Acronyms and Abbreviations");
    doc.table({"term", "meaning"}, {{"IPC", "inter-process communication"},
                                    {"KSLOC", "thousands of source lines of code"},
                                    {"RPC", "remote procedure call"},
                                    {"SAD", "software architecture document"}});

    doc.subheading("B. Definitions");
    doc.bullet("class: a unit of the logical view; abstraction with operations");
    doc.bullet("category: a named group of related classes");
    doc.bullet("process: a unit of the process view; a group of tasks forming one "
               "executable");
    doc.bullet("task: a thread of control; major tasks are addressable units, minor "
               "tasks are cyclic or background helpers");
    doc.bullet("connector: a communication path between tasks");
    doc.bullet("subsystem: a unit of the development view, assigned to one layer");
    doc.bullet("layer: a horizontal stratum; subsystems depend only on same or lower "
               "layers");
    doc.bullet("node: a unit of the physical view; a machine that hosts processes");
    doc.bullet("configuration: one placement of processes onto nodes");
    doc.bullet("scenario: an ordered script of object interactions");
    doc.end_list();

    doc.subheading("C. Design Principles");
    {
        std::vector<std::string> rats;
        if (!m.rationale.empty()) rats.push_back(m.rationale);
        if (m.logical && !m.logical->rationale.empty()) rats.push_back(m.logical->rationale);
        if (m.process && !m.process->rationale.empty()) rats.push_back(m.process->rationale);
        if (m.development && !m.development->rationale.empty())
            rats.push_back(m.development->rationale);
        if (m.physical && !m.physical->rationale.empty()) rats.push_back(m.physical->rationale);
        if (rats.empty()) {
            doc.para("No principles recorded.");
        } else {
            for (const auto& r : rats) doc.bullet(r);
            doc.end_list();
        }
    }

    return doc.str();
}

} // namespace fourview
