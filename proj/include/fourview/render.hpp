#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fourview/diag.hpp"
#include "fourview/model.hpp"

namespace fourview {

enum class DotView { Logical, Process, Development, Physical, Scenario };

inline const char* to_string(DotView v) {
    switch (v) {
    case DotView::Logical: return "logical";
    case DotView::Process: return "process";
    case DotView::Development: return "development";
    case DotView::Physical: return "physical";
    case DotView::Scenario: return "scenario";
    }
    return "logical";
}

inline std::optional<DotView> parse_dot_view(const std::string& s) {
    if (s == "logical") return DotView::Logical;
    if (s == "process") return DotView::Process;
    if (s == "development") return DotView::Development;
    if (s == "physical") return DotView::Physical;
    if (s == "scenario") return DotView::Scenario;
    return std::nullopt;
}

namespace detail {

inline std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch;
    }
    out += '"';
    return out;
}

class Dot {
  public:
    void comment(const std::string& text) { body_ += "// " + text + "\n"; }
    void open(const std::string& name) {
        body_ += indent() + "digraph " + dot_quote(name) + " {\n";
        ++depth_;
    }
    void open_cluster(const std::string& name, const std::string& label) {
        body_ += indent() + "subgraph " + dot_quote("cluster_" + name) + " {\n";
        ++depth_;
        body_ += indent() + "label=" + dot_quote(label) + ";\n";
    }
    void close() {
        --depth_;
        body_ += indent() + "}\n";
    }
    void node(const std::string& id, const std::string& attrs) {
        body_ += indent() + dot_quote(id) + " [" + attrs + "];\n";
    }
    void edge(const std::string& from, const std::string& to, const std::string& attrs) {
        body_ += indent() + dot_quote(from) + " -> " + dot_quote(to);
        if (!attrs.empty()) body_ += " [" + attrs + "]";
        body_ += ";\n";
    }
    void raw(const std::string& line) { body_ += indent() + line + "\n"; }
    std::string str() const { return body_; }

  private:
    std::string indent() const { return std::string(2 * depth_, ' '); }
    std::string body_;
    int depth_ = 0;
};

inline std::string label_attr(const std::string& text) {
    return "label=" + dot_quote(text);
}

inline std::string relation_attrs(RelationKind k) {
    switch (k) {
    case RelationKind::Inheritance: return "arrowhead=empty";
    case RelationKind::Association: return "";
    case RelationKind::Containment: return "dir=both, arrowtail=diamond, arrowhead=none";
    case RelationKind::Usage: return "style=dashed";
    }
    return "";
}

inline std::string dot_logical(const ArchitectureModel& m) {
    Dot d;
    d.comment("legend: class=ellipse, category=cluster; inheritance=empty arrowhead, "
              "association=plain, containment=diamond tail, usage=dashed");
    const LogicalView& v = *m.logical;
    if (v.categories.empty() && v.classes.empty() && v.relations.empty()) {
        d.raw("digraph logical {}");
        return d.str();
    }
    d.open("logical");
    std::set<std::string> declared_categories;
    for (const auto& c : v.categories) declared_categories.insert(c.id);

    std::map<std::string, std::vector<const Class*>> by_category;
    std::vector<const Class*> uncategorized;
    for (const auto& c : v.classes) {
        if (declared_categories.count(c.category))
            by_category[c.category].push_back(&c);
        else
            uncategorized.push_back(&c);
    }
    auto by_id = [](const Class* a, const Class* b) { return a->id < b->id; };
    for (const auto& cat : declared_categories) {
        d.open_cluster(cat, cat);
        auto it = by_category.find(cat);
        if (it != by_category.end()) {
            std::sort(it->second.begin(), it->second.end(), by_id);
            for (const Class* c : it->second) d.node(c->id, "shape=ellipse");
        }
        d.close();
    }
    std::sort(uncategorized.begin(), uncategorized.end(), by_id);
    for (const Class* c : uncategorized) d.node(c->id, "shape=ellipse");

    std::vector<const Relation*> rels;
    for (const auto& r : v.relations) rels.push_back(&r);
    std::sort(rels.begin(), rels.end(), [](const Relation* a, const Relation* b) {
        return std::make_tuple(static_cast<int>(a->kind), a->from, a->to) <
               std::make_tuple(static_cast<int>(b->kind), b->from, b->to);
    });
    for (const Relation* r : rels) d.edge(r->from, r->to, relation_attrs(r->kind));
    d.close();
    return d.str();
}

inline std::string dot_process(const ArchitectureModel& m) {
    Dot d;
    d.comment("legend: task=box, process=cluster; connectors labeled with kind");
    const ProcessView& v = *m.process;
    if (v.processes.empty() && v.connectors.empty()) {
        d.raw("digraph process {}");
        return d.str();
    }
    d.open("process");
    std::vector<const Process*> procs;
    for (const auto& p : v.processes) procs.push_back(&p);
    std::sort(procs.begin(), procs.end(),
              [](const Process* a, const Process* b) { return a->id < b->id; });
    for (const Process* p : procs) {
        std::string label = p->id;
        if (p->replicas > 1) label += " (replicas " + std::to_string(p->replicas) + ")";
        d.open_cluster(p->id, label);
        std::vector<const Task*> tasks;
        for (const auto& t : p->tasks) tasks.push_back(&t);
        std::sort(tasks.begin(), tasks.end(),
                  [](const Task* a, const Task* b) { return a->id < b->id; });
        for (const Task* t : tasks) d.node(t->id, "shape=box");
        d.close();
    }
    std::vector<const Connector*> conns;
    for (const auto& c : v.connectors) conns.push_back(&c);
    std::sort(conns.begin(), conns.end(), [](const Connector* a, const Connector* b) {
        return std::make_tuple(static_cast<int>(a->kind), a->from, a->to) <
               std::make_tuple(static_cast<int>(b->kind), b->from, b->to);
    });
    for (const Connector* c : conns)
        d.edge(c->from, c->to, label_attr(to_string(c->kind)));
    d.close();
    return d.str();
}

inline std::string dot_development(const ArchitectureModel& m) {
    Dot d;
    d.comment("legend: subsystem=box3d, layer=cluster (bottom layer at bottom); "
              "edges are build dependencies");
    const DevelopmentView& v = *m.development;
    if (v.layers.empty() && v.subsystems.empty()) {
        d.raw("digraph development {}");
        return d.str();
    }
    d.open("development");
    std::vector<const LayerDef*> layers;
    for (const auto& l : v.layers) layers.push_back(&l);
    std::sort(layers.begin(), layers.end(),
              [](const LayerDef* a, const LayerDef* b) { return a->number < b->number; });

    std::map<int, std::vector<const Subsystem*>> by_layer;
    for (const auto& s : v.subsystems) by_layer[s.layer].push_back(&s);
    for (auto& [_, subs] : by_layer)
        std::sort(subs.begin(), subs.end(),
                  [](const Subsystem* a, const Subsystem* b) { return a->id < b->id; });

    std::vector<std::string> anchors; // lex-first subsystem per populated layer, ascending
    for (const LayerDef* l : layers) {
        std::string label = "layer " + std::to_string(l->number);
        if (!l->name.empty()) label += ": " + l->name;
        d.open_cluster("layer_" + std::to_string(l->number), label);
        auto it = by_layer.find(l->number);
        if (it != by_layer.end()) {
            for (const Subsystem* s : it->second) d.node(s->id, "shape=box3d");
            anchors.push_back(it->second.front()->id);
        }
        d.close();
    }
    // invisible chain pins higher layers above lower ones
    for (std::size_t i = anchors.size(); i-- > 1;)
        d.edge(anchors[i], anchors[i - 1], "style=invis");

    std::vector<const DevDependency*> deps;
    for (const auto& dep : v.dependencies) deps.push_back(&dep);
    std::sort(deps.begin(), deps.end(), [](const DevDependency* a, const DevDependency* b) {
        return std::make_tuple(a->from, a->to) < std::make_tuple(b->from, b->to);
    });
    for (const DevDependency* dep : deps) d.edge(dep->from, dep->to, "");
    d.close();
    return d.str();
}

inline std::string dot_physical(const ArchitectureModel& m) {
    Dot d;
    d.comment("legend: node=house, link=line (junction point when shared), "
              "configuration=note");
    const PhysicalView& v = *m.physical;
    if (v.nodes.empty() && v.links.empty() && v.configurations.empty()) {
        d.raw("digraph physical {}");
        return d.str();
    }
    d.open("physical");
    std::vector<const Node*> nodes;
    for (const auto& n : v.nodes) nodes.push_back(&n);
    std::sort(nodes.begin(), nodes.end(),
              [](const Node* a, const Node* b) { return a->id < b->id; });
    for (const Node* n : nodes) d.node(n->id, "shape=house");

    std::vector<const Link*> links;
    for (const auto& l : v.links) links.push_back(&l);
    std::sort(links.begin(), links.end(), [](const Link* a, const Link* b) {
        auto ea = a->endpoints, eb = b->endpoints;
        std::sort(ea.begin(), ea.end());
        std::sort(eb.begin(), eb.end());
        return std::make_tuple(static_cast<int>(a->medium), ea) <
               std::make_tuple(static_cast<int>(b->medium), eb);
    });
    int junction = 0;
    for (const Link* l : links) {
        std::string label = to_string(l->medium);
        if (l->bandwidth) label += " " + format_number(*l->bandwidth);
        std::vector<std::string> eps = l->endpoints;
        std::sort(eps.begin(), eps.end());
        if (eps.size() == 2) {
            d.edge(eps[0], eps[1], "dir=none, " + label_attr(label));
        } else {
            std::string j = "link" + std::to_string(++junction);
            d.node(j, "shape=point, xlabel=" + dot_quote(label));
            for (const auto& e : eps) d.edge(j, e, "dir=none");
        }
    }

    std::vector<const Configuration*> configs;
    for (const auto& c : v.configurations) configs.push_back(&c);
    std::sort(configs.begin(), configs.end(),
              [](const Configuration* a, const Configuration* b) { return a->name < b->name; });
    for (const Configuration* c : configs) {
        std::string label = c->name;
        std::vector<const Placement*> pls;
        for (const auto& p : c->placements) pls.push_back(&p);
        std::sort(pls.begin(), pls.end(),
                  [](const Placement* a, const Placement* b) { return a->process < b->process; });
        for (const Placement* p : pls) {
            label += "\\n" + p->process + ":";
            for (const auto& n : p->nodes) label += " " + n;
        }
        // names and ids are bare identifiers; quoting by hand keeps \n a line break
        d.node("config_" + c->name, "shape=note, label=\"" + label + "\"");
    }
    d.close();
    return d.str();
}

inline std::string dot_scenario(const ArchitectureModel& m, const std::string& id) {
    const Scenario* sc = nullptr;
    for (const auto& s : m.scenarios->scenarios)
        if (s.id == id) sc = &s;
    if (!sc) throw OpError("E_NOSCENARIO", "unknown scenario '" + id + "'");
    Dot d;
    d.comment("legend: class=ellipse, step=numbered edge \"n: operation\"");
    d.open("scenario_" + sc->id);
    std::set<std::string> participants;
    for (const auto& st : sc->steps) {
        participants.insert(st.from);
        participants.insert(st.to);
    }
    for (const auto& p : participants) d.node(p, "shape=ellipse");
    for (const auto& st : sc->steps)
        d.edge(st.from, st.to, label_attr(std::to_string(st.seq) + ": " + st.operation));
    d.close();
    return d.str();
}

} // namespace detail

/// One DOT blueprint per view. Scenario blueprints need the scenario's id.
/// Throws OpError E_NOVIEW when the view is absent and E_NOSCENARIO when the
/// scenario reference is missing or unknown.
inline std::string to_dot(const ArchitectureModel& m, DotView view,
                          const std::string& scenario_id = "") {
    auto missing = [](const char* name) {
        return OpError("E_NOVIEW", std::string(name) + " view is absent");
    };
    switch (view) {
    case DotView::Logical:
        if (!m.logical) throw missing("logical");
        return detail::dot_logical(m);
    case DotView::Process:
        if (!m.process) throw missing("process");
        return detail::dot_process(m);
    case DotView::Development:
        if (!m.development) throw missing("development");
        return detail::dot_development(m);
    case DotView::Physical:
        if (!m.physical) throw missing("physical");
        return detail::dot_physical(m);
    case DotView::Scenario:
        if (!m.scenarios) throw missing("scenarios");
        if (scenario_id.empty())
            throw OpError("E_NOSCENARIO", "a scenario reference is required for the scenario view");
        return detail::dot_scenario(m, scenario_id);
    }
    throw missing("requested");
}

} // namespace fourview
