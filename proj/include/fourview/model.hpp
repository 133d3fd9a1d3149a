#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fourview/diag.hpp"

namespace fourview {

// ============================================================================
// Enumerations
// ============================================================================

enum class Autonomy { Active, Passive, Protected };
enum class Persistence { Transient, Permanent };
enum class RelationKind { Association, Inheritance, Containment, Usage };
enum class TaskKind { Major, Minor };
enum class ConnectorKind { Message, Rpc, Broadcast, Rendezvous, SharedMemory };
enum class LinkMedium { Lan, Wan, Bus, Other };
enum class ViewKind { Logical, Process, Development, Physical, Scenarios };

inline const char* to_string(Autonomy v) {
    switch (v) {
        case Autonomy::Active: return "active";
        case Autonomy::Passive: return "passive";
        case Autonomy::Protected: return "protected";
    }
    return "passive";
}

inline const char* to_string(Persistence v) {
    return v == Persistence::Permanent ? "permanent" : "transient";
}

inline const char* to_string(RelationKind v) {
    switch (v) {
        case RelationKind::Association: return "association";
        case RelationKind::Inheritance: return "inheritance";
        case RelationKind::Containment: return "containment";
        case RelationKind::Usage: return "usage";
    }
    return "association";
}

inline const char* to_string(TaskKind v) {
    return v == TaskKind::Minor ? "minor" : "major";
}

inline const char* to_string(ConnectorKind v) {
    switch (v) {
        case ConnectorKind::Message: return "message";
        case ConnectorKind::Rpc: return "rpc";
        case ConnectorKind::Broadcast: return "broadcast";
        case ConnectorKind::Rendezvous: return "rendezvous";
        case ConnectorKind::SharedMemory: return "shared_memory";
    }
    return "message";
}

inline const char* to_string(LinkMedium v) {
    switch (v) {
        case LinkMedium::Lan: return "lan";
        case LinkMedium::Wan: return "wan";
        case LinkMedium::Bus: return "bus";
        case LinkMedium::Other: return "other";
    }
    return "other";
}

inline const char* to_string(ViewKind v) {
    switch (v) {
        case ViewKind::Logical: return "logical";
        case ViewKind::Process: return "process";
        case ViewKind::Development: return "development";
        case ViewKind::Physical: return "physical";
        case ViewKind::Scenarios: return "scenarios";
    }
    return "logical";
}

inline std::optional<Autonomy> parse_autonomy(const std::string& s) {
    if (s == "active") return Autonomy::Active;
    if (s == "passive") return Autonomy::Passive;
    if (s == "protected") return Autonomy::Protected;
    return std::nullopt;
}

inline std::optional<Persistence> parse_persistence(const std::string& s) {
    if (s == "transient") return Persistence::Transient;
    if (s == "permanent") return Persistence::Permanent;
    return std::nullopt;
}

inline std::optional<RelationKind> parse_relation_kind(const std::string& s) {
    if (s == "association") return RelationKind::Association;
    if (s == "inheritance") return RelationKind::Inheritance;
    if (s == "containment") return RelationKind::Containment;
    if (s == "usage") return RelationKind::Usage;
    return std::nullopt;
}

inline std::optional<TaskKind> parse_task_kind(const std::string& s) {
    if (s == "major") return TaskKind::Major;
    if (s == "minor") return TaskKind::Minor;
    return std::nullopt;
}

inline std::optional<ConnectorKind> parse_connector_kind(const std::string& s) {
    if (s == "message") return ConnectorKind::Message;
    if (s == "rpc") return ConnectorKind::Rpc;
    if (s == "broadcast") return ConnectorKind::Broadcast;
    if (s == "rendezvous") return ConnectorKind::Rendezvous;
    if (s == "shared_memory") return ConnectorKind::SharedMemory;
    return std::nullopt;
}

inline std::optional<LinkMedium> parse_link_medium(const std::string& s) {
    if (s == "lan") return LinkMedium::Lan;
    if (s == "wan") return LinkMedium::Wan;
    if (s == "bus") return LinkMedium::Bus;
    if (s == "other") return LinkMedium::Other;
    return std::nullopt;
}

/// Identifiers are case-sensitive `[a-z][a-z0-9_]*`; display names are free text.
inline bool is_identifier(const std::string& s) {
    if (s.empty() || s[0] < 'a' || s[0] > 'z') return false;
    for (char c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

// ============================================================================
// Logical view
// ============================================================================

struct ClassCategory {
    std::string id;
    std::string name; // display text; empty falls back to id
    SourceSpan span;
};

struct Class {
    std::string id;
    std::string name;
    std::string category; // category id; empty = uncategorized (rule L001)
    std::vector<std::string> operations;
    Autonomy autonomy = Autonomy::Passive;
    Persistence persistence = Persistence::Transient;
    std::string subordinate_to; // class id; empty = none
    bool distributed = false;
    bool utility = false;
    std::optional<double> est_cost; // abstract units per invocation, default 1
    SourceSpan span;
};

inline double est_cost_of(const Class& c) { return c.est_cost.value_or(1.0); }

struct Relation {
    RelationKind kind = RelationKind::Association;
    std::string from;
    std::string to;
    SourceSpan span;
};

struct LogicalView {
    std::vector<ClassCategory> categories;
    std::vector<Class> classes;
    std::vector<Relation> relations;
    std::string rationale;
    SourceSpan span;
};

// ============================================================================
// Process view
// ============================================================================

struct Task {
    std::string id;
    std::string name;
    TaskKind kind = TaskKind::Major;
    std::optional<double> period_ms; // set for cyclic tasks
    SourceSpan span;
};

struct Process {
    std::string id;
    std::string name;
    std::vector<Task> tasks;
    int replicas = 1;
    SourceSpan span;
};

struct Connector {
    ConnectorKind kind = ConnectorKind::Message;
    std::string from; // task id
    std::string to;   // task id, distinct from `from`
    SourceSpan span;
};

struct ProcessView {
    std::vector<Process> processes;
    std::vector<Connector> connectors;
    std::string rationale;
    SourceSpan span;
};

// ============================================================================
// Development view
// ============================================================================

struct LayerDef {
    int number = 1; // 1 = bottom
    std::string name;
    std::string responsibility;
    SourceSpan span;
};

struct Subsystem {
    std::string id;
    std::string name;
    int layer = 1;
    std::vector<std::string> modules;
    std::optional<double> ksloc;
    SourceSpan span;
};

struct DevDependency {
    std::string from; // subsystem id
    std::string to;   // subsystem id, distinct
    SourceSpan span;
};

struct DevelopmentView {
    std::vector<LayerDef> layers;
    std::vector<Subsystem> subsystems;
    std::vector<DevDependency> dependencies;
    std::string rationale;
    SourceSpan span;
};

// ============================================================================
// Physical view
// ============================================================================

struct Node {
    std::string id;
    std::string name;
    std::optional<double> capacity; // abstract units/sec; unset = unbounded
    SourceSpan span;
};

struct Link {
    LinkMedium medium = LinkMedium::Lan;
    std::vector<std::string> endpoints; // >= 2 node ids, set semantics
    std::optional<double> bandwidth;    // messages/sec, reported against only
    SourceSpan span;
};

struct Placement {
    std::string process;
    std::vector<std::string> nodes; // one entry per replica, order significant
    SourceSpan span;
};

struct Configuration {
    std::string name;
    std::vector<Placement> placements;
    SourceSpan span;
};

struct PhysicalView {
    std::vector<Node> nodes;
    std::vector<Link> links;
    std::vector<Configuration> configurations;
    std::string rationale;
    SourceSpan span;
};

// ============================================================================
// Scenarios
// ============================================================================

struct Step {
    int seq = 1;
    std::string from;      // acting class
    std::string to;        // receiving class
    std::string operation; // operation on `to`
    std::optional<ConnectorKind> connector_hint;
    SourceSpan span;
};

struct Scenario {
    std::string id;
    std::string name;
    std::optional<double> frequency_hz; // occurrences/sec for load estimation
    std::vector<Step> steps;
    SourceSpan span;
};

struct ScenarioView {
    std::vector<Scenario> scenarios;
    SourceSpan span;
};

// ============================================================================
// Cross-view mappings
// ============================================================================

struct L2PEntry {
    std::string class_id;
    std::vector<std::string> tasks; // nonempty; first entry is the dispatch task
    SourceSpan span;
};

struct L2DEntry {
    std::string class_id;
    std::vector<std::pair<std::string, std::string>> modules; // (subsystem, module)
    SourceSpan span;
};

// ============================================================================
// Root aggregate
// ============================================================================

/// Root of a five-view architecture description. Values are treated as immutable
/// after construction; every operation in this library is a pure function of
/// the model, so models may be shared read-only across threads.
struct ArchitectureModel {
    std::string name;
    std::string rationale;
    std::optional<LogicalView> logical;
    std::optional<ProcessView> process;
    std::optional<DevelopmentView> development;
    std::optional<PhysicalView> physical;
    std::optional<ScenarioView> scenarios;
    std::vector<L2PEntry> l2p;
    std::vector<L2DEntry> l2d;
    SourceSpan span;
};

/// Reports which of the five views are declared. The checker skips rules whose
/// views are absent and notes each omission with one T001 info.
inline std::set<ViewKind> view_presence(const ArchitectureModel& m) {
    std::set<ViewKind> present;
    if (m.logical) present.insert(ViewKind::Logical);
    if (m.process) present.insert(ViewKind::Process);
    if (m.development) present.insert(ViewKind::Development);
    if (m.physical) present.insert(ViewKind::Physical);
    if (m.scenarios) present.insert(ViewKind::Scenarios);
    return present;
}

// ============================================================================
// Index
// ============================================================================

/// Lookup tables over a model. Pointers alias the model; keep the model alive.
/// On duplicate ids the first declaration wins (resolve reports the rest).
struct ModelIndex {
    std::map<std::string, const ClassCategory*> categories;
    std::map<std::string, const Class*> classes;
    std::map<std::string, const Process*> processes;
    std::map<std::string, const Task*> tasks;
    std::map<std::string, const Process*> process_of_task;
    std::map<std::string, const Subsystem*> subsystems;
    std::map<std::string, const LayerDef*> layers; // keyed by number as text
    std::map<std::string, const Node*> nodes;
    std::map<std::string, const Scenario*> scenarios;
    std::map<std::string, const L2PEntry*> l2p;
    std::map<std::string, const L2DEntry*> l2d;

    const Class* find_class(const std::string& id) const {
        auto it = classes.find(id);
        return it == classes.end() ? nullptr : it->second;
    }
    const Process* find_process(const std::string& id) const {
        auto it = processes.find(id);
        return it == processes.end() ? nullptr : it->second;
    }
    const Process* owner_of_task(const std::string& task_id) const {
        auto it = process_of_task.find(task_id);
        return it == process_of_task.end() ? nullptr : it->second;
    }
    const L2PEntry* l2p_of(const std::string& class_id) const {
        auto it = l2p.find(class_id);
        return it == l2p.end() ? nullptr : it->second;
    }
};

inline ModelIndex index_model(const ArchitectureModel& m) {
    ModelIndex ix;
    if (m.logical) {
        for (const auto& c : m.logical->categories) ix.categories.emplace(c.id, &c);
        for (const auto& c : m.logical->classes) ix.classes.emplace(c.id, &c);
    }
    if (m.process) {
        for (const auto& p : m.process->processes) {
            ix.processes.emplace(p.id, &p);
            for (const auto& t : p.tasks) {
                ix.tasks.emplace(t.id, &t);
                ix.process_of_task.emplace(t.id, &p);
            }
        }
    }
    if (m.development) {
        for (const auto& s : m.development->subsystems) ix.subsystems.emplace(s.id, &s);
        for (const auto& l : m.development->layers) ix.layers.emplace(std::to_string(l.number), &l);
    }
    if (m.physical) {
        for (const auto& n : m.physical->nodes) ix.nodes.emplace(n.id, &n);
    }
    if (m.scenarios) {
        for (const auto& s : m.scenarios->scenarios) ix.scenarios.emplace(s.id, &s);
    }
    for (const auto& e : m.l2p) ix.l2p.emplace(e.class_id, &e);
    for (const auto& e : m.l2d) ix.l2d.emplace(e.class_id, &e);
    return ix;
}

/// Walks `subordinate_to` links from `id` and reports whether `master` is an
/// ancestor. Chains are acyclic after a clean resolve; a visited guard keeps
/// this total on unchecked models.
inline bool is_subordinate_of(const ModelIndex& ix, const std::string& id,
                              const std::string& master) {
    std::set<std::string> seen;
    const Class* c = ix.find_class(id);
    while (c && !c->subordinate_to.empty() && seen.insert(c->id).second) {
        if (c->subordinate_to == master) return true;
        c = ix.find_class(c->subordinate_to);
    }
    return false;
}

// ============================================================================
// resolve
// ============================================================================

namespace detail {

inline Diagnostic make_diag(Severity sev, const char* rule, std::string msg,
                            const SourceSpan& span) {
    return Diagnostic{sev, rule, std::move(msg), span};
}

inline void check_positive(std::vector<Diagnostic>& out, const std::optional<double>& v,
                           const char* what, const std::string& owner, const SourceSpan& span) {
    if (v && (!(*v > 0) || !std::isfinite(*v)))
        out.push_back(make_diag(Severity::Error, "E_MODEL",
                                std::string(what) + " of '" + owner + "' must be positive", span));
}

inline void check_ident(std::vector<Diagnostic>& out, const std::string& id,
                        const char* kind, const SourceSpan& span) {
    if (!is_identifier(id))
        out.push_back(make_diag(Severity::Error, "E_MODEL",
                                std::string("invalid ") + kind + " identifier '" + id + "'", span));
}

/// Duplicate detector per identifier kind; reports the later declaration.
class DupSet {
  public:
    explicit DupSet(std::vector<Diagnostic>& out, std::string kind)
        : out_(out), kind_(std::move(kind)) {}

    void add(const std::string& id, const SourceSpan& span) {
        if (!seen_.insert(id).second)
            out_.push_back(make_diag(Severity::Error, "E_DUP",
                                     "duplicate " + kind_ + " '" + id + "'", span));
    }

  private:
    std::vector<Diagnostic>& out_;
    std::string kind_;
    std::set<std::string> seen_;
};

} // namespace detail

/// Reference resolution and structural well-formedness. Returns duplicate-id
/// (E_DUP), dangling-reference (E_REF) and invariant (E_MODEL) findings, all
/// errors, sorted canonically. An empty result means the model is resolvable.
///
/// Scenario step class/operation references are deliberately not resolved
/// here; rule S001 owns them so that sketch-mode checking can relax them.
inline std::vector<Diagnostic> resolve(const ArchitectureModel& m) {
    using detail::make_diag;
    std::vector<Diagnostic> out;

    if (!m.logical && !m.process && !m.development && !m.physical && !m.scenarios)
        out.push_back(make_diag(Severity::Error, "E_MODEL",
                                "architecture '" + m.name + "' declares no view", m.span));
    if (m.scenarios && !m.logical)
        out.push_back(make_diag(Severity::Error, "E_MODEL",
                                "scenarios require a logical view (scripts reference classes)",
                                m.scenarios->span));
    detail::check_ident(out, m.name, "architecture", m.span);

    std::set<std::string> class_ids, task_ids, process_ids, subsystem_ids, node_ids;
    std::set<std::string> category_ids;
    std::map<std::string, int> subsystem_layer;

    if (m.logical) {
        const LogicalView& lv = *m.logical;
        detail::DupSet cat_dup(out, "category id");
        for (const auto& c : lv.categories) {
            detail::check_ident(out, c.id, "category", c.span);
            cat_dup.add(c.id, c.span);
            category_ids.insert(c.id);
        }
        detail::DupSet cls_dup(out, "class id");
        for (const auto& c : lv.classes) {
            detail::check_ident(out, c.id, "class", c.span);
            cls_dup.add(c.id, c.span);
            class_ids.insert(c.id);
        }
        for (const auto& c : lv.classes) {
            if (!c.category.empty() && !category_ids.count(c.category))
                out.push_back(make_diag(Severity::Error, "E_REF",
                                        "class '" + c.id + "' references unknown category '" +
                                            c.category + "'", c.span));
            if (!c.subordinate_to.empty()) {
                if (c.subordinate_to == c.id)
                    out.push_back(make_diag(Severity::Error, "E_MODEL",
                                            "class '" + c.id + "' is subordinate to itself", c.span));
                else if (!class_ids.count(c.subordinate_to))
                    out.push_back(make_diag(Severity::Error, "E_REF",
                                            "class '" + c.id + "' subordinate to unknown class '" +
                                                c.subordinate_to + "'", c.span));
            }
            detail::DupSet op_dup(out, "operation in class '" + c.id + "'");
            for (const auto& op : c.operations) {
                detail::check_ident(out, op, "operation", c.span);
                op_dup.add(op, c.span);
            }
            if (c.est_cost && (!(*c.est_cost >= 0) || !std::isfinite(*c.est_cost)))
                out.push_back(make_diag(Severity::Error, "E_MODEL",
                                        "est_cost of '" + c.id + "' must be nonnegative", c.span));
        }
        for (const auto& r : lv.relations) {
            for (const std::string* end : {&r.from, &r.to})
                if (!class_ids.count(*end))
                    out.push_back(make_diag(Severity::Error, "E_REF",
                                            std::string("unresolved class '") + *end + "' in " +
                                                to_string(r.kind) + " relation", r.span));
        }

        // Subordination chains terminate: functional graph, walk each class.
        {
            std::map<std::string, const Class*> by_id;
            for (const auto& c : lv.classes) by_id.emplace(c.id, &c);
            std::set<std::string> on_cycle;
            for (const auto& c : lv.classes) {
                std::set<std::string> walk;
                const Class* cur = &c;
                while (cur && !cur->subordinate_to.empty()) {
                    if (!walk.insert(cur->id).second) {
                        if (on_cycle.insert(cur->id).second)
                            out.push_back(make_diag(Severity::Error, "E_MODEL",
                                                    "subordination cycle through class '" +
                                                        cur->id + "'", cur->span));
                        break;
                    }
                    auto it = by_id.find(cur->subordinate_to);
                    cur = it == by_id.end() ? nullptr : it->second;
                }
            }
        }

        // Inheritance acyclicity: DFS over the inheritance subgraph.
        {
            std::map<std::string, std::vector<std::string>> adj;
            for (const auto& r : lv.relations)
                if (r.kind == RelationKind::Inheritance && class_ids.count(r.from) &&
                    class_ids.count(r.to))
                    adj[r.from].push_back(r.to);
            std::map<std::string, int> color; // 0 white, 1 grey, 2 black
            std::set<std::string> reported;
            // Recursive lambda; model graphs are small.
            auto dfs = [&](auto&& self, const std::string& v) -> void {
                color[v] = 1;
                for (const auto& w : adj[v]) {
                    if (color[w] == 1) {
                        if (reported.insert(w).second)
                            out.push_back(make_diag(Severity::Error, "E_MODEL",
                                                    "inheritance cycle through class '" + w + "'",
                                                    lv.span));
                    } else if (color[w] == 0) {
                        self(self, w);
                    }
                }
                color[v] = 2;
            };
            for (const auto& c : lv.classes)
                if (color[c.id] == 0) dfs(dfs, c.id);
        }
    }

    if (m.process) {
        const ProcessView& pv = *m.process;
        detail::DupSet proc_dup(out, "process id");
        detail::DupSet task_dup(out, "task id");
        for (const auto& p : pv.processes) {
            detail::check_ident(out, p.id, "process", p.span);
            proc_dup.add(p.id, p.span);
            process_ids.insert(p.id);
            if (p.replicas < 1)
                out.push_back(make_diag(Severity::Error, "E_MODEL",
                                        "process '" + p.id + "' must have replicas >= 1", p.span));
            if (p.tasks.empty())
                out.push_back(make_diag(Severity::Error, "E_MODEL",
                                        "process '" + p.id + "' declares no task", p.span));
            for (const auto& t : p.tasks) {
                detail::check_ident(out, t.id, "task", t.span);
                task_dup.add(t.id, t.span);
                task_ids.insert(t.id);
                detail::check_positive(out, t.period_ms, "period", t.id, t.span);
            }
        }
        for (const auto& c : pv.connectors) {
            for (const std::string* end : {&c.from, &c.to})
                if (!task_ids.count(*end))
                    out.push_back(make_diag(Severity::Error, "E_REF",
                                            std::string("unresolved task '") + *end + "' in " +
                                                to_string(c.kind) + " connector", c.span));
            if (c.from == c.to)
                out.push_back(make_diag(Severity::Error, "E_MODEL",
                                        "connector endpoints must be distinct tasks ('" + c.from +
                                            "')", c.span));
        }
    }

    if (m.development) {
        const DevelopmentView& dv = *m.development;
        detail::DupSet layer_dup(out, "layer number");
        std::set<int> layer_numbers;
        for (const auto& l : dv.layers) {
            layer_dup.add(std::to_string(l.number), l.span);
            layer_numbers.insert(l.number);
        }
        // Layer numbers must run 1..n, 1 = bottom.
        int expect = 1;
        bool consecutive = !dv.layers.empty() || dv.subsystems.empty();
        for (int n : layer_numbers) {
            if (n != expect) { consecutive = false; break; }
            ++expect;
        }
        if (!consecutive)
            out.push_back(make_diag(Severity::Error, "E_MODEL",
                                    "layer numbers must be consecutive starting at 1", dv.span));
        detail::DupSet sub_dup(out, "subsystem id");
        for (const auto& s : dv.subsystems) {
            detail::check_ident(out, s.id, "subsystem", s.span);
            sub_dup.add(s.id, s.span);
            subsystem_ids.insert(s.id);
            subsystem_layer[s.id] = s.layer;
            if (!layer_numbers.count(s.layer))
                out.push_back(make_diag(Severity::Error, "E_REF",
                                        "subsystem '" + s.id + "' placed on undeclared layer " +
                                            std::to_string(s.layer), s.span));
            detail::DupSet mod_dup(out, "module in subsystem '" + s.id + "'");
            for (const auto& mod : s.modules) {
                detail::check_ident(out, mod, "module", s.span);
                mod_dup.add(mod, s.span);
            }
            detail::check_positive(out, s.ksloc, "ksloc", s.id, s.span);
        }
        for (const auto& d : dv.dependencies) {
            for (const std::string* end : {&d.from, &d.to})
                if (!subsystem_ids.count(*end))
                    out.push_back(make_diag(Severity::Error, "E_REF",
                                            std::string("unresolved subsystem '") + *end +
                                                "' in dependency", d.span));
            if (d.from == d.to)
                out.push_back(make_diag(Severity::Error, "E_MODEL",
                                        "dependency endpoints must be distinct subsystems ('" +
                                            d.from + "')", d.span));
        }
    }

    if (m.physical) {
        const PhysicalView& phv = *m.physical;
        detail::DupSet node_dup(out, "node id");
        for (const auto& n : phv.nodes) {
            detail::check_ident(out, n.id, "node", n.span);
            node_dup.add(n.id, n.span);
            node_ids.insert(n.id);
            detail::check_positive(out, n.capacity, "capacity", n.id, n.span);
        }
        for (const auto& l : phv.links) {
            std::set<std::string> distinct(l.endpoints.begin(), l.endpoints.end());
            if (distinct.size() < 2)
                out.push_back(make_diag(Severity::Error, "E_MODEL",
                                        "link must join at least two distinct nodes", l.span));
            for (const auto& e : l.endpoints)
                if (!node_ids.count(e))
                    out.push_back(make_diag(Severity::Error, "E_REF",
                                            "unresolved node '" + e + "' in link", l.span));
            detail::check_positive(out, l.bandwidth, "bandwidth", "link", l.span);
        }
        detail::DupSet cfg_dup(out, "configuration name");
        for (const auto& cfg : phv.configurations) {
            detail::check_ident(out, cfg.name, "configuration", cfg.span);
            cfg_dup.add(cfg.name, cfg.span);
            detail::DupSet place_dup(out, "placement in configuration '" + cfg.name + "'");
            for (const auto& pl : cfg.placements) {
                place_dup.add(pl.process, pl.span);
                if (!process_ids.count(pl.process))
                    out.push_back(make_diag(Severity::Error, "E_REF",
                                            "configuration '" + cfg.name +
                                                "' places undeclared process '" + pl.process + "'",
                                            pl.span));
                for (const auto& n : pl.nodes)
                    if (!node_ids.count(n))
                        out.push_back(make_diag(Severity::Error, "E_REF",
                                                "configuration '" + cfg.name +
                                                    "' places onto undeclared node '" + n + "'",
                                                pl.span));
                if (pl.nodes.empty())
                    out.push_back(make_diag(Severity::Error, "E_MODEL",
                                            "placement of '" + pl.process + "' lists no node",
                                            pl.span));
            }
        }
    }

    if (m.scenarios) {
        detail::DupSet sc_dup(out, "scenario id");
        for (const auto& s : m.scenarios->scenarios) {
            detail::check_ident(out, s.id, "scenario", s.span);
            sc_dup.add(s.id, s.span);
            if (s.frequency_hz && (!(*s.frequency_hz >= 0) || !std::isfinite(*s.frequency_hz)))
                out.push_back(make_diag(Severity::Error, "E_MODEL",
                                        "frequency of scenario '" + s.id +
                                            "' must be nonnegative", s.span));
            for (std::size_t i = 0; i < s.steps.size(); ++i) {
                if (s.steps[i].seq != static_cast<int>(i) + 1) {
                    out.push_back(make_diag(Severity::Error, "E_MODEL",
                                            "steps of scenario '" + s.id +
                                                "' must be numbered 1..n contiguously",
                                            s.steps[i].span));
                    break;
                }
            }
        }
    }

    {
        detail::DupSet l2p_dup(out, "l2p entry for class");
        for (const auto& e : m.l2p) {
            l2p_dup.add(e.class_id, e.span);
            if (!class_ids.count(e.class_id))
                out.push_back(make_diag(Severity::Error, "E_REF",
                                        "l2p entry for unknown class '" + e.class_id + "'", e.span));
            if (e.tasks.empty())
                out.push_back(make_diag(Severity::Error, "E_MODEL",
                                        "l2p entry for '" + e.class_id + "' lists no task", e.span));
            for (const auto& t : e.tasks)
                if (!task_ids.count(t))
                    out.push_back(make_diag(Severity::Error, "E_REF",
                                            "l2p entry for '" + e.class_id +
                                                "' references unknown task '" + t + "'", e.span));
        }
        detail::DupSet l2d_dup(out, "l2d entry for class");
        std::map<std::string, std::set<std::string>> modules_of;
        if (m.development)
            for (const auto& s : m.development->subsystems)
                modules_of[s.id] = {s.modules.begin(), s.modules.end()};
        for (const auto& e : m.l2d) {
            l2d_dup.add(e.class_id, e.span);
            if (!class_ids.count(e.class_id))
                out.push_back(make_diag(Severity::Error, "E_REF",
                                        "l2d entry for unknown class '" + e.class_id + "'", e.span));
            if (e.modules.empty())
                out.push_back(make_diag(Severity::Error, "E_MODEL",
                                        "l2d entry for '" + e.class_id + "' lists no module",
                                        e.span));
            for (const auto& [sub, mod] : e.modules) {
                auto it = modules_of.find(sub);
                if (it == modules_of.end())
                    out.push_back(make_diag(Severity::Error, "E_REF",
                                            "l2d entry for '" + e.class_id +
                                                "' references unknown subsystem '" + sub + "'",
                                            e.span));
                else if (!it->second.count(mod))
                    out.push_back(make_diag(Severity::Error, "E_REF",
                                            "l2d entry for '" + e.class_id + "': subsystem '" +
                                                sub + "' has no module '" + mod + "'", e.span));
            }
        }
    }

    sort_diagnostics(out);
    return out;
}

} // namespace fourview
