#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fourview/diag.hpp"
#include "fourview/model.hpp"

namespace fourview {

enum class CheckMode { Strict, Sketch };

struct CheckOptions {
    CheckMode mode = CheckMode::Strict;
    bool warnings_as_errors = false;
    std::set<std::string> disabled_rules;
};

enum class HopCrossing { SameTask, SameProcess, CrossProcess };

inline const char* to_string(HopCrossing c) {
    switch (c) {
        case HopCrossing::SameTask: return "same_task";
        case HopCrossing::SameProcess: return "same_process";
        case HopCrossing::CrossProcess: return "cross_process";
    }
    return "same_task";
}

/// One scenario step resolved through the class-to-task mapping. Unset task
/// refs mean the class is unmapped; such hops classify as same_task and carry
/// no connector.
struct TraceHop {
    int seq = 1;
    std::optional<std::string> from_task;
    std::optional<std::string> to_task;
    HopCrossing crossing = HopCrossing::SameTask;
    std::optional<Connector> connector;
};

struct Trace {
    std::string scenario;
    std::vector<TraceHop> hops;
};

struct TraceResult {
    Trace trace;
    std::vector<Diagnostic> diagnostics;
};

namespace detail {

inline bool interprocess_kind(ConnectorKind k) {
    return k == ConnectorKind::Message || k == ConnectorKind::Rpc ||
           k == ConnectorKind::Broadcast;
}

/// Picks the declared connector joining two tasks, either direction. Cross
/// crossings admit only inter-process kinds; the lowest (kind, from, to) wins
/// so the choice is stable. Step `via` hints are informative only.
inline std::optional<Connector> pick_connector(const ArchitectureModel& m,
                                               const std::string& a, const std::string& b,
                                               bool cross) {
    std::optional<Connector> best;
    if (!m.process) return best;
    for (const auto& c : m.process->connectors) {
        bool joins = (c.from == a && c.to == b) || (c.from == b && c.to == a);
        if (!joins) continue;
        if (cross && !interprocess_kind(c.kind)) continue;
        if (!best) {
            best = c;
            continue;
        }
        auto key = [](const Connector& x) {
            return std::make_tuple(static_cast<int>(x.kind), x.from, x.to);
        };
        if (key(c) < key(*best)) best = c;
    }
    return best;
}

inline void trace_steps(const ArchitectureModel& m, const ModelIndex& ix, const Scenario& sc,
                        Trace& out, std::vector<Diagnostic>& diags, Severity step_sev) {
    for (const auto& st : sc.steps) {
        TraceHop hop;
        hop.seq = st.seq;
        const Class* from_cls = ix.find_class(st.from);
        const Class* to_cls = ix.find_class(st.to);
        for (const auto& [cls, id] : {std::pair{from_cls, st.from}, std::pair{to_cls, st.to}}) {
            if (!cls)
                diags.push_back(Diagnostic{step_sev, "S001",
                                           "scenario '" + sc.id + "' step " +
                                               std::to_string(st.seq) +
                                               " references unknown class '" + id + "'",
                                           st.span});
        }
        if (to_cls) {
            bool has_op = std::find(to_cls->operations.begin(), to_cls->operations.end(),
                                    st.operation) != to_cls->operations.end();
            if (!has_op)
                diags.push_back(Diagnostic{step_sev, "S001",
                                           "scenario '" + sc.id + "' step " +
                                               std::to_string(st.seq) + ": class '" + st.to +
                                               "' has no operation '" + st.operation + "'",
                                           st.span});
        }
        const L2PEntry* from_map = from_cls ? ix.l2p_of(from_cls->id) : nullptr;
        const L2PEntry* to_map = to_cls ? ix.l2p_of(to_cls->id) : nullptr;
        if (from_map && !from_map->tasks.empty()) hop.from_task = from_map->tasks.front();
        if (to_map && !to_map->tasks.empty()) hop.to_task = to_map->tasks.front();
        if (hop.from_task && hop.to_task) {
            if (*hop.from_task == *hop.to_task) {
                hop.crossing = HopCrossing::SameTask;
            } else {
                const Process* pf = ix.owner_of_task(*hop.from_task);
                const Process* pt = ix.owner_of_task(*hop.to_task);
                bool cross = !pf || !pt || pf->id != pt->id;
                hop.crossing = cross ? HopCrossing::CrossProcess : HopCrossing::SameProcess;
                hop.connector = pick_connector(m, *hop.from_task, *hop.to_task, cross);
                if (cross && !hop.connector)
                    diags.push_back(Diagnostic{step_sev, "S002",
                                               "scenario '" + sc.id + "' step " +
                                                   std::to_string(st.seq) +
                                                   " crosses processes but no message, rpc, or "
                                                   "broadcast connector joins tasks '" +
                                                   *hop.from_task + "' and '" + *hop.to_task +
                                                   "'",
                                               st.span});
            }
        }
        out.hops.push_back(std::move(hop));
    }
}

} // namespace detail

/// Resolves one scenario's steps to task hops; emits S001/S002 findings
/// inline (strict severities). Throws OpError E_NOSCENARIO for unknown refs.
inline TraceResult trace(const ArchitectureModel& m, const std::string& scenario_id) {
    ModelIndex ix = index_model(m);
    auto it = ix.scenarios.find(scenario_id);
    if (it == ix.scenarios.end())
        throw OpError("E_NOSCENARIO", "unknown scenario '" + scenario_id + "'");
    TraceResult r;
    r.trace.scenario = scenario_id;
    detail::trace_steps(m, ix, *it->second, r.trace, r.diagnostics, Severity::Error);
    sort_diagnostics(r.diagnostics);
    return r;
}

/// Evaluates the whole rule catalog over a resolved model. Absent views skip
/// their rules and add one T001 info each. Sketch mode downgrades S001, S002,
/// M001, M004 to warnings; `warnings_as_errors` then upgrades what remains.
/// Pure and deterministic: identical inputs give identical ordered output.
inline std::vector<Diagnostic> check(const ArchitectureModel& m, const CheckOptions& opts = {}) {
    std::vector<Diagnostic> out;
    ModelIndex ix = index_model(m);
    const bool sketch = opts.mode == CheckMode::Sketch;
    const Severity relaxed = sketch ? Severity::Warning : Severity::Error;

    struct ViewFlag {
        const char* name;
        bool present;
    };
    for (const ViewFlag& v : {ViewFlag{"logical", m.logical.has_value()},
                              ViewFlag{"process", m.process.has_value()},
                              ViewFlag{"development", m.development.has_value()},
                              ViewFlag{"physical", m.physical.has_value()},
                              ViewFlag{"scenarios", m.scenarios.has_value()}})
        if (!v.present)
            out.push_back(Diagnostic{Severity::Info, "T001",
                                     std::string(v.name) +
                                         " view omitted; dependent rules skipped",
                                     m.span});

    if (m.logical) {
        for (const auto& c : m.logical->classes)
            if (c.category.empty())
                out.push_back(Diagnostic{Severity::Error, "L001",
                                         "class '" + c.id + "' belongs to no category", c.span});
    }

    if (m.development) {
        const DevelopmentView& dv = *m.development;
        std::map<std::string, int> layer_of;
        for (const auto& s : dv.subsystems) layer_of[s.id] = s.layer;
        for (const auto& d : dv.dependencies) {
            auto f = layer_of.find(d.from);
            auto t = layer_of.find(d.to);
            if (f == layer_of.end() || t == layer_of.end()) continue;
            if (t->second > f->second)
                out.push_back(Diagnostic{Severity::Error, "D001",
                                         "dependency '" + d.from + "' -> '" + d.to +
                                             "' points upward (layer " +
                                             std::to_string(f->second) + " -> layer " +
                                             std::to_string(t->second) + ")",
                                         d.span});
        }
        std::size_t n = dv.layers.size();
        if (n < 4 || n > 6)
            out.push_back(Diagnostic{Severity::Warning, "D002",
                                     "development view has " + std::to_string(n) +
                                         " layers; typical is 4 to 6",
                                     dv.span});
        for (const auto& s : dv.subsystems)
            if (s.ksloc && (*s.ksloc < 5.0 || *s.ksloc > 20.0))
                out.push_back(Diagnostic{Severity::Warning, "D003",
                                         "subsystem '" + s.id + "' is " +
                                             format_number(*s.ksloc) +
                                             " KSLOC; typical is 5 to 20",
                                         s.span});

        // D004: cycles among same-layer dependencies. The layering rule says
        // nothing about direction inside a layer, so this is informational.
        {
            std::map<std::string, std::vector<std::string>> adj;
            for (const auto& d : dv.dependencies) {
                auto f = layer_of.find(d.from);
                auto t = layer_of.find(d.to);
                if (f != layer_of.end() && t != layer_of.end() && f->second == t->second)
                    adj[d.from].push_back(d.to);
            }
            // Iterative Tarjan over the same-layer subgraph.
            std::map<std::string, int> index, low;
            std::vector<std::string> stack;
            std::set<std::string> on_stack;
            int counter = 0;
            std::vector<std::vector<std::string>> sccs;
            auto strongconnect = [&](auto&& self, const std::string& v) -> void {
                index[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack.insert(v);
                for (const auto& w : adj[v]) {
                    if (!index.count(w)) {
                        self(self, w);
                        low[v] = std::min(low[v], low[w]);
                    } else if (on_stack.count(w)) {
                        low[v] = std::min(low[v], index[w]);
                    }
                }
                if (low[v] == index[v]) {
                    std::vector<std::string> scc;
                    while (true) {
                        std::string w = stack.back();
                        stack.pop_back();
                        on_stack.erase(w);
                        scc.push_back(w);
                        if (w == v) break;
                    }
                    if (scc.size() > 1) sccs.push_back(std::move(scc));
                }
            };
            for (const auto& s : dv.subsystems)
                if (adj.count(s.id) && !index.count(s.id)) strongconnect(strongconnect, s.id);
            for (auto& scc : sccs) std::sort(scc.begin(), scc.end());
            std::sort(sccs.begin(), sccs.end());
            for (const auto& scc : sccs) {
                std::string members;
                for (std::size_t i = 0; i < scc.size(); ++i) {
                    if (i) members += ", ";
                    members += scc[i];
                }
                SourceSpan where = dv.span;
                auto it = ix.subsystems.find(scc.front());
                if (it != ix.subsystems.end()) where = it->second->span;
                out.push_back(Diagnostic{Severity::Info, "D004",
                                         "same-layer dependency cycle: " + members, where});
            }
        }
    }

    if (m.process) {
        const ProcessView& pv = *m.process;
        for (const auto& c : pv.connectors) {
            if (detail::interprocess_kind(c.kind)) continue;
            const Process* pf = ix.owner_of_task(c.from);
            const Process* pt = ix.owner_of_task(c.to);
            if (pf && pt && pf->id != pt->id)
                out.push_back(Diagnostic{Severity::Error, "P001",
                                         std::string(to_string(c.kind)) + " connector '" +
                                             c.from + "' -> '" + c.to +
                                             "' crosses processes '" + pf->id + "' and '" +
                                             pt->id + "'",
                                         c.span});
        }
        for (const auto& p : pv.processes) {
            for (const auto& t : p.tasks) {
                if (t.kind != TaskKind::Major) continue;
                bool any = false, all_local = true;
                for (const auto& c : pv.connectors) {
                    if (c.from != t.id && c.to != t.id) continue;
                    any = true;
                    if (detail::interprocess_kind(c.kind)) all_local = false;
                }
                if (any && all_local)
                    out.push_back(Diagnostic{Severity::Warning, "P002",
                                             "major task '" + t.id +
                                                 "' communicates only by rendezvous or shared "
                                                 "memory",
                                             t.span});
            }
        }
    }

    if (m.logical && m.process) {
        for (const auto& c : m.logical->classes)
            if (!ix.l2p_of(c.id))
                out.push_back(Diagnostic{relaxed, "M001",
                                         "class '" + c.id + "' has no task mapping", c.span});

        for (const auto& c : m.logical->classes) {
            if (c.subordinate_to.empty()) continue;
            const L2PEntry* sub = ix.l2p_of(c.id);
            const L2PEntry* master = ix.l2p_of(c.subordinate_to);
            if (!sub || !master) continue;
            std::set<std::string> master_tasks(master->tasks.begin(), master->tasks.end());
            for (const auto& t : sub->tasks)
                if (!master_tasks.count(t)) {
                    out.push_back(Diagnostic{Severity::Error, "M002",
                                             "subordinate class '" + c.id + "' runs task '" + t +
                                                 "' outside master '" + c.subordinate_to +
                                                 "' task set",
                                             sub->span});
                    break;
                }
        }

        // M003: an active class needs a task of its own. A task still counts
        // as its own when the co-mapped classes are its subordinates, or when
        // all of them dispatch on that same task (one agent deliberately
        // multiplexing several classes).
        for (const auto& c : m.logical->classes) {
            if (c.autonomy != Autonomy::Active || !c.subordinate_to.empty()) continue;
            const L2PEntry* entry = ix.l2p_of(c.id);
            if (!entry || entry->tasks.empty()) continue;
            bool dedicated = false;
            for (const auto& t : entry->tasks) {
                bool ok = true;
                for (const auto& d : m.logical->classes) {
                    if (d.id == c.id) continue;
                    const L2PEntry* de = ix.l2p_of(d.id);
                    if (!de) continue;
                    bool shares = std::find(de->tasks.begin(), de->tasks.end(), t) !=
                                  de->tasks.end();
                    if (!shares) continue;
                    if (is_subordinate_of(ix, d.id, c.id)) continue;
                    bool co_primary = !de->tasks.empty() && de->tasks.front() == t &&
                                      entry->tasks.front() == t;
                    if (co_primary) continue;
                    ok = false;
                    break;
                }
                if (ok) {
                    dedicated = true;
                    break;
                }
            }
            if (!dedicated)
                out.push_back(Diagnostic{Severity::Warning, "M003",
                                         "active class '" + c.id + "' has no dedicated task",
                                         c.span});
        }
    }

    if (m.logical && m.development) {
        for (const auto& c : m.logical->classes)
            if (!ix.l2d.count(c.id))
                out.push_back(Diagnostic{relaxed, "M004",
                                         "class '" + c.id + "' has no module mapping", c.span});
    }

    if (m.physical && m.process) {
        for (const auto& cfg : m.physical->configurations) {
            std::map<std::string, const Placement*> placed;
            for (const auto& pl : cfg.placements) placed.emplace(pl.process, &pl);
            for (const auto& p : m.process->processes) {
                auto it = placed.find(p.id);
                if (it == placed.end()) {
                    out.push_back(Diagnostic{Severity::Error, "PH01",
                                             "configuration '" + cfg.name +
                                                 "' does not place process '" + p.id + "'",
                                             cfg.span});
                } else if (static_cast<int>(it->second->nodes.size()) != p.replicas) {
                    out.push_back(Diagnostic{Severity::Error, "PH01",
                                             "configuration '" + cfg.name + "' places process '" +
                                                 p.id + "' on " +
                                                 std::to_string(it->second->nodes.size()) +
                                                 " nodes; replicas is " +
                                                 std::to_string(p.replicas),
                                             it->second->span});
                }
            }
        }
    }

    if (m.scenarios) {
        for (const auto& sc : m.scenarios->scenarios) {
            Trace scratch;
            detail::trace_steps(m, ix, sc, scratch, out, relaxed);
        }
    }

    if (!opts.disabled_rules.empty()) {
        out.erase(std::remove_if(out.begin(), out.end(),
                                 [&](const Diagnostic& d) {
                                     return opts.disabled_rules.count(d.rule) > 0;
                                 }),
                  out.end());
    }
    if (opts.warnings_as_errors)
        for (auto& d : out)
            if (d.severity == Severity::Warning) d.severity = Severity::Error;

    sort_diagnostics(out);
    return out;
}

} // namespace fourview
