#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "fourview/diag.hpp"
#include "fourview/model.hpp"

namespace fourview {

struct MapperConstraints {
    int max_processes = 8;
    /// Classes that must serialize on one agent. Overlapping groups are
    /// unioned; subordinate members are dropped (they follow their master).
    std::vector<std::set<std::string>> mutual_exclusion_groups;
    /// (name, target class) external requests; drives outside_in only.
    std::vector<std::pair<std::string, std::string>> stimuli;
};

/// A synthesized process view plus the class-to-task mapping that produced
/// it, and the ordered decision log ("MAP: ..." lines).
struct MappingResult {
    ProcessView process_view;
    std::vector<L2PEntry> l2p;
    std::vector<std::string> log;
};

namespace detail {

/// Working state shared by both strategies. Task lists in `tasks_of` are
/// semantic: the first entry is the class's dispatch task.
struct MapBuild {
    const LogicalView* lv = nullptr;
    std::map<std::string, const Class*> classes;
    std::vector<Process> procs;
    std::map<std::string, std::string> proc_of_task;
    std::map<std::string, std::vector<std::string>> tasks_of;
    std::set<std::string> used_ids;
    std::vector<std::string> log;

    explicit MapBuild(const LogicalView& logical) : lv(&logical) {
        for (const auto& c : logical.classes) classes.emplace(c.id, &c);
    }

    void note(const std::string& line) { log.push_back("MAP: " + line); }

    std::string fresh(const std::string& base) {
        if (used_ids.insert(base).second) return base;
        for (int i = 2;; ++i) {
            std::string cand = base + "_" + std::to_string(i);
            if (used_ids.insert(cand).second) return cand;
        }
    }

    Process& process(const std::string& id) {
        for (auto& p : procs)
            if (p.id == id) return p;
        throw std::logic_error("unknown process " + id);
    }

    std::string new_process(const std::string& base) {
        Process p;
        p.id = fresh(base);
        procs.push_back(std::move(p));
        return procs.back().id;
    }

    std::string new_task(const std::string& proc_id, const std::string& base) {
        Task t;
        t.id = fresh(base);
        t.kind = TaskKind::Major;
        process(proc_id).tasks.push_back(t);
        proc_of_task[t.id] = proc_id;
        return t.id;
    }

    bool placed(const std::string& class_id) const { return tasks_of.count(class_id) > 0; }

    /// Non-subordinate end of a subordination chain.
    const Class* root_of(const Class* c) const {
        std::set<std::string> seen;
        while (!c->subordinate_to.empty() && seen.insert(c->id).second) {
            auto it = classes.find(c->subordinate_to);
            if (it == classes.end()) break;
            c = it->second;
        }
        return c;
    }

    double process_cost(const Process& p) const {
        std::set<std::string> members;
        for (const auto& [cls, tasks] : tasks_of)
            for (const auto& t : tasks)
                if (auto it = proc_of_task.find(t);
                    it != proc_of_task.end() && it->second == p.id) {
                    members.insert(cls);
                    break;
                }
        double cost = 0;
        for (const auto& cls : members) {
            auto it = classes.find(cls);
            if (it != classes.end()) cost += est_cost_of(*it->second);
        }
        return cost;
    }

    /// Collapses the two cheapest processes (ties by id) until the budget
    /// holds. The lexicographically smaller id survives a merge.
    void merge_to_budget(int max_processes) {
        while (static_cast<int>(procs.size()) > max_processes && procs.size() > 1) {
            std::vector<std::pair<double, std::string>> order;
            for (const auto& p : procs) order.emplace_back(process_cost(p), p.id);
            std::sort(order.begin(), order.end());
            std::string keep = order[0].second, drop = order[1].second;
            if (drop < keep) std::swap(keep, drop);
            Process& target = process(keep);
            Process& victim = process(drop);
            for (const auto& t : victim.tasks) {
                target.tasks.push_back(t);
                proc_of_task[t.id] = keep;
            }
            target.replicas = std::max(target.replicas, victim.replicas);
            note("merge process '" + drop + "' into '" + keep + "' (costs " +
                 format_number(order[0].first) + " and " + format_number(order[1].first) + ")");
            procs.erase(std::remove_if(procs.begin(), procs.end(),
                                       [&](const Process& p) { return p.id == drop; }),
                        procs.end());
        }
    }

    /// Connectors implied by logical relations: message between processes,
    /// shared memory between distinct tasks inside one. The representative
    /// task of a class in a process is its first mapped task there.
    void synthesize_connectors(ProcessView& pv) const {
        std::vector<const Relation*> rels;
        for (const auto& r : lv->relations) rels.push_back(&r);
        std::sort(rels.begin(), rels.end(), [](const Relation* a, const Relation* b) {
            return std::make_tuple(static_cast<int>(a->kind), a->from, a->to) <
                   std::make_tuple(static_cast<int>(b->kind), b->from, b->to);
        });
        std::set<std::tuple<int, std::string, std::string>> seen;
        for (const Relation* r : rels) {
            auto fa = tasks_of.find(r->from);
            auto fb = tasks_of.find(r->to);
            if (fa == tasks_of.end() || fb == tasks_of.end()) continue;
            auto reps = [&](const std::vector<std::string>& tasks) {
                std::map<std::string, std::string> by_proc;
                for (const auto& t : tasks) {
                    auto it = proc_of_task.find(t);
                    if (it != proc_of_task.end()) by_proc.emplace(it->second, t);
                }
                return by_proc;
            };
            for (const auto& [pa, ta] : reps(fa->second)) {
                for (const auto& [pb, tb] : reps(fb->second)) {
                    if (ta == tb) continue;
                    ConnectorKind kind =
                        pa == pb ? ConnectorKind::SharedMemory : ConnectorKind::Message;
                    if (!seen.emplace(static_cast<int>(kind), ta, tb).second) continue;
                    Connector c;
                    c.kind = kind;
                    c.from = ta;
                    c.to = tb;
                    pv.connectors.push_back(std::move(c));
                }
            }
        }
    }

    /// Subordinates ride the dispatch task of their chain root.
    void place_subordinates() {
        for (const auto& [id, cls] : classes) {
            if (cls->subordinate_to.empty()) continue;
            const Class* root = root_of(cls);
            auto it = tasks_of.find(root->id);
            if (it == tasks_of.end() || it->second.empty()) continue;
            tasks_of[id] = {it->second.front()};
            note("subordinate '" + id + "' rides task '" + it->second.front() + "' of master '" +
                 root->id + "'");
        }
    }

    MappingResult finish(int max_processes) {
        place_subordinates();
        merge_to_budget(max_processes);
        MappingResult r;
        std::sort(procs.begin(), procs.end(),
                  [](const Process& a, const Process& b) { return a.id < b.id; });
        r.process_view.processes = procs;
        synthesize_connectors(r.process_view);
        for (const auto& [id, tasks] : tasks_of) {
            L2PEntry e;
            e.class_id = id;
            e.tasks = tasks;
            r.l2p.push_back(std::move(e));
        }
        r.log = log;
        return r;
    }
};

inline void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

/// Union overlapping groups, drop subordinate members, drop empties.
/// Returned groups are keyed by their lexicographically first member.
inline std::map<std::string, std::set<std::string>>
normalize_groups(const MapBuild& b, const std::vector<std::set<std::string>>& groups,
                 std::vector<std::string>& dropped_log) {
    std::map<std::string, std::string> parent;
    auto find = [&](std::string x) {
        while (parent.count(x) && parent[x] != x) x = parent[x];
        return x;
    };
    for (const auto& g : groups) {
        std::string rep;
        for (const auto& id : g) {
            require(b.classes.count(id) > 0, "mutual exclusion group names an unknown class");
            if (!parent.count(id)) parent[id] = id;
            std::string r = find(id);
            if (rep.empty()) rep = r;
            else parent[find(rep)] = r, rep = r;
        }
    }
    std::map<std::string, std::set<std::string>> merged;
    for (const auto& [id, _] : parent) merged[find(id)].insert(id);
    std::map<std::string, std::set<std::string>> out;
    for (auto& [_, members] : merged) {
        std::set<std::string> kept;
        for (const auto& id : members) {
            if (b.classes.at(id)->subordinate_to.empty()) kept.insert(id);
            else dropped_log.push_back(id);
        }
        if (!kept.empty()) out.emplace(*kept.begin(), std::move(kept));
    }
    return out;
}

} // namespace detail

/// Agent-first synthesis: one agent per active class (mutual-exclusion groups
/// share one), servers for permanent or distributed classes (replicas 2 when
/// both), passives placed with an agent that uses them or a shared utility
/// process, subordinates on their master's dispatch task, then merging down
/// to the process budget. Deterministic for identical inputs.
///
/// Throws std::invalid_argument on bad constraints. An E_INFEASIBLE error is
/// reserved for constraint systems that cannot merge below the budget; the
/// current constraint set cannot produce one.
inline MappingResult inside_out(const LogicalView& logical, const MapperConstraints& cons) {
    detail::require(cons.max_processes >= 1, "max_processes must be at least 1");
    detail::MapBuild b(logical);

    std::vector<std::string> dropped;
    auto groups = detail::normalize_groups(b, cons.mutual_exclusion_groups, dropped);
    std::sort(dropped.begin(), dropped.end());
    for (const auto& id : dropped)
        b.note("drop subordinate '" + id + "' from its exclusion group (follows its master)");

    std::set<std::string> grouped;
    for (const auto& [_, members] : groups)
        for (const auto& id : members) grouped.insert(id);
    for (const auto& [id, cls] : b.classes)
        if (cls->autonomy == Autonomy::Active && cls->subordinate_to.empty() && !grouped.count(id))
            groups.emplace(id, std::set<std::string>{id});

    std::set<std::string> agent_procs;
    for (const auto& [rep, members] : groups) {
        std::string proc = b.new_process(rep + "_agents");
        agent_procs.insert(proc);
        std::string agent = b.new_task(proc, rep + "_agent");
        for (const auto& id : members) b.tasks_of[id] = {agent};
        if (members.size() == 1) {
            b.note("agent task '" + agent + "' for class '" + rep + "'");
        } else {
            std::string list;
            for (const auto& id : members) list += (list.empty() ? "" : ", ") + id;
            b.note("exclusion group {" + list + "} shares agent task '" + agent + "'");
        }
    }

    for (const auto& [id, cls] : b.classes) {
        if (!cls->subordinate_to.empty()) continue;
        bool permanent = cls->persistence == Persistence::Permanent;
        if (!permanent && !cls->distributed) continue;
        std::string proc = b.new_process(id + "_server");
        std::string task = b.new_task(proc, id + "_server_task");
        int replicas = (permanent && cls->distributed) ? 2 : 1;
        b.process(proc).replicas = replicas;
        b.tasks_of[id].push_back(task);
        b.note("server process '" + proc + "' for class '" + id + "' (replicas " +
               std::to_string(replicas) + ")");
    }

    // Remaining passives and protected classes. Protected objects have no
    // placement rule of their own; they are placed as passives and logged.
    std::string shared_proc;
    for (const auto& [id, cls] : b.classes) {
        if (!cls->subordinate_to.empty() || b.placed(id)) continue;
        if (cls->autonomy == Autonomy::Protected)
            b.note("protected class '" + id + "' placed as passive (arbitration not modeled)");
        std::string host;
        std::string user_id;
        for (const auto& r : logical.relations) {
            if (r.kind != RelationKind::Usage || r.to != id) continue;
            auto it = b.tasks_of.find(r.from);
            if (it == b.tasks_of.end() || it->second.empty()) continue;
            auto owner = b.proc_of_task.find(it->second.front());
            if (owner == b.proc_of_task.end()) continue;
            // Only agent homes count as hosts; server processes stay pure.
            if (!agent_procs.count(owner->second)) continue;
            if (host.empty() || owner->second < host) {
                host = owner->second;
                user_id = r.from;
            }
        }
        if (host.empty()) {
            if (shared_proc.empty()) shared_proc = b.new_process("shared_services");
            std::string task = b.new_task(shared_proc, id + "_svc");
            b.tasks_of[id] = {task};
            b.note("class '" + id + "' has no using agent; placed in '" + shared_proc + "'");
        } else {
            std::string task = b.new_task(host, id + "_svc");
            b.tasks_of[id] = {task};
            b.note("class '" + id + "' joins '" + host + "' (used by '" + user_id + "')");
        }
    }

    return b.finish(cons.max_processes);
}

/// Stimulus-first synthesis: one client process per stimulus (deduplicated by
/// target root), actives join their nearest client by relation distance,
/// service classes reached over usage edges become servers, distributed
/// classes get servers, leftovers join the nearest client or a shared utility
/// process, subordinates follow their master, then the merge loop applies.
///
/// Throws OpError E_NOSTIMULI when no stimuli are given and
/// std::invalid_argument on unknown stimulus targets.
inline MappingResult outside_in(const LogicalView& logical, const MapperConstraints& cons) {
    if (cons.stimuli.empty())
        throw OpError("E_NOSTIMULI", "outside-in mapping needs at least one stimulus");
    detail::require(cons.max_processes >= 1, "max_processes must be at least 1");
    detail::MapBuild b(logical);
    if (!cons.mutual_exclusion_groups.empty())
        b.note("mutual exclusion groups are not used by the outside-in strategy");

    auto stimuli = cons.stimuli;
    std::sort(stimuli.begin(), stimuli.end());
    struct ClientRec {
        std::string stimulus;
        std::string root;
        std::string proc;
        std::string task;
    };
    std::vector<ClientRec> clients;
    std::map<std::string, std::string> client_of_root;
    for (const auto& [name, target] : stimuli) {
        detail::require(b.classes.count(target) > 0, "stimulus targets an unknown class");
        const Class* root = b.root_of(b.classes.at(target));
        if (root->id != target)
            b.note("stimulus '" + name + "' target '" + target + "' is subordinate; using root '" +
                   root->id + "'");
        auto it = client_of_root.find(root->id);
        if (it != client_of_root.end()) {
            b.note("stimulus '" + name + "' shares target root '" + root->id + "' with client '" +
                   it->second + "'; merged");
            continue;
        }
        ClientRec rec;
        rec.stimulus = name;
        rec.root = root->id;
        rec.proc = b.new_process(name + "_client");
        rec.task = b.new_task(rec.proc, name + "_client_task");
        b.tasks_of[root->id] = {rec.task};
        client_of_root.emplace(root->id, rec.proc);
        b.note("client process '" + rec.proc + "' for stimulus '" + name + "' targeting '" +
               root->id + "'");
        clients.push_back(std::move(rec));
    }

    std::map<std::string, std::set<std::string>> adj;
    for (const auto& r : logical.relations) {
        adj[r.from].insert(r.to);
        adj[r.to].insert(r.from);
    }
    // Nearest client by undirected relation distance; ties go to the client
    // with the lexicographically first stimulus name. Unreachable -> none.
    auto nearest_client = [&](const std::string& from) -> const ClientRec* {
        std::map<std::string, int> dist{{from, 0}};
        std::deque<std::string> queue{from};
        while (!queue.empty()) {
            std::string v = queue.front();
            queue.pop_front();
            for (const auto& w : adj[v])
                if (!dist.count(w)) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
        }
        const ClientRec* best = nullptr;
        int best_d = 0;
        for (const auto& c : clients) {
            auto it = dist.find(c.root);
            if (it == dist.end()) continue;
            if (!best || it->second < best_d) {
                best = &c;
                best_d = it->second;
            }
        }
        return best;
    };

    for (const auto& [id, cls] : b.classes) {
        if (cls->autonomy != Autonomy::Active || !cls->subordinate_to.empty() || b.placed(id))
            continue;
        if (const ClientRec* c = nearest_client(id)) {
            std::string task = b.new_task(c->proc, id + "_task");
            b.tasks_of[id] = {task};
            b.note("active class '" + id + "' joins client '" + c->proc + "'");
        }
    }

    // Service providers: passive/protected classes reached from the client-
    // hosted set over usage edges, transitively. Subordinates of placed
    // masters count as sources: their code runs on the client too.
    std::set<std::string> reached;
    {
        std::deque<std::string> frontier;
        for (const auto& [id, _] : b.tasks_of) frontier.push_back(id);
        for (const auto& [id, cls] : b.classes)
            if (!cls->subordinate_to.empty() && b.placed(b.root_of(cls)->id))
                frontier.push_back(id);
        std::set<std::string> visited(frontier.begin(), frontier.end());
        while (!frontier.empty()) {
            std::string v = frontier.front();
            frontier.pop_front();
            for (const auto& r : logical.relations) {
                if (r.kind != RelationKind::Usage || r.from != v) continue;
                if (!visited.insert(r.to).second) continue;
                const Class* cls = b.classes.count(r.to) ? b.classes.at(r.to) : nullptr;
                if (!cls || !cls->subordinate_to.empty() || b.placed(r.to)) continue;
                if (cls->autonomy == Autonomy::Passive || cls->autonomy == Autonomy::Protected) {
                    reached.insert(r.to);
                    frontier.push_back(r.to);
                }
            }
        }
    }
    auto make_server = [&](const std::string& id, const Class* cls, const char* why) {
        std::string proc = b.new_process(id + "_server");
        std::string task = b.new_task(proc, id + "_server_task");
        int replicas =
            (cls->persistence == Persistence::Permanent && cls->distributed) ? 2 : 1;
        b.process(proc).replicas = replicas;
        b.tasks_of[id] = {task};
        if (cls->autonomy == Autonomy::Protected)
            b.note("protected class '" + id + "' placed as passive (arbitration not modeled)");
        b.note("server process '" + proc + "' for " + why + " class '" + id + "' (replicas " +
               std::to_string(replicas) + ")");
    };
    for (const auto& id : reached) make_server(id, b.classes.at(id), "service");
    for (const auto& [id, cls] : b.classes)
        if (cls->distributed && cls->subordinate_to.empty() && !b.placed(id))
            make_server(id, cls, "distributed");

    std::string shared_proc;
    for (const auto& [id, cls] : b.classes) {
        if (!cls->subordinate_to.empty() || b.placed(id)) continue;
        if (cls->autonomy == Autonomy::Protected)
            b.note("protected class '" + id + "' placed as passive (arbitration not modeled)");
        const char* suffix = cls->autonomy == Autonomy::Active ? "_task" : "_svc";
        if (const ClientRec* c = nearest_client(id)) {
            std::string task = b.new_task(c->proc, id + suffix);
            b.tasks_of[id] = {task};
            b.note("class '" + id + "' joins nearest client '" + c->proc + "'");
        } else {
            if (shared_proc.empty()) shared_proc = b.new_process("shared_services");
            std::string task = b.new_task(shared_proc, id + suffix);
            b.tasks_of[id] = {task};
            b.note("class '" + id + "' is unreachable from any stimulus; placed in '" +
                   shared_proc + "'");
        }
    }

    return b.finish(cons.max_processes);
}

} // namespace fourview
