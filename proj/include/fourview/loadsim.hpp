#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "fourview/checker.hpp"
#include "fourview/diag.hpp"
#include "fourview/model.hpp"

namespace fourview {

struct ProcessLoad {
    double msgs_in = 0;
    double cost = 0;
};

struct NodeLoad {
    double cost = 0;
    std::optional<double> utilization; // only when the node declares capacity
};

/// Steady-state load estimate for one configuration. All rates are per
/// second; total_msgs_per_sec is exactly the sum over per_connector.
struct LoadReport {
    std::string config;
    std::map<std::string, ProcessLoad> per_process;
    std::map<std::string, double> per_connector; // "kind from->to" or "undeclared a->b"
    std::map<std::string, NodeLoad> per_node;
    std::map<std::string, double> per_link; // "medium n1,n2,..."
    double total_msgs_per_sec = 0;
    std::vector<Diagnostic> notes; // SIM01 skipped scenario, SIM02/SIM03 odd hops
};

/// Six significant digits, the published report precision.
inline double round_rate(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::strtod(buf, nullptr);
}

namespace detail {

inline std::string connector_key(const Connector& c) {
    return std::string(to_string(c.kind)) + " " + c.from + "->" + c.to;
}

inline std::string link_key(const Link& l) {
    std::vector<std::string> eps = l.endpoints;
    std::sort(eps.begin(), eps.end());
    std::string key = to_string(l.medium);
    key += ' ';
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (i) key += ',';
        key += eps[i];
    }
    return key;
}

} // namespace detail

/// Analytic message-flow and load estimate over one configuration: scenario
/// hops contribute message rates and per-operation cost, cyclic tasks
/// contribute dummy loads (1000/period activations at the process's cheapest
/// mapped class cost), replicas split a process's cost across its placement
/// nodes, and links collect the cross-node share of connector traffic.
///
/// Throws OpError E_NOCONFIG for an unknown configuration and E_UNCHECKED
/// when the model still has resolve or check errors (sketch-mode severities:
/// a strawman with unmapped classes is estimable, a broken one is not).
inline LoadReport estimate(const ArchitectureModel& m, const std::string& config_name) {
    const Configuration* config = nullptr;
    if (m.physical)
        for (const auto& c : m.physical->configurations)
            if (c.name == config_name) config = &c;
    if (!config) throw OpError("E_NOCONFIG", "unknown configuration '" + config_name + "'");

    if (has_errors(resolve(m)))
        throw OpError("E_UNCHECKED", "model does not resolve; fix errors before estimating");
    CheckOptions lenient;
    lenient.mode = CheckMode::Sketch;
    if (has_errors(check(m, lenient)))
        throw OpError("E_UNCHECKED", "model has check errors; fix them before estimating");

    ModelIndex ix = index_model(m);
    LoadReport report;
    report.config = config_name;

    if (m.process)
        for (const auto& p : m.process->processes) report.per_process[p.id];
    if (m.process)
        for (const auto& c : m.process->connectors)
            report.per_connector[detail::connector_key(c)];
    for (const auto& n : m.physical->nodes) report.per_node[n.id];
    for (const auto& l : m.physical->links) report.per_link[detail::link_key(l)];

    std::map<std::string, std::vector<std::string>> nodes_of_process;
    for (const auto& pl : config->placements) nodes_of_process[pl.process] = pl.nodes;

    // Cross-node share of one connector-rate contribution.
    auto spread_on_links = [&](const std::string& proc_from, const std::string& proc_to,
                               double rate) {
        auto nf = nodes_of_process.find(proc_from);
        auto nt = nodes_of_process.find(proc_to);
        if (nf == nodes_of_process.end() || nt == nodes_of_process.end()) return;
        if (nf->second.empty() || nt->second.empty()) return;
        double share = rate / (double(nf->second.size()) * double(nt->second.size()));
        for (const auto& a : nf->second)
            for (const auto& b : nt->second) {
                if (a == b) continue;
                for (const auto& l : m.physical->links) {
                    bool has_a = std::find(l.endpoints.begin(), l.endpoints.end(), a) !=
                                 l.endpoints.end();
                    bool has_b = std::find(l.endpoints.begin(), l.endpoints.end(), b) !=
                                 l.endpoints.end();
                    if (has_a && has_b) report.per_link[detail::link_key(l)] += share;
                }
            }
    };

    std::vector<const Scenario*> scenarios;
    if (m.scenarios)
        for (const auto& s : m.scenarios->scenarios) scenarios.push_back(&s);
    std::sort(scenarios.begin(), scenarios.end(),
              [](const Scenario* a, const Scenario* b) { return a->id < b->id; });

    for (const Scenario* sc : scenarios) {
        if (!sc->frequency_hz) {
            report.notes.push_back(Diagnostic{Severity::Info, "SIM01",
                                              "scenario '" + sc->id +
                                                  "' has no frequency; it contributes nothing",
                                              sc->span});
            continue;
        }
        double f = *sc->frequency_hz;
        Trace tr;
        std::vector<Diagnostic> scratch;
        detail::trace_steps(m, ix, *sc, tr, scratch, Severity::Warning);
        for (std::size_t i = 0; i < tr.hops.size(); ++i) {
            const TraceHop& hop = tr.hops[i];
            const Step& st = sc->steps[i];
            if (!hop.from_task || !hop.to_task) {
                report.notes.push_back(Diagnostic{Severity::Warning, "SIM02",
                                                  "scenario '" + sc->id + "' step " +
                                                      std::to_string(st.seq) +
                                                      " touches an unmapped class; hop ignored",
                                                  st.span});
                continue;
            }
            const Process* pt = ix.owner_of_task(*hop.to_task);
            const Class* to_cls = ix.find_class(st.to);
            if (pt && to_cls) report.per_process[pt->id].cost += f * est_cost_of(*to_cls);
            if (hop.crossing != HopCrossing::CrossProcess) continue;
            const Process* pf = ix.owner_of_task(*hop.from_task);
            if (!pf || !pt) continue;
            report.per_process[pt->id].msgs_in += f;
            std::string key;
            if (hop.connector) {
                key = detail::connector_key(*hop.connector);
            } else {
                key = "undeclared " + *hop.from_task + "->" + *hop.to_task;
                report.notes.push_back(Diagnostic{Severity::Warning, "SIM03",
                                                  "scenario '" + sc->id + "' step " +
                                                      std::to_string(st.seq) +
                                                      " crosses processes without a declared "
                                                      "connector; counted as undeclared traffic",
                                                  st.span});
            }
            report.per_connector[key] += f;
            spread_on_links(pf->id, pt->id, f);
        }
    }

    // Cyclic dummy loads. A process with no mapped class has no cost basis
    // and contributes nothing.
    if (m.process) {
        std::map<std::string, double> cheapest;
        for (const auto& e : m.l2p) {
            const Class* cls = ix.find_class(e.class_id);
            if (!cls) continue;
            for (const auto& t : e.tasks) {
                const Process* p = ix.owner_of_task(t);
                if (!p) continue;
                auto [it, fresh] = cheapest.emplace(p->id, est_cost_of(*cls));
                if (!fresh) it->second = std::min(it->second, est_cost_of(*cls));
            }
        }
        for (const auto& p : m.process->processes) {
            auto ch = cheapest.find(p.id);
            if (ch == cheapest.end()) continue;
            for (const auto& t : p.tasks)
                if (t.period_ms)
                    report.per_process[p.id].cost += (1000.0 / *t.period_ms) * ch->second;
        }
    }

    // Nodes: each replica carries an even share of its process's cost.
    if (m.process) {
        for (const auto& p : m.process->processes) {
            auto pl = nodes_of_process.find(p.id);
            if (pl == nodes_of_process.end() || pl->second.empty()) continue;
            double share = report.per_process[p.id].cost / double(pl->second.size());
            for (const auto& n : pl->second) report.per_node[n].cost += share;
        }
    }
    for (const auto& n : m.physical->nodes)
        if (n.capacity) report.per_node[n.id].utilization = report.per_node[n.id].cost / *n.capacity;

    for (const auto& [_, rate] : report.per_connector) report.total_msgs_per_sec += rate;
    sort_diagnostics(report.notes);
    return report;
}

// ============================================================================
// Serialization
// ============================================================================

inline nlohmann::ordered_json diagnostic_json(const Diagnostic& d) {
    return nlohmann::ordered_json{{"rule", d.rule},
                                  {"severity", to_string(d.severity)},
                                  {"message", d.message},
                                  {"file", d.where.file},
                                  {"line", d.where.line},
                                  {"column", d.where.column}};
}

/// JSON form, stable key order, rates rounded to six significant digits.
inline std::string report_json(const LoadReport& r) {
    nlohmann::ordered_json j;
    j["config"] = r.config;
    j["total_msgs_per_sec"] = round_rate(r.total_msgs_per_sec);
    auto& procs = j["per_process"] = nlohmann::ordered_json::object();
    for (const auto& [id, load] : r.per_process)
        procs[id] = {{"msgs_in", round_rate(load.msgs_in)}, {"cost", round_rate(load.cost)}};
    auto& conns = j["per_connector"] = nlohmann::ordered_json::object();
    for (const auto& [key, rate] : r.per_connector) conns[key] = round_rate(rate);
    auto& nodes = j["per_node"] = nlohmann::ordered_json::object();
    for (const auto& [id, load] : r.per_node) {
        nlohmann::ordered_json n{{"cost", round_rate(load.cost)}};
        if (load.utilization) n["utilization"] = round_rate(*load.utilization);
        nodes[id] = std::move(n);
    }
    auto& links = j["per_link"] = nlohmann::ordered_json::object();
    for (const auto& [key, rate] : r.per_link) links[key] = round_rate(rate);
    auto& notes = j["notes"] = nlohmann::ordered_json::array();
    for (const auto& d : r.notes) notes.push_back(diagnostic_json(d));
    return j.dump(2) + "\n";
}

namespace detail {

inline std::string rate_text(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

class Table {
  public:
    explicit Table(std::size_t columns) : widths_(columns, 0) {}
    void row(std::vector<std::string> cells) {
        cells.resize(widths_.size());
        for (std::size_t i = 0; i < cells.size(); ++i)
            widths_[i] = std::max(widths_[i], cells[i].size());
        rows_.push_back(std::move(cells));
    }
    void render(std::string& out) const {
        for (const auto& r : rows_) {
            std::string line;
            for (std::size_t i = 0; i < r.size(); ++i) {
                line += r[i];
                if (i + 1 < r.size())
                    line.append(widths_[i] - r[i].size() + 2, ' ');
            }
            out += line;
            out += '\n';
        }
    }

  private:
    std::vector<std::size_t> widths_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace detail

/// Aligned plain-text form with the same rounding as the JSON.
inline std::string report_table(const LoadReport& r) {
    std::string out;
    out += "load report for configuration '" + r.config + "'\n";
    out += "total messages/sec: " + detail::rate_text(round_rate(r.total_msgs_per_sec)) + "\n";
    if (!r.per_process.empty()) {
        out += "\n";
        detail::Table t(3);
        t.row({"process", "msgs_in", "cost"});
        for (const auto& [id, load] : r.per_process)
            t.row({id, detail::rate_text(round_rate(load.msgs_in)),
                   detail::rate_text(round_rate(load.cost))});
        t.render(out);
    }
    if (!r.per_connector.empty()) {
        out += "\n";
        detail::Table t(2);
        t.row({"connector", "msgs/sec"});
        for (const auto& [key, rate] : r.per_connector)
            t.row({key, detail::rate_text(round_rate(rate))});
        t.render(out);
    }
    if (!r.per_node.empty()) {
        out += "\n";
        detail::Table t(3);
        t.row({"node", "cost", "utilization"});
        for (const auto& [id, load] : r.per_node)
            t.row({id, detail::rate_text(round_rate(load.cost)),
                   load.utilization ? detail::rate_text(round_rate(*load.utilization)) : "-"});
        t.render(out);
    }
    if (!r.per_link.empty()) {
        out += "\n";
        detail::Table t(2);
        t.row({"link", "msgs/sec"});
        for (const auto& [key, rate] : r.per_link)
            t.row({key, detail::rate_text(round_rate(rate))});
        t.render(out);
    }
    if (!r.notes.empty()) {
        out += "\n";
        for (const auto& d : r.notes) {
            out += format_diagnostic(d);
            out += '\n';
        }
    }
    return out;
}

} // namespace fourview
