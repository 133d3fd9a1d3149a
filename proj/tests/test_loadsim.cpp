#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "json.hpp"

#include "fourview/loadsim.hpp"
#include "fourview/parser.hpp"

using namespace fourview;

namespace {

ArchitectureModel load_pabx() {
    ParseResult r = parse_file(std::string(FIXTURE_DIR) + "/pabx.arch");
    REQUIRE(r.ok());
    return std::move(*r.model);
}

double sum_connectors(const LoadReport& r) {
    double s = 0;
    for (const auto& [_, rate] : r.per_connector) s += rate;
    return s;
}

std::size_t count_notes(const LoadReport& r, const std::string& rule) {
    std::size_t n = 0;
    for (const auto& d : r.notes)
        if (d.rule == rule) ++n;
    return n;
}

} // namespace

// Hand-computed expectations for the exchange model, offhook at 2/sec:
// three message hops ride the same declared connector (lowest key between
// the task pair), one hop each on the conversation message and the rpc.

TEST_CASE("co-located configuration") {
    auto m = load_pabx();
    LoadReport r = estimate(m, "small");

    CHECK(r.config == "small");
    CHECK(r.total_msgs_per_sec == 10.0);
    CHECK(sum_connectors(r) == r.total_msgs_per_sec);

    CHECK(r.per_connector.at("message main_controller->terminal_task") == 6.0);
    CHECK(r.per_connector.at("message terminal_task->conversation_task") == 2.0);
    CHECK(r.per_connector.at("message terminal_task->main_controller") == 0.0);
    CHECK(r.per_connector.at("rpc terminal_task->numbering_task") == 2.0);
    CHECK(r.per_connector.at("shared_memory high_cycle->main_controller") == 0.0);
    CHECK(r.per_connector.at("shared_memory low_cycle->high_cycle") == 0.0);

    // controller cost: 2 from step 2 plus cyclic 1000/10 + 1000/200
    CHECK(r.per_process.at("controller_proc").cost == 107.0);
    CHECK(r.per_process.at("controller_proc").msgs_in == 2.0);
    CHECK(r.per_process.at("terminal_proc").cost == 4.0);
    CHECK(r.per_process.at("terminal_proc").msgs_in == 4.0);
    CHECK(r.per_process.at("services_proc").cost == 2.0);
    CHECK(r.per_process.at("conversation_proc").cost == 2.0);

    CHECK(r.per_node.at("host_c").cost == 115.0);
    REQUIRE(r.per_node.at("host_c").utilization.has_value());
    CHECK(*r.per_node.at("host_c").utilization == 115.0 / 500.0);
    CHECK(r.per_node.at("host_f").cost == 0.0);

    // everything on one host, nothing on the wire
    CHECK(r.per_link.at("bus host_c,host_f,host_k1,host_k2") == 0.0);
    CHECK(r.notes.empty());
}

TEST_CASE("distributed configuration puts the traffic on the bus") {
    auto m = load_pabx();
    LoadReport r = estimate(m, "large");

    CHECK(r.total_msgs_per_sec == 10.0);
    CHECK(r.per_link.at("bus host_c,host_f,host_k1,host_k2") == 10.0);
    CHECK(*r.per_node.at("host_c").utilization == 107.0 / 500.0);
    CHECK(*r.per_node.at("host_f").utilization == 4.0 / 300.0);
    CHECK(*r.per_node.at("host_k1").utilization == 2.0 / 200.0);
    CHECK(*r.per_node.at("host_k2").utilization == 2.0 / 200.0);
}

TEST_CASE("replicas split cost and wire share across their nodes") {
    auto m = load_pabx();
    for (auto& p : m.process->processes)
        if (p.id == "terminal_proc") p.replicas = 2;
    // every configuration must keep one node entry per replica
    for (auto& c : m.physical->configurations)
        for (auto& pl : c.placements)
            if (pl.process == "terminal_proc")
                pl.nodes = c.name == "large" ? std::vector<std::string>{"host_f", "host_k1"}
                                             : std::vector<std::string>{"host_c", "host_c"};
    REQUIRE(resolve(m).empty());

    LoadReport r = estimate(m, "large");
    CHECK(r.total_msgs_per_sec == 10.0);
    CHECK(r.per_node.at("host_f").cost == 2.0);
    CHECK(*r.per_node.at("host_f").utilization == 2.0 / 300.0);
    // conversation's 2 plus half of terminal's 4
    CHECK(r.per_node.at("host_k1").cost == 4.0);
    // the terminal->conversation hop is half intra-node now: 9 instead of 10
    CHECK(r.per_link.at("bus host_c,host_f,host_k1,host_k2") == 9.0);
}

TEST_CASE("a scenario without a frequency is skipped with a note") {
    auto m = load_pabx();
    m.scenarios->scenarios[0].frequency_hz.reset();

    LoadReport r = estimate(m, "small");
    CHECK(r.total_msgs_per_sec == 0.0);
    CHECK(r.per_process.at("controller_proc").cost == 105.0);
    CHECK(r.per_process.at("controller_proc").msgs_in == 0.0);
    CHECK(r.per_process.at("terminal_proc").cost == 0.0);
    REQUIRE(r.notes.size() == 1);
    CHECK(r.notes[0].rule == "SIM01");
    CHECK(r.notes[0].severity == Severity::Info);
    CHECK(r.notes[0].message.find("offhook") != std::string::npos);
}

TEST_CASE("hops touching an unmapped class contribute nothing") {
    auto m = load_pabx();
    m.l2p.erase(std::remove_if(m.l2p.begin(), m.l2p.end(),
                               [](const L2PEntry& e) { return e.class_id == "terminal"; }),
                m.l2p.end());
    REQUIRE(resolve(m).empty()); // unmapped is a check finding, not a resolve error

    LoadReport r = estimate(m, "small");
    CHECK(r.total_msgs_per_sec == 0.0);
    CHECK(r.per_connector.at("message main_controller->terminal_task") == 0.0);
    CHECK(r.per_process.at("terminal_proc").cost == 0.0);
    CHECK(r.per_process.at("controller_proc").cost == 105.0); // cyclic load stays
    CHECK(count_notes(r, "SIM02") == 5);                      // every step touches terminal
    for (const auto& d : r.notes) CHECK(d.severity == Severity::Warning);
}

TEST_CASE("a crossing hop without a connector becomes undeclared traffic") {
    auto m = load_pabx();
    auto& conns = m.process->connectors;
    conns.erase(std::remove_if(conns.begin(), conns.end(),
                               [](const Connector& c) { return c.kind == ConnectorKind::Rpc; }),
                conns.end());

    LoadReport r = estimate(m, "small");
    CHECK(r.per_connector.at("undeclared terminal_task->numbering_task") == 2.0);
    CHECK(r.per_connector.count("rpc terminal_task->numbering_task") == 0);
    CHECK(r.total_msgs_per_sec == 10.0);
    CHECK(sum_connectors(r) == r.total_msgs_per_sec);
    REQUIRE(count_notes(r, "SIM03") == 1);
}

TEST_CASE("estimate refuses unknown configurations") {
    auto m = load_pabx();
    try {
        estimate(m, "nope");
        FAIL("expected E_NOCONFIG");
    } catch (const OpError& e) {
        CHECK(e.code() == "E_NOCONFIG");
        CHECK(std::string(e.what()).find("nope") != std::string::npos);
    }
}

TEST_CASE("estimate refuses models with errors") {
    SECTION("resolve error") {
        auto m = load_pabx();
        m.logical->classes.push_back(m.logical->classes.front()); // duplicate id
        try {
            estimate(m, "small");
            FAIL("expected E_UNCHECKED");
        } catch (const OpError& e) {
            CHECK(e.code() == "E_UNCHECKED");
            CHECK(std::string(e.what()).find("resolve") != std::string::npos);
        }
    }
    SECTION("check error") {
        auto m = load_pabx();
        DevDependency up;
        up.from = "platform";
        up.to = "ui";
        m.development->dependencies.push_back(up);
        try {
            estimate(m, "small");
            FAIL("expected E_UNCHECKED");
        } catch (const OpError& e) {
            CHECK(e.code() == "E_UNCHECKED");
            CHECK(std::string(e.what()).find("check errors") != std::string::npos);
        }
    }
}

TEST_CASE("rates scale linearly with scenario frequency") {
    auto m = load_pabx();
    LoadReport base = estimate(m, "large");
    m.scenarios->scenarios[0].frequency_hz = 4.0; // was 2
    LoadReport doubled = estimate(m, "large");

    CHECK(doubled.total_msgs_per_sec == 2 * base.total_msgs_per_sec);
    for (const auto& [key, rate] : base.per_connector)
        CHECK(doubled.per_connector.at(key) == 2 * rate);
    for (const auto& [id, load] : base.per_process)
        CHECK(doubled.per_process.at(id).msgs_in == 2 * load.msgs_in);
    // cost does not scale linearly: the cyclic part is frequency independent
    CHECK(doubled.per_process.at("controller_proc").cost == 109.0);
}

TEST_CASE("json report carries the full breakdown") {
    auto m = load_pabx();
    std::string text = report_json(estimate(m, "small"));
    auto j = nlohmann::json::parse(text);

    CHECK(j["config"] == "small");
    CHECK(j["total_msgs_per_sec"] == 10.0);
    CHECK(j["per_connector"]["message main_controller->terminal_task"] == 6.0);
    CHECK(j["per_process"]["controller_proc"]["cost"] == 107.0);
    CHECK(j["per_node"]["host_c"]["utilization"] == 0.23);
    CHECK(j["per_link"]["bus host_c,host_f,host_k1,host_k2"] == 0.0);
    CHECK(j["notes"].is_array());
    CHECK(j["notes"].empty());
    CHECK(text.back() == '\n');

    // six-significant-digit rounding is part of the format
    CHECK(round_rate(1.0 / 3.0) == 0.333333);
    CHECK(round_rate(123456.7) == 123457.0);
}

TEST_CASE("table report is aligned text with the same numbers") {
    auto m = load_pabx();
    std::string text = report_table(estimate(m, "small"));
    CHECK(text.find("load report for configuration 'small'") == 0);
    CHECK(text.find("total messages/sec: 10") != std::string::npos);
    CHECK(text.find("controller_proc") != std::string::npos);
    CHECK(text.find("107") != std::string::npos);
    CHECK(text.find("bus host_c,host_f,host_k1,host_k2") != std::string::npos);
}

TEST_CASE("reports are deterministic") {
    auto m = load_pabx();
    CHECK(report_json(estimate(m, "large")) == report_json(estimate(m, "large")));
    CHECK(report_table(estimate(m, "large")) == report_table(estimate(m, "large")));
}
