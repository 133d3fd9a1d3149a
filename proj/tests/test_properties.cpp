#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fourview/checker.hpp"
#include "fourview/loadsim.hpp"
#include "fourview/mapper.hpp"
#include "fourview/parser.hpp"
#include "support/model_gen.hpp"

using namespace fourview;

namespace {

// Seed bits pick which optional views are present so the sweep covers every
// combination, not just fully populated models.
gensup::GenConfig config_for(std::uint64_t seed) {
    gensup::GenConfig cfg;
    cfg.with_process = seed % 2 != 0;
    cfg.with_development = seed % 3 != 0;
    cfg.with_physical = seed % 5 != 0;
    cfg.with_scenarios = seed % 7 != 0;
    cfg.total_l2p = seed % 11 != 0;
    cfg.total_l2d = seed % 13 != 0;
    cfg.clean_connectors = seed % 4 != 0;
    return cfg;
}

std::vector<std::string> rendered(const std::vector<Diagnostic>& diags) {
    std::vector<std::string> out;
    out.reserve(diags.size());
    for (const auto& d : diags) out.push_back(format_diagnostic(d));
    return out;
}

} // namespace

TEST_CASE("generated models round-trip through the canonical form") {
    for (std::uint64_t seed = 1; seed <= 160; ++seed) {
        INFO("seed " << seed);
        ArchitectureModel m = gensup::gen_model(seed, config_for(seed));
        REQUIRE(resolve(m).empty());

        std::string once = format(m);
        ParseResult back = parse(once, "gen.arch");
        INFO(once);
        REQUIRE(back.ok());
        CHECK(structurally_equal(m, *back.model));
        CHECK(format(*back.model) == once);
    }
}

TEST_CASE("check runs are deterministic and sorted") {
    for (std::uint64_t seed = 161; seed <= 240; ++seed) {
        INFO("seed " << seed);
        gensup::GenConfig cfg = config_for(seed);
        cfg.allow_upward_deps = seed % 2 == 0;
        ArchitectureModel m = gensup::gen_model(seed, cfg);

        CheckOptions opts;
        opts.mode = seed % 3 == 0 ? CheckMode::Sketch : CheckMode::Strict;
        opts.warnings_as_errors = seed % 5 == 0;

        std::vector<Diagnostic> a = check(m, opts);
        std::vector<Diagnostic> b = check(m, opts);
        CHECK(rendered(a) == rendered(b));
        CHECK(std::is_sorted(a.begin(), a.end(), diagnostic_before));
    }
}

TEST_CASE("upward dependency findings match a brute-force count") {
    for (std::uint64_t seed = 241; seed <= 360; ++seed) {
        INFO("seed " << seed);
        gensup::GenConfig cfg;
        cfg.allow_upward_deps = true;
        ArchitectureModel m = gensup::gen_model(seed, cfg);
        REQUIRE(m.development);

        std::map<std::string, int> layer_of;
        for (const auto& s : m.development->subsystems) layer_of[s.id] = s.layer;
        std::size_t expected = 0;
        for (const auto& d : m.development->dependencies)
            if (layer_of.at(d.from) < layer_of.at(d.to)) ++expected;

        std::size_t found = 0;
        for (const auto& d : check(m, {}))
            if (d.rule == "D001") ++found;
        CHECK(found == expected);
    }
}

TEST_CASE("synthesized mappings satisfy the process rules") {
    for (std::uint64_t seed = 361; seed <= 440; ++seed) {
        INFO("seed " << seed);
        gensup::GenConfig cfg;
        cfg.with_process = false;
        cfg.with_development = false;
        cfg.with_physical = false;
        cfg.with_scenarios = false;
        ArchitectureModel m = gensup::gen_model(seed, cfg);
        REQUIRE(m.logical);

        MapperConstraints cons;
        cons.max_processes = 1 + int(seed % 5);
        const bool inside = seed % 2 == 0;
        if (!inside) cons.stimuli = {{"probe", m.logical->classes.front().id}};

        MappingResult r =
            inside ? inside_out(*m.logical, cons) : outside_in(*m.logical, cons);
        CHECK(int(r.process_view.processes.size()) <= cons.max_processes);

        std::set<std::string> placed;
        for (const auto& e : r.l2p) {
            CHECK(!e.tasks.empty());
            placed.insert(e.class_id);
        }
        CHECK(placed.size() == m.logical->classes.size());

        ArchitectureModel full = m;
        full.process = r.process_view;
        full.l2p = r.l2p;
        REQUIRE(resolve(full).empty());
        for (const auto& d : check(full, {})) {
            INFO(format_diagnostic(d));
            CHECK(d.rule != "M001");
            CHECK(d.rule != "M002");
            CHECK(d.rule != "M003");
            CHECK(d.rule != "P001");
        }

        MappingResult again =
            inside ? inside_out(*m.logical, cons) : outside_in(*m.logical, cons);
        CHECK(r.log == again.log);
        ArchitectureModel full2 = m;
        full2.process = again.process_view;
        full2.l2p = again.l2p;
        CHECK(format(full) == format(full2));
    }
}

TEST_CASE("load estimates conserve totals and scale linearly in frequency") {
    for (std::uint64_t seed = 441; seed <= 520; ++seed) {
        INFO("seed " << seed);
        gensup::GenConfig cfg;
        cfg.force_frequency = true;
        cfg.total_l2p = seed % 4 != 0;        // unmapped hops get skipped
        cfg.clean_connectors = seed % 3 != 0; // undeclared hops still count
        ArchitectureModel m = gensup::gen_model(seed, cfg);
        REQUIRE(m.physical);
        REQUIRE_FALSE(m.physical->configurations.empty());
        const std::string config = m.physical->configurations.front().name;

        LoadReport r = estimate(m, config);

        double key_sum = 0;
        for (const auto& [key, rate] : r.per_connector) key_sum += rate;
        CHECK(r.total_msgs_per_sec == key_sum);

        // Recount cross-process hops straight off the model. Frequencies are
        // halves, so both sums are exact and must agree bitwise.
        ModelIndex ix = index_model(m);
        double expected = 0;
        for (const auto& sc : m.scenarios->scenarios) {
            if (!sc.frequency_hz) continue;
            for (const auto& st : sc.steps) {
                const L2PEntry* fe = ix.l2p_of(st.from);
                const L2PEntry* te = ix.l2p_of(st.to);
                if (!fe || fe->tasks.empty() || !te || te->tasks.empty()) continue;
                const Process* pf = ix.owner_of_task(fe->tasks.front());
                const Process* pt = ix.owner_of_task(te->tasks.front());
                if (pf && pt && pf->id != pt->id) expected += *sc.frequency_hz;
            }
        }
        CHECK(r.total_msgs_per_sec == expected);

        ArchitectureModel doubled = m;
        for (auto& sc : doubled.scenarios->scenarios)
            if (sc.frequency_hz) sc.frequency_hz = *sc.frequency_hz * 2;
        LoadReport d = estimate(doubled, config);

        CHECK(d.total_msgs_per_sec == 2 * r.total_msgs_per_sec);
        REQUIRE(d.per_connector.size() == r.per_connector.size());
        for (const auto& [key, rate] : r.per_connector) {
            REQUIRE(d.per_connector.count(key) == 1);
            CHECK(d.per_connector.at(key) == 2 * rate);
        }
        for (const auto& [id, load] : r.per_process)
            CHECK(d.per_process.at(id).msgs_in == 2 * load.msgs_in);
        for (const auto& [key, rate] : r.per_link)
            CHECK(d.per_link.at(key) == 2 * rate);
    }
}
