#include <catch2/catch_amalgamated.hpp>

#include <cctype>
#include <sstream>

#include "fourview/checker.hpp"
#include "fourview/docgen.hpp"
#include "fourview/loadsim.hpp"
#include "fourview/parser.hpp"

using namespace fourview;

namespace {

ArchitectureModel load(const std::string& name) {
    ParseResult r = parse_file(std::string(FIXTURE_DIR) + "/" + name);
    REQUIRE(r.ok());
    return std::move(*r.model);
}

std::vector<std::string> heading_lines(const std::string& doc) {
    std::vector<std::string> out;
    std::istringstream in(doc);
    std::string line;
    bool fenced = false;
    while (std::getline(in, line)) {
        if (line.rfind("```", 0) == 0) fenced = !fenced;
        if (!fenced && !line.empty() && line[0] == '#') out.push_back(line);
    }
    return out;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t at = text.find(needle); at != std::string::npos;
         at = text.find(needle, at + needle.size()))
        ++n;
    return n;
}

} // namespace

TEST_CASE("the document follows the template section by section") {
    std::string doc = generate(load("pabx.arch"), nullptr, {});
    std::vector<std::string> expected = {
        "# Title Page",
        "# Change History",
        "# Table of Contents",
        "# List of Figures",
        "# 1. Scope",
        "# 2. References",
        "# 3. Software Architecture",
        "# 4. Architectural Goals & Constraints",
        "# 5. Logical Architecture",
        "# 6. Process Architecture",
        "# 7. Development Architecture",
        "# 8. Physical Architecture",
        "# 9. Scenarios",
        "### offhook: Local subscriber goes off-hook (2 per second)",
        "# 10. Size and Performance",
        "# 11. Quality",
        "# Appendices",
        "## A. Acronyms and Abbreviations",
        "## B. Definitions",
        "## C. Design Principles",
    };
    CHECK(heading_lines(doc) == expected);
}

TEST_CASE("the change history line is a content hash") {
    auto m = load("pabx.arch");
    std::string doc = generate(m, nullptr, {});
    std::size_t at = doc.find("pabx content hash fnv1a:");
    REQUIRE(at != std::string::npos);
    std::string digest = doc.substr(at + std::string("pabx content hash fnv1a:").size(), 16);
    for (char c : digest) {
        INFO(digest);
        CHECK(std::isxdigit(static_cast<unsigned char>(c)));
    }
    // the stamp depends on content, not on where the text came from
    ParseResult again = parse(format(m), "elsewhere.arch");
    REQUIRE(again.ok());
    std::string doc2 = generate(*again.model, nullptr, {});
    CHECK(doc2.find("pabx content hash fnv1a:" + digest) != std::string::npos);
}

TEST_CASE("generation is deterministic") {
    auto m = load("pabx.arch");
    auto diags = check(m, {});
    LoadReport r = estimate(m, "small");
    CHECK(generate(m, &r, diags) == generate(m, &r, diags));
}

TEST_CASE("element tables cover the model") {
    std::string doc = generate(load("pabx.arch"), nullptr, {});
    CHECK(doc.find("| class | category | autonomy | persistence | traits | operations |") !=
          std::string::npos);
    CHECK(doc.find("| controller | call_handling | active | transient |") != std::string::npos);
    CHECK(doc.find("| process | replicas | tasks |") != std::string::npos);
    CHECK(doc.find("high_cycle (minor, period 10 ms)") != std::string::npos);
    CHECK(doc.find("| subsystem | layer | ksloc | modules |") != std::string::npos);
    CHECK(doc.find("| call_control | 3 | 18 | conv_core, ctrl_core |") != std::string::npos);
    CHECK(doc.find("| node | capacity |") != std::string::npos);
    CHECK(doc.find("| host_c | 500 |") != std::string::npos);
    CHECK(doc.find("controller_proc on host_c") != std::string::npos);
    CHECK(doc.find("| 4 | terminal | numbering_plan | analyze | rpc |") != std::string::npos);
    // five figures: four views and one scenario
    CHECK(count_occurrences(doc, "```dot") == 5);
    CHECK(doc.find("*Figure 1. Logical view blueprint*") != std::string::npos);
    CHECK(doc.find("*Figure 5. Scenario 'offhook'*") != std::string::npos);
    CHECK(doc.find("- Figure 5. Scenario 'offhook'") != std::string::npos);
    CHECK(doc.find("is described through 5 views: logical, process, development, physical, "
                   "scenarios.") != std::string::npos);
}

TEST_CASE("tailored-out views are stated, not invented") {
    auto m = load("flight_ops.arch");
    auto diags = check(m, {});
    std::string doc = generate(m, nullptr, diags);
    CHECK(count_occurrences(doc, "View omitted (tailored out).") == 4);
    CHECK(count_occurrences(doc, "```dot") == 1);
    CHECK(doc.find("is described through 1 view: logical.") != std::string::npos);
    CHECK(doc.find("No size or load figures available.") != std::string::npos);
    // the tailoring notes surface in the quality section
    CHECK(count_occurrences(doc, "info T001:") == 4);
    CHECK(doc.find("info T001: development view omitted; dependent rules skipped") !=
          std::string::npos);
}

TEST_CASE("a load report fills the size and performance section") {
    auto m = load("pabx.arch");
    LoadReport r = estimate(m, "small");
    std::string doc = generate(m, &r, {});
    CHECK(doc.find("Estimated size: 59 KSLOC across 5 measured subsystems.") !=
          std::string::npos);
    CHECK(doc.find("Load estimate for configuration 'small':") != std::string::npos);
    CHECK(doc.find("load report for configuration 'small'") != std::string::npos);
    CHECK(doc.find("total messages/sec: 10") != std::string::npos);

    std::string without = generate(m, nullptr, {});
    CHECK(without.find("No load report supplied.") != std::string::npos);
}

TEST_CASE("quality keeps warnings and drops errors") {
    auto m = load("pabx.arch");
    SourceSpan span{"x.arch", 1, 1};
    std::vector<Diagnostic> diags{
        Diagnostic{Severity::Error, "D001", "should not appear", span},
        Diagnostic{Severity::Warning, "D002", "development view has 3 layers; typical is 4 to 6",
                   span},
    };
    std::string doc = generate(m, nullptr, diags);
    CHECK(doc.find("- warning D002: development view has 3 layers; typical is 4 to 6") !=
          std::string::npos);
    CHECK(doc.find("should not appear") == std::string::npos);

    std::string clean = generate(m, nullptr, {});
    CHECK(clean.find("No outstanding warnings.") != std::string::npos);
}

TEST_CASE("an in-memory model is referenced as such") {
    ArchitectureModel m;
    m.name = "mem";
    m.logical.emplace();
    std::string doc = generate(m, nullptr, {});
    CHECK(doc.find("The architecture description was supplied in memory.") != std::string::npos);
    CHECK(doc.find("No rationale recorded.") != std::string::npos);
    CHECK(doc.find("No principles recorded.") != std::string::npos);
    CHECK(doc.find("digraph logical {}") != std::string::npos);

    auto file_backed = load("pabx.arch");
    std::string doc2 = generate(file_backed, nullptr, {});
    CHECK(doc2.find("pabx.arch`.") != std::string::npos);
}

TEST_CASE("scenario sections list steps in order") {
    std::string doc = generate(load("pabx.arch"), nullptr, {});
    CHECK(doc.find("| step | from | to | operation | via |") != std::string::npos);
    std::size_t s1 = doc.find("| 1 | controller | terminal | wake_up | message |");
    std::size_t s5 = doc.find("| 5 | terminal | conversation | open | message |");
    REQUIRE(s1 != std::string::npos);
    REQUIRE(s5 != std::string::npos);
    CHECK(s1 < s5);
}
