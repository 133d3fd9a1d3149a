// fourview: parse, check, map, render, document, and size multi-view models.
//
// Exit codes: 0 clean (warnings allowed), 1 findings or operation failure,
// 2 usage or IO failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"

#include "fourview/checker.hpp"
#include "fourview/docgen.hpp"
#include "fourview/loadsim.hpp"
#include "fourview/mapper.hpp"
#include "fourview/parser.hpp"
#include "fourview/render.hpp"

namespace {

using namespace fourview;

constexpr int kOk = 0;
constexpr int kFindings = 1;
constexpr int kUsage = 2;

bool color_enabled() {
    static const bool enabled = ::isatty(::fileno(stdout)) != 0 &&
                                std::getenv("FOURVIEW_NO_COLOR") == nullptr;
    return enabled;
}

void print_diag(const Diagnostic& d) {
    if (!color_enabled()) {
        std::cout << format_diagnostic(d) << "\n";
        return;
    }
    const char* tint = d.severity == Severity::Error     ? "\x1b[31m"
                       : d.severity == Severity::Warning ? "\x1b[33m"
                                                         : "\x1b[36m";
    std::string prefix;
    if (d.where.valid())
        prefix = d.where.file + ":" + std::to_string(d.where.line) + ":" +
                 std::to_string(d.where.column) + ": ";
    std::cout << prefix << tint << to_string(d.severity) << "\x1b[0m " << d.rule << ": "
              << d.message << "\n";
}

void print_diags(const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags) print_diag(d);
}

bool readable(const std::string& path) {
    std::ifstream in(path);
    return in.good();
}

/// Parses and resolves one file. Parse or resolve findings are printed;
/// returns the model only when it is structurally sound.
std::optional<ArchitectureModel> load_model(const std::string& path, int& rc) {
    if (!readable(path)) {
        std::cerr << "error: cannot open '" << path << "'\n";
        rc = kUsage;
        return std::nullopt;
    }
    ParseResult pr = parse_file(path);
    if (!pr.ok()) {
        print_diags(pr.diagnostics);
        rc = kFindings;
        return std::nullopt;
    }
    std::vector<Diagnostic> res = resolve(*pr.model);
    if (has_errors(res)) {
        print_diags(res);
        rc = kFindings;
        return std::nullopt;
    }
    return std::move(*pr.model);
}

bool write_file(const std::string& path, const std::string& content, int& rc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write '" << path << "'\n";
        rc = kUsage;
        return false;
    }
    out << content;
    out.close();
    if (!out) {
        std::cerr << "error: cannot write '" << path << "'\n";
        rc = kUsage;
        return false;
    }
    return true;
}

int run_check(const std::vector<std::string>& files, const std::string& mode,
              const std::string& format, bool warnings_as_errors,
              const std::vector<std::string>& disabled) {
    CheckOptions opts;
    opts.mode = mode == "sketch" ? CheckMode::Sketch : CheckMode::Strict;
    opts.warnings_as_errors = warnings_as_errors;
    opts.disabled_rules.insert(disabled.begin(), disabled.end());

    std::vector<Diagnostic> all;
    for (const auto& file : files) {
        if (!readable(file)) {
            std::cerr << "error: cannot open '" << file << "'\n";
            return kUsage;
        }
        ParseResult pr = parse_file(file);
        std::vector<Diagnostic> mine = pr.diagnostics;
        if (pr.ok()) {
            std::vector<Diagnostic> res = resolve(*pr.model);
            mine.insert(mine.end(), res.begin(), res.end());
            if (!has_errors(res)) {
                std::vector<Diagnostic> found = check(*pr.model, opts);
                mine.insert(mine.end(), found.begin(), found.end());
            }
        }
        all.insert(all.end(), mine.begin(), mine.end());
    }

    if (format == "json") {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& d : all) arr.push_back(diagnostic_json(d));
        std::cout << arr.dump(2) << "\n";
    } else {
        print_diags(all);
        std::size_t errors = 0, warnings = 0, infos = 0;
        for (const auto& d : all) {
            if (d.severity == Severity::Error) ++errors;
            else if (d.severity == Severity::Warning) ++warnings;
            else ++infos;
        }
        std::cout << errors << " errors, " << warnings << " warnings";
        if (infos) std::cout << ", " << infos << " infos";
        std::cout << "\n";
    }
    return has_errors(all) ? kFindings : kOk;
}

int run_render(const std::string& file, const std::string& view,
               const std::string& scenario, const std::string& out) {
    int rc = kOk;
    auto m = load_model(file, rc);
    if (!m) return rc;
    std::string dot;
    try {
        dot = to_dot(*m, *parse_dot_view(view), scenario);
    } catch (const OpError& e) {
        std::cerr << "error " << e.code() << ": " << e.message() << "\n";
        return kFindings;
    }
    if (!write_file(out, dot, rc)) return rc;
    return kOk;
}

bool split_pair(const std::string& text, char sep, std::string& a, std::string& b) {
    auto pos = text.find(sep);
    if (pos == std::string::npos || pos == 0 || pos + 1 == text.size()) return false;
    a = text.substr(0, pos);
    b = text.substr(pos + 1);
    return true;
}

int run_map(const std::string& file, const std::string& strategy, int max_processes,
            const std::vector<std::string>& stimuli, const std::vector<std::string>& mx,
            const std::string& out) {
    int rc = kOk;
    auto m = load_model(file, rc);
    if (!m) return rc;

    MapperConstraints constraints;
    constraints.max_processes = max_processes;
    for (const auto& group : mx) {
        std::set<std::string> members;
        std::string rest = group;
        for (std::size_t pos; (pos = rest.find('+')) != std::string::npos;) {
            members.insert(rest.substr(0, pos));
            rest = rest.substr(pos + 1);
        }
        members.insert(rest);
        members.erase("");
        if (members.empty()) {
            std::cerr << "error: --mx group '" << group << "' names no classes\n";
            return kUsage;
        }
        constraints.mutual_exclusion_groups.push_back(std::move(members));
    }
    for (const auto& s : stimuli) {
        std::string name, target;
        if (!split_pair(s, '=', name, target)) {
            std::cerr << "error: --stimuli entry '" << s << "' is not name=class\n";
            return kUsage;
        }
        constraints.stimuli.emplace_back(name, target);
    }

    if (!m->logical) {
        std::cerr << "error E_NOVIEW: mapping needs a logical view\n";
        return kFindings;
    }
    MappingResult result;
    try {
        result = strategy == "inside-out" ? inside_out(*m->logical, constraints)
                                          : outside_in(*m->logical, constraints);
    } catch (const OpError& e) {
        std::cerr << "error " << e.code() << ": " << e.message() << "\n";
        return e.code() == "E_NOSTIMULI" ? kUsage : kFindings;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    for (const auto& line : result.log) std::cout << line << "\n";

    ArchitectureModel mapped = *m;
    mapped.process = result.process_view;
    mapped.l2p = result.l2p;
    std::string text = format(mapped);

    // The output must stand on its own: re-parse and re-check before writing.
    ParseResult reparsed = parse(text, out);
    std::vector<Diagnostic> findings = reparsed.diagnostics;
    if (reparsed.ok()) {
        std::vector<Diagnostic> res = resolve(*reparsed.model);
        findings.insert(findings.end(), res.begin(), res.end());
        if (!has_errors(res)) {
            std::vector<Diagnostic> checked = check(*reparsed.model, CheckOptions{});
            findings.insert(findings.end(), checked.begin(), checked.end());
        }
    }
    if (has_errors(findings)) {
        print_diags(findings);
        std::cerr << "error: mapped model fails its own checks; refusing to write '" << out
                  << "'\n";
        return kFindings;
    }
    if (!write_file(out, text, rc)) return rc;
    return kOk;
}

int run_doc(const std::string& file, const std::string& config, const std::string& out) {
    int rc = kOk;
    auto m = load_model(file, rc);
    if (!m) return rc;
    std::vector<Diagnostic> diags = check(*m, CheckOptions{});
    if (has_errors(diags)) {
        print_diags(diags);
        return kFindings;
    }
    std::optional<LoadReport> report;
    if (!config.empty()) {
        try {
            report = estimate(*m, config);
        } catch (const OpError& e) {
            std::cerr << "error " << e.code() << ": " << e.message() << "\n";
            return kFindings;
        }
    }
    std::string md = generate(*m, report ? &*report : nullptr, diags);
    if (!write_file(out, md, rc)) return rc;
    return kOk;
}

int run_simulate(const std::string& file, const std::string& config,
                 const std::string& format) {
    int rc = kOk;
    auto m = load_model(file, rc);
    if (!m) return rc;
    LoadReport report;
    try {
        report = estimate(*m, config);
    } catch (const OpError& e) {
        std::cerr << "error " << e.code() << ": " << e.message() << "\n";
        return kFindings;
    }
    std::cout << (format == "json" ? report_json(report) : report_table(report));
    return kOk;
}

int run_fmt(const std::string& file, bool write) {
    int rc = kOk;
    auto m = load_model(file, rc);
    if (!m) return rc;
    std::string text = format(*m);
    if (!write) {
        std::cout << text;
        return kOk;
    }
    if (!write_file(file, text, rc)) return rc;
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-view architecture toolkit"};
    app.set_version_flag("--version", "fourview 0.1.0");
    app.require_subcommand(1);

    auto* cmd_check = app.add_subcommand("check", "Run the consistency rule catalog");
    std::vector<std::string> check_files;
    std::string check_mode = "strict", check_format = "text";
    bool check_werror = false;
    std::vector<std::string> check_disabled;
    cmd_check->add_option("files", check_files, "Model files")->required();
    cmd_check->add_option("--mode", check_mode, "Rule strictness")
        ->check(CLI::IsMember({"strict", "sketch"}));
    cmd_check->add_option("--format", check_format, "Output format")
        ->check(CLI::IsMember({"text", "json"}));
    cmd_check->add_flag("-W,--warnings-as-errors", check_werror,
                        "Treat warnings as errors");
    cmd_check->add_option("--disable", check_disabled, "Rule ids to skip")
        ->delimiter(',');

    auto* cmd_render = app.add_subcommand("render", "Emit a DOT blueprint for one view");
    std::string render_file, render_view, render_scenario, render_out;
    cmd_render->add_option("file", render_file, "Model file")->required();
    cmd_render->add_option("--view", render_view, "View to draw")
        ->required()
        ->check(CLI::IsMember({"logical", "process", "development", "physical", "scenario"}));
    cmd_render->add_option("--scenario", render_scenario, "Scenario id (view=scenario)");
    cmd_render->add_option("-o,--output", render_out, "Output DOT file")->required();

    auto* cmd_map = app.add_subcommand("map", "Synthesize a process view from the logical view");
    std::string map_file, map_strategy, map_out;
    int map_max = 8;
    std::vector<std::string> map_stimuli, map_mx;
    cmd_map->add_option("file", map_file, "Model file")->required();
    cmd_map->add_option("--strategy", map_strategy, "Mapping strategy")
        ->required()
        ->check(CLI::IsMember({"inside-out", "outside-in"}));
    cmd_map->add_option("--max-processes", map_max, "Process budget")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd_map->add_option("--stimuli", map_stimuli, "Stimuli as name=class (outside-in)")
        ->delimiter(',');
    cmd_map->add_option("--mx", map_mx, "Mutual exclusion groups as a+b (inside-out)")
        ->delimiter(',');
    cmd_map->add_option("-o,--output", map_out, "Output model file")->required();

    auto* cmd_doc = app.add_subcommand("doc", "Generate the architecture document");
    std::string doc_file, doc_config, doc_out;
    cmd_doc->add_option("file", doc_file, "Model file")->required();
    cmd_doc->add_option("--config", doc_config, "Configuration for the load section");
    cmd_doc->add_option("-o,--output", doc_out, "Output Markdown file")->required();

    auto* cmd_sim = app.add_subcommand("simulate", "Estimate loads for one configuration");
    std::string sim_file, sim_config, sim_format = "table";
    cmd_sim->add_option("file", sim_file, "Model file")->required();
    cmd_sim->add_option("--config", sim_config, "Configuration name")->required();
    cmd_sim->add_option("--format", sim_format, "Output format")
        ->check(CLI::IsMember({"json", "table"}));

    auto* cmd_fmt = app.add_subcommand("fmt", "Print or rewrite the canonical form");
    std::string fmt_file;
    bool fmt_write = false;
    cmd_fmt->add_option("file", fmt_file, "Model file")->required();
    cmd_fmt->add_flag("--write", fmt_write, "Rewrite the file in place");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    if (cmd_check->parsed())
        return run_check(check_files, check_mode, check_format, check_werror, check_disabled);
    if (cmd_render->parsed())
        return run_render(render_file, render_view, render_scenario, render_out);
    if (cmd_map->parsed())
        return run_map(map_file, map_strategy, map_max, map_stimuli, map_mx, map_out);
    if (cmd_doc->parsed()) return run_doc(doc_file, doc_config, doc_out);
    if (cmd_sim->parsed()) return run_simulate(sim_file, sim_config, sim_format);
    if (cmd_fmt->parsed()) return run_fmt(fmt_file, fmt_write);
    return kUsage;
}
