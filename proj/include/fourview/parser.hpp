#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "fourview/diag.hpp"
#include "fourview/model.hpp"

namespace fourview {

struct ParseResult {
    std::optional<ArchitectureModel> model;
    std::vector<Diagnostic> diagnostics; // empty iff model is set
    bool ok() const { return model.has_value(); }
};

inline std::string quote(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

// ============================================================================
// Lexer
// ============================================================================

namespace detail {

enum class TokKind { Word, Number, String, LBrace, RBrace, Comma, Colon, Dot, Arrow, End };

struct Token {
    TokKind kind = TokKind::End;
    std::string text; // word spelling, string contents, or raw number
    int line = 1;
    int column = 1;
};

struct ParseFail {
    Diagnostic diag;
};

[[noreturn]] inline void fail(const char* rule, std::string msg, const SourceSpan& span) {
    throw ParseFail{Diagnostic{Severity::Error, rule, std::move(msg), span}};
}

class Lexer {
  public:
    Lexer(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_trivia();
            Token t;
            t.line = line_;
            t.column = column_;
            if (eof()) {
                t.kind = TokKind::End;
                out.push_back(t);
                return out;
            }
            char c = cur();
            if (c == '{') { t.kind = TokKind::LBrace; bump(); }
            else if (c == '}') { t.kind = TokKind::RBrace; bump(); }
            else if (c == ',') { t.kind = TokKind::Comma; bump(); }
            else if (c == ':') { t.kind = TokKind::Colon; bump(); }
            else if (c == '.') { t.kind = TokKind::Dot; bump(); }
            else if (c == '-' && peek(1) == '>') { t.kind = TokKind::Arrow; bump(); bump(); }
            else if (c == '"') { t.kind = TokKind::String; t.text = lex_string(); }
            else if (c >= '0' && c <= '9') { t.kind = TokKind::Number; t.text = lex_number(); }
            else if (c >= 'a' && c <= 'z') { t.kind = TokKind::Word; t.text = lex_word(); }
            else {
                fail("E_PARSE", std::string("unexpected character '") + c + "'", span());
            }
            out.push_back(std::move(t));
        }
    }

  private:
    std::string_view text_;
    std::string file_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;

    bool eof() const { return pos_ >= text_.size(); }
    char cur() const { return text_[pos_]; }
    char peek(std::size_t n) const { return pos_ + n < text_.size() ? text_[pos_ + n] : '\0'; }
    SourceSpan span() const { return SourceSpan{file_, line_, column_}; }

    void bump() {
        if (text_[pos_] == '\n') { ++line_; column_ = 1; }
        else ++column_;
        ++pos_;
    }

    void skip_trivia() {
        while (!eof()) {
            char c = cur();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') { bump(); }
            else if (c == '#') {
                while (!eof() && cur() != '\n') bump();
            } else break;
        }
    }

    // Words take lowercase letters, digits, '_', and '-' unless the '-' opens
    // an arrow. That keeps `a->b` three tokens while `semi-active` stays one
    // word for the enum tables to reject.
    std::string lex_word() {
        std::string w;
        while (!eof()) {
            char c = cur();
            bool take = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
                        (c == '-' && peek(1) != '>');
            if (!take) break;
            w += c;
            bump();
        }
        return w;
    }

    std::string lex_number() {
        std::string n;
        auto digits = [&] {
            while (!eof() && cur() >= '0' && cur() <= '9') { n += cur(); bump(); }
        };
        digits();
        if (!eof() && cur() == '.' && peek(1) >= '0' && peek(1) <= '9') {
            n += '.';
            bump();
            digits();
        }
        if (!eof() && (cur() == 'e' || cur() == 'E')) {
            n += cur();
            bump();
            if (!eof() && (cur() == '+' || cur() == '-')) { n += cur(); bump(); }
            if (eof() || cur() < '0' || cur() > '9')
                fail("E_PARSE", "malformed number exponent", span());
            digits();
        }
        return n;
    }

    std::string lex_string() {
        SourceSpan start = span();
        bump(); // opening quote
        std::string s;
        while (true) {
            if (eof() || cur() == '\n') fail("E_PARSE", "unterminated string", start);
            char c = cur();
            if (c == '"') { bump(); return s; }
            if (c == '\\') {
                bump();
                if (eof()) fail("E_PARSE", "unterminated string", start);
                char e = cur();
                switch (e) {
                    case '"': s += '"'; break;
                    case '\\': s += '\\'; break;
                    case 'n': s += '\n'; break;
                    case 't': s += '\t'; break;
                    default:
                        fail("E_PARSE", std::string("unknown escape '\\") + e + "'", span());
                }
                bump();
            } else {
                s += c;
                bump();
            }
        }
    }
};

// ============================================================================
// Parser
// ============================================================================

class Parser {
  public:
    Parser(std::vector<Token> toks, std::string file)
        : toks_(std::move(toks)), file_(std::move(file)) {}

    ArchitectureModel run() {
        if (!at_word("architecture"))
            fail("E_PARSE", "expected 'architecture' block", span());
        ArchitectureModel m;
        m.span = span();
        advance();
        m.name = ident("architecture");
        expect(TokKind::LBrace, "'{'");
        while (!at(TokKind::RBrace)) {
            const Token& t = peek();
            if (t.kind != TokKind::Word)
                fail("E_PARSE", "expected a section or '}'", span());
            if (t.text == "rationale") m.rationale = rationale_clause(m.rationale, "architecture");
            else if (t.text == "logical") { once(seen_logical_, "logical"); m.logical = parse_logical(); }
            else if (t.text == "process") { once(seen_process_, "process"); m.process = parse_process(); }
            else if (t.text == "development") { once(seen_dev_, "development"); m.development = parse_development(); }
            else if (t.text == "physical") { once(seen_phys_, "physical"); m.physical = parse_physical(); }
            else if (t.text == "scenarios") { once(seen_scen_, "scenarios"); m.scenarios = parse_scenarios(); }
            else if (t.text == "map") parse_map(m);
            else
                fail("E_PARSE", "unknown section '" + t.text + "'", span());
        }
        expect(TokKind::RBrace, "'}'");
        if (!at(TokKind::End))
            fail("E_PARSE", "one architecture per file; unexpected trailing input", span());
        return m;
    }

  private:
    std::vector<Token> toks_;
    std::string file_;
    std::size_t pos_ = 0;
    bool seen_logical_ = false, seen_process_ = false, seen_dev_ = false, seen_phys_ = false,
         seen_scen_ = false, seen_l2p_ = false, seen_l2d_ = false;

    const Token& peek(std::size_t n = 0) const {
        std::size_t i = pos_ + n;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    SourceSpan span(std::size_t n = 0) const {
        const Token& t = peek(n);
        return SourceSpan{file_, t.line, t.column};
    }
    bool at(TokKind k) const { return peek().kind == k; }
    bool at_word(std::string_view w) const {
        return peek().kind == TokKind::Word && peek().text == w;
    }
    void advance() { if (pos_ + 1 < toks_.size()) ++pos_; }

    void once(bool& flag, const char* what) {
        if (flag) fail("E_DUP", std::string("duplicate section '") + what + "'", span());
        flag = true;
    }

    void expect(TokKind k, const char* what) {
        if (!at(k)) fail("E_PARSE", std::string("expected ") + what, span());
        advance();
    }

    bool accept_word(std::string_view w) {
        if (at_word(w)) { advance(); return true; }
        return false;
    }

    std::string word(const char* what) {
        if (!at(TokKind::Word))
            fail("E_PARSE", std::string("expected ") + what, span());
        std::string w = peek().text;
        advance();
        return w;
    }

    std::string ident(const char* what) {
        SourceSpan here = span();
        std::string w = word(what);
        if (!is_identifier(w))
            fail("E_PARSE", std::string("invalid ") + what + " identifier '" + w + "'", here);
        return w;
    }

    std::string opt_string() {
        if (at(TokKind::String)) {
            std::string s = peek().text;
            advance();
            return s;
        }
        return {};
    }

    std::string string_lit(const char* what) {
        if (!at(TokKind::String))
            fail("E_PARSE", std::string("expected ") + what, span());
        std::string s = peek().text;
        advance();
        return s;
    }

    double number(const char* what) {
        if (!at(TokKind::Number))
            fail("E_PARSE", std::string("expected ") + what, span());
        const std::string& raw = peek().text;
        double v = 0;
        auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
        if (ec != std::errc{} || p != raw.data() + raw.size())
            fail("E_PARSE", "malformed number '" + raw + "'", span());
        advance();
        return v;
    }

    int integer(const char* what) {
        if (!at(TokKind::Number))
            fail("E_PARSE", std::string("expected ") + what, span());
        const std::string& raw = peek().text;
        int v = 0;
        auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
        if (ec != std::errc{} || p != raw.data() + raw.size())
            fail("E_PARSE", std::string(what) + " must be a plain integer, got '" + raw + "'",
                 span());
        advance();
        return v;
    }

    // Optional `<kw> <number>` clause; the number lookahead keeps ids that
    // happen to spell a clause keyword unambiguous.
    std::optional<double> opt_number_clause(std::string_view kw) {
        if (at_word(kw) && peek(1).kind == TokKind::Number) {
            advance();
            return number("number");
        }
        return std::nullopt;
    }

    std::string rationale_clause(const std::string& prev, const char* owner) {
        if (!prev.empty())
            fail("E_DUP", std::string("duplicate rationale in ") + owner, span());
        advance();
        return string_lit("rationale text");
    }

    std::vector<std::string> ident_list(const char* what) {
        std::vector<std::string> out;
        out.push_back(ident(what));
        while (at(TokKind::Comma)) {
            advance();
            out.push_back(ident(what));
        }
        return out;
    }

    template <class Enum>
    Enum enum_word(const char* what, std::optional<Enum> (*table)(const std::string&)) {
        SourceSpan here = span();
        std::string w = word(what);
        auto v = table(w);
        if (!v) fail("E_ENUM", std::string("unknown ") + what + " '" + w + "'", here);
        return *v;
    }

    // ---- logical ----

    LogicalView parse_logical() {
        LogicalView lv;
        lv.span = span();
        advance();
        expect(TokKind::LBrace, "'{'");
        bool seen_relations = false;
        while (!at(TokKind::RBrace)) {
            if (at_word("rationale")) lv.rationale = rationale_clause(lv.rationale, "logical");
            else if (at_word("category")) parse_category(lv);
            else if (at_word("class")) lv.classes.push_back(parse_class(""));
            else if (at_word("relations")) {
                if (seen_relations) fail("E_DUP", "duplicate 'relations' block", span());
                seen_relations = true;
                parse_relations(lv);
            } else
                fail("E_PARSE", "expected 'category', 'class', 'relations', or '}'", span());
        }
        expect(TokKind::RBrace, "'}'");
        return lv;
    }

    void parse_category(LogicalView& lv) {
        ClassCategory cat;
        cat.span = span();
        advance();
        cat.id = ident("category");
        cat.name = opt_string();
        if (at(TokKind::LBrace)) {
            advance();
            while (!at(TokKind::RBrace)) {
                if (at_word("class")) lv.classes.push_back(parse_class(cat.id));
                else fail("E_PARSE", "expected 'class' or '}'", span());
            }
            expect(TokKind::RBrace, "'}'");
        }
        lv.categories.push_back(std::move(cat));
    }

    Class parse_class(const std::string& category) {
        Class c;
        c.span = span();
        advance();
        c.id = ident("class");
        c.name = opt_string();
        c.category = category;
        if (!at(TokKind::LBrace)) return c;
        advance();
        bool seen_ops = false, seen_auto = false, seen_pers = false, seen_sub = false,
             seen_dist = false, seen_util = false, seen_cost = false;
        auto once_item = [&](bool& flag, const char* item) {
            if (flag)
                fail("E_DUP", std::string("duplicate '") + item + "' in class '" + c.id + "'",
                     span());
            flag = true;
        };
        while (!at(TokKind::RBrace)) {
            if (at_word("operations")) {
                once_item(seen_ops, "operations");
                advance();
                c.operations = ident_list("operation");
            } else if (at_word("autonomy")) {
                once_item(seen_auto, "autonomy");
                advance();
                c.autonomy = enum_word<Autonomy>("autonomy", &parse_autonomy);
            } else if (at_word("persistence")) {
                once_item(seen_pers, "persistence");
                advance();
                c.persistence = enum_word<Persistence>("persistence", &parse_persistence);
            } else if (at_word("subordinate_to")) {
                once_item(seen_sub, "subordinate_to");
                advance();
                c.subordinate_to = ident("class");
            } else if (at_word("distributed")) {
                once_item(seen_dist, "distributed");
                advance();
                c.distributed = true;
            } else if (at_word("utility")) {
                once_item(seen_util, "utility");
                advance();
                c.utility = true;
            } else if (at_word("est_cost")) {
                once_item(seen_cost, "est_cost");
                advance();
                c.est_cost = number("est_cost value");
            } else {
                fail("E_PARSE", "unknown class attribute", span());
            }
        }
        expect(TokKind::RBrace, "'}'");
        return c;
    }

    void parse_relations(LogicalView& lv) {
        advance();
        expect(TokKind::LBrace, "'{'");
        while (!at(TokKind::RBrace)) {
            Relation r;
            r.span = span();
            r.kind = enum_word<RelationKind>("relation kind", &parse_relation_kind);
            r.from = ident("class");
            expect(TokKind::Arrow, "'->'");
            r.to = ident("class");
            lv.relations.push_back(std::move(r));
        }
        expect(TokKind::RBrace, "'}'");
    }

    // ---- process ----

    ProcessView parse_process() {
        ProcessView pv;
        pv.span = span();
        advance();
        expect(TokKind::LBrace, "'{'");
        bool seen_connectors = false;
        while (!at(TokKind::RBrace)) {
            if (at_word("rationale")) pv.rationale = rationale_clause(pv.rationale, "process");
            else if (at_word("process")) pv.processes.push_back(parse_process_decl());
            else if (at_word("connectors")) {
                if (seen_connectors) fail("E_DUP", "duplicate 'connectors' block", span());
                seen_connectors = true;
                parse_connectors(pv);
            } else
                fail("E_PARSE", "expected 'process', 'connectors', or '}'", span());
        }
        expect(TokKind::RBrace, "'}'");
        return pv;
    }

    Process parse_process_decl() {
        Process p;
        p.span = span();
        advance();
        p.id = ident("process");
        p.name = opt_string();
        if (at_word("replicas") && peek(1).kind == TokKind::Number) {
            advance();
            p.replicas = integer("replicas");
        }
        expect(TokKind::LBrace, "'{'");
        while (!at(TokKind::RBrace)) {
            if (!at_word("task")) fail("E_PARSE", "expected 'task' or '}'", span());
            Task t;
            t.span = span();
            advance();
            t.id = ident("task");
            t.name = opt_string();
            t.kind = enum_word<TaskKind>("task kind", &parse_task_kind);
            t.period_ms = opt_number_clause("period");
            p.tasks.push_back(std::move(t));
        }
        expect(TokKind::RBrace, "'}'");
        return p;
    }

    void parse_connectors(ProcessView& pv) {
        advance();
        expect(TokKind::LBrace, "'{'");
        while (!at(TokKind::RBrace)) {
            Connector c;
            c.span = span();
            c.kind = enum_word<ConnectorKind>("connector kind", &parse_connector_kind);
            c.from = ident("task");
            expect(TokKind::Arrow, "'->'");
            c.to = ident("task");
            pv.connectors.push_back(std::move(c));
        }
        expect(TokKind::RBrace, "'}'");
    }

    // ---- development ----

    DevelopmentView parse_development() {
        DevelopmentView dv;
        dv.span = span();
        advance();
        expect(TokKind::LBrace, "'{'");
        while (!at(TokKind::RBrace)) {
            if (at_word("rationale")) dv.rationale = rationale_clause(dv.rationale, "development");
            else if (at_word("layer")) {
                LayerDef l;
                l.span = span();
                advance();
                l.number = integer("layer number");
                l.name = string_lit("layer name");
                l.responsibility = opt_string();
                dv.layers.push_back(std::move(l));
            } else if (at_word("subsystem")) {
                dv.subsystems.push_back(parse_subsystem());
            } else if (at_word("depends")) {
                DevDependency d;
                d.span = span();
                advance();
                d.from = ident("subsystem");
                expect(TokKind::Arrow, "'->'");
                d.to = ident("subsystem");
                dv.dependencies.push_back(std::move(d));
            } else
                fail("E_PARSE", "expected 'layer', 'subsystem', 'depends', or '}'", span());
        }
        expect(TokKind::RBrace, "'}'");
        return dv;
    }

    Subsystem parse_subsystem() {
        Subsystem s;
        s.span = span();
        advance();
        s.id = ident("subsystem");
        s.name = opt_string();
        if (!accept_word("layer")) fail("E_PARSE", "expected 'layer <number>'", span());
        s.layer = integer("layer number");
        if (at(TokKind::LBrace)) {
            advance();
            bool seen_modules = false, seen_ksloc = false;
            while (!at(TokKind::RBrace)) {
                if (at_word("modules")) {
                    if (seen_modules)
                        fail("E_DUP", "duplicate 'modules' in subsystem '" + s.id + "'", span());
                    seen_modules = true;
                    advance();
                    s.modules = ident_list("module");
                } else if (at_word("ksloc")) {
                    if (seen_ksloc)
                        fail("E_DUP", "duplicate 'ksloc' in subsystem '" + s.id + "'", span());
                    seen_ksloc = true;
                    advance();
                    s.ksloc = number("ksloc value");
                } else
                    fail("E_PARSE", "expected 'modules', 'ksloc', or '}'", span());
            }
            expect(TokKind::RBrace, "'}'");
        }
        return s;
    }

    // ---- physical ----

    PhysicalView parse_physical() {
        PhysicalView ph;
        ph.span = span();
        advance();
        expect(TokKind::LBrace, "'{'");
        while (!at(TokKind::RBrace)) {
            if (at_word("rationale")) ph.rationale = rationale_clause(ph.rationale, "physical");
            else if (at_word("node")) {
                Node n;
                n.span = span();
                advance();
                n.id = ident("node");
                n.name = opt_string();
                n.capacity = opt_number_clause("capacity");
                ph.nodes.push_back(std::move(n));
            } else if (at_word("link")) {
                Link l;
                l.span = span();
                advance();
                l.medium = enum_word<LinkMedium>("link medium", &parse_link_medium);
                l.endpoints = ident_list("node");
                l.bandwidth = opt_number_clause("bandwidth");
                ph.links.push_back(std::move(l));
            } else if (at_word("config")) {
                Configuration cfg;
                cfg.span = span();
                advance();
                cfg.name = ident("configuration");
                expect(TokKind::LBrace, "'{'");
                while (!at(TokKind::RBrace)) {
                    if (!at_word("place")) fail("E_PARSE", "expected 'place' or '}'", span());
                    Placement pl;
                    pl.span = span();
                    advance();
                    pl.process = ident("process");
                    if (!accept_word("on")) fail("E_PARSE", "expected 'on'", span());
                    pl.nodes = ident_list("node");
                    cfg.placements.push_back(std::move(pl));
                }
                expect(TokKind::RBrace, "'}'");
                ph.configurations.push_back(std::move(cfg));
            } else
                fail("E_PARSE", "expected 'node', 'link', 'config', or '}'", span());
        }
        expect(TokKind::RBrace, "'}'");
        return ph;
    }

    // ---- scenarios ----

    ScenarioView parse_scenarios() {
        ScenarioView sv;
        sv.span = span();
        advance();
        expect(TokKind::LBrace, "'{'");
        while (!at(TokKind::RBrace)) {
            if (!at_word("scenario")) fail("E_PARSE", "expected 'scenario' or '}'", span());
            Scenario sc;
            sc.span = span();
            advance();
            sc.id = ident("scenario");
            sc.name = opt_string();
            sc.frequency_hz = opt_number_clause("freq");
            if (at(TokKind::LBrace)) {
                advance();
                while (!at(TokKind::RBrace)) {
                    if (!at_word("step")) fail("E_PARSE", "expected 'step' or '}'", span());
                    Step st;
                    st.span = span();
                    advance();
                    st.seq = integer("step number");
                    expect(TokKind::Colon, "':'");
                    st.from = ident("class");
                    expect(TokKind::Arrow, "'->'");
                    st.to = ident("class");
                    expect(TokKind::Dot, "'.'");
                    st.operation = ident("operation");
                    if (accept_word("via"))
                        st.connector_hint =
                            enum_word<ConnectorKind>("connector kind", &parse_connector_kind);
                    sc.steps.push_back(std::move(st));
                }
                expect(TokKind::RBrace, "'}'");
            }
            sv.scenarios.push_back(std::move(sc));
        }
        expect(TokKind::RBrace, "'}'");
        return sv;
    }

    // ---- mappings ----

    void parse_map(ArchitectureModel& m) {
        SourceSpan map_span = span();
        advance();
        std::string which = word("'l2p' or 'l2d'");
        if (which == "l2p") {
            if (seen_l2p_) fail("E_DUP", "duplicate section 'map l2p'", map_span);
            seen_l2p_ = true;
            expect(TokKind::LBrace, "'{'");
            while (!at(TokKind::RBrace)) {
                if (!at_word("class")) fail("E_PARSE", "expected 'class' or '}'", span());
                L2PEntry e;
                e.span = span();
                advance();
                e.class_id = ident("class");
                expect(TokKind::Arrow, "'->'");
                if (!accept_word("tasks")) fail("E_PARSE", "expected 'tasks'", span());
                e.tasks = ident_list("task");
                m.l2p.push_back(std::move(e));
            }
            expect(TokKind::RBrace, "'}'");
        } else if (which == "l2d") {
            if (seen_l2d_) fail("E_DUP", "duplicate section 'map l2d'", map_span);
            seen_l2d_ = true;
            expect(TokKind::LBrace, "'{'");
            while (!at(TokKind::RBrace)) {
                if (!at_word("class")) fail("E_PARSE", "expected 'class' or '}'", span());
                L2DEntry e;
                e.span = span();
                advance();
                e.class_id = ident("class");
                expect(TokKind::Arrow, "'->'");
                e.modules.push_back(qualified_module());
                while (at(TokKind::Comma)) {
                    advance();
                    e.modules.push_back(qualified_module());
                }
                m.l2d.push_back(std::move(e));
            }
            expect(TokKind::RBrace, "'}'");
        } else {
            fail("E_PARSE", "expected 'l2p' or 'l2d' after 'map'", map_span);
        }
    }

    std::pair<std::string, std::string> qualified_module() {
        std::string sub = ident("subsystem");
        expect(TokKind::Dot, "'.'");
        std::string mod = ident("module");
        return {sub, mod};
    }
};

} // namespace detail

/// Parses one architecture document. On success the result holds the model and
/// no diagnostics; on failure it holds no model and at least one error
/// diagnostic whose span points into `text`. Never both.
inline ParseResult parse(std::string_view text, std::string file = "<input>") {
    try {
        detail::Lexer lexer(text, file);
        detail::Parser parser(lexer.run(), file);
        ParseResult r;
        r.model = parser.run();
        return r;
    } catch (const detail::ParseFail& f) {
        ParseResult r;
        r.diagnostics.push_back(f.diag);
        return r;
    }
}

inline ParseResult parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        ParseResult r;
        r.diagnostics.push_back(Diagnostic{Severity::Error, "E_PARSE",
                                           "cannot open file", SourceSpan{path, 0, 0}});
        return r;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

// ============================================================================
// Canonical formatter
// ============================================================================

namespace detail {

class Writer {
  public:
    void open(const std::string& head) {
        line(head + " {");
        ++indent_;
    }
    void close() {
        --indent_;
        line("}");
    }
    void line(const std::string& s) {
        for (int i = 0; i < indent_; ++i) out_ += "  ";
        out_ += s;
        out_ += '\n';
    }
    std::string take() { return std::move(out_); }

  private:
    std::string out_;
    int indent_ = 0;
};

template <class T, class Key>
std::vector<const T*> sorted_by(const std::vector<T>& v, Key key) {
    std::vector<const T*> out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(&x);
    std::stable_sort(out.begin(), out.end(),
                     [&](const T* a, const T* b) { return key(*a) < key(*b); });
    return out;
}

inline std::string join(const std::vector<std::string>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += xs[i];
    }
    return out;
}

inline std::string display_suffix(const std::string& id, const std::string& name) {
    if (name.empty() || name == id) return {};
    return " " + quote(name);
}

inline void write_class(Writer& w, const Class& c) {
    std::string head = "class " + c.id + display_suffix(c.id, c.name);
    std::vector<std::string> body;
    if (!c.operations.empty()) {
        std::vector<std::string> ops = c.operations;
        std::sort(ops.begin(), ops.end());
        body.push_back("operations " + join(ops));
    }
    if (c.autonomy != Autonomy::Passive)
        body.push_back(std::string("autonomy ") + to_string(c.autonomy));
    if (c.persistence != Persistence::Transient)
        body.push_back(std::string("persistence ") + to_string(c.persistence));
    if (!c.subordinate_to.empty()) body.push_back("subordinate_to " + c.subordinate_to);
    if (c.distributed) body.push_back("distributed");
    if (c.utility) body.push_back("utility");
    if (c.est_cost && *c.est_cost != 1.0)
        body.push_back("est_cost " + format_number(*c.est_cost));
    if (body.empty()) {
        w.line(head);
        return;
    }
    w.open(head);
    for (const auto& b : body) w.line(b);
    w.close();
}

inline void write_logical(Writer& w, const LogicalView& lv) {
    w.open("logical");
    if (!lv.rationale.empty()) w.line("rationale " + quote(lv.rationale));
    auto cats = sorted_by(lv.categories, [](const ClassCategory& c) { return c.id; });
    auto classes = sorted_by(lv.classes, [](const Class& c) { return c.id; });
    std::set<std::string> declared_cats;
    for (const auto* c : cats) declared_cats.insert(c->id);
    for (const auto* cat : cats) {
        std::vector<const Class*> members;
        for (const auto* c : classes)
            if (c->category == cat->id) members.push_back(c);
        if (members.empty()) {
            w.line("category " + cat->id + display_suffix(cat->id, cat->name));
            continue;
        }
        w.open("category " + cat->id + display_suffix(cat->id, cat->name));
        for (const auto* c : members) write_class(w, *c);
        w.close();
    }
    // Uncategorized here also covers dangling category refs; those models fail
    // resolve, which is this writer's precondition.
    for (const auto* c : classes)
        if (c->category.empty() || !declared_cats.count(c->category)) write_class(w, *c);
    if (!lv.relations.empty()) {
        w.open("relations");
        auto rels = sorted_by(lv.relations, [](const Relation& r) {
            return std::make_tuple(static_cast<int>(r.kind), r.from, r.to);
        });
        for (const auto* r : rels)
            w.line(std::string(to_string(r->kind)) + " " + r->from + " -> " + r->to);
        w.close();
    }
    w.close();
}

inline void write_process(Writer& w, const ProcessView& pv) {
    w.open("process");
    if (!pv.rationale.empty()) w.line("rationale " + quote(pv.rationale));
    auto procs = sorted_by(pv.processes, [](const Process& p) { return p.id; });
    for (const auto* p : procs) {
        std::string head = "process " + p->id + display_suffix(p->id, p->name);
        if (p->replicas != 1) head += " replicas " + std::to_string(p->replicas);
        w.open(head);
        auto tasks = sorted_by(p->tasks, [](const Task& t) { return t.id; });
        for (const auto* t : tasks) {
            std::string tl = "task " + t->id + display_suffix(t->id, t->name) + " " +
                             to_string(t->kind);
            if (t->period_ms) tl += " period " + format_number(*t->period_ms);
            w.line(tl);
        }
        w.close();
    }
    if (!pv.connectors.empty()) {
        w.open("connectors");
        auto conns = sorted_by(pv.connectors, [](const Connector& c) {
            return std::make_tuple(static_cast<int>(c.kind), c.from, c.to);
        });
        for (const auto* c : conns)
            w.line(std::string(to_string(c->kind)) + " " + c->from + " -> " + c->to);
        w.close();
    }
    w.close();
}

inline void write_development(Writer& w, const DevelopmentView& dv) {
    w.open("development");
    if (!dv.rationale.empty()) w.line("rationale " + quote(dv.rationale));
    auto layers = sorted_by(dv.layers, [](const LayerDef& l) { return l.number; });
    for (const auto* l : layers) {
        std::string ll = "layer " + std::to_string(l->number) + " " + quote(l->name);
        if (!l->responsibility.empty()) ll += " " + quote(l->responsibility);
        w.line(ll);
    }
    auto subs = sorted_by(dv.subsystems, [](const Subsystem& s) { return s.id; });
    for (const auto* s : subs) {
        std::string head = "subsystem " + s->id + display_suffix(s->id, s->name) + " layer " +
                           std::to_string(s->layer);
        std::vector<std::string> body;
        if (!s->modules.empty()) {
            std::vector<std::string> mods = s->modules;
            std::sort(mods.begin(), mods.end());
            body.push_back("modules " + join(mods));
        }
        if (s->ksloc) body.push_back("ksloc " + format_number(*s->ksloc));
        if (body.empty()) {
            w.line(head);
            continue;
        }
        w.open(head);
        for (const auto& b : body) w.line(b);
        w.close();
    }
    auto deps = sorted_by(dv.dependencies, [](const DevDependency& d) {
        return std::make_pair(d.from, d.to);
    });
    for (const auto* d : deps) w.line("depends " + d->from + " -> " + d->to);
    w.close();
}

inline void write_physical(Writer& w, const PhysicalView& ph) {
    w.open("physical");
    if (!ph.rationale.empty()) w.line("rationale " + quote(ph.rationale));
    auto nodes = sorted_by(ph.nodes, [](const Node& n) { return n.id; });
    for (const auto* n : nodes) {
        std::string nl = "node " + n->id + display_suffix(n->id, n->name);
        if (n->capacity) nl += " capacity " + format_number(*n->capacity);
        w.line(nl);
    }
    auto link_key = [](const Link& l) {
        std::vector<std::string> eps = l.endpoints;
        std::sort(eps.begin(), eps.end());
        return std::make_tuple(static_cast<int>(l.medium), join(eps));
    };
    auto links = sorted_by(ph.links, link_key);
    for (const auto* l : links) {
        std::vector<std::string> eps = l->endpoints;
        std::sort(eps.begin(), eps.end());
        std::string ll = std::string("link ") + to_string(l->medium) + " " + join(eps);
        if (l->bandwidth) ll += " bandwidth " + format_number(*l->bandwidth);
        w.line(ll);
    }
    auto cfgs = sorted_by(ph.configurations, [](const Configuration& c) { return c.name; });
    for (const auto* cfg : cfgs) {
        w.open("config " + cfg->name);
        auto places = sorted_by(cfg->placements, [](const Placement& p) { return p.process; });
        for (const auto* pl : places)
            w.line("place " + pl->process + " on " + join(pl->nodes));
        w.close();
    }
    w.close();
}

inline void write_scenarios(Writer& w, const ScenarioView& sv) {
    w.open("scenarios");
    auto scs = sorted_by(sv.scenarios, [](const Scenario& s) { return s.id; });
    for (const auto* sc : scs) {
        std::string head = "scenario " + sc->id + display_suffix(sc->id, sc->name);
        if (sc->frequency_hz) head += " freq " + format_number(*sc->frequency_hz);
        if (sc->steps.empty()) {
            w.line(head);
            continue;
        }
        w.open(head);
        for (const auto& st : sc->steps) {
            std::string sl = "step " + std::to_string(st.seq) + ": " + st.from + " -> " + st.to +
                             "." + st.operation;
            if (st.connector_hint) sl += std::string(" via ") + to_string(*st.connector_hint);
            w.line(sl);
        }
        w.close();
    }
    w.close();
}

} // namespace detail

/// Canonical text for a model: fixed section order, id-sorted entries, sorted
/// unordered inner lists, defaults omitted, 2-space indent, LF endings.
/// Order-bearing lists (task mappings, placement nodes, steps, layers) keep
/// their meaning: mappings and placements verbatim, steps by seq, layers by
/// number. Pure function; `parse(format(m))` reproduces `m` up to spans.
inline std::string format(const ArchitectureModel& m) {
    detail::Writer w;
    w.open("architecture " + m.name);
    if (!m.rationale.empty()) w.line("rationale " + quote(m.rationale));
    if (m.logical) detail::write_logical(w, *m.logical);
    if (m.process) detail::write_process(w, *m.process);
    if (m.development) detail::write_development(w, *m.development);
    if (m.physical) detail::write_physical(w, *m.physical);
    if (m.scenarios) detail::write_scenarios(w, *m.scenarios);
    if (!m.l2p.empty()) {
        w.open("map l2p");
        auto entries = detail::sorted_by(m.l2p, [](const L2PEntry& e) { return e.class_id; });
        for (const auto* e : entries)
            w.line("class " + e->class_id + " -> tasks " + detail::join(e->tasks));
        w.close();
    }
    if (!m.l2d.empty()) {
        w.open("map l2d");
        auto entries = detail::sorted_by(m.l2d, [](const L2DEntry& e) { return e.class_id; });
        for (const auto* e : entries) {
            auto mods = e->modules;
            std::sort(mods.begin(), mods.end());
            std::vector<std::string> rendered;
            rendered.reserve(mods.size());
            for (const auto& [sub, mod] : mods) rendered.push_back(sub + "." + mod);
            w.line("class " + e->class_id + " -> " + detail::join(rendered));
        }
        w.close();
    }
    w.close();
    return w.take();
}

/// Structural equality ignoring spans and declaration order, defined as
/// equality of canonical text. This is the identity the round-trip property
/// is stated in.
inline bool structurally_equal(const ArchitectureModel& a, const ArchitectureModel& b) {
    return format(a) == format(b);
}

} // namespace fourview
