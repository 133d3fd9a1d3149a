#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <string>
#include <tuple>
#include <vector>

namespace fourview {

/// Shortest decimal text that parses back to exactly this double
/// ("200", "2.5", "1e+30"). Used everywhere a number reaches output so
/// documents and reports are byte-stable.
inline std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), p);
}

/// 1-based position of a declaration in a `.arch` document. A default
/// span (line 0) means "no source location" (programmatically built model).
struct SourceSpan {
    std::string file;
    int line = 0;
    int column = 0;

    bool valid() const { return line > 0; }
};

enum class Severity { Error, Warning, Info };

inline const char* to_string(Severity s) {
    switch (s) {
        case Severity::Error: return "error";
        case Severity::Warning: return "warning";
        case Severity::Info: return "info";
    }
    return "error";
}

/// One finding. `rule` is an id from the published catalog (docs/rules.md):
/// parse/resolve codes (E_PARSE, E_ENUM, E_DUP, E_REF, E_MODEL), the view
/// rules (D*, P*, M*, PH*, S*, L*, T*), and the load-estimation notes (SIM*).
struct Diagnostic {
    Severity severity = Severity::Error;
    std::string rule;
    std::string message;
    SourceSpan where;
};

inline bool diagnostic_before(const Diagnostic& a, const Diagnostic& b) {
    return std::tie(a.where.file, a.where.line, a.where.column, a.rule, a.message) <
           std::tie(b.where.file, b.where.line, b.where.column, b.rule, b.message);
}

/// Canonical ordering: location, then rule id (message as final tie-break).
inline void sort_diagnostics(std::vector<Diagnostic>& diags) {
    std::stable_sort(diags.begin(), diags.end(), diagnostic_before);
}

inline bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

/// Compiler-style rendering: `file:line:col: severity RULE: message`.
/// Diagnostics without a location drop the position prefix.
inline std::string format_diagnostic(const Diagnostic& d) {
    std::string out;
    if (d.where.valid()) {
        out += d.where.file;
        out += ':';
        out += std::to_string(d.where.line);
        out += ':';
        out += std::to_string(d.where.column);
        out += ": ";
    }
    out += to_string(d.severity);
    out += ' ';
    out += d.rule;
    out += ": ";
    out += d.message;
    return out;
}

/// Thrown by operations whose contract names an error code
/// (E_NOSCENARIO, E_NOCONFIG, E_UNCHECKED, E_NOVIEW, E_NOSTIMULI, ...).
class OpError : public std::exception {
  public:
    OpError(std::string code, std::string message)
        : code_(std::move(code)), message_(std::move(message)),
          what_(code_ + ": " + message_) {}

    const std::string& code() const { return code_; }
    const std::string& message() const { return message_; }
    const char* what() const noexcept override { return what_.c_str(); }

  private:
    std::string code_;
    std::string message_;
    std::string what_;
};

} // namespace fourview
