#pragma once

#include <stdexcept>
#include <string>

#include "ndl/ast.hpp"

namespace ndl {

struct SyntaxError : std::runtime_error {
    int line, col;
    SyntaxError(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg + " at " + std::to_string(line_) + ":" +
                             std::to_string(col_)),
          line(line_), col(col_) {}
};

/// Parses operator text (comma-separated atoms, `#` line comments).
Program parse_operator(const std::string& text);

/// Canonical multi-line form: one atom per line, bodies indented,
/// atoms separated by trailing commas. parse(render(p)) == p.
std::string render(const Program& p);

/// Single-line form whose spelling matches grammar terminal
/// concatenation exactly.
std::string render_flat(const Program& p);

/// render() with "2.1"-style line numbers, for reports.
std::string render_numbered(const Program& p);

std::string render_ref(const Ref& r);
std::string render_atom_flat(const Atom& a);

} // namespace ndl
