#include "ndl/parser.hpp"

#include <cctype>
#include <map>

namespace ndl {

namespace {

struct Lexer {
    const std::string& src;
    size_t pos = 0;
    int line = 1, col = 1;

    explicit Lexer(const std::string& s) : src(s) {}

    void advance() {
        if (pos < src.size() && src[pos] == '\n') { ++line; col = 1; }
        else ++col;
        ++pos;
    }

    void skip_ws() {
        while (pos < src.size()) {
            char c = src[pos];
            if (c == '#') {
                while (pos < src.size() && src[pos] != '\n') advance();
            } else if (std::isspace((unsigned char)c)) {
                advance();
            } else {
                break;
            }
        }
    }

    bool eof() {
        skip_ws();
        return pos >= src.size();
    }

    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }

    void expect(char c) {
        skip_ws();
        if (pos >= src.size() || src[pos] != c)
            throw SyntaxError(std::string("expected '") + c + "'", line, col);
        advance();
    }

    bool accept(char c) {
        skip_ws();
        if (pos < src.size() && src[pos] == c) { advance(); return true; }
        return false;
    }

    std::string ident() {
        skip_ws();
        size_t start = pos;
        int l = line, c = col;
        while (pos < src.size() &&
               (std::isalnum((unsigned char)src[pos]) || src[pos] == '_'))
            advance();
        if (start == pos) throw SyntaxError("expected identifier", l, c);
        return src.substr(start, pos - start);
    }
};

const std::map<std::string, AtomKind> kKinds = {
    {"constraint", AtomKind::sel_constraint},
    {"variable", AtomKind::sel_variable},
    {"value", AtomKind::sel_value},
    {"constant", AtomKind::sel_constant},
    {"set", AtomKind::mod_set},
    {"swap", AtomKind::mod_swap},
    {"flip", AtomKind::mod_flip},
    {"is_satisfied", AtomKind::flt_is_satisfied},
    {"is_violated", AtomKind::flt_is_violated},
    {"eq", AtomKind::flt_eq},
    {"neq", AtomKind::flt_neq},
    {"lt", AtomKind::flt_lt},
    {"for_each", AtomKind::cmb_for_each},
    {"bfs_over", AtomKind::cmb_bfs_over},
    {"bfs_over_inverted", AtomKind::cmb_bfs_over_inverted},
    {"iterate", AtomKind::cmb_iterate},
    {"iterate_reversed", AtomKind::cmb_iterate_reversed},
};

bool parse_ref(const std::string& s, Ref& out) {
    size_t i = 0;
    int level = 0;
    while (i < s.size() && s[i] == 'L') { ++level; ++i; }
    if (i >= s.size()) return false;
    char k = s[i];
    if (k != 'T' && k != 'D' && k != 'I') return false;
    ++i;
    if (i >= s.size()) return false;
    int ord = 0;
    for (; i < s.size(); ++i) {
        if (!std::isdigit((unsigned char)s[i])) return false;
        ord = ord * 10 + (s[i] - '0');
    }
    out = Ref{k, ord, level};
    return true;
}

struct Parser {
    Lexer lx;
    explicit Parser(const std::string& s) : lx(s) {}

    Ref ref() {
        int l = lx.line, c = lx.col;
        std::string s = lx.ident();
        Ref r;
        if (!parse_ref(s, r))
            throw SyntaxError("expected ref, got '" + s + "'", l, c);
        return r;
    }

    Program program(bool parenthesized) {
        Program p;
        for (;;) {
            p.atoms.push_back(atom());
            if (lx.accept(',')) continue;
            break;
        }
        if (parenthesized) lx.expect(')');
        else if (!lx.eof())
            throw SyntaxError("trailing input", lx.line, lx.col);
        return p;
    }

    Atom atom() {
        lx.skip_ws();
        int l = lx.line, c = lx.col;
        std::string head = lx.ident();
        auto it = kKinds.find(head);
        if (it == kKinds.end())
            throw SyntaxError("unknown atom '" + head + "'", l, c);
        Atom a;
        a.kind = it->second;
        a.line = l;
        a.col = c;
        lx.expect('(');
        switch (a.kind) {
        case AtomKind::sel_constraint:
        case AtomKind::flt_is_satisfied:
        case AtomKind::flt_is_violated:
            a.name = lx.ident();
            lx.expect(',');
            a.args.push_back(ref());
            lx.expect(',');
            a.args.push_back(ref());
            lx.expect(')');
            break;
        case AtomKind::sel_constant:
            a.name = lx.ident();
            lx.expect(',');
            a.args.push_back(ref());
            lx.expect(')');
            break;
        case AtomKind::sel_variable:
        case AtomKind::sel_value:
        case AtomKind::mod_set:
        case AtomKind::mod_swap:
        case AtomKind::flt_eq:
        case AtomKind::flt_neq:
        case AtomKind::flt_lt:
            a.args.push_back(ref());
            lx.expect(',');
            a.args.push_back(ref());
            lx.expect(')');
            break;
        case AtomKind::mod_flip:
            a.args.push_back(ref());
            lx.expect(',');
            a.args.push_back(ref());
            lx.expect(',');
            a.args.push_back(ref());
            lx.expect(')');
            break;
        case AtomKind::cmb_for_each: {
            Atom s = atom();
            if (!is_selector(s.kind))
                throw SyntaxError("for_each needs a selector", s.line, s.col);
            a.sel.push_back(std::move(s));
            lx.expect(',');
            lx.expect('(');
            a.body = program(true);
            lx.expect(')');
            break;
        }
        case AtomKind::cmb_bfs_over:
        case AtomKind::cmb_bfs_over_inverted:
            a.name = lx.ident();
            lx.expect(',');
            a.args.push_back(ref());
            lx.expect(',');
            a.pair.push_back(ref());
            lx.expect('-');
            a.pair.push_back(ref());
            lx.expect(',');
            lx.expect('(');
            a.body = program(true);
            lx.expect(')');
            break;
        case AtomKind::cmb_iterate:
        case AtomKind::cmb_iterate_reversed:
            a.args.push_back(ref());
            lx.expect(',');
            a.pair.push_back(ref());
            lx.expect('-');
            a.pair.push_back(ref());
            lx.expect(',');
            lx.expect('(');
            a.body = program(true);
            lx.expect(')');
            break;
        }
        return a;
    }
};

void render_atom(const Atom& a, std::string& out, int indent, bool last);

void render_program(const Program& p, std::string& out, int indent) {
    for (size_t i = 0; i < p.atoms.size(); ++i)
        render_atom(p.atoms[i], out, indent, i + 1 == p.atoms.size());
}

std::string head_of(const Atom& a) {
    std::string s = atom_name(a.kind);
    s += '(';
    bool first = true;
    if (!a.name.empty()) { s += a.name; first = false; }
    for (auto& r : a.args) {
        if (!first) s += ", ";
        s += render_ref(r);
        first = false;
    }
    return s;
}

void render_atom(const Atom& a, std::string& out, int indent, bool last) {
    out.append(indent, ' ');
    if (!is_combinator(a.kind)) {
        out += render_atom_flat(a);
    } else if (a.kind == AtomKind::cmb_for_each) {
        out += "for_each(";
        out += render_atom_flat(a.sel[0]);
        out += ", (\n";
        render_program(a.body, out, indent + 4);
        out.append(indent, ' ');
        out += "))";
    } else {
        out += head_of(a);
        out += ", ";
        out += render_ref(a.pair[0]);
        out += '-';
        out += render_ref(a.pair[1]);
        out += ", (\n";
        render_program(a.body, out, indent + 4);
        out.append(indent, ' ');
        out += "))";
    }
    if (!last) out += ',';
    out += '\n';
}

void number_program(const Program& p, std::vector<int>& path, std::string& out,
                    int indent, int base);

void number_atom(const Atom& a, std::vector<int>& path, std::string& out,
                 int indent) {
    out += atom_path(path);
    out.append(2, ' ');
    out.append(indent, ' ');
    if (!is_combinator(a.kind)) {
        out += render_atom_flat(a);
        out += '\n';
        return;
    }
    if (a.kind == AtomKind::cmb_for_each) {
        out += "for_each(";
        out += render_atom_flat(a.sel[0]);
        out += ", (\n";
    } else {
        out += head_of(a);
        out += ", ";
        out += render_ref(a.pair[0]);
        out += '-';
        out += render_ref(a.pair[1]);
        out += ", (\n";
    }
    // a for_each selector holds body slot 1, so its body starts at 2
    number_program(a.body, path, out, indent + 4,
                   a.kind == AtomKind::cmb_for_each ? 1 : 0);
    out += atom_path(path);
    out.append(2, ' ');
    out.append(indent, ' ');
    out += "))\n";
}

void number_program(const Program& p, std::vector<int>& path, std::string& out,
                    int indent, int base) {
    for (size_t i = 0; i < p.atoms.size(); ++i) {
        path.push_back((int)i + base);
        number_atom(p.atoms[i], path, out, indent);
        path.pop_back();
    }
}

} // namespace

Program parse_operator(const std::string& text) {
    Parser p(text);
    if (p.lx.eof()) throw SyntaxError("empty program", 1, 1);
    return p.program(false);
}

std::string render_ref(const Ref& r) {
    std::string s;
    s.append(r.level, 'L');
    s += r.kind;
    s += std::to_string(r.ordinal);
    return s;
}

std::string render_atom_flat(const Atom& a) {
    if (!is_combinator(a.kind)) {
        std::string s = head_of(a);
        s += ')';
        return s;
    }
    std::string s;
    if (a.kind == AtomKind::cmb_for_each) {
        s = "for_each(";
        s += render_atom_flat(a.sel[0]);
    } else {
        s = head_of(a);
        s += ", ";
        s += render_ref(a.pair[0]);
        s += '-';
        s += render_ref(a.pair[1]);
    }
    s += ", (";
    for (size_t i = 0; i < a.body.atoms.size(); ++i) {
        if (i) s += ", ";
        s += render_atom_flat(a.body.atoms[i]);
    }
    s += "))";
    return s;
}

std::string render(const Program& p) {
    std::string out;
    render_program(p, out, 0);
    return out;
}

std::string render_flat(const Program& p) {
    std::string s;
    for (size_t i = 0; i < p.atoms.size(); ++i) {
        if (i) s += ", ";
        s += render_atom_flat(p.atoms[i]);
    }
    return s;
}

std::string render_numbered(const Program& p) {
    std::string out;
    std::vector<int> path;
    number_program(p, path, out, 0, 0);
    return out;
}

} // namespace ndl
