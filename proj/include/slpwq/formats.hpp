#ifndef SLPWQ_FORMATS_HPP
#define SLPWQ_FORMATS_HPP

#include <cctype>
#include <sstream>

#include "slpwq/equation.hpp"
#include "slpwq/free_group.hpp"
#include "slpwq/ig.hpp"
#include "slpwq/product_pipeline.hpp"

namespace slpwq {
namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

inline std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

[[noreturn]] inline void parse_fail(long line, const std::string& msg) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg);
}

// Content lines with numbers; blank lines and '#' comments are skipped.
inline std::vector<std::pair<long, std::string>> content_lines(const std::string& text) {
    std::vector<std::pair<long, std::string>> out;
    std::istringstream is(text);
    std::string line;
    long no = 0;
    while (std::getline(is, line)) {
        ++no;
        std::size_t h = line.find('#');
        if (h != std::string::npos) line = line.substr(0, h);
        line = trim(line);
        if (!line.empty()) out.emplace_back(no, line);
    }
    return out;
}

inline bool is_var_name(const std::string& s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

inline void parse_alphabet_line(InvolutiveAlphabet& g, const std::string& rest, long no) {
    for (const std::string& tok : split_ws(rest)) {
        std::size_t slash = tok.find('/');
        if (slash == std::string::npos) {
            g.add_pair(tok, tok);  // lone letter: self-inverse
        } else {
            std::string a = tok.substr(0, slash), b = tok.substr(slash + 1);
            if (a.empty() || b.empty()) parse_fail(no, "bad letter pair '" + tok + "'");
            g.add_pair(a, b);
        }
    }
}

// A word from quoted content: split on whitespace when present, otherwise
// one letter per character.
inline Word parse_word(const InvolutiveAlphabet& g, const std::string& body, long no) {
    Word w;
    auto push = [&](const std::string& name) {
        try {
            w.push_back(g.id(name));
        } catch (const Error&) {
            parse_fail(no, "unknown letter '" + name + "'");
        }
    };
    if (body.find_first_of(" \t") != std::string::npos) {
        for (const std::string& t : split_ws(body)) push(t);
    } else {
        for (char c : body) push(std::string(1, c));
    }
    return w;
}

inline std::string quoted_body(const std::string& s, long no) {
    std::string t = trim(s);
    if (t.size() < 2 || t.front() != '"' || t.back() != '"')
        parse_fail(no, "expected a quoted word");
    return t.substr(1, t.size() - 2);
}

inline std::string print_word(const InvolutiveAlphabet& g, const Word& w) {
    bool single = true;
    for (Letter l = 0; l < static_cast<Letter>(g.size()); ++l)
        if (g.name(l).size() != 1) single = false;
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!single && i) out += ' ';
        out += g.name(w[i]);
    }
    return out;
}

inline std::string print_alphabet(const InvolutiveAlphabet& g) {
    std::string out = "alphabet";
    for (Letter l = 0; l < static_cast<Letter>(g.size()); ++l) {
        Letter b = g.bar(l);
        if (b < l) continue;
        out += ' ';
        out += g.name(l);
        if (b != l) out += "/" + g.name(b);
    }
    return out;
}

// Resolves `X` / `~X` against a variable set; `ensure` controls whether
// unknown names are added or rejected.
inline Symbol parse_symbol(VariableSet& vars, const std::string& tok, long no, bool ensure) {
    bool barred = !tok.empty() && tok[0] == '~';
    std::string name = barred ? tok.substr(1) : tok;
    if (!is_var_name(name)) parse_fail(no, "bad variable name '" + name + "'");
    int v;
    if (ensure) {
        v = vars.ensure(name);
    } else if (vars.has(name)) {
        v = vars.id(name);
    } else {
        parse_fail(no, "unknown variable '" + name + "'");
    }
    return barred ? bar(Symbol(v)) : Symbol(v);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SLP files: `alphabet a/A b`, then `X -> Y ~Z` | `X -> 'a'` | `X -> ''`.

inline Slp parse_slp(const std::string& text) {
    InvolutiveAlphabet g;
    struct Raw {
        long no;
        std::string lhs, rhs;
    };
    std::vector<Raw> raws;
    VariableSet vars;
    for (const auto& [no, line] : detail::content_lines(text)) {
        if (line.rfind("alphabet", 0) == 0) {
            detail::parse_alphabet_line(g, line.substr(8), no);
            continue;
        }
        std::size_t arrow = line.find("->");
        if (arrow == std::string::npos) detail::parse_fail(no, "expected 'X -> ...'");
        std::string lhs = detail::trim(line.substr(0, arrow));
        if (!detail::is_var_name(lhs)) detail::parse_fail(no, "bad variable name '" + lhs + "'");
        vars.add(lhs);
        raws.push_back(Raw{no, lhs, detail::trim(line.substr(arrow + 2))});
    }
    std::vector<Rule> rules;
    for (const Raw& r : raws) {
        if (!r.rhs.empty() && r.rhs.front() == '\'') {
            if (r.rhs.size() < 2 || r.rhs.back() != '\'')
                detail::parse_fail(r.no, "unterminated quote");
            std::string name = r.rhs.substr(1, r.rhs.size() - 2);
            if (name.empty()) {
                rules.push_back(Rule{Rule::Terminal, -1, 0, 0});
            } else {
                Letter l;
                try {
                    l = g.id(name);
                } catch (const Error&) {
                    detail::parse_fail(r.no, "unknown letter '" + name + "'");
                }
                rules.push_back(Rule{Rule::Terminal, l, 0, 0});
            }
            continue;
        }
        std::vector<std::string> toks = detail::split_ws(r.rhs);
        if (toks.size() != 2)
            detail::parse_fail(r.no, "expected two symbols or a quoted terminal");
        Symbol y = detail::parse_symbol(vars, toks[0], r.no, false);
        Symbol z = detail::parse_symbol(vars, toks[1], r.no, false);
        rules.push_back(Rule{Rule::Pair, -1, y, z});
    }
    return Slp(std::move(g), std::move(vars), std::move(rules));
}

inline std::string print_slp(const Slp& slp) {
    std::ostringstream os;
    os << detail::print_alphabet(slp.alphabet()) << '\n';
    const VariableSet& vars = slp.variables();
    for (int x = 1; x <= vars.count(); ++x) {
        const Rule& r = slp.rule(x);
        os << vars.name(x) << " -> ";
        if (r.kind == Rule::Terminal) {
            os << '\'' << (r.letter < 0 ? "" : slp.alphabet().name(r.letter)) << '\'';
        } else {
            os << vars.symbol_name(r.left) << ' ' << vars.symbol_name(r.right);
        }
        os << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Interval grammars: the SLP format plus sliced symbols `Y[3,7]`.

inline IntervalGrammar parse_ig(const std::string& text) {
    InvolutiveAlphabet g;
    struct Raw {
        long no;
        std::string rhs;
    };
    std::vector<Raw> raws;
    VariableSet vars;
    for (const auto& [no, line] : detail::content_lines(text)) {
        if (line.rfind("alphabet", 0) == 0) {
            detail::parse_alphabet_line(g, line.substr(8), no);
            continue;
        }
        std::size_t arrow = line.find("->");
        if (arrow == std::string::npos) detail::parse_fail(no, "expected 'X -> ...'");
        std::string lhs = detail::trim(line.substr(0, arrow));
        if (!detail::is_var_name(lhs)) detail::parse_fail(no, "bad variable name '" + lhs + "'");
        vars.add(lhs);
        raws.push_back(Raw{no, detail::trim(line.substr(arrow + 2))});
    }
    auto slice = [&](const std::string& tok, long no, Symbol& y, BigInt& a, BigInt& b) {
        std::size_t lb = tok.find('[');
        std::size_t comma = tok.find(',', lb);
        if (lb == std::string::npos || comma == std::string::npos || tok.back() != ']')
            detail::parse_fail(no, "expected 'Y[lo,hi]', got '" + tok + "'");
        y = detail::parse_symbol(vars, tok.substr(0, lb), no, false);
        try {
            a = BigInt(tok.substr(lb + 1, comma - lb - 1));
            b = BigInt(tok.substr(comma + 1, tok.size() - comma - 2));
        } catch (const std::exception&) {
            detail::parse_fail(no, "bad slice bounds in '" + tok + "'");
        }
    };
    std::vector<IgRule> rules;
    for (const Raw& r : raws) {
        if (!r.rhs.empty() && r.rhs.front() == '\'') {
            if (r.rhs.size() < 2 || r.rhs.back() != '\'')
                detail::parse_fail(r.no, "unterminated quote");
            std::string name = r.rhs.substr(1, r.rhs.size() - 2);
            if (name.empty()) {
                rules.push_back(IgRule::terminal(-1));
            } else {
                Letter l;
                try {
                    l = g.id(name);
                } catch (const Error&) {
                    detail::parse_fail(r.no, "unknown letter '" + name + "'");
                }
                rules.push_back(IgRule::terminal(l));
            }
            continue;
        }
        std::vector<std::string> toks = detail::split_ws(r.rhs);
        if (toks.size() == 1) {
            Symbol y;
            BigInt a, b;
            slice(toks[0], r.no, y, a, b);
            rules.push_back(IgRule::slice(y, a, b));
        } else if (toks.size() == 2) {
            Symbol y, z;
            BigInt a, b, c, d;
            slice(toks[0], r.no, y, a, b);
            slice(toks[1], r.no, z, c, d);
            rules.push_back(IgRule::slice_pair(y, a, b, z, c, d));
        } else {
            detail::parse_fail(r.no, "expected one or two sliced symbols or a terminal");
        }
    }
    return IntervalGrammar(std::move(g), std::move(vars), std::move(rules));
}

inline std::string print_ig(const IntervalGrammar& ig) {
    std::ostringstream os;
    os << detail::print_alphabet(ig.alphabet()) << '\n';
    const VariableSet& vars = ig.variables();
    auto slice = [&](Symbol y, const BigInt& a, const BigInt& b) {
        std::ostringstream s;
        s << vars.symbol_name(y) << '[' << a << ',' << b << ']';
        return s.str();
    };
    for (int x = 1; x <= vars.count(); ++x) {
        const IgRule& r = ig.rule(x);
        os << vars.name(x) << " -> ";
        switch (r.kind) {
            case IgRule::Terminal:
                os << '\'' << (r.letter < 0 ? "" : ig.alphabet().name(r.letter)) << '\'';
                break;
            case IgRule::Slice:
                os << slice(r.y, r.a, r.b);
                break;
            case IgRule::SlicePair:
                os << slice(r.y, r.a, r.b) << ' ' << slice(r.z, r.c, r.d);
                break;
        }
        os << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Word-equation systems: `alphabet ...`, `eq: X Y ~X = Z`, `const: A = "a"`;
// solutions: `X = "bcb..."`.

inline EquationSystem parse_equation_system(const std::string& text) {
    EquationSystem sys;
    for (const auto& [no, line] : detail::content_lines(text)) {
        if (line.rfind("alphabet", 0) == 0) {
            detail::parse_alphabet_line(sys.gamma, line.substr(8), no);
            continue;
        }
        if (line.rfind("eq:", 0) == 0) {
            std::vector<std::string> sides = detail::split_on(line.substr(3), '=');
            if (sides.size() != 2) detail::parse_fail(no, "expected one '=' in equation");
            Equation e;
            for (const std::string& t : detail::split_ws(sides[0]))
                e.lhs.push_back(detail::parse_symbol(sys.vars, t, no, true));
            for (const std::string& t : detail::split_ws(sides[1]))
                e.rhs.push_back(detail::parse_symbol(sys.vars, t, no, true));
            sys.equations.push_back(std::move(e));
            continue;
        }
        if (line.rfind("const:", 0) == 0) {
            std::vector<std::string> parts = detail::split_on(line.substr(6), '=');
            if (parts.size() != 2) detail::parse_fail(no, "expected 'const: X = \"...\"'");
            Symbol s = detail::parse_symbol(sys.vars, detail::trim(parts[0]), no, true);
            if (!positive(s)) detail::parse_fail(no, "constant for a barred variable");
            sys.constants[var_of(s)] =
                detail::parse_word(sys.gamma, detail::quoted_body(parts[1], no), no);
            continue;
        }
        detail::parse_fail(no, "expected 'alphabet', 'eq:' or 'const:'");
    }
    return sys;
}

inline std::string print_equation_system(const EquationSystem& sys) {
    std::ostringstream os;
    os << detail::print_alphabet(sys.gamma) << '\n';
    for (const Equation& e : sys.equations) {
        os << "eq:";
        for (Symbol s : e.lhs) os << ' ' << sys.vars.symbol_name(s);
        os << " =";
        for (Symbol s : e.rhs) os << ' ' << sys.vars.symbol_name(s);
        os << '\n';
    }
    for (const auto& [x, w] : sys.constants)
        os << "const: " << sys.vars.name(x) << " = \"" << detail::print_word(sys.gamma, w)
           << "\"\n";
    return os.str();
}

inline SolutionAssignment parse_solution(const EquationSystem& sys, const std::string& text) {
    SolutionAssignment sol;
    for (const auto& [no, line] : detail::content_lines(text)) {
        std::vector<std::string> parts = detail::split_on(line, '=');
        if (parts.size() != 2) detail::parse_fail(no, "expected 'X = \"...\"'");
        std::string name = detail::trim(parts[0]);
        if (!sys.vars.has(name)) detail::parse_fail(no, "unknown variable '" + name + "'");
        sol.sigma[sys.vars.id(name)] =
            detail::parse_word(sys.gamma, detail::quoted_body(parts[1], no), no);
    }
    return sol;
}

inline std::string print_solution(const EquationSystem& sys, const SolutionAssignment& sol) {
    std::ostringstream os;
    for (const auto& [x, w] : sol.sigma)
        os << sys.vars.name(x) << " = \"" << detail::print_word(sys.gamma, w) << "\"\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Endomorphism files: `alphabet ...`, then `alpha: a -> a b ; b -> b`.

inline EndomorphismTable parse_endomorphisms(const std::string& text) {
    InvolutiveAlphabet g;
    std::vector<std::pair<long, std::string>> lines = detail::content_lines(text);
    std::size_t i = 0;
    for (; i < lines.size() && lines[i].second.rfind("alphabet", 0) == 0; ++i)
        detail::parse_alphabet_line(g, lines[i].second.substr(8), lines[i].first);
    EndomorphismTable table(std::move(g));
    for (; i < lines.size(); ++i) {
        auto [no, line] = lines[i];
        std::size_t colon = line.find(':');
        if (colon == std::string::npos) detail::parse_fail(no, "expected 'name: a -> w ; ...'");
        std::string name = detail::trim(line.substr(0, colon));
        if (name.empty()) detail::parse_fail(no, "empty endomorphism name");
        for (const std::string& entry : detail::split_on(line.substr(colon + 1), ';')) {
            std::string e = detail::trim(entry);
            if (e.empty()) continue;
            std::size_t arrow = e.find("->");
            if (arrow == std::string::npos) detail::parse_fail(no, "expected 'a -> w'");
            std::string lhs = detail::trim(e.substr(0, arrow));
            Letter a;
            try {
                a = table.alphabet().id(lhs);
            } catch (const Error&) {
                detail::parse_fail(no, "unknown letter '" + lhs + "'");
            }
            Word img;
            for (const std::string& t : detail::split_ws(e.substr(arrow + 2))) {
                try {
                    img.push_back(table.alphabet().id(t));
                } catch (const Error&) {
                    detail::parse_fail(no, "unknown letter '" + t + "'");
                }
            }
            table.set_image(name, a, std::move(img));
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// Free-product systems.  Factors first, then equations and constraints:
//   factor x: Z^1
//   factor y: Z/6 + Z^2
//   eq: X Y = Z
//   parikh: X counts{x:2,y:1} ab{x:(3),y:(1,0,0)} first x last y
//   alph: X {x,y} first x last y
//   neq1: X            (X != 1)
//   neq2: X Y = Z      (inequality of two sides)
// Element tuples list free coordinates first, then torsion coordinates in
// declaration order.

namespace detail {

inline int parse_factor_ref(const FreeProductSpec& spec, const std::string& name, long no) {
    if (name == "1") return -1;
    try {
        return spec.index(name);
    } catch (const Error&) {
        parse_fail(no, "unknown factor '" + name + "'");
    }
}

inline Element parse_tuple(const FreeProductSpec& spec, int alpha, const std::string& body,
                           long no) {
    Element e;
    for (const std::string& t : split_on(body, ',')) {
        try {
            e.push_back(BigInt(trim(t)));
        } catch (const std::exception&) {
            parse_fail(no, "bad integer '" + trim(t) + "'");
        }
    }
    if (static_cast<int>(e.size()) != spec.factor(alpha).dims())
        parse_fail(no, "tuple arity does not match factor " + spec.name(alpha));
    return spec.normalize(alpha, std::move(e));
}

// `first x last y` (or `first 1 last 1`) from a token stream tail.
inline void parse_first_last(const FreeProductSpec& spec, const std::vector<std::string>& toks,
                             std::size_t at, long no, int& first, int& last) {
    if (at + 4 != toks.size() || toks[at] != "first" || toks[at + 2] != "last")
        parse_fail(no, "expected 'first <factor> last <factor>'");
    first = parse_factor_ref(spec, toks[at + 1], no);
    last = parse_factor_ref(spec, toks[at + 3], no);
}

}  // namespace detail

inline FSystem parse_fsystem(const std::string& text) {
    FSystem sys;
    for (const auto& [no, line] : detail::content_lines(text)) {
        if (line.rfind("factor", 0) == 0) {
            std::size_t colon = line.find(':');
            if (colon == std::string::npos) detail::parse_fail(no, "expected 'factor x: ...'");
            std::string name = detail::trim(line.substr(6, colon - 6));
            AbelianFactor f;
            for (const std::string& term : detail::split_on(line.substr(colon + 1), '+')) {
                std::string t = detail::trim(term);
                if (t == "Z") {
                    f.rank += 1;
                } else if (t.rfind("Z^", 0) == 0) {
                    int k = 0;
                    try {
                        k = std::stoi(t.substr(2));
                    } catch (const std::exception&) {
                        detail::parse_fail(no, "bad rank in '" + t + "'");
                    }
                    f.rank += k;
                } else if (t.rfind("Z/", 0) == 0) {
                    long d = 0;
                    try {
                        d = std::stol(t.substr(2));
                    } catch (const std::exception&) {
                        detail::parse_fail(no, "bad modulus in '" + t + "'");
                    }
                    f.torsion.push_back(d);
                } else {
                    detail::parse_fail(no, "expected 'Z', 'Z^k' or 'Z/d', got '" + t + "'");
                }
            }
            sys.spec.add_factor(name, std::move(f));
            continue;
        }
        if (line.rfind("eq:", 0) == 0) {
            std::vector<std::string> sides = detail::split_on(line.substr(3), '=');
            if (sides.size() != 2) detail::parse_fail(no, "expected one '=' in equation");
            Equation e;
            for (const std::string& t : detail::split_ws(sides[0]))
                e.lhs.push_back(detail::parse_symbol(sys.vars, t, no, true));
            for (const std::string& t : detail::split_ws(sides[1]))
                e.rhs.push_back(detail::parse_symbol(sys.vars, t, no, true));
            sys.equations.push_back(std::move(e));
            continue;
        }
        if (line.rfind("parikh:", 0) == 0) {
            std::vector<std::string> toks = detail::split_ws(line.substr(7));
            if (toks.size() < 3) detail::parse_fail(no, "expected variable and data");
            Symbol s = detail::parse_symbol(sys.vars, toks[0], no, true);
            ExtendedParikhImage pi;
            pi.counts.assign(sys.spec.size(), 0);
            for (std::size_t a = 0; a < sys.spec.size(); ++a)
                pi.abelian.push_back(sys.spec.identity(static_cast<int>(a)));
            std::size_t at = 1;
            auto braces = [&](const std::string& prefix) -> std::string {
                if (at >= toks.size() || toks[at].rfind(prefix + "{", 0) != 0 ||
                    toks[at].back() != '}')
                    detail::parse_fail(no, "expected '" + prefix + "{...}'");
                std::string body = toks[at].substr(prefix.size() + 1);
                body.pop_back();
                ++at;
                return body;
            };
            for (const std::string& entry : detail::split_on(braces("counts"), ',')) {
                std::string e = detail::trim(entry);
                if (e.empty()) continue;
                std::size_t c = e.find(':');
                if (c == std::string::npos) detail::parse_fail(no, "expected 'x:count'");
                int alpha = detail::parse_factor_ref(sys.spec, detail::trim(e.substr(0, c)), no);
                try {
                    pi.counts.at(alpha) = BigInt(detail::trim(e.substr(c + 1)));
                } catch (const std::exception&) {
                    detail::parse_fail(no, "bad count in '" + e + "'");
                }
            }
            std::string ab = braces("ab");
            // split on commas at paren depth zero
            std::vector<std::string> entries;
            std::string cur;
            int depth = 0;
            for (char c : ab) {
                if (c == '(') ++depth;
                if (c == ')') --depth;
                if (c == ',' && depth == 0) {
                    entries.push_back(cur);
                    cur.clear();
                } else {
                    cur += c;
                }
            }
            entries.push_back(cur);
            for (const std::string& entry : entries) {
                std::string e = detail::trim(entry);
                if (e.empty()) continue;
                std::size_t c = e.find(':');
                std::size_t lp = e.find('(', c);
                if (c == std::string::npos || lp == std::string::npos || e.back() != ')')
                    detail::parse_fail(no, "expected 'x:(v,...)'");
                int alpha = detail::parse_factor_ref(sys.spec, detail::trim(e.substr(0, c)), no);
                pi.abelian.at(alpha) = detail::parse_tuple(
                    sys.spec, alpha, e.substr(lp + 1, e.size() - lp - 2), no);
            }
            detail::parse_first_last(sys.spec, toks, at, no, pi.first, pi.last);
            sys.constraints.emplace_back(var_of(s), ParikhConstraint::exactly(std::move(pi)));
            continue;
        }
        if (line.rfind("alph:", 0) == 0) {
            std::vector<std::string> toks = detail::split_ws(line.substr(5));
            if (toks.size() < 2) detail::parse_fail(no, "expected variable and alphabet");
            Symbol s = detail::parse_symbol(sys.vars, toks[0], no, true);
            if (toks[1].front() != '{' || toks[1].back() != '}')
                detail::parse_fail(no, "expected '{x,y,...}'");
            std::set<int> alph;
            for (const std::string& t :
                 detail::split_on(toks[1].substr(1, toks[1].size() - 2), ',')) {
                std::string n = detail::trim(t);
                if (!n.empty()) alph.insert(detail::parse_factor_ref(sys.spec, n, no));
            }
            int first, last;
            detail::parse_first_last(sys.spec, toks, 2, no, first, last);
            sys.constraints.emplace_back(
                var_of(s), ParikhConstraint::alphabetic(std::move(alph), first, last));
            continue;
        }
        if (line.rfind("neq", 0) == 0) {
            std::size_t colon = line.find(':');
            if (colon == std::string::npos) detail::parse_fail(no, "expected 'neqN: ...'");
            std::string rest = line.substr(colon + 1);
            if (rest.find('=') != std::string::npos) {
                std::vector<std::string> sides = detail::split_on(rest, '=');
                if (sides.size() != 2) detail::parse_fail(no, "expected one '='");
                std::vector<Symbol> lhs, rhs;
                for (const std::string& t : detail::split_ws(sides[0]))
                    lhs.push_back(detail::parse_symbol(sys.vars, t, no, true));
                for (const std::string& t : detail::split_ws(sides[1]))
                    rhs.push_back(detail::parse_symbol(sys.vars, t, no, true));
                sys.add_inequality(std::move(lhs), std::move(rhs));
            } else {
                std::vector<std::string> toks = detail::split_ws(rest);
                if (toks.size() != 1) detail::parse_fail(no, "expected a single variable");
                Symbol s = detail::parse_symbol(sys.vars, toks[0], no, true);
                sys.constraints.emplace_back(var_of(s), ParikhConstraint::not_identity());
            }
            continue;
        }
        detail::parse_fail(no, "expected 'factor', 'eq:', 'parikh:', 'alph:' or 'neq...'");
    }
    return sys;
}

inline std::string print_delta_word(const FreeProductSpec& spec, const DeltaWord& w) {
    std::ostringstream os;
    for (const Block& b : w) {
        os << '(' << spec.name(b.alpha) << ':';
        for (std::size_t j = 0; j < b.g.size(); ++j) os << (j ? "," : "") << b.g[j];
        os << ')';
    }
    return os.str();
}

inline std::string print_parikh(const FreeProductSpec& spec, const ExtendedParikhImage& pi) {
    std::ostringstream os;
    os << "counts{";
    for (std::size_t a = 0; a < pi.counts.size(); ++a)
        os << (a ? "," : "") << spec.name(static_cast<int>(a)) << ':' << pi.counts[a];
    os << "} ab{";
    for (std::size_t a = 0; a < pi.abelian.size(); ++a) {
        os << (a ? "," : "") << spec.name(static_cast<int>(a)) << ":(";
        for (std::size_t j = 0; j < pi.abelian[a].size(); ++j)
            os << (j ? "," : "") << pi.abelian[a][j];
        os << ')';
    }
    os << "} first " << (pi.first < 0 ? std::string("1") : spec.name(pi.first)) << " last "
       << (pi.last < 0 ? std::string("1") : spec.name(pi.last));
    return os.str();
}

// Free-product solutions: `X = (x:2)(y:1,0,0)`, empty words as `X = 1`.
inline FSolution parse_fsolution(const FSystem& sys, const std::string& text) {
    FSolution sol;
    for (const auto& [no, line] : detail::content_lines(text)) {
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) detail::parse_fail(no, "expected 'X = (x:e)...'");
        std::string name = detail::trim(line.substr(0, eq));
        if (!sys.vars.has(name)) detail::parse_fail(no, "unknown variable '" + name + "'");
        std::string body = detail::trim(line.substr(eq + 1));
        DeltaWord w;
        if (body != "1") {
            std::size_t i = 0;
            while (i < body.size()) {
                if (body[i] != '(') detail::parse_fail(no, "expected '('");
                std::size_t close = body.find(')', i);
                if (close == std::string::npos) detail::parse_fail(no, "unterminated block");
                std::string blockbody = body.substr(i + 1, close - i - 1);
                std::size_t colon = blockbody.find(':');
                if (colon == std::string::npos) detail::parse_fail(no, "expected 'factor:tuple'");
                int alpha = detail::parse_factor_ref(sys.spec,
                                                     detail::trim(blockbody.substr(0, colon)), no);
                if (alpha < 0) detail::parse_fail(no, "'1' is not a factor");
                w.push_back(Block{
                    alpha, detail::parse_tuple(sys.spec, alpha, blockbody.substr(colon + 1), no)});
                i = close + 1;
                while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
            }
        }
        sol.sigma[sys.vars.id(name)] = std::move(w);
    }
    return sol;
}

inline std::string print_fsolution(const FSystem& sys, const FSolution& sol) {
    std::ostringstream os;
    for (const auto& [x, w] : sol.sigma) {
        os << sys.vars.name(x) << " = ";
        os << (w.empty() ? "1" : print_delta_word(sys.spec, w));
        os << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Certificates: an SLP over the product's generator alphabet plus binding
// lines `bind X = S`.

struct Certificate {
    Slp slp;
    std::map<int, Symbol> binding;
};

// An SLP plus `bind X = S` lines resolving against a foreign variable set.
inline Certificate parse_slp_with_binds(const VariableSet& vars, const std::string& text) {
    std::string slp_text;
    std::vector<std::pair<long, std::string>> binds;
    for (const auto& [no, line] : detail::content_lines(text)) {
        if (line.rfind("bind", 0) == 0 && line.size() > 4 &&
            std::isspace(static_cast<unsigned char>(line[4]))) {
            binds.emplace_back(no, line.substr(5));
        } else {
            slp_text += line + '\n';
        }
    }
    Certificate cert{parse_slp(slp_text), {}};
    VariableSet sysvars = vars;  // bindings may not add variables
    VariableSet slpvars = cert.slp.variables();
    for (auto& [no, body] : binds) {
        std::vector<std::string> parts = detail::split_on(body, '=');
        if (parts.size() != 2) detail::parse_fail(no, "expected 'bind X = S'");
        Symbol x = detail::parse_symbol(sysvars, detail::trim(parts[0]), no, false);
        if (!positive(x)) detail::parse_fail(no, "binding for a barred variable");
        Symbol s = detail::parse_symbol(slpvars, detail::trim(parts[1]), no, false);
        cert.binding[var_of(x)] = s;
    }
    return cert;
}

inline Certificate parse_certificate(const FSystem& sys, const std::string& text) {
    return parse_slp_with_binds(sys.vars, text);
}

inline std::string print_certificate(const FSystem& sys, const Slp& slp,
                                     const std::map<int, Symbol>& binding) {
    std::string out = print_slp(slp);
    for (const auto& [x, s] : binding)
        out += "bind " + sys.vars.name(x) + " = " + slp.variables().symbol_name(s) + "\n";
    return out;
}

}  // namespace slpwq

#endif
