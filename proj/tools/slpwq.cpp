#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "slpwq/factor.hpp"
#include "slpwq/formats.hpp"
#include "slpwq/queries.hpp"

using namespace slpwq;
using nlohmann::ordered_json;

namespace {

struct Options {
    bool json = false;
    std::uint64_t cap = kDefaultEvalCap;
    unsigned seed = 0;  // reserved for randomized self-test verbs
};

std::string read_input(const std::string& path) {
    std::ostringstream os;
    if (path == "-") {
        os << std::cin.rdbuf();
    } else {
        std::ifstream in(path);
        if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
        os << in.rdbuf();
    }
    return os.str();
}

Symbol symbol_arg(const VariableSet& vars, const std::string& tok) {
    bool barred = !tok.empty() && tok[0] == '~';
    std::string name = barred ? tok.substr(1) : tok;
    Symbol s = vars.id(name);
    return barred ? bar(s) : s;
}

BigInt bigint_arg(const std::string& s) {
    try {
        return BigInt(s);
    } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "bad integer '" + s + "'");
    }
}

// Milliseconds spent in `f`, alongside its result code.
template <typename F>
int timed(const Options& opt, const std::string& verb, F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    ordered_json result, diag;
    std::string text;
    int rc = f(result, diag, text);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    if (opt.json) {
        ordered_json j;
        j["verb"] = verb;
        j["result"] = result;
        diag["timings"] = ordered_json{{"total_ms", ms}};
        j["diagnostics"] = diag;
        std::cout << j.dump(2) << '\n';
    } else if (!text.empty()) {
        std::cout << text;
        if (text.back() != '\n') std::cout << '\n';
    }
    return rc;
}

std::string quoted(const InvolutiveAlphabet& g, const Word& w) {
    return "\"" + detail::print_word(g, w) + "\"";
}

std::string constraint_text(const FreeProductSpec& spec, const VariableSet& vars, int v,
                            const ParikhConstraint& c) {
    switch (c.kind) {
        case ParikhConstraint::Exact:
            return "parikh: " + vars.name(v) + " " + print_parikh(spec, c.exact);
        case ParikhConstraint::Alphabetic: {
            std::string out = "alph: " + vars.name(v) + " {";
            bool first = true;
            for (int a : c.alph) {
                if (!first) out += ",";
                out += spec.name(a);
                first = false;
            }
            out += "} first " + (c.first < 0 ? std::string("1") : spec.name(c.first)) +
                   " last " + (c.last < 0 ? std::string("1") : spec.name(c.last));
            return out;
        }
        case ParikhConstraint::NotIdentity:
            return "neq: " + vars.name(v);
    }
    return "";
}

// Variables reachable from the listed roots, rebuilt as a fresh grammar.
Slp prune_slp(const Slp& slp, const std::vector<int>& roots) {
    std::set<int> keep;
    std::vector<int> stack(roots.begin(), roots.end());
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        if (!keep.insert(x).second) continue;
        const Rule& r = slp.rule(x);
        if (r.kind == Rule::Pair) {
            stack.push_back(var_of(r.left));
            stack.push_back(var_of(r.right));
        }
    }
    VariableSet vars;
    std::map<int, int> remap;
    for (int x = 1; x <= slp.var_count(); ++x) {
        if (!keep.count(x)) continue;
        remap[x] = vars.add(slp.variables().name(x));
    }
    std::vector<Rule> rules;
    for (int x = 1; x <= slp.var_count(); ++x) {
        if (!keep.count(x)) continue;
        Rule r = slp.rule(x);
        if (r.kind == Rule::Pair) {
            r.left = positive(r.left) ? Symbol(remap.at(var_of(r.left)))
                                      : bar(Symbol(remap.at(var_of(r.left))));
            r.right = positive(r.right) ? Symbol(remap.at(var_of(r.right)))
                                        : bar(Symbol(remap.at(var_of(r.right))));
        }
        rules.push_back(r);
    }
    return Slp(slp.alphabet(), std::move(vars), std::move(rules));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"grammar-compressed string algebra toolkit"};
    app.require_subcommand(1);
    Options opt;
    app.add_flag("--json", opt.json, "emit machine-readable JSON");
    app.add_option("--cap", opt.cap, "decompression cap in letters");
    app.add_option("--seed", opt.seed, "seed for randomized self-test verbs");

    int rc = 0;
    auto sub = [&](const std::string& name, const std::string& desc) {
        CLI::App* s = app.add_subcommand(name, desc);
        s->fallthrough();
        return s;
    };

    // --- slp-core -----------------------------------------------------------
    {
        static std::string file, x;
        CLI::App* c = sub("eval", "decompress one variable");
        c->add_option("file", file)->required();
        c->add_option("symbol", x)->required();
        c->callback([&] {
            rc = timed(opt, "eval", [&](ordered_json& res, ordered_json& diag, std::string& out) {
                Slp slp = parse_slp(read_input(file));
                Symbol s = symbol_arg(slp.variables(), x);
                Word w = slp.eval(s, opt.cap);
                out = quoted(slp.alphabet(), w);
                res = detail::print_word(slp.alphabet(), w);
                diag["sizes"] = ordered_json{{"rules", slp.size()}, {"length", slp.length(s).str()}};
                return 0;
            });
        });
    }
    {
        static std::string file, x, lo, hi;
        CLI::App* c = sub("extract", "decompress a slice eval(X)[lo,hi]");
        c->add_option("file", file)->required();
        c->add_option("symbol", x)->required();
        c->add_option("lo", lo)->required();
        c->add_option("hi", hi)->required();
        c->callback([&] {
            rc = timed(opt, "extract", [&](ordered_json& res, ordered_json&, std::string& out) {
                Slp slp = parse_slp(read_input(file));
                Word w = slp.extract(symbol_arg(slp.variables(), x), bigint_arg(lo),
                                     bigint_arg(hi), opt.cap);
                out = quoted(slp.alphabet(), w);
                res = detail::print_word(slp.alphabet(), w);
                return 0;
            });
        });
    }
    {
        static std::string file, x, pattern;
        CLI::App* c = sub("factor", "does a literal word occur in eval(X)?");
        c->add_option("file", file)->required();
        c->add_option("symbol", x)->required();
        c->add_option("pattern", pattern)->required();
        c->callback([&] {
            rc = timed(opt, "factor", [&](ordered_json& res, ordered_json&, std::string& out) {
                Slp slp = parse_slp(read_input(file));
                Word p = detail::parse_word(slp.alphabet(), pattern, 0);
                bool yes = factor_occurs(slp, {p}).occurs(symbol_arg(slp.variables(), x), 0);
                res = yes;
                out = yes ? "true" : "false";
                return yes ? 0 : 1;
            });
        });
    }
    {
        static std::string file;
        static std::vector<std::string> roots;
        CLI::App* c = sub("prune", "drop variables unreachable from the roots");
        c->add_option("file", file)->required();
        c->add_option("roots", roots)->required();
        c->callback([&] {
            rc = timed(opt, "prune", [&](ordered_json& res, ordered_json& diag, std::string& out) {
                Slp slp = parse_slp(read_input(file));
                std::vector<int> ids;
                for (const std::string& r : roots) ids.push_back(slp.variables().id(r));
                Slp pruned = prune_slp(slp, ids);
                out = print_slp(pruned);
                res = out;
                diag["sizes"] =
                    ordered_json{{"before", slp.size()}, {"after", pruned.size()}};
                return 0;
            });
        });
    }
    {
        static std::string file;
        CLI::App* c = sub("stats", "sizes, heights and lengths of a grammar");
        c->add_option("file", file)->required();
        c->callback([&] {
            rc = timed(opt, "stats", [&](ordered_json& res, ordered_json&, std::string& out) {
                Slp slp = parse_slp(read_input(file));
                if (slp.var_count() == 0)
                    throw Error(ErrorCode::ParseError, "empty grammar: nothing to report");
                std::ostringstream os;
                os << "|Omega| = " << slp.var_count() << '\n';
                os << "size = " << slp.size() << '\n';
                ordered_json entries = ordered_json::array();
                std::vector<std::string> names;
                for (int x = 1; x <= slp.var_count(); ++x)
                    names.push_back(slp.variables().name(x));
                std::sort(names.begin(), names.end());
                for (const std::string& n : names) {
                    int x = slp.variables().id(n);
                    os << n << ": length " << slp.length(x) << " height " << slp.height(x)
                       << '\n';
                    entries.push_back(ordered_json{
                        {"name", n}, {"length", slp.length(x).str()}, {"height", slp.height(x)}});
                }
                out = os.str();
                res = ordered_json{{"variables", slp.var_count()},
                                   {"size", slp.size()},
                                   {"entries", entries}};
                return 0;
            });
        });
    }

    // --- interval grammars --------------------------------------------------
    {
        static std::string file;
        CLI::App* c = sub("ig2slp", "convert an interval grammar to an SLP");
        c->add_option("file", file)->required();
        c->callback([&] {
            rc = timed(opt, "ig2slp", [&](ordered_json& res, ordered_json& diag, std::string& out) {
                IntervalGrammar ig = parse_ig(read_input(file));
                IgConversion conv = ig_to_slp(ig);
                std::ostringstream os;
                os << print_slp(conv.slp);
                ordered_json full = ordered_json::object();
                for (int x = 1; x <= ig.var_count(); ++x) {
                    const std::string& n = ig.variables().name(x);
                    std::string target = conv.slp.variables().symbol_name(conv.of_full(x));
                    os << "# full " << n << " = " << target << '\n';
                    full[n] = target;
                }
                out = os.str();
                res = ordered_json{{"slp", print_slp(conv.slp)}, {"full", full}};
                diag["sizes"] = ordered_json{{"ig", ig.size()}, {"slp", conv.slp.size()}};
                return 0;
            });
        });
    }

    // --- compressed queries -------------------------------------------------
    {
        static std::string file, x, y;
        CLI::App* c = sub("eq", "are eval(X) and eval(Y) equal?");
        c->add_option("file", file)->required();
        c->add_option("x", x)->required();
        c->add_option("y", y)->required();
        c->callback([&] {
            rc = timed(opt, "eq", [&](ordered_json& res, ordered_json&, std::string& out) {
                Slp slp = parse_slp(read_input(file));
                bool yes = equal_eval(slp, symbol_arg(slp.variables(), x),
                                      symbol_arg(slp.variables(), y));
                res = yes;
                out = yes ? "true" : "false";
                return yes ? 0 : 1;
            });
        });
    }
    {
        static std::string file, x, y;
        CLI::App* c = sub("lcp", "longest common prefix length of eval(X), eval(Y)");
        c->add_option("file", file)->required();
        c->add_option("x", x)->required();
        c->add_option("y", y)->required();
        c->callback([&] {
            rc = timed(opt, "lcp", [&](ordered_json& res, ordered_json&, std::string& out) {
                Slp slp = parse_slp(read_input(file));
                BigInt n = longest_common_prefix(slp, symbol_arg(slp.variables(), x),
                                                 symbol_arg(slp.variables(), y));
                res = n.str();
                out = n.str();
                return 0;
            });
        });
    }
    {
        static std::string file, x, i, j, y, k, l;
        CLI::App* c = sub("ask", "interval question eval(X)[i,j] ?= eval(Y)[k,l]");
        c->add_option("file", file)->required();
        c->add_option("x", x)->required();
        c->add_option("i", i)->required();
        c->add_option("j", j)->required();
        c->add_option("y", y)->required();
        c->add_option("k", k)->required();
        c->add_option("l", l)->required();
        c->callback([&] {
            rc = timed(opt, "ask", [&](ordered_json& res, ordered_json&, std::string& out) {
                Slp slp = parse_slp(read_input(file));
                IntervalQuestion q{symbol_arg(slp.variables(), x), bigint_arg(i), bigint_arg(j),
                                   symbol_arg(slp.variables(), y), bigint_arg(k), bigint_arg(l)};
                bool yes = answer_interval_questions(slp, {q})[0];
                res = yes;
                out = yes ? "true" : "false";
                return yes ? 0 : 1;
            });
        });
    }

    // --- free groups --------------------------------------------------------
    {
        static std::string file;
        CLI::App* c = sub("reduce", "freely reduce every variable");
        c->add_option("file", file)->required();
        c->callback([&] {
            rc = timed(opt, "reduce", [&](ordered_json& res, ordered_json& diag, std::string& out) {
                Slp slp = parse_slp(read_input(file));
                ReducedSlp r = reduce_slp(slp);
                std::ostringstream os;
                os << print_slp(r.slp);
                ordered_json hats = ordered_json::object();
                for (int x = 1; x <= slp.var_count(); ++x) {
                    const std::string& n = slp.variables().name(x);
                    std::string target = r.slp.variables().symbol_name(r.hat_of(x));
                    os << "# hat " << n << " = " << target << '\n';
                    hats[n] = target;
                }
                out = os.str();
                res = ordered_json{{"slp", print_slp(r.slp)}, {"hat", hats}};
                diag["sizes"] = ordered_json{{"before", slp.size()}, {"after", r.slp.size()}};
                return 0;
            });
        });
    }
    {
        static std::string file, x, y;
        CLI::App* c = sub("cwp", "is X (or X Ybar) trivial in the free group?");
        c->add_option("file", file)->required();
        c->add_option("x", x)->required();
        c->add_option("y", y);
        c->callback([&] {
            rc = timed(opt, "cwp", [&](ordered_json& res, ordered_json&, std::string& out) {
                Slp slp = parse_slp(read_input(file));
                Symbol sx = symbol_arg(slp.variables(), x);
                bool yes;
                if (y.empty()) {
                    yes = compressed_word_problem(slp, sx);
                } else {
                    SlpBuilder b(slp);
                    Symbol t =
                        b.add_pair(b.fresh_name("Cwp"), sx, bar(symbol_arg(slp.variables(), y)));
                    yes = compressed_word_problem(b.finalize(), t);
                }
                res = yes;
                out = yes ? "true" : "false";
                return yes ? 0 : 1;
            });
        });
    }
    {
        static std::string file, letter;
        static std::vector<std::string> names;
        CLI::App* c = sub("endo-slp", "SLP for alpha_1...alpha_n applied to a letter");
        c->add_option("file", file)->required();
        c->add_option("letter", letter)->required();
        c->add_option("endos", names)->required();
        c->callback([&] {
            rc = timed(opt, "endo-slp", [&](ordered_json& res, ordered_json& diag,
                                            std::string& out) {
                EndomorphismTable table = parse_endomorphisms(read_input(file));
                EndoSlp es = schleimer_slp(table, names, table.alphabet().id(letter));
                std::ostringstream os;
                os << print_slp(es.slp);
                os << "# root = " << es.slp.variables().symbol_name(es.root) << '\n';
                out = os.str();
                res = ordered_json{{"slp", print_slp(es.slp)},
                                   {"root", es.slp.variables().symbol_name(es.root)}};
                diag["sizes"] = ordered_json{{"rules", es.slp.size()},
                                             {"length", es.slp.length(es.root).str()}};
                return 0;
            });
        });
    }
    {
        static std::string file, w1, w2;
        CLI::App* c = sub("endo-eq", "do two compositions agree as endomorphisms?");
        c->add_option("file", file)->required();
        c->add_option("word1", w1)->required();
        c->add_option("word2", w2)->required();
        c->callback([&] {
            rc = timed(opt, "endo-eq", [&](ordered_json& res, ordered_json&, std::string& out) {
                EndomorphismTable table = parse_endomorphisms(read_input(file));
                bool yes = endomorphism_word_problem(table, detail::split_ws(w1),
                                                     detail::split_ws(w2));
                res = yes;
                out = yes ? "true" : "false";
                return yes ? 0 : 1;
            });
        });
    }

    // --- word equations -----------------------------------------------------
    auto load_system = [](const std::string& sys_file, const std::string& sol_file) {
        EquationSystem sys = parse_equation_system(read_input(sys_file));
        SolutionAssignment sol = parse_solution(sys, read_input(sol_file));
        return std::make_pair(std::move(sys), std::move(sol));
    };
    {
        static std::string sys_file, sol_file;
        CLI::App* c = sub("verify", "does the assignment solve the system?");
        c->add_option("system", sys_file)->required();
        c->add_option("solution", sol_file)->required();
        c->callback([&] {
            rc = timed(opt, "verify", [&](ordered_json& res, ordered_json&, std::string& out) {
                auto [sys, sol] = load_system(sys_file, sol_file);
                bool yes = verify_solution(sys, sol);
                res = yes;
                out = yes ? "true" : "false";
                return yes ? 0 : 1;
            });
        });
    }
    {
        static std::string sys_file, slp_file;
        CLI::App* c = sub("verify-slp", "check a compressed solution (SLP + bind lines)");
        c->add_option("system", sys_file)->required();
        c->add_option("certificate", slp_file)->required();
        c->callback([&] {
            rc = timed(opt, "verify-slp", [&](ordered_json& res, ordered_json&, std::string& out) {
                EquationSystem sys = parse_equation_system(read_input(sys_file));
                Certificate cert = parse_slp_with_binds(sys.vars, read_input(slp_file));
                bool yes = verify_solution_compressed(sys, cert.slp, cert.binding);
                res = yes;
                out = yes ? "true" : "false";
                return yes ? 0 : 1;
            });
        });
    }
    {
        static std::string sys_file, sol_file;
        CLI::App* c = sub("cuts", "cut positions of a solved system");
        c->add_option("system", sys_file)->required();
        c->add_option("solution", sol_file)->required();
        c->callback([&] {
            rc = timed(opt, "cuts", [&](ordered_json& res, ordered_json& diag, std::string& out) {
                auto [sys, sol] = load_system(sys_file, sol_file);
                CutDecomposition dec = compute_cuts(sys, sol);
                maximal_free_intervals(dec);
                std::ostringstream os;
                ordered_json cuts = ordered_json::array();
                for (std::size_t e = 0; e < dec.cuts.size(); ++e) {
                    os << "equation " << e << ": cuts";
                    ordered_json arr = ordered_json::array();
                    for (long c2 : dec.cuts[e]) {
                        os << ' ' << c2;
                        arr.push_back(c2);
                    }
                    os << '\n';
                    cuts.push_back(arr);
                }
                os << "classes: " << dec.classes_up_to_involution << '\n';
                out = os.str();
                res = ordered_json{{"cuts", cuts},
                                   {"class_count", dec.classes_up_to_involution}};
                diag["class_count"] = dec.classes_up_to_involution;
                diag["sizes"] = ordered_json{{"d", dec.d}};
                return 0;
            });
        });
    }
    {
        static std::string sys_file, sol_file;
        CLI::App* c = sub("mfi", "maximal free intervals and their classes");
        c->add_option("system", sys_file)->required();
        c->add_option("solution", sol_file)->required();
        c->callback([&] {
            rc = timed(opt, "mfi", [&](ordered_json& res, ordered_json& diag, std::string& out) {
                auto [sys, sol] = load_system(sys_file, sol_file);
                CutDecomposition dec = compute_cuts(sys, sol);
                maximal_free_intervals(dec);
                std::ostringstream os;
                ordered_json eqs = ordered_json::array();
                for (std::size_t e = 0; e < dec.derived.size(); ++e) {
                    ordered_json atoms = ordered_json::array();
                    const auto& dd = dec.derived[e];
                    for (std::size_t a = 0; a + 1 < dd.size(); ++a) {
                        const std::string& cls = dec.tilde.name(dec.atom_letter[e][a]);
                        os << "equation " << e << ": atom [" << dd[a] << ',' << dd[a + 1]
                           << "] class " << cls << '\n';
                        atoms.push_back(ordered_json{
                            {"lo", dd[a]}, {"hi", dd[a + 1]}, {"class", cls}});
                    }
                    eqs.push_back(atoms);
                }
                os << "classes: " << dec.classes_up_to_involution << '\n';
                out = os.str();
                res = ordered_json{{"atoms", eqs},
                                   {"class_count", dec.classes_up_to_involution}};
                diag["class_count"] = dec.classes_up_to_involution;
                return 0;
            });
        });
    }
    {
        static std::string sys_file, sol_file;
        CLI::App* c = sub("generic", "generic solution over the interval alphabet");
        c->add_option("system", sys_file)->required();
        c->add_option("solution", sol_file)->required();
        c->callback([&] {
            rc = timed(opt, "generic", [&](ordered_json& res, ordered_json&, std::string& out) {
                auto [sys, sol] = load_system(sys_file, sol_file);
                CutDecomposition dec = compute_cuts(sys, sol);
                maximal_free_intervals(dec);
                GenericSolution gen = generic_solution(dec, sol);
                std::ostringstream os;
                os << detail::print_alphabet(gen.tilde) << '\n';
                ordered_json sigma = ordered_json::object();
                for (const auto& [x, w] : gen.sigma_tilde) {
                    os << sys.vars.name(x) << " = " << quoted(gen.tilde, w) << '\n';
                    sigma[sys.vars.name(x)] = detail::print_word(gen.tilde, w);
                }
                ordered_json omega = ordered_json::object();
                for (Letter l = 0; l < static_cast<Letter>(gen.tilde.size()); ++l) {
                    os << "# omega " << gen.tilde.name(l) << " = "
                       << quoted(sys.gamma, gen.omega[l]) << '\n';
                    omega[gen.tilde.name(l)] = detail::print_word(sys.gamma, gen.omega[l]);
                }
                out = os.str();
                res = ordered_json{{"sigma_tilde", sigma}, {"omega", omega}};
                return 0;
            });
        });
    }
    {
        static std::string sys_file, sol_file;
        CLI::App* c = sub("compress", "compress the generic solution into an SLP");
        c->add_option("system", sys_file)->required();
        c->add_option("solution", sol_file)->required();
        c->callback([&] {
            rc = timed(opt, "compress", [&](ordered_json& res, ordered_json& diag,
                                            std::string& out) {
                auto [sys, sol] = load_system(sys_file, sol_file);
                CutDecomposition dec = compute_cuts(sys, sol);
                maximal_free_intervals(dec);
                GenericSolution gen = generic_solution(dec, sol);
                CompressedGeneric comp = compress_generic(dec, gen);
                std::ostringstream os;
                os << print_slp(comp.slp);
                for (const auto& [v, cv] : comp.var_of_system)
                    os << "bind " << sys.vars.name(v) << " = "
                       << comp.slp.variables().name(cv) << '\n';
                out = os.str();
                res = out;
                diag["sizes"] = ordered_json{{"rules", comp.slp.size()}, {"d", dec.d}};
                return 0;
            });
        });
    }
    {
        static std::string sys_file, sol_file, donor_file;
        CLI::App* c = sub("subst", "substitute donor words for the interval classes");
        c->add_option("system", sys_file)->required();
        c->add_option("solution", sol_file)->required();
        c->add_option("donor", donor_file)->required();
        c->callback([&] {
            rc = timed(opt, "subst", [&](ordered_json& res, ordered_json& diag,
                                         std::string& out) {
                auto [sys, sol] = load_system(sys_file, sol_file);
                CutDecomposition dec = compute_cuts(sys, sol);
                maximal_free_intervals(dec);
                GenericSolution gen = generic_solution(dec, sol);
                CompressedGeneric comp = compress_generic(dec, gen);
                Slp donor = parse_slp(read_input(donor_file));
                std::map<Letter, Symbol> omega_prime;
                for (Letter l = 0; l < static_cast<Letter>(gen.tilde.size()); ++l) {
                    const std::string& n = gen.tilde.name(l);
                    if (donor.variables().has(n)) {
                        omega_prime[l] = donor.variables().id(n);
                    } else if (donor.variables().has(gen.tilde.name(gen.tilde.bar(l)))) {
                        omega_prime[l] =
                            bar(Symbol(donor.variables().id(gen.tilde.name(gen.tilde.bar(l)))));
                    } else {
                        throw Error(ErrorCode::MissingAssignment,
                                    "donor grammar has no variable for class " + n);
                    }
                }
                SubstitutionResult sub_res = substitute_intervals(comp.slp, donor, omega_prime);
                std::ostringstream os;
                os << print_slp(sub_res.slp);
                for (const auto& [v, cv] : comp.var_of_system)
                    os << "bind " << sys.vars.name(v) << " = "
                       << sub_res.slp.variables().symbol_name(sub_res.var_map.at(cv)) << '\n';
                out = os.str();
                res = out;
                diag["sizes"] = ordered_json{{"rules", sub_res.slp.size()}};
                return 0;
            });
        });
    }

    // --- free products ------------------------------------------------------
    {
        static std::string sys_file, file, var;
        static bool cert = false;
        CLI::App* c = sub("parikh", "extended Parikh images of a solution or certificate");
        c->add_option("system", sys_file)->required();
        c->add_option("file", file)->required();
        c->add_option("variable", var);
        c->add_flag("--cert", cert, "treat the file as a certificate (SLP + binds)");
        c->callback([&] {
            rc = timed(opt, "parikh", [&](ordered_json& res, ordered_json&, std::string& out) {
                FSystem sys = parse_fsystem(read_input(sys_file));
                std::ostringstream os;
                ordered_json images = ordered_json::object();
                auto emit = [&](int x, const ExtendedParikhImage& pi) {
                    std::string s = print_parikh(sys.spec, pi);
                    os << sys.vars.name(x) << ": " << s << '\n';
                    images[sys.vars.name(x)] = s;
                };
                if (cert) {
                    Certificate ct = parse_certificate(sys, read_input(file));
                    for (const auto& [x, s] : ct.binding)
                        if (var.empty() || sys.vars.name(x) == var)
                            emit(x, parikh_of_slp(sys.spec, ct.slp, s));
                } else {
                    FSolution sol = parse_fsolution(sys, read_input(file));
                    for (const auto& [x, w] : sol.sigma)
                        if (var.empty() || sys.vars.name(x) == var)
                            emit(x, parikh_of_word(sys.spec, w));
                }
                out = os.str();
                res = images;
                return 0;
            });
        });
    }
    {
        static std::vector<std::string> seq;
        CLI::App* c = sub("reorder", "rebuild a reduced index sequence into runs");
        c->add_option("letters", seq)->required();
        c->callback([&] {
            rc = timed(opt, "reorder", [&](ordered_json& res, ordered_json&, std::string& out) {
                std::vector<std::string> names;
                std::vector<int> w;
                for (const std::string& t : seq) {
                    auto it = std::find(names.begin(), names.end(), t);
                    if (it == names.end()) {
                        names.push_back(t);
                        w.push_back(static_cast<int>(names.size()) - 1);
                    } else {
                        w.push_back(static_cast<int>(it - names.begin()));
                    }
                }
                ReorderedWord r = reorder(w);
                std::ostringstream os;
                ordered_json runs = ordered_json::array();
                for (const IndexRun& run : r.runs) {
                    os << '(' << names[run.x] << ' ' << names[run.y] << ")^" << run.exp << ' ';
                    runs.push_back(ordered_json{
                        {"x", names[run.x]}, {"y", names[run.y]}, {"exp", run.exp}});
                }
                if (r.tail >= 0) os << names[r.tail];
                out = detail::trim(os.str());
                res = ordered_json{{"runs", runs},
                                   {"tail", r.tail >= 0 ? ordered_json(names[r.tail])
                                                        : ordered_json(nullptr)}};
                return 0;
            });
        });
    }
    auto load_fsystem = [](const std::string& sys_file, const std::string& sol_file) {
        FSystem sys = parse_fsystem(read_input(sys_file));
        FSolution sol = parse_fsolution(sys, read_input(sol_file));
        return std::make_pair(std::move(sys), std::move(sol));
    };
    {
        static std::string sys_file, sol_file;
        CLI::App* c = sub("split", "triangulate and split into string equations");
        c->add_option("system", sys_file)->required();
        c->add_option("solution", sol_file)->required();
        c->callback([&] {
            rc = timed(opt, "split", [&](ordered_json& res, ordered_json& diag, std::string& out) {
                auto [sys, sol] = load_fsystem(sys_file, sol_file);
                SplitSystem split = triangulate_and_split(sys, sol);
                std::ostringstream os;
                ordered_json letters = ordered_json::object();
                for (Letter l = 0; l < static_cast<Letter>(split.letter_block.size()); ++l) {
                    std::string v =
                        print_delta_word(split.spec, DeltaWord{split.letter_block[l]});
                    os << "# letter " << split.strings.gamma.name(l) << " = " << v << '\n';
                    letters[split.strings.gamma.name(l)] = v;
                }
                os << print_equation_system(split.strings);
                ordered_json cons = ordered_json::array();
                for (const auto& [v, con] : split.constraints) {
                    std::string t = constraint_text(split.spec, split.strings.vars, v, con);
                    os << "# " << t << '\n';
                    cons.push_back(t);
                }
                os << print_solution(split.strings, split.sigma);
                out = os.str();
                res = ordered_json{{"letters", letters},
                                   {"system", print_equation_system(split.strings)},
                                   {"constraints", cons},
                                   {"sigma", print_solution(split.strings, split.sigma)}};
                diag["sizes"] =
                    ordered_json{{"equations", split.strings.equations.size()},
                                 {"letters", split.letter_block.size()}};
                return 0;
            });
        });
    }
    for (auto [verb, desc, fn] :
         {std::tuple<const char*, const char*,
                     CompressedFSolution (*)(const FSystem&, const FSolution&)>{
              "compress-parikh", "compress a solution preserving Parikh images",
              compress_solution_parikh},
          {"compress-alph", "compress a solution exactly (alphabetic constraints)",
           compress_solution_alphabetic}}) {
        static std::map<std::string, std::pair<std::string, std::string>> args;
        auto& [sys_file, sol_file] = args[verb];
        CLI::App* c = sub(verb, desc);
        c->add_option("system", sys_file)->required();
        c->add_option("solution", sol_file)->required();
        std::string verb_name = verb;
        auto pipeline = fn;
        c->callback([&, verb_name, pipeline] {
            auto& [sf, lf] = args[verb_name];
            rc = timed(opt, verb_name, [&](ordered_json& res, ordered_json& diag,
                                           std::string& out) {
                auto [sys, sol] = load_fsystem(sf, lf);
                CompressedFSolution comp = pipeline(sys, sol);
                out = print_certificate(sys, comp.slp, comp.binding);
                res = out;
                diag["sizes"] = ordered_json{{"rules", comp.slp.size()}};
                return 0;
            });
        });
    }
    {
        static std::string sys_file, cert_file;
        CLI::App* c = sub("verify-cert", "check a compressed certificate deterministically");
        c->add_option("system", sys_file)->required();
        c->add_option("certificate", cert_file)->required();
        c->callback([&] {
            rc = timed(opt, "verify-cert", [&](ordered_json& res, ordered_json&,
                                               std::string& out) {
                FSystem sys = parse_fsystem(read_input(sys_file));
                Certificate cert = parse_certificate(sys, read_input(cert_file));
                bool yes = verify_certificate(sys, cert.slp, cert.binding);
                res = yes;
                out = yes ? "true" : "false";
                return yes ? 0 : 1;
            });
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return rc;
}
