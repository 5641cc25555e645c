#ifndef SLPWQ_EQUATION_HPP
#define SLPWQ_EQUATION_HPP

#include <deque>
#include <functional>
#include <map>
#include <set>

#include "slpwq/build.hpp"
#include "slpwq/ig.hpp"
#include "slpwq/queries.hpp"

namespace slpwq {

// One equation L = R, both sides words over the variables.
struct Equation {
    std::vector<Symbol> lhs, rhs;
};

// A system of word equations with constant constraints.  Richer constraint
// kinds (Parikh, alphabetic) live with the free-product machinery; here a
// constraint is either X = constant word or a caller-supplied membership
// test on sigma(X).
struct EquationSystem {
    InvolutiveAlphabet gamma;
    VariableSet vars;
    std::vector<Equation> equations;
    std::map<int, Word> constants;
    std::vector<std::pair<int, std::function<bool(const Word&)>>> memberships;

    // Denotational length d = sum |L_i R_i|.
    long denotational_length() const {
        long d = 0;
        for (const auto& e : equations)
            d += static_cast<long>(e.lhs.size() + e.rhs.size());
        return d;
    }

    // Constrained variables that occur in no equation.
    std::vector<int> unanchored_constraints() const {
        std::set<int> seen;
        for (const auto& e : equations) {
            for (Symbol s : e.lhs) seen.insert(var_of(s));
            for (Symbol s : e.rhs) seen.insert(var_of(s));
        }
        std::vector<int> out;
        for (const auto& [x, w] : constants)
            if (!seen.count(x)) out.push_back(x);
        for (const auto& [x, f] : memberships)
            if (!seen.count(x)) out.push_back(x);
        return out;
    }
};

// sigma on the positive variables; the image of a barred variable is derived
// by involution.
struct SolutionAssignment {
    std::map<int, Word> sigma;

    const Word& of(int x) const {
        auto it = sigma.find(x);
        if (it == sigma.end())
            throw Error(ErrorCode::MissingAssignment,
                        "no assignment for variable #" + std::to_string(x));
        return it->second;
    }

    Word of_symbol(const InvolutiveAlphabet& g, Symbol s) const {
        const Word& w = of(var_of(s));
        return positive(s) ? w : g.involution(w);
    }

    Word apply(const InvolutiveAlphabet& g, const std::vector<Symbol>& side) const {
        Word out;
        for (Symbol s : side) {
            Word part = of_symbol(g, s);
            out.insert(out.end(), part.begin(), part.end());
        }
        return out;
    }
};

inline bool verify_solution(const EquationSystem& sys, const SolutionAssignment& sol) {
    for (const auto& e : sys.equations)
        if (sol.apply(sys.gamma, e.lhs) != sol.apply(sys.gamma, e.rhs)) return false;
    for (const auto& [x, w] : sys.constants)
        if (sol.of(x) != w) return false;
    for (const auto& [x, f] : sys.memberships)
        if (!f(sol.of(x))) return false;
    return true;
}

// Verifies an SLP-compressed assignment without decompressing the equation
// sides.  `binding` maps each positive variable to a symbol of `slp`.
inline bool verify_solution_compressed(const EquationSystem& sys, const Slp& slp,
                                       const std::map<int, Symbol>& binding) {
    auto bound = [&](Symbol s) {
        auto it = binding.find(var_of(s));
        if (it == binding.end())
            throw Error(ErrorCode::MissingAssignment,
                        "no binding for variable " + sys.vars.name(var_of(s)));
        return positive(s) ? it->second : bar(it->second);
    };
    SlpBuilder b(slp);
    std::vector<std::pair<Symbol, Symbol>> checks;
    for (const auto& e : sys.equations) {
        std::vector<Symbol> l, r;
        for (Symbol s : e.lhs) l.push_back(bound(s));
        for (Symbol s : e.rhs) r.push_back(bound(s));
        checks.emplace_back(concat_symbols(b, l, "Lhs"), concat_symbols(b, r, "Rhs"));
    }
    for (const auto& [x, w] : sys.constants)
        checks.emplace_back(bound(x), word_symbol(b, w, "Cst"));
    Slp s = b.finalize();
    for (auto [lhs, rhs] : checks)
        if (!equal_eval(s, lhs, rhs)) return false;
    for (const auto& [x, f] : sys.memberships)
        if (!f(s.eval(bound(x)))) return false;
    return true;
}

// One occurrence of a variable (possibly barred) in an equation word:
// sigma(sym) spans positions [l, r] of words[eq].
struct Occurrence {
    int eq;
    Symbol sym;
    long l, r;
};

// Cut analysis of a solved system.  compute_cuts fills words, occurrences
// and cuts; maximal_free_intervals fills the derived cuts, the atoms
// (intervals between consecutive derived cuts) and their classes, which
// become the letters of the interval alphabet.
struct CutDecomposition {
    EquationSystem system;
    std::vector<Word> words;
    std::vector<std::vector<Occurrence>> occurrences;
    std::vector<std::set<long>> cuts;
    long d = 0;

    bool analyzed = false;
    std::vector<std::vector<long>> derived;        // sorted, per equation
    std::vector<std::vector<Letter>> atom_letter;  // per equation, per atom
    InvolutiveAlphabet tilde;                      // interval alphabet
    std::vector<Word> class_word;                  // per tilde letter
    int classes_up_to_involution = 0;

    // Atom index of a derived-cut position.
    long atom_index(int eq, long pos) const {
        const auto& dd = derived.at(eq);
        auto it = std::lower_bound(dd.begin(), dd.end(), pos);
        if (it == dd.end() || *it != pos)
            throw Error(ErrorCode::InternalInvariantViolation, "position is not a derived cut");
        return it - dd.begin();
    }
};

inline CutDecomposition compute_cuts(const EquationSystem& sys, const SolutionAssignment& sol) {
    if (!verify_solution(sys, sol))
        throw Error(ErrorCode::NotASolution, "assignment does not solve the system");
    CutDecomposition dec;
    dec.system = sys;
    dec.d = sys.denotational_length();
    for (std::size_t e = 0; e < sys.equations.size(); ++e) {
        const Equation& eq = sys.equations[e];
        Word w = sol.apply(sys.gamma, eq.lhs);
        long m = static_cast<long>(w.size());
        std::vector<Occurrence> occ;
        std::set<long> cc{0, m};
        for (const auto* side : {&eq.lhs, &eq.rhs}) {
            long pos = 0;
            for (Symbol s : *side) {
                long len = static_cast<long>(sol.of(var_of(s)).size());
                occ.push_back(Occurrence{static_cast<int>(e), s, pos, pos + len});
                cc.insert(pos);
                cc.insert(pos + len);
                pos += len;
            }
        }
        dec.words.push_back(std::move(w));
        dec.occurrences.push_back(std::move(occ));
        dec.cuts.push_back(std::move(cc));
    }
    return dec;
}

namespace detail {

// Union-find with an orientation parity on each edge; a parity conflict
// within one set marks the class as self-inverse (equal to its own
// involution), which is legitimate.
class ParityUnionFind {
public:
    explicit ParityUnionFind(std::size_t n) : parent_(n), parity_(n, 0), self_inv_(n, false) {
        for (std::size_t i = 0; i < n; ++i) parent_[i] = i;
    }

    std::pair<std::size_t, int> find(std::size_t a) {
        int p = 0;
        while (parent_[a] != a) {
            p ^= parity_[a];
            a = parent_[a];
        }
        return {a, p};
    }

    void unite(std::size_t a, std::size_t b, int parity) {
        auto [ra, pa] = find(a);
        auto [rb, pb] = find(b);
        if (ra == rb) {
            if ((pa ^ pb) != parity) self_inv_[ra] = true;
            return;
        }
        parent_[ra] = rb;
        parity_[ra] = pa ^ pb ^ parity;
        if (self_inv_[ra]) self_inv_[rb] = true;
    }

    bool self_inverse(std::size_t a) { return self_inv_[find(a).first]; }

private:
    std::vector<std::size_t> parent_;
    std::vector<int> parity_;
    std::vector<bool> self_inv_;
};

}  // namespace detail

// Closes the cuts under the occurrence transport maps, forms the atoms, and
// classifies them up to the interval equivalence (with orientation).
inline void maximal_free_intervals(CutDecomposition& dec) {
    const auto& occs = dec.occurrences;
    std::map<int, std::vector<const Occurrence*>> by_var;
    for (const auto& eq_occs : occs)
        for (const auto& o : eq_occs) by_var[var_of(o.sym)].push_back(&o);

    // Least fixpoint of the derived-cut set.
    std::vector<std::set<long>> dd(dec.cuts.begin(), dec.cuts.end());
    std::deque<std::pair<int, long>> work;
    for (std::size_t e = 0; e < dd.size(); ++e)
        for (long p : dd[e]) work.emplace_back(static_cast<int>(e), p);
    while (!work.empty()) {
        auto [e, p] = work.front();
        work.pop_front();
        for (const Occurrence& o1 : occs[e]) {
            if (!(o1.l < p && p < o1.r)) continue;
            long off = p - o1.l;
            for (const Occurrence* o2 : by_var.at(var_of(o1.sym))) {
                long q;
                if (o1.sym == o2->sym)
                    q = o2->l + off;
                else
                    q = o2->r - off;
                if (dd[o2->eq].insert(q).second) work.emplace_back(o2->eq, q);
            }
        }
    }
    dec.derived.clear();
    for (auto& s : dd) dec.derived.emplace_back(s.begin(), s.end());

    // Atoms, globally indexed.
    std::vector<std::size_t> base(dec.words.size() + 1, 0);
    for (std::size_t e = 0; e < dec.words.size(); ++e)
        base[e + 1] = base[e] + (dec.derived[e].size() > 1 ? dec.derived[e].size() - 1 : 0);
    std::size_t total = base.back();
    detail::ParityUnionFind uf(total);

    auto span = [&](const Occurrence& o) {
        return std::pair<long, long>{dec.atom_index(o.eq, o.l), dec.atom_index(o.eq, o.r)};
    };
    for (auto& [v, list] : by_var) {
        for (std::size_t i = 0; i < list.size(); ++i) {
            for (std::size_t j = i + 1; j < list.size(); ++j) {
                const Occurrence &o1 = *list[i], &o2 = *list[j];
                auto [l1, r1] = span(o1);
                auto [l2, r2] = span(o2);
                if (r1 - l1 != r2 - l2)
                    throw Error(ErrorCode::InternalInvariantViolation,
                                "occurrence spans disagree in atom count");
                bool flip = (o1.sym != o2.sym);
                for (long t = 0; t < r1 - l1; ++t) {
                    std::size_t a = base[o1.eq] + static_cast<std::size_t>(l1 + t);
                    std::size_t b = flip ? base[o2.eq] + static_cast<std::size_t>(r2 - 1 - t)
                                         : base[o2.eq] + static_cast<std::size_t>(l2 + t);
                    uf.unite(a, b, flip ? 1 : 0);
                }
            }
        }
    }

    // Interval alphabet: one letter (plus its bar) per class, deterministic
    // by first atom in (equation, position) order.
    auto atom_word = [&](std::size_t e, long k) {
        const Word& w = dec.words[e];
        return Word(w.begin() + dec.derived[e][k], w.begin() + dec.derived[e][k + 1]);
    };
    dec.tilde = InvolutiveAlphabet();
    dec.class_word.clear();
    std::map<std::size_t, std::pair<Letter, int>> rep;  // root -> (letter, root parity of rep)
    dec.atom_letter.assign(dec.words.size(), {});
    int next = 0;
    for (std::size_t e = 0; e < dec.words.size(); ++e) {
        long atoms = dec.derived[e].size() > 1 ? static_cast<long>(dec.derived[e].size()) - 1 : 0;
        for (long k = 0; k < atoms; ++k) {
            std::size_t id = base[e] + static_cast<std::size_t>(k);
            auto [root, par] = uf.find(id);
            Word w = atom_word(e, k);
            auto it = rep.find(root);
            if (it == rep.end()) {
                std::string n = std::to_string(next++);
                Letter l;
                if (uf.self_inverse(id)) {
                    if (w != dec.system.gamma.involution(w))
                        throw Error(ErrorCode::InternalInvariantViolation,
                                    "self-inverse class with asymmetric word");
                    dec.tilde.add_pair("p" + n, "p" + n);
                    l = dec.tilde.id("p" + n);
                    dec.class_word.push_back(w);
                } else {
                    dec.tilde.add_pair("q" + n, "Q" + n);
                    l = dec.tilde.id("q" + n);
                    dec.class_word.push_back(w);
                    dec.class_word.push_back(dec.system.gamma.involution(w));
                }
                rep.emplace(root, std::make_pair(l, par));
                it = rep.find(root);
            }
            Letter l = (par == it->second.second) ? it->second.first
                                                  : dec.tilde.bar(it->second.first);
            if (dec.class_word[l] != w)
                throw Error(ErrorCode::InternalInvariantViolation,
                            "class members evaluate to different words");
            dec.atom_letter[e].push_back(l);
        }
    }
    dec.classes_up_to_involution = static_cast<int>(rep.size());
    if (total > 0 && static_cast<long>(dec.tilde.size()) > 2 * dec.d - 2)
        throw Error(ErrorCode::InternalInvariantViolation,
                    "interval alphabet exceeds the 2d-2 bound");
    dec.analyzed = true;
}

// The factorization of the solution through the interval alphabet:
// sigma = omega . sigma_tilde.
struct GenericSolution {
    InvolutiveAlphabet tilde;
    std::map<int, Word> sigma_tilde;  // positive system variable -> tilde word
    std::vector<Word> omega;          // tilde letter -> original word
};

inline GenericSolution generic_solution(const CutDecomposition& dec,
                                        const SolutionAssignment& sol) {
    if (!dec.analyzed)
        throw Error(ErrorCode::PreconditionViolated, "classes not computed");
    GenericSolution g;
    g.tilde = dec.tilde;
    g.omega = dec.class_word;
    for (std::size_t e = 0; e < dec.occurrences.size(); ++e) {
        for (const Occurrence& o : dec.occurrences[e]) {
            int x = var_of(o.sym);
            if (g.sigma_tilde.count(x)) continue;
            long a = dec.atom_index(o.eq, o.l);
            long b = dec.atom_index(o.eq, o.r);
            Word w(dec.atom_letter[e].begin() + a, dec.atom_letter[e].begin() + b);
            g.sigma_tilde[x] = positive(o.sym) ? w : dec.tilde.involution(w);
        }
    }
    (void)sol;
    return g;
}

// compress_generic output: an SLP over the interval alphabet with one
// variable per system variable.
struct CompressedGeneric {
    Slp slp;
    std::map<int, int> var_of_system;  // system variable id -> slp variable id
};

namespace detail {

// Builder for the window grammar: variables C_{gamma,lambda} per original
// cut and scale, eval(C) = generic word [gamma - 2^lambda, gamma + 2^lambda]
// clamped, assembled as an interval grammar and converted to an SLP.
class GenericCompressor {
public:
    explicit GenericCompressor(const CutDecomposition& dec) : dec_(dec) {
        if (!dec.analyzed)
            throw Error(ErrorCode::PreconditionViolated, "classes not computed");
    }

    CompressedGeneric run() {
        std::size_t eqs = dec_.words.size();
        cut_atoms_.resize(eqs);
        lmax_.resize(eqs);
        for (std::size_t e = 0; e < eqs; ++e) {
            long m = atoms(e);
            for (long c : dec_.cuts[e]) cut_atoms_[e].push_back(dec_.atom_index(e, c));
            std::sort(cut_atoms_[e].begin(), cut_atoms_[e].end());
            cut_atoms_[e].erase(std::unique(cut_atoms_[e].begin(), cut_atoms_[e].end()),
                                cut_atoms_[e].end());
            int l = 0;
            while ((1L << (l + 1)) < 2 * m) ++l;  // largest l with 2^l < 2m (m >= 1)
            lmax_[e] = (m >= 1) ? l : -1;
        }
        // C variables, scales bottom-up.
        for (std::size_t e = 0; e < eqs; ++e)
            for (int l = 0; l <= lmax_[e]; ++l)
                for (long g : cut_atoms_[e]) declare_window(static_cast<int>(e), g, l);
        for (std::size_t e = 0; e < eqs; ++e)
            for (int l = 0; l <= lmax_[e]; ++l)
                for (long g : cut_atoms_[e]) define_window(static_cast<int>(e), g, l);
        // One variable per system variable, attached at its first occurrence.
        std::map<int, int> xvar;
        for (std::size_t e = 0; e < eqs; ++e) {
            for (const Occurrence& o : dec_.occurrences[e]) {
                int x = var_of(o.sym);
                if (xvar.count(x)) continue;
                long a = dec_.atom_index(o.eq, o.l);
                long b = dec_.atom_index(o.eq, o.r);
                int var = vars_.add(dec_.system.vars.name(x));
                xvar[x] = var;
                if (atoms(e) == 0 || a == b) {
                    rules_.push_back(IgRule::terminal(-1));
                    continue;
                }
                Symbol c = window_var_.at(key(static_cast<int>(e), a, lmax_[e]));
                long m = atoms(e);
                if (positive(o.sym))
                    rules_.push_back(IgRule::slice(c, a, b));
                else
                    rules_.push_back(IgRule::slice(bar(c), m - b, m - a));
            }
        }
        IntervalGrammar ig(dec_.tilde, vars_, rules_);
        IgConversion conv = ig_to_slp(ig);
        CompressedGeneric out{conv.slp, {}};
        for (auto& [x, v] : xvar) {
            Symbol s = conv.of_full(v);
            if (!positive(s))
                throw Error(ErrorCode::InternalInvariantViolation, "barred root variable");
            out.var_of_system[x] = s;
        }
        return out;
    }

private:
    using Key = std::tuple<int, long, int>;

    long atoms(std::size_t e) const {
        return dec_.derived[e].size() > 1 ? static_cast<long>(dec_.derived[e].size()) - 1 : 0;
    }

    static Key key(int e, long g, int l) { return Key{e, g, l}; }

    std::pair<long, long> window(int e, long g, int l) const {
        long r = 1L << l;
        return {std::max(0L, g - r), std::min(atoms(e), g + r)};
    }

    void declare_window(int e, long g, int l) {
        std::string name = "C" + std::to_string(e) + "_" + std::to_string(g) + "_" +
                           std::to_string(l);
        int v = vars_.add(name);
        rules_.push_back(IgRule::terminal(-1));  // placeholder, defined later
        window_var_[key(e, g, l)] = v;
    }

    Symbol letter_var(Letter a) {
        auto it = letter_var_.find(a);
        if (it != letter_var_.end()) return it->second;
        // Use the canonical orientation so each pair gets one terminal rule.
        Letter c = std::min(a, dec_.tilde.bar(a));
        auto jt = letter_var_.find(c);
        int v;
        if (jt == letter_var_.end()) {
            v = vars_.add("T" + std::to_string(c));
            rules_.push_back(IgRule::terminal(c));
            letter_var_[c] = v;
        } else {
            v = jt->second;
        }
        Symbol s = (a == c) ? Symbol(v) : bar(Symbol(v));
        letter_var_[a] = s;
        return s;
    }

    // A slice expression (symbol plus interval) for the generic word's
    // factor [lo,hi] of equation e, valid at scale l (window radius 2^l).
    struct Part {
        Symbol sym;
        BigInt lo, hi;
    };

    // Non-free intervals of width >= 2 have, somewhere in their transport
    // orbit, a copy with an original cut strictly inside; that cut's window
    // at the previous scale covers the copy.
    Part covering_slice(int e, long lo, long hi, int l) {
        struct State {
            int e;
            long lo, hi;
            bool flip;
        };
        std::map<std::tuple<int, long, long, bool>, bool> seen;
        std::deque<State> queue{{e, lo, hi, false}};
        seen[{e, lo, hi, false}] = true;
        while (!queue.empty()) {
            State s = queue.front();
            queue.pop_front();
            for (long cut : cut_atoms_[s.e]) {
                if (s.lo < cut && cut < s.hi) {
                    int lc = std::min(l, lmax_[s.e]);
                    auto [wlo, whi] = window(s.e, cut, lc);
                    if (s.lo < wlo || s.hi > whi)
                        throw Error(ErrorCode::InternalInvariantViolation,
                                    "window does not cover the copy");
                    Symbol c = window_var_.at(key(s.e, cut, lc));
                    if (!s.flip) return Part{c, s.lo - wlo, s.hi - wlo};
                    return Part{bar(c), whi - s.hi, whi - s.lo};
                }
            }
            // Expand the orbit through every occurrence pair.
            for (const Occurrence& o1 : dec_.occurrences[s.e]) {
                long a1 = dec_.atom_index(o1.eq, o1.l);
                long b1 = dec_.atom_index(o1.eq, o1.r);
                if (!(a1 <= s.lo && s.hi <= b1)) continue;
                for (const Occurrence* o2 : by_var(var_of(o1.sym))) {
                    long a2 = dec_.atom_index(o2->eq, o2->l);
                    long b2 = dec_.atom_index(o2->eq, o2->r);
                    State t{};
                    t.e = o2->eq;
                    if (o1.sym == o2->sym) {
                        t.lo = a2 + (s.lo - a1);
                        t.hi = a2 + (s.hi - a1);
                        t.flip = s.flip;
                    } else {
                        t.lo = b2 - (s.hi - a1);
                        t.hi = b2 - (s.lo - a1);
                        t.flip = !s.flip;
                    }
                    auto k = std::make_tuple(t.e, t.lo, t.hi, t.flip);
                    if (!seen.count(k)) {
                        seen[k] = true;
                        queue.push_back(t);
                    }
                }
            }
        }
        throw Error(ErrorCode::InternalInvariantViolation,
                    "non-free interval admits no covering cut");
    }

    // A slice expression for [lo,hi] of equation e at scale l - 1 material.
    Part part_for(int e, long lo, long hi, int l) {
        if (hi - lo == 1) return Part{letter_var(dec_.atom_letter[e][lo]), 0, 1};
        return covering_slice(e, lo, hi, l - 1);
    }

    void define_window(int e, long g, int l) {
        int v = window_var_.at(key(e, g, l));
        auto [lo, hi] = window(e, g, l);
        if (l == 0) {
            if (hi - lo == 0) return;  // stays the empty placeholder
            if (hi - lo == 1) {
                Part p = letter_part(e, lo);
                rules_[v - 1] = IgRule::slice(p.sym, p.lo, p.hi);
                return;
            }
            Part p1 = letter_part(e, lo);
            Part p2 = letter_part(e, lo + 1);
            rules_[v - 1] = IgRule::slice_pair(p1.sym, p1.lo, p1.hi, p2.sym, p2.lo, p2.hi);
            return;
        }
        auto [plo, phi] = window(e, g, l - 1);
        Symbol center = window_var_.at(key(e, g, l - 1));
        std::vector<Part> parts;
        if (lo < plo) parts.push_back(part_for(e, lo, plo, l));
        parts.push_back(Part{center, 0, phi - plo});
        if (phi < hi) parts.push_back(part_for(e, phi, hi, l));
        define_as_chain(v, parts, "H" + std::to_string(e) + "_" + std::to_string(g) + "_" +
                                      std::to_string(l));
    }

    Part letter_part(int e, long pos) { return Part{letter_var(dec_.atom_letter[e][pos]), 0, 1}; }

    void define_as_chain(int v, const std::vector<Part>& parts, const std::string& stem) {
        if (parts.size() == 1) {
            rules_[v - 1] = IgRule::slice(parts[0].sym, parts[0].lo, parts[0].hi);
            return;
        }
        // Fold left; intermediate helpers carry full-range slices.
        Part acc = parts[0];
        for (std::size_t i = 1; i < parts.size(); ++i) {
            bool last = (i + 1 == parts.size());
            int target;
            if (last) {
                target = v;
            } else {
                target = vars_.add(stem + "_" + std::to_string(i));
                rules_.push_back(IgRule::terminal(-1));
            }
            rules_[target - 1] = IgRule::slice_pair(acc.sym, acc.lo, acc.hi, parts[i].sym,
                                                    parts[i].lo, parts[i].hi);
            acc = Part{Symbol(target), 0, (acc.hi - acc.lo) + (parts[i].hi - parts[i].lo)};
        }
    }

    const std::vector<const Occurrence*>& by_var(int v) {
        auto it = by_var_.find(v);
        if (it != by_var_.end()) return it->second;
        std::vector<const Occurrence*> list;
        for (const auto& eq_occs : dec_.occurrences)
            for (const auto& o : eq_occs)
                if (var_of(o.sym) == v) list.push_back(&o);
        return by_var_.emplace(v, std::move(list)).first->second;
    }

    const CutDecomposition& dec_;
    VariableSet vars_;
    std::vector<IgRule> rules_;
    std::vector<std::vector<long>> cut_atoms_;  // original cuts in atom coordinates
    std::vector<int> lmax_;
    std::map<Key, int> window_var_;
    std::map<Letter, Symbol> letter_var_;
    std::map<int, std::vector<const Occurrence*>> by_var_;
};

}  // namespace detail

inline CompressedGeneric compress_generic(const CutDecomposition& dec,
                                          const GenericSolution&) {
    return detail::GenericCompressor(dec).run();
}

// Splices donor material for the interval letters into the compressed
// grammar: terminal rules over the interval alphabet are re-pointed at donor
// symbols, everything else is copied.
struct SubstitutionResult {
    Slp slp;
    std::map<int, Symbol> var_map;  // compressed variable id -> new symbol
};

inline SubstitutionResult substitute_intervals(const Slp& compressed, const Slp& donor,
                                               const std::map<Letter, Symbol>& omega_prime) {
    // Involution compatibility of the donor assignment.
    for (const auto& [c, sym] : omega_prime) {
        Letter cb = compressed.alphabet().bar(c);
        auto it = omega_prime.find(cb);
        if (it == omega_prime.end())
            throw Error(ErrorCode::InvolutionMismatch,
                        "no donor for the involution of " + compressed.alphabet().name(c));
        if (!equal_eval(donor, bar(sym), it->second))
            throw Error(ErrorCode::InvolutionMismatch,
                        "donor for " + compressed.alphabet().name(cb) +
                            " is not the involution of the donor for " +
                            compressed.alphabet().name(c));
    }
    SlpBuilder b(donor);
    std::map<int, Symbol> map;
    for (int x : compressed.topo_order()) {
        const Rule& r = compressed.rule(x);
        const std::string& want = compressed.variables().name(x);
        std::string name = b.variables().has(want) ? b.fresh_name(want) : want;
        if (r.kind == Rule::Terminal) {
            if (r.letter < 0) {
                map[x] = b.add_empty(name);
            } else {
                auto it = omega_prime.find(r.letter);
                if (it == omega_prime.end())
                    throw Error(ErrorCode::MissingAssignment,
                                "no donor for interval letter " +
                                    compressed.alphabet().name(r.letter));
                Symbol e = b.add_empty(b.fresh_name("E"));
                map[x] = b.add_pair(name, it->second, e);
            }
        } else {
            auto tr = [&](Symbol s) {
                return positive(s) ? map.at(s) : bar(map.at(var_of(s)));
            };
            map[x] = b.add_pair(name, tr(r.left), tr(r.right));
        }
    }
    return SubstitutionResult{b.finalize(), std::move(map)};
}

}  // namespace slpwq

#endif
