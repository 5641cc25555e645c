#ifndef SLPWQ_PRODUCT_PIPELINE_HPP
#define SLPWQ_PRODUCT_PIPELINE_HPP

#include <algorithm>
#include <set>

#include "slpwq/equation.hpp"
#include "slpwq/free_product.hpp"
#include "slpwq/reorder.hpp"

namespace slpwq {

// Constraint on the extended Parikh image of one variable's value.
struct ParikhConstraint {
    enum Kind { Exact, Alphabetic, NotIdentity };
    Kind kind;
    ExtendedParikhImage exact;  // Exact
    std::set<int> alph;         // Alphabetic
    int first = -1, last = -1;  // Alphabetic

    static ParikhConstraint exactly(ExtendedParikhImage pi) {
        ParikhConstraint c;
        c.kind = Exact;
        c.exact = std::move(pi);
        return c;
    }

    static ParikhConstraint alphabetic(std::set<int> a, int first, int last) {
        ParikhConstraint c;
        c.kind = Alphabetic;
        c.alph = std::move(a);
        c.first = first;
        c.last = last;
        return c;
    }

    static ParikhConstraint not_identity() {
        ParikhConstraint c;
        c.kind = NotIdentity;
        return c;
    }

    bool satisfied(const ExtendedParikhImage& pi) const {
        switch (kind) {
            case Exact:
                return pi == exact;
            case Alphabetic: {
                std::set<int> support;
                for (std::size_t a = 0; a < pi.counts.size(); ++a)
                    if (pi.counts[a] > 0) support.insert(static_cast<int>(a));
                return support == alph && pi.first == first && pi.last == last;
            }
            case NotIdentity:
                for (const BigInt& c : pi.counts)
                    if (c > 0) return true;
                return false;
        }
        return false;
    }
};

// A system of equations over the free product, without constants; constants
// are expressed through Exact constraints.
struct FSystem {
    FreeProductSpec spec;
    VariableSet vars;
    std::vector<Equation> equations;
    std::vector<std::pair<int, ParikhConstraint>> constraints;

    // L != R becomes L = R X with a fresh X constrained away from the
    // identity.  Returns the fresh variable.
    int add_inequality(std::vector<Symbol> lhs, std::vector<Symbol> rhs) {
        int n = 0;
        while (vars.has("neq" + std::to_string(n))) ++n;
        int x = vars.add("neq" + std::to_string(n));
        rhs.push_back(x);
        equations.push_back(Equation{std::move(lhs), std::move(rhs)});
        constraints.emplace_back(x, ParikhConstraint::not_identity());
        return x;
    }
};

// A solution in reduced normal forms.
struct FSolution {
    std::map<int, DeltaWord> sigma;

    const DeltaWord& of(int x) const {
        auto it = sigma.find(x);
        if (it == sigma.end())
            throw Error(ErrorCode::MissingAssignment,
                        "no assignment for variable #" + std::to_string(x));
        return it->second;
    }

    DeltaWord of_symbol(const FreeProductSpec& spec, Symbol s) const {
        const DeltaWord& w = of(var_of(s));
        return positive(s) ? w : spec.involution(w);
    }

    DeltaWord apply(const FreeProductSpec& spec, const std::vector<Symbol>& side) const {
        DeltaWord out;
        for (Symbol s : side) {
            DeltaWord part = of_symbol(spec, s);
            out = reduce_product(spec, out, part);
        }
        return out;
    }
};

inline bool verify_f_solution(const FSystem& sys, const FSolution& sol) {
    for (const auto& [x, w] : sol.sigma)
        if (!sys.spec.is_reduced(w)) return false;
    for (const auto& e : sys.equations)
        if (sol.apply(sys.spec, e.lhs) != sol.apply(sys.spec, e.rhs)) return false;
    for (const auto& [x, con] : sys.constraints)
        if (!con.satisfied(parikh_of_word(sys.spec, sol.of(x)))) return false;
    return true;
}

// triangulate_and_split output: a plain word-equation system whose letters
// are the interned blocks of the (extended) solution, Parikh constraints on
// the fresh boundary variables, and the extended solution itself.
struct SplitSystem {
    FreeProductSpec spec;
    EquationSystem strings;
    std::vector<Block> letter_block;  // string letter -> block value
    std::vector<std::pair<int, ParikhConstraint>> constraints;  // on string variables
    SolutionAssignment sigma;
    std::map<int, int> var_of_input;  // input variable -> string variable

    Word word_of(const DeltaWord& w) const {
        Word out;
        for (const Block& b : w) {
            auto it = std::find(letter_block.begin(), letter_block.end(), b);
            if (it == letter_block.end())
                throw Error(ErrorCode::UnknownLetter, "block was not interned");
            out.push_back(static_cast<Letter>(it - letter_block.begin()));
        }
        return out;
    }
};

namespace detail {

inline int fresh_var(VariableSet& vars, const std::string& stem) {
    if (!vars.has(stem)) return vars.add(stem);
    int n = 2;
    while (vars.has(stem + "_" + std::to_string(n))) ++n;
    return vars.add(stem + "_" + std::to_string(n));
}

}  // namespace detail

inline SplitSystem triangulate_and_split(const FSystem& sys, const FSolution& sol) {
    if (!verify_f_solution(sys, sol))
        throw Error(ErrorCode::NotASolution, "assignment does not solve the system");
    const FreeProductSpec& spec = sys.spec;

    // Triangular form over an extended variable set; chain variables carry
    // the partial products.
    VariableSet fvars = sys.vars;
    for (int x = 1; x <= fvars.count(); ++x)
        if (!sol.sigma.count(x))
            throw Error(ErrorCode::MissingAssignment,
                        "no assignment for variable " + fvars.name(x));
    std::map<int, DeltaWord> fsigma;
    for (const auto& [x, w] : sol.sigma) {
        DeltaWord nw;
        for (const Block& b : w) nw.push_back(Block{b.alpha, spec.normalize(b.alpha, b.g)});
        fsigma[x] = std::move(nw);
    }
    struct Tri {
        Symbol x, y, z;
    };
    std::vector<Tri> tris;
    auto value = [&](Symbol s) {
        const DeltaWord& w = fsigma.at(var_of(s));
        return positive(s) ? w : spec.involution(w);
    };
    auto chain = [&](const std::vector<Symbol>& side, std::size_t upto) -> Symbol {
        Symbol acc = side[0];
        for (std::size_t i = 1; i < upto; ++i) {
            int p = detail::fresh_var(fvars, "prod");
            fsigma[p] = reduce_product(spec, value(acc), value(side[i]));
            tris.push_back(Tri{acc, side[i], p});
            acc = p;
        }
        return acc;
    };
    for (const Equation& e : sys.equations) {
        Symbol rhs;
        if (e.rhs.empty()) {
            int v = detail::fresh_var(fvars, "one");
            fsigma[v] = {};
            rhs = v;
        } else {
            rhs = chain(e.rhs, e.rhs.size());
        }
        if (e.lhs.size() >= 2) {
            Symbol acc = chain(e.lhs, e.lhs.size() - 1);
            tris.push_back(Tri{acc, e.lhs.back(), rhs});
        } else {
            Symbol left;
            if (e.lhs.empty()) {
                int v = detail::fresh_var(fvars, "one");
                fsigma[v] = {};
                left = v;
            } else {
                left = e.lhs[0];
            }
            int pad = detail::fresh_var(fvars, "one");
            fsigma[pad] = {};
            tris.push_back(Tri{left, pad, rhs});
        }
    }

    // Decompose each triangular equation: u = p a qbar, v = q b r, w = p c r
    // with ab = c in one factor.  The cancellation point is forced by the
    // solution.
    struct Dec {
        Symbol x, y, z;
        DeltaWord p, q, r;
        int alpha;
        Element a, b, c;
    };
    std::vector<Dec> decs;
    for (const Tri& t : tris) {
        DeltaWord u = value(t.x), v = value(t.y);
        std::size_t s = 0;
        while (s < u.size() && s < v.size() &&
               u[u.size() - 1 - s] == spec.inv(v[s]))
            ++s;
        DeltaWord up(u.begin(), u.end() - s);
        DeltaWord vp(v.begin() + s, v.end());
        Dec d;
        d.x = t.x;
        d.y = t.y;
        d.z = t.z;
        d.q = DeltaWord(v.begin(), v.begin() + s);
        if (!up.empty() && !vp.empty() && up.back().alpha == vp.front().alpha) {
            d.alpha = up.back().alpha;
            d.a = up.back().g;
            d.b = vp.front().g;
            d.c = spec.mul(d.alpha, d.a, d.b);
            d.p = DeltaWord(up.begin(), up.end() - 1);
            d.r = DeltaWord(vp.begin() + 1, vp.end());
        } else if (!up.empty()) {
            d.alpha = up.back().alpha;
            d.a = up.back().g;
            d.b = spec.identity(d.alpha);
            d.c = d.a;
            d.p = DeltaWord(up.begin(), up.end() - 1);
            d.r = vp;
        } else if (!vp.empty()) {
            d.alpha = vp.front().alpha;
            d.a = spec.identity(d.alpha);
            d.b = vp.front().g;
            d.c = d.b;
            d.p = {};
            d.r = DeltaWord(vp.begin() + 1, vp.end());
        } else {
            d.alpha = 0;
            d.a = d.b = d.c = spec.identity(0);
            d.p = {};
            d.r = {};
        }
        DeltaWord w = d.p;
        if (!spec.is_identity(d.alpha, d.c)) w.push_back(Block{d.alpha, d.c});
        w.insert(w.end(), d.r.begin(), d.r.end());
        if (w != value(t.z))
            throw Error(ErrorCode::InternalInvariantViolation, "split does not reassemble");
        decs.push_back(std::move(d));
    }

    // Intern every block in sight, closed under inverses, in a fixed order.
    std::set<Block> blocks;
    auto note = [&](const DeltaWord& w) {
        for (const Block& b : w) {
            blocks.insert(b);
            blocks.insert(spec.inv(b));
        }
    };
    for (const auto& [x, w] : fsigma) note(w);
    for (const Dec& d : decs) {
        for (const Element* e : {&d.a, &d.b, &d.c}) {
            if (spec.is_identity(d.alpha, *e)) continue;
            blocks.insert(Block{d.alpha, *e});
            blocks.insert(spec.inv(Block{d.alpha, *e}));
        }
    }
    SplitSystem out;
    out.spec = spec;
    std::map<Block, Letter> idx;
    int serial = 0;
    for (const Block& b : blocks) {
        if (idx.count(b)) continue;
        std::string n = std::to_string(serial++);
        Block binv = spec.inv(b);
        if (binv == b) {
            out.strings.gamma.add_pair("s" + n, "s" + n);
            idx[b] = out.strings.gamma.id("s" + n);
            out.letter_block.push_back(b);
        } else {
            out.strings.gamma.add_pair("d" + n, "D" + n);
            idx[b] = out.strings.gamma.id("d" + n);
            idx[binv] = out.strings.gamma.id("D" + n);
            out.letter_block.push_back(b);
            out.letter_block.push_back(binv);
        }
    }
    auto to_word = [&](const DeltaWord& w) {
        Word s;
        for (const Block& b : w) s.push_back(idx.at(b));
        return s;
    };

    // String variables: one per extended input variable plus the six fresh
    // ones per split equation.
    for (int x = 1; x <= fvars.count(); ++x) {
        int v = out.strings.vars.add(fvars.name(x));
        out.var_of_input[x] = v;
        out.sigma.sigma[v] = to_word(fsigma.at(x));
    }
    auto tr = [&](Symbol s) {
        int v = out.var_of_input.at(var_of(s));
        return positive(s) ? v : bar(Symbol(v));
    };
    int eqno = 0;
    for (const Dec& d : decs) {
        std::string n = std::to_string(eqno++);
        auto boundary = [&](const std::string& stem, const Element& g) {
            int v = detail::fresh_var(out.strings.vars, stem + n);
            DeltaWord w;
            if (!spec.is_identity(d.alpha, g)) w.push_back(Block{d.alpha, g});
            out.sigma.sigma[v] = to_word(w);
            out.constraints.emplace_back(v, ParikhConstraint::exactly(parikh_of_word(spec, w)));
            return v;
        };
        auto piece = [&](const std::string& stem, const DeltaWord& w) {
            int v = detail::fresh_var(out.strings.vars, stem + n);
            out.sigma.sigma[v] = to_word(w);
            return v;
        };
        int A = boundary("A", d.a), B = boundary("B", d.b), C = boundary("C", d.c);
        int P = piece("P", d.p), Q = piece("Q", d.q), R = piece("R", d.r);
        out.strings.equations.push_back(Equation{{tr(d.x)}, {P, A, bar(Symbol(Q))}});
        out.strings.equations.push_back(Equation{{tr(d.y)}, {Q, B, R}});
        out.strings.equations.push_back(Equation{{tr(d.z)}, {P, C, R}});
    }
    for (const auto& [x, con] : sys.constraints)
        out.constraints.emplace_back(out.var_of_input.at(x), con);

    if (!verify_solution(out.strings, out.sigma))
        throw Error(ErrorCode::InternalInvariantViolation, "split solution check failed");
    return out;
}

namespace detail {

// Builds donor SLPs over Gamma for interval classes of the split system.
class DonorFactory {
public:
    DonorFactory(const FreeProductSpec& spec, SlpBuilder& b) : spec_(spec), b_(b) {}

    Symbol letter_symbol(Letter l) {
        auto it = term_.find(l);
        if (it != term_.end()) return it->second;
        Letter c = std::min(l, spec_.gamma().bar(l));
        Symbol s;
        if (c == l) {
            s = b_.add_terminal(b_.fresh_name("G"), l);
        } else {
            s = bar(letter_symbol(c));
        }
        term_[l] = s;
        return s;
    }

    // A symbol spelling one group element, one power per coordinate.
    Symbol element_symbol(int alpha, const Element& e) {
        Element g = spec_.normalize(alpha, e);
        const AbelianFactor& f = spec_.factor(alpha);
        std::vector<Symbol> parts;
        for (int j = 0; j < f.dims(); ++j) {
            BigInt v = g[j];
            if (j >= f.rank) {
                long d = f.torsion[j - f.rank];
                if (v > d / 2) v -= d;
            }
            if (v == 0) continue;
            bool neg = v < 0;
            if (neg) v = -v;
            Symbol l = letter_symbol(spec_.gamma_letter(alpha, j, neg));
            parts.push_back(v == 1 ? l : power_symbol(b_, l, v, "G"));
        }
        return concat_symbols(b_, std::move(parts), "G");
    }

    // Verbatim donor: the word itself, block by block.
    Symbol verbatim(const DeltaWord& w) {
        std::vector<Symbol> parts;
        for (const Block& b : w) parts.push_back(element_symbol(b.alpha, b.g));
        return concat_symbols(b_, std::move(parts), "G");
    }

    // Verbatim donor for a word equal to its own involution, spelled so
    // that the spelling is its own involution as well.
    Symbol symmetric_verbatim(const DeltaWord& w) {
        std::size_t h = w.size() / 2;
        std::vector<Symbol> parts;
        Symbol hs = 0;
        if (h > 0) {
            hs = verbatim(DeltaWord(w.begin(), w.begin() + h));
            parts.push_back(hs);
        }
        if (w.size() % 2) {
            // The central block is its own inverse; its spelling must be
            // too, which pins it to a single order-two coordinate.
            const Block& m = w[h];
            Symbol ms = element_symbol(m.alpha, m.g);
            Slp snap = b_.finalize();
            Word u = snap.eval(ms);
            if (u != spec_.gamma().involution(u))
                throw Error(ErrorCode::InvolutionMismatch,
                            "central block of a self-inverse class has no symmetric spelling");
            parts.push_back(ms);
        }
        if (hs != 0) parts.push_back(bar(hs));
        return concat_symbols(b_, std::move(parts), "G");
    }

    // Parikh-equivalent donor: reorder the index sequence into runs, fill
    // the blocks of each factor with h, h, ..., h, balance so the product is
    // preserved and every block stays nontrivial.
    Symbol resynthesized(const DeltaWord& w) {
        std::map<int, long> count;
        std::map<int, Element> product;
        std::vector<int> pseq;
        for (const Block& b : w) {
            pseq.push_back(b.alpha);
            auto it = product.find(b.alpha);
            if (it == product.end())
                product[b.alpha] = b.g;
            else
                it->second = spec_.mul(b.alpha, it->second, b.g);
            ++count[b.alpha];
        }
        ReorderedWord ror = reorder(pseq);

        // Fill plan per factor: occurrence i gets h, except the last one
        // which balances, and possibly a repaired first one.
        struct Fill {
            long n;
            Element h, hfirst, hlast;
            bool repaired = false;
        };
        std::map<int, Fill> fill;
        for (const auto& [alpha, n] : count) {
            Fill f;
            f.n = n;
            f.h = spec_.unit(alpha, 0, 1);
            const Element& g = product[alpha];
            if (n == 1) {
                f.hlast = g;
            } else {
                Element e = g;
                e[0] -= n - 1;
                e = spec_.normalize(alpha, std::move(e));
                if (spec_.is_identity(alpha, e)) {
                    // Balancing block would vanish; swap the first block for
                    // a different nontrivial element.
                    Element t = g;
                    t[0] -= n - 2;
                    t = spec_.normalize(alpha, std::move(t));
                    f.hfirst = repair_element(alpha, t);
                    f.repaired = true;
                    Element e2(t);
                    for (std::size_t j = 0; j < e2.size(); ++j) e2[j] -= f.hfirst[j];
                    f.hlast = spec_.normalize(alpha, std::move(e2));
                } else {
                    f.hlast = std::move(e);
                }
            }
            fill[alpha] = std::move(f);
        }
        auto elem = [&](int alpha, long i) -> const Element& {
            const Fill& f = fill.at(alpha);
            if (i == f.n) return f.hlast;
            if (i == 1 && f.repaired) return f.hfirst;
            return f.h;
        };

        std::map<int, long> occ;
        std::vector<Symbol> parts;
        for (const IndexRun& r : ror.runs) {
            long ox = occ[r.x], oy = occ[r.y];
            const Fill &fx = fill.at(r.x), &fy = fill.at(r.y);
            // Repetitions needing non-default elements; everything between
            // them is a power of the uniform pair.
            std::set<long> special;
            for (long i : {fx.repaired ? 1 - ox : -1, fx.n - ox})
                if (i >= 1 && i <= r.exp) special.insert(i);
            for (long i : {fy.repaired ? 1 - oy : -1, fy.n - oy})
                if (i >= 1 && i <= r.exp) special.insert(i);
            Symbol uniform = 0;
            auto gap = [&](long reps) {
                if (reps <= 0) return;
                if (uniform == 0)
                    uniform = b_.add_pair(b_.fresh_name("G"), element_symbol(r.x, fx.h),
                                          element_symbol(r.y, fy.h));
                parts.push_back(reps == 1 ? uniform
                                          : power_symbol(b_, uniform, BigInt(reps), "G"));
            };
            long pos = 1;
            for (long i : special) {
                gap(i - pos);
                parts.push_back(b_.add_pair(b_.fresh_name("G"),
                                            element_symbol(r.x, elem(r.x, ox + i)),
                                            element_symbol(r.y, elem(r.y, oy + i))));
                pos = i + 1;
            }
            gap(r.exp - pos + 1);
            occ[r.x] += r.exp;
            occ[r.y] += r.exp;
        }
        if (ror.tail >= 0) {
            parts.push_back(element_symbol(ror.tail, elem(ror.tail, occ[ror.tail] + 1)));
            occ[ror.tail] += 1;
        }
        return concat_symbols(b_, std::move(parts), "G");
    }

private:
    // A nontrivial element different from `avoid`; exists whenever the
    // factor has more than one nontrivial element.
    Element repair_element(int alpha, const Element& avoid) {
        const AbelianFactor& f = spec_.factor(alpha);
        for (int j = 0; j < f.dims(); ++j) {
            for (long v : {1L, -1L, 2L}) {
                Element cand = spec_.unit(alpha, j, v);
                if (spec_.is_identity(alpha, cand)) continue;
                if (cand == avoid) continue;
                return cand;
            }
        }
        throw Error(ErrorCode::InternalInvariantViolation, "no repair element available");
    }

    const FreeProductSpec& spec_;
    SlpBuilder& b_;
    std::map<Letter, Symbol> term_;
};

}  // namespace detail

// Output of the two compression pipelines: an SLP over Gamma binding every
// variable of the input system (and of the split system).
struct CompressedFSolution {
    SplitSystem split;
    Slp slp;
    std::map<int, Symbol> binding;        // input variable -> symbol
    std::map<int, Symbol> split_binding;  // string variable -> symbol
};

namespace detail {

inline CompressedFSolution compress_f_solution(const FSystem& sys, const FSolution& sol,
                                               bool parikh_donors) {
    SplitSystem split = triangulate_and_split(sys, sol);
    CutDecomposition dec = compute_cuts(split.strings, split.sigma);
    maximal_free_intervals(dec);
    GenericSolution gen = generic_solution(dec, split.sigma);
    CompressedGeneric comp = compress_generic(dec, gen);

    SlpBuilder db(sys.spec.gamma());
    DonorFactory donors(sys.spec, db);
    std::map<Letter, Symbol> omega_prime;
    for (Letter l = 0; l < static_cast<Letter>(gen.tilde.size()); ++l) {
        if (gen.tilde.bar(l) < l) continue;
        DeltaWord cw;
        for (Letter s : gen.omega[l]) cw.push_back(split.letter_block.at(s));
        // Self-inverse classes keep their original word; a resynthesized
        // word would have to equal its own involution.
        Symbol s;
        if (gen.tilde.bar(l) == l)
            s = donors.symmetric_verbatim(cw);
        else
            s = parikh_donors ? donors.resynthesized(cw) : donors.verbatim(cw);
        omega_prime[l] = s;
        omega_prime[gen.tilde.bar(l)] = (gen.tilde.bar(l) == l) ? s : bar(s);
    }
    Slp donor_slp = db.finalize();
    SubstitutionResult sub = substitute_intervals(comp.slp, donor_slp, omega_prime);

    CompressedFSolution out{std::move(split), std::move(sub.slp), {}, {}};
    for (const auto& [v, cv] : comp.var_of_system)
        out.split_binding[v] = sub.var_map.at(cv);
    // Variables that occur in no equation are not covered by the generic
    // solution; bind them to their words directly.
    {
        std::vector<int> missing;
        for (const auto& [x, v] : out.split.var_of_input)
            if (!out.split_binding.count(v)) missing.push_back(v);
        if (!missing.empty()) {
            SlpBuilder fb(out.slp);
            DonorFactory extra(sys.spec, fb);
            for (int v : missing) {
                DeltaWord w;
                for (Letter s : out.split.sigma.sigma.at(v))
                    w.push_back(out.split.letter_block.at(s));
                out.split_binding[v] = extra.verbatim(w);
            }
            out.slp = fb.finalize();
        }
    }
    for (const auto& [x, v] : out.split.var_of_input)
        if (x <= sys.vars.count()) out.binding[x] = out.split_binding.at(v);
    return out;
}

}  // namespace detail

// A Parikh-equivalent compressed solution: every interval class is rebuilt
// from reordered runs with balanced block fillings.
inline CompressedFSolution compress_solution_parikh(const FSystem& sys, const FSolution& sol) {
    return detail::compress_f_solution(sys, sol, true);
}

// The exact solution compressed: interval classes keep their original words
// (intended for minimal solutions under alphabetic constraints).
inline CompressedFSolution compress_solution_alphabetic(const FSystem& sys,
                                                        const FSolution& sol) {
    return detail::compress_f_solution(sys, sol, false);
}

namespace detail {

// Deterministic certificate check over a Gamma-SLP: per-variable reducedness
// and Parikh data bottom-up, plus equation checks on a derived SLP whose
// letters are whole blocks, so that products reduce by a single longest-
// common-prefix cancellation and at most one boundary merge.
class CertificateChecker {
public:
    CertificateChecker(const FSystem& sys, const Slp& slp,
                       const std::map<int, Symbol>& binding)
        : sys_(sys), slp_(slp), binding_(binding) {}

    bool run() {
        detail::BlockAnalysis analysis(sys_.spec, slp_);
        std::set<int> needed;
        for (const Equation& e : sys_.equations) {
            for (Symbol s : e.lhs) needed.insert(var_of(s));
            for (Symbol s : e.rhs) needed.insert(var_of(s));
        }
        for (const auto& [x, con] : sys_.constraints) needed.insert(x);
        for (int x : needed) {
            Symbol b = bound(x);
            detail::BlockData d = analysis.of(b);
            if (!d.reduced) return false;
            data_[x] = std::move(d);
        }
        for (const auto& [x, con] : sys_.constraints) {
            const detail::BlockData& d = data_.at(x);
            ExtendedParikhImage pi;
            pi.counts = d.counts;
            pi.abelian = d.abelian;
            pi.first = d.first.alpha;
            pi.last = d.last.alpha;
            if (!con.satisfied(pi)) return false;
        }
        // Seed the block alphabet: terminal blocks and junction merges of
        // everything reachable from the bindings.
        for (int x : needed) gather(analysis, bound(x));
        // Equation checks may discover new boundary blocks when sides are
        // folded; extend the alphabet and retry.
        for (;;) {
            bool restart = false;
            bool ok = check_equations(restart);
            if (!restart) return ok;
        }
    }

private:
    Symbol bound(int x) const {
        auto it = binding_.find(x);
        if (it == binding_.end())
            throw Error(ErrorCode::MissingAssignment,
                        "no binding for variable " + sys_.vars.name(x));
        return it->second;
    }

    Symbol bound_symbol(Symbol s) const {
        Symbol b = bound(var_of(s));
        return positive(s) ? b : bar(b);
    }

    void intern(const Block& b) {
        if (blocks_.insert(b).second) blocks_.insert(sys_.spec.inv(b));
    }

    void gather(detail::BlockAnalysis& analysis, Symbol s) {
        int x = var_of(s);
        if (!gathered_.insert(x).second) return;
        const Rule& r = slp_.rule(x);
        if (r.kind == Rule::Terminal) {
            if (r.letter >= 0)
                intern(sys_.spec.block_of_letter(
                    sys_.spec.gamma().id(slp_.alphabet().name(r.letter))));
            return;
        }
        gather(analysis, r.left);
        gather(analysis, r.right);
        detail::BlockData y = analysis.of(r.left);
        detail::BlockData z = analysis.of(r.right);
        if (y.blocks > 0 && z.blocks > 0 && y.last.alpha == z.first.alpha) {
            Element g = sys_.spec.mul(y.last.alpha, y.last.g, z.first.g);
            if (!sys_.spec.is_identity(y.last.alpha, g)) intern(Block{y.last.alpha, g});
        }
    }

    bool check_equations(bool& restart) {
        // Fixed letter order for this attempt.
        std::vector<Block> letters;
        InvolutiveAlphabet ab;
        std::map<Block, Letter> idx;
        int serial = 0;
        for (const Block& b : blocks_) {
            if (idx.count(b)) continue;
            std::string n = std::to_string(serial++);
            Block binv = sys_.spec.inv(b);
            if (binv == b) {
                ab.add_pair("s" + n, "s" + n);
                idx[b] = ab.id("s" + n);
                letters.push_back(b);
            } else {
                ab.add_pair("d" + n, "D" + n);
                idx[b] = ab.id("d" + n);
                idx[binv] = ab.id("D" + n);
                letters.push_back(b);
                letters.push_back(binv);
            }
        }

        // Block-letter SLP for every reachable variable, bottom-up.
        SlpBuilder bb(ab);
        Slp cur = bb.finalize();
        std::map<int, Symbol> blk;
        std::map<Letter, Symbol> term;
        auto term_of = [&](Letter l) {
            auto it = term.find(l);
            if (it != term.end()) return it->second;
            Letter c = std::min(l, ab.bar(l));
            Symbol s;
            if (term.count(c)) {
                s = bar(term.at(c));
            } else {
                s = bb.add_terminal(bb.fresh_name("K"), c);
                term[c] = s;
                if (c != l) s = bar(s);
            }
            term[l] = s;
            return s;
        };
        auto blk_of = [&](Symbol s) {
            Symbol b = blk.at(var_of(s));
            return positive(s) ? b : bar(b);
        };
        detail::BlockAnalysis analysis(sys_.spec, slp_);
        for (int x : slp_.topo_order()) {
            if (!gathered_.count(x)) continue;
            const Rule& r = slp_.rule(x);
            if (r.kind == Rule::Terminal) {
                if (r.letter < 0) {
                    blk[x] = bb.add_empty(bb.fresh_name("K"));
                } else {
                    Letter l = idx.at(sys_.spec.block_of_letter(
                        sys_.spec.gamma().id(slp_.alphabet().name(r.letter))));
                    Symbol e = bb.add_empty(bb.fresh_name("K"));
                    blk[x] = bb.add_pair(bb.fresh_name("K"), term_of(l), e);
                }
            } else {
                detail::BlockData y = analysis.of(r.left);
                detail::BlockData z = analysis.of(r.right);
                Symbol yb = blk_of(r.left), zb = blk_of(r.right);
                cur = bb.finalize();
                if (y.blocks > 0 && z.blocks > 0 && y.last.alpha == z.first.alpha) {
                    Element g = sys_.spec.mul(y.last.alpha, y.last.g, z.first.g);
                    Letter l = idx.at(Block{y.last.alpha, g});
                    Symbol p = prefix_symbol(bb, cur, yb, y.blocks - 1, "K");
                    Symbol s = suffix_symbol(bb, cur, zb, z.blocks - 1, "K");
                    blk[x] = concat_symbols(bb, {p, term_of(l), s}, "K");
                } else {
                    blk[x] = bb.add_pair(bb.fresh_name("K"), yb, zb);
                }
            }
        }
        cur = bb.finalize();

        // Fold each equation side with single-merge combination steps.
        auto combine = [&](Symbol u, Symbol v) -> Symbol {
            BigInt s = longest_common_prefix(cur, bar(u), v);
            BigInt lu = cur.length(u) - s, lv = cur.length(v) - s;
            if (lu == 0 && lv == 0) {
                Symbol e = bb.add_empty(bb.fresh_name("K"));
                cur = bb.finalize();
                return e;
            }
            if (lu == 0) {
                Symbol r = suffix_symbol(bb, cur, v, lv, "K");
                cur = bb.finalize();
                return r;
            }
            if (lv == 0) {
                Symbol r = prefix_symbol(bb, cur, u, lu, "K");
                cur = bb.finalize();
                return r;
            }
            Letter xl = cur.letter_at(u, lu - 1);
            Letter yl = cur.letter_at(v, s);
            const Block& xb = letters.at(xl);
            const Block& ybk = letters.at(yl);
            if (xb.alpha != ybk.alpha) {
                Symbol p = prefix_symbol(bb, cur, u, lu, "K");
                Symbol sfx = suffix_symbol(bb, cur, v, lv, "K");
                Symbol r = bb.add_pair(bb.fresh_name("K"), p, sfx);
                cur = bb.finalize();
                return r;
            }
            Element g = sys_.spec.mul(xb.alpha, xb.g, ybk.g);
            if (sys_.spec.is_identity(xb.alpha, g))
                throw Error(ErrorCode::InternalInvariantViolation,
                            "merge after maximal cancellation is trivial");
            Block c{xb.alpha, g};
            auto it = idx.find(c);
            if (it == idx.end()) {
                intern(c);
                return 0;  // letter missing; caller restarts
            }
            std::vector<Symbol> parts;
            if (lu > 1) parts.push_back(prefix_symbol(bb, cur, u, lu - 1, "K"));
            parts.push_back(term_of(it->second));
            if (lv > 1) parts.push_back(suffix_symbol(bb, cur, v, lv - 1, "K"));
            Symbol r = concat_symbols(bb, std::move(parts), "K");
            cur = bb.finalize();
            return r;
        };
        auto fold = [&](const std::vector<Symbol>& side) -> Symbol {
            if (side.empty()) {
                Symbol e = bb.add_empty(bb.fresh_name("K"));
                cur = bb.finalize();
                return e;
            }
            Symbol acc = blk_of(bound_symbol(side[0]));
            for (std::size_t i = 1; i < side.size(); ++i) {
                acc = combine(acc, blk_of(bound_symbol(side[i])));
                if (acc == 0) return 0;
            }
            return acc;
        };
        for (const Equation& e : sys_.equations) {
            Symbol l = fold(e.lhs);
            if (l == 0) {
                restart = true;
                return false;
            }
            Symbol r = fold(e.rhs);
            if (r == 0) {
                restart = true;
                return false;
            }
            if (!equal_eval(cur, l, r)) return false;
        }
        return true;
    }

    const FSystem& sys_;
    const Slp& slp_;
    const std::map<int, Symbol>& binding_;
    std::map<int, detail::BlockData> data_;
    std::set<Block> blocks_;
    std::set<int> gathered_;
};

}  // namespace detail

// Deterministically checks that the bindings are reduced normal forms that
// solve every equation in the free product and satisfy every constraint.
inline bool verify_certificate(const FSystem& sys, const Slp& slp,
                               const std::map<int, Symbol>& binding) {
    return detail::CertificateChecker(sys, slp, binding).run();
}

}  // namespace slpwq

#endif
