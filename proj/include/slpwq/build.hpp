#ifndef SLPWQ_BUILD_HPP
#define SLPWQ_BUILD_HPP

#include "slpwq/slp.hpp"

namespace slpwq {

// Balanced concatenation of the given symbols; returns a symbol whose eval
// is the concatenation of their evals.  Empty input yields an empty variable.
inline Symbol concat_symbols(SlpBuilder& b, std::vector<Symbol> parts, const std::string& stem) {
    if (parts.empty()) return b.add_empty(b.fresh_name(stem));
    while (parts.size() > 1) {
        std::vector<Symbol> next;
        next.reserve((parts.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < parts.size(); i += 2)
            next.push_back(b.add_pair(b.fresh_name(stem), parts[i], parts[i + 1]));
        if (parts.size() % 2) next.push_back(parts.back());
        parts = std::move(next);
    }
    return parts[0];
}

// A symbol evaluating to the literal word w.
inline Symbol word_symbol(SlpBuilder& b, const Word& w, const std::string& stem) {
    std::vector<Symbol> parts;
    parts.reserve(w.size());
    for (Letter a : w) parts.push_back(b.add_terminal(b.fresh_name(stem), a));
    return concat_symbols(b, std::move(parts), stem);
}

// eval(result) = eval(base)^n via binary powering; O(log n) new rules.
inline Symbol power_symbol(SlpBuilder& b, Symbol base, BigInt n, const std::string& stem) {
    if (n < 0) throw Error(ErrorCode::PreconditionViolated, "negative power");
    if (n == 0) return b.add_empty(b.fresh_name(stem));
    Symbol acc = 0;  // 0 = not yet set
    Symbol sq = base;
    for (;;) {
        if ((n & 1) != 0)
            acc = (acc == 0) ? sq : b.add_pair(b.fresh_name(stem), acc, sq);
        n >>= 1;
        if (n == 0) return acc;
        sq = b.add_pair(b.fresh_name(stem), sq, sq);
    }
}

// Builds a standalone SLP for a literal word; the last variable is the root.
inline Slp word_to_slp(const InvolutiveAlphabet& alphabet, const Word& w,
                       const std::string& root_name) {
    SlpBuilder b(alphabet);
    Symbol s = word_symbol(b, w, "T");
    Symbol e = b.add_empty(b.fresh_name("T"));
    b.add_pair(root_name, s, e);
    return b.finalize();
}

// A symbol for eval(x)[0, p], built by descending the rules of `base`.
// `b` must contain (an extension of) `base`; at most h(x) new rules.
inline Symbol prefix_symbol(SlpBuilder& b, const Slp& base, Symbol x, const BigInt& p,
                            const std::string& stem) {
    if (p < 0 || p > base.length(x))
        throw Error(ErrorCode::OutOfRange, "prefix length out of range");
    if (p == 0) return b.add_empty(b.fresh_name(stem));
    Symbol s = x;
    BigInt need = p;
    std::vector<Symbol> keep;  // full left parts, in order
    for (;;) {
        if (need == base.length(s)) {
            keep.push_back(s);
            break;
        }
        Rule r = base.rule_of(s);
        if (r.kind == Rule::Terminal)
            throw Error(ErrorCode::InternalInvariantViolation, "prefix descent hit terminal");
        const BigInt& ll = base.length(r.left);
        if (need <= ll) {
            s = r.left;
        } else {
            keep.push_back(r.left);
            need -= ll;
            s = r.right;
        }
    }
    Symbol acc = keep[0];
    for (std::size_t i = 1; i < keep.size(); ++i)
        acc = b.add_pair(b.fresh_name(stem), acc, keep[i]);
    return acc;
}

// A symbol for the length-n suffix of eval(x): the involution of a prefix of
// eval(xbar).
inline Symbol suffix_symbol(SlpBuilder& b, const Slp& base, Symbol x, const BigInt& n,
                            const std::string& stem) {
    return bar(prefix_symbol(b, base, bar(x), n, stem));
}

// Copies all rules of `other` into `b` (which must share the same alphabet),
// renaming on collision.  Returns the symbol translation for positive ids.
inline std::vector<Symbol> append_slp(SlpBuilder& b, const Slp& other) {
    std::vector<Symbol> map(other.var_count() + 1, 0);
    for (int x : other.topo_order()) {
        const std::string& want = other.variables().name(x);
        std::string name = b.variables().has(want) ? b.fresh_name(want) : want;
        const Rule& r = other.rule(x);
        if (r.kind == Rule::Terminal) {
            map[x] = b.add_terminal(name, r.letter);
        } else {
            auto tr = [&](Symbol s) {
                return positive(s) ? map[s] : bar(map[var_of(s)]);
            };
            map[x] = b.add_pair(name, tr(r.left), tr(r.right));
        }
    }
    return map;
}

}  // namespace slpwq

#endif
