#ifndef SLPWQ_FREE_GROUP_HPP
#define SLPWQ_FREE_GROUP_HPP

#include <map>

#include "slpwq/build.hpp"
#include "slpwq/queries.hpp"

namespace slpwq {

// Result of reduce_slp: the extended SLP plus, for every input variable X,
// a symbol evaluating to the free reduction of eval(X).
struct ReducedSlp {
    Slp slp;
    std::map<int, Symbol> hat;  // positive input variable -> reduced symbol

    Symbol hat_of(Symbol x) const {
        auto it = hat.find(var_of(x));
        if (it == hat.end())
            throw Error(ErrorCode::UnknownVariable, "variable not in reduction result");
        return positive(x) ? it->second : bar(it->second);
    }
};

// Bottom-up free reduction.  For X -> YZ with reduced parts yhat, zhat the
// cancellation length is exactly lcp(invol(eval(yhat)), eval(zhat)); the
// surviving prefix and suffix are spliced with O(h) fresh rules.
inline ReducedSlp reduce_slp(const Slp& input) {
    if (!input.alphabet().fixed_point_free())
        throw Error(ErrorCode::NonGroupAlphabet, "free reduction needs a fixed-point-free bar");
    SlpBuilder b(input);
    std::map<int, Symbol> hat;
    Slp current = b.finalize();
    for (int x : input.topo_order()) {
        const Rule& r = input.rule(x);
        if (r.kind == Rule::Terminal) {
            hat[x] = x;  // a single letter (or the empty word) is reduced
            continue;
        }
        Symbol yh = positive(r.left) ? hat.at(var_of(r.left)) : bar(hat.at(var_of(r.left)));
        Symbol zh = positive(r.right) ? hat.at(var_of(r.right)) : bar(hat.at(var_of(r.right)));
        BigInt c = longest_common_prefix(current, bar(yh), zh);
        BigInt keep_left = current.length(yh) - c;
        BigInt keep_right = current.length(zh) - c;
        if (keep_left == 0 && keep_right == 0) {
            hat[x] = b.add_empty(b.fresh_name("R"));
        } else if (c == 0) {
            hat[x] = b.add_pair(b.fresh_name("R"), yh, zh);
        } else {
            Symbol p = prefix_symbol(b, current, yh, keep_left, "R");
            Symbol s = suffix_symbol(b, current, zh, keep_right, "R");
            if (keep_left == 0)
                hat[x] = s;
            else if (keep_right == 0)
                hat[x] = p;
            else
                hat[x] = b.add_pair(b.fresh_name("R"), p, s);
        }
        current = b.finalize();
    }
    return ReducedSlp{std::move(current), std::move(hat)};
}

// eval(x) = 1 in the free group?
inline bool compressed_word_problem(const Slp& slp, Symbol x) {
    ReducedSlp r = reduce_slp(slp);
    return r.slp.length(r.hat_of(x)) == 0;
}

// Named endomorphisms of the free group F(Sigma), given by images of the
// canonical generators; the image of a barred generator is derived by
// involution.
class EndomorphismTable {
public:
    explicit EndomorphismTable(InvolutiveAlphabet alphabet) : alphabet_(std::move(alphabet)) {}

    const InvolutiveAlphabet& alphabet() const { return alphabet_; }

    void set_image(const std::string& endo, Letter a, Word image) {
        images_[endo][canonical(a)] = positive_letter(a) ? std::move(image)
                                                         : alphabet_.involution(image);
    }

    bool has(const std::string& endo) const { return images_.count(endo) != 0; }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& [name, _] : images_) out.push_back(name);
        return out;
    }

    Word image(const std::string& endo, Letter a) const {
        auto it = images_.find(endo);
        if (it == images_.end())
            throw Error(ErrorCode::UnknownEndomorphism, "unknown endomorphism: " + endo);
        auto jt = it->second.find(canonical(a));
        if (jt == it->second.end())
            throw Error(ErrorCode::UnknownLetter,
                        "no image for letter " + alphabet_.name(a) + " under " + endo);
        return positive_letter(a) ? jt->second : alphabet_.involution(jt->second);
    }

    // Reference composition: word alpha_1 ... alpha_n applied as
    // alpha_1(alpha_2(... alpha_n(w))).
    Word apply_word(const std::vector<std::string>& endos, Word w,
                    std::size_t cap = std::size_t(1) << 24) const {
        for (auto it = endos.rbegin(); it != endos.rend(); ++it) {
            Word next;
            for (Letter a : w) {
                Word im = image(*it, a);
                next.insert(next.end(), im.begin(), im.end());
                if (next.size() > cap)
                    throw Error(ErrorCode::CapExceeded, "composition exceeds cap");
            }
            w = std::move(next);
        }
        return w;
    }

    bool positive_letter(Letter a) const { return a <= alphabet_.bar(a); }
    Letter canonical(Letter a) const { return positive_letter(a) ? a : alphabet_.bar(a); }

private:
    InvolutiveAlphabet alphabet_;
    std::map<std::string, std::map<Letter, Word>> images_;
};

struct EndoSlp {
    Slp slp;
    Symbol root;
};

namespace detail {

// Adds the level tower for the composition alpha_1 ... alpha_n to the
// builder: one variable per level and canonical generator, with level i
// expanding alpha_i over level i-1.
inline std::map<Letter, Symbol> endo_tower(SlpBuilder& b, const EndomorphismTable& table,
                                           const std::vector<std::string>& endos,
                                           const std::string& prefix) {
    const InvolutiveAlphabet& g = table.alphabet();
    for (const auto& name : endos)
        if (!table.has(name))
            throw Error(ErrorCode::UnknownEndomorphism, "unknown endomorphism: " + name);
    std::vector<Letter> sigma;
    for (Letter a = 0; a < static_cast<Letter>(g.size()); ++a)
        if (table.positive_letter(a)) sigma.push_back(a);
    std::map<Letter, Symbol> level;
    for (Letter a : sigma)
        level[a] = b.add_terminal(prefix + "0_" + g.name(a), a);
    std::size_t n = endos.size();
    for (std::size_t i = 1; i <= n; ++i) {
        // Level i expands alpha_i over level i-1, so by induction
        // eval(A[i,a]) = alpha_1(...alpha_i(a)).
        const std::string& endo = endos[i - 1];
        std::map<Letter, Symbol> next;
        for (Letter a : sigma) {
            Word im = table.image(endo, a);
            std::vector<Symbol> parts;
            for (Letter c : im)
                parts.push_back(table.positive_letter(c) ? level.at(c)
                                                         : bar(level.at(g.bar(c))));
            std::string name = prefix + std::to_string(i) + "_" + g.name(a);
            if (parts.empty()) {
                next[a] = b.add_empty(name);
            } else if (parts.size() == 1) {
                Symbol e = b.add_empty(b.fresh_name(prefix));
                next[a] = b.add_pair(name, parts[0], e);
            } else {
                while (parts.size() > 2) {
                    std::vector<Symbol> half;
                    for (std::size_t k = 0; k + 1 < parts.size(); k += 2)
                        half.push_back(b.add_pair(b.fresh_name(prefix), parts[k], parts[k + 1]));
                    if (parts.size() % 2) half.push_back(parts.back());
                    parts = std::move(half);
                }
                next[a] = b.add_pair(name, parts[0], parts[1]);
            }
        }
        level = std::move(next);
    }
    return level;
}

}  // namespace detail

// The SLP for alpha_1 ... alpha_n applied to generator a; O(n) variables per
// generator times the image lengths.
inline EndoSlp schleimer_slp(const EndomorphismTable& table,
                             const std::vector<std::string>& endos, Letter a) {
    const InvolutiveAlphabet& g = table.alphabet();
    if (a < 0 || a >= static_cast<Letter>(g.size()))
        throw Error(ErrorCode::UnknownLetter, "letter outside alphabet");
    SlpBuilder b(g);
    auto top = detail::endo_tower(b, table, endos, "A");
    Symbol root = table.positive_letter(a) ? top.at(a) : bar(top.at(g.bar(a)));
    return EndoSlp{b.finalize(), root};
}

// Do the compositions agree as endomorphisms of F(Sigma)?  Checked on every
// generator via the compressed word problem.
inline bool endomorphism_word_problem(const EndomorphismTable& table,
                                      const std::vector<std::string>& word1,
                                      const std::vector<std::string>& word2) {
    const InvolutiveAlphabet& g = table.alphabet();
    if (!g.fixed_point_free())
        throw Error(ErrorCode::NonGroupAlphabet, "word problem needs a group alphabet");
    SlpBuilder b(g);
    auto top1 = detail::endo_tower(b, table, word1, "A");
    auto top2 = detail::endo_tower(b, table, word2, "B");
    std::vector<Symbol> tests;
    for (const auto& [a, s1] : top1)
        tests.push_back(b.add_pair(b.fresh_name("W"), s1, bar(top2.at(a))));
    Slp s = b.finalize();
    ReducedSlp r = reduce_slp(s);
    for (Symbol t : tests)
        if (r.slp.length(r.hat_of(t)) != 0) return false;
    return true;
}

}  // namespace slpwq

#endif
