#ifndef SLPWQ_IG_HPP
#define SLPWQ_IG_HPP

#include <map>
#include <tuple>

#include "slpwq/slp.hpp"

namespace slpwq {

// Interval grammar rule: X -> a, X -> Y[a,b], or X -> Y[a,b] Z[c,d].
struct IgRule {
    enum Kind { Terminal, Slice, SlicePair };
    Kind kind = Terminal;
    Letter letter = -1;  // Terminal only; -1 = empty word
    Symbol y = 0;
    BigInt a, b;
    Symbol z = 0;
    BigInt c, d;

    static IgRule terminal(Letter l) { return IgRule{Terminal, l, 0, 0, 0, 0, 0, 0}; }
    static IgRule slice(Symbol y, BigInt a, BigInt b) {
        return IgRule{Slice, -1, y, std::move(a), std::move(b), 0, 0, 0};
    }
    static IgRule slice_pair(Symbol y, BigInt a, BigInt b, Symbol z, BigInt c, BigInt d) {
        return IgRule{SlicePair, -1, y, std::move(a), std::move(b),
                      z,         std::move(c), std::move(d)};
    }
};

// A validated interval grammar.  eval(X) for X -> Y[a,b] Z[c,d] is
// eval(Y)[a,b] eval(Z)[c,d]; slicing a barred symbol reflects the interval.
class IntervalGrammar {
public:
    IntervalGrammar(InvolutiveAlphabet alphabet, VariableSet variables, std::vector<IgRule> rules)
        : alphabet_(std::move(alphabet)),
          variables_(std::move(variables)),
          rules_(std::move(rules)) {
        validate();
    }

    const InvolutiveAlphabet& alphabet() const { return alphabet_; }
    const VariableSet& variables() const { return variables_; }
    int var_count() const { return variables_.count(); }
    const IgRule& rule(int x) const { return rules_.at(x - 1); }
    const BigInt& length(Symbol s) const { return lengths_.at(var_of(s) - 1); }
    int height(Symbol s) const { return heights_.at(var_of(s) - 1); }
    const std::vector<int>& topo_order() const { return topo_; }
    std::size_t size() const { return rules_.size(); }

    // eval(x)[pos], by descent through the slice offsets.
    Letter letter_at(Symbol x, BigInt pos) const {
        if (pos < 0 || pos >= length(x))
            throw Error(ErrorCode::OutOfRange, "position out of range");
        for (;;) {
            if (!positive(x)) {
                pos = length(x) - 1 - pos;
                x = bar(x);
                // letter_at of the involution needs the barred letter at the
                // mirrored position; handled below once a terminal is hit.
                Letter l = letter_at(x, pos);
                return alphabet_.bar(l);
            }
            const IgRule& r = rules_.at(x - 1);
            switch (r.kind) {
                case IgRule::Terminal:
                    return r.letter;
                case IgRule::Slice:
                    pos += r.a;
                    x = r.y;
                    break;
                case IgRule::SlicePair: {
                    BigInt v = r.b - r.a;
                    if (pos < v) {
                        pos += r.a;
                        x = r.y;
                    } else {
                        pos += r.c - v;
                        x = r.z;
                    }
                    break;
                }
            }
        }
    }

    Word eval(Symbol x, std::uint64_t cap = kDefaultEvalCap) const {
        if (length(x) > cap)
            throw Error(ErrorCode::CapExceeded,
                        "eval of " + variables_.symbol_name(x) + " exceeds cap");
        Word out;
        eval_slice(x, 0, length(x), out);
        return out;
    }

    // eval(x)[lo,hi] materialized.
    Word eval_slice(Symbol x, const BigInt& lo, const BigInt& hi,
                    std::uint64_t cap = kDefaultEvalCap) const {
        if (lo < 0 || lo > hi || hi > length(x))
            throw Error(ErrorCode::IndexOutOfRange, "slice interval out of range");
        if (hi - lo > cap) throw Error(ErrorCode::CapExceeded, "slice exceeds cap");
        Word out;
        eval_slice(x, lo, hi, out);
        return out;
    }

private:
    void eval_slice(Symbol x, BigInt lo, BigInt hi, Word& out) const {
        if (lo >= hi) return;
        if (!positive(x)) {
            // invol(eval(X))[lo,hi] = invol(eval(X)[|X|-hi, |X|-lo])
            Word inner;
            eval_slice(bar(x), length(x) - hi, length(x) - lo, inner);
            Word flipped = alphabet_.involution(inner);
            out.insert(out.end(), flipped.begin(), flipped.end());
            return;
        }
        const IgRule& r = rules_.at(x - 1);
        switch (r.kind) {
            case IgRule::Terminal:
                out.push_back(r.letter);
                return;
            case IgRule::Slice:
                eval_slice(r.y, r.a + lo, r.a + hi, out);
                return;
            case IgRule::SlicePair: {
                BigInt v = r.b - r.a;
                if (hi <= v) {
                    eval_slice(r.y, r.a + lo, r.a + hi, out);
                } else if (lo >= v) {
                    eval_slice(r.z, r.c + lo - v, r.c + hi - v, out);
                } else {
                    eval_slice(r.y, r.a + lo, r.b, out);
                    eval_slice(r.z, r.c, r.c + hi - v, out);
                }
                return;
            }
        }
    }

    void validate() {
        int n = variables_.count();
        if (static_cast<int>(rules_.size()) != n)
            throw Error(ErrorCode::MissingRule, "rule count does not match variable count");
        auto check_ref = [&](Symbol s, int x) {
            if (var_of(s) < 1 || var_of(s) > n)
                throw Error(ErrorCode::UnknownSymbol,
                            "rule for " + variables_.name(x) + " references unknown variable");
        };
        for (int x = 1; x <= n; ++x) {
            const IgRule& r = rules_[x - 1];
            if (r.kind == IgRule::Slice) check_ref(r.y, x);
            if (r.kind == IgRule::SlicePair) {
                check_ref(r.y, x);
                check_ref(r.z, x);
            }
        }
        // Topological order on the quotient identifying X with Xbar.
        std::vector<int> state(n + 1, 0);
        std::vector<int> stack;
        topo_.clear();
        for (int root = 1; root <= n; ++root) {
            if (state[root]) continue;
            stack.push_back(root);
            while (!stack.empty()) {
                int x = stack.back();
                const IgRule& r = rules_[x - 1];
                std::vector<int> kids;
                if (r.kind == IgRule::Slice) kids = {var_of(r.y)};
                if (r.kind == IgRule::SlicePair) kids = {var_of(r.y), var_of(r.z)};
                if (state[x] == 0) {
                    state[x] = 1;
                    for (int y : kids) {
                        if (state[y] == 1)
                            throw Error(ErrorCode::CyclicDependency,
                                        "cyclic dependency through " + variables_.name(y));
                        if (state[y] == 0) stack.push_back(y);
                    }
                } else if (state[x] == 1) {
                    bool ready = true;
                    for (int y : kids)
                        if (state[y] != 2) ready = false;
                    if (!ready)
                        throw Error(ErrorCode::CyclicDependency,
                                    "cyclic dependency through " + variables_.name(x));
                    state[x] = 2;
                    topo_.push_back(x);
                    stack.pop_back();
                } else {
                    stack.pop_back();
                }
            }
        }
        lengths_.assign(n, 0);
        heights_.assign(n, 0);
        for (int x : topo_) {
            const IgRule& r = rules_[x - 1];
            auto check_interval = [&](Symbol y, const BigInt& a, const BigInt& b) {
                if (a < 0 || a > b || b > lengths_[var_of(y) - 1])
                    throw Error(ErrorCode::IndexOutOfRange,
                                "slice bounds out of range in rule for " + variables_.name(x));
            };
            switch (r.kind) {
                case IgRule::Terminal:
                    lengths_[x - 1] = (r.letter < 0) ? 0 : 1;
                    heights_[x - 1] = 1;
                    break;
                case IgRule::Slice:
                    check_interval(r.y, r.a, r.b);
                    lengths_[x - 1] = r.b - r.a;
                    heights_[x - 1] = 1 + heights_[var_of(r.y) - 1];
                    break;
                case IgRule::SlicePair:
                    check_interval(r.y, r.a, r.b);
                    check_interval(r.z, r.c, r.d);
                    lengths_[x - 1] = (r.b - r.a) + (r.d - r.c);
                    heights_[x - 1] = 1 + std::max(heights_[var_of(r.y) - 1],
                                                   heights_[var_of(r.z) - 1]);
                    break;
            }
        }
    }

    InvolutiveAlphabet alphabet_;
    VariableSet variables_;
    std::vector<IgRule> rules_;
    std::vector<BigInt> lengths_;
    std::vector<int> heights_;
    std::vector<int> topo_;
};

inline IntervalGrammar validate_ig(InvolutiveAlphabet alphabet, VariableSet variables,
                                   std::vector<IgRule> rules) {
    return IntervalGrammar(std::move(alphabet), std::move(variables), std::move(rules));
}

// Result of the IG -> SLP conversion.  `of` resolves any slice that was
// needed during the conversion (including all slices occurring in the input
// and the full range of every variable) to a symbol of `slp`.
struct IgConversion {
    Slp slp;
    std::map<std::tuple<int, BigInt, BigInt>, Symbol> slices;

    Symbol of(Symbol x, const BigInt& lo, const BigInt& hi) const {
        if (!positive(x)) {
            const BigInt& n = len_of(var_of(x));
            return bar(of(bar(x), n - hi, n - lo));
        }
        auto it = slices.find({x, lo, hi});
        if (it == slices.end())
            throw Error(ErrorCode::OutOfRange, "slice was not materialized by the conversion");
        return it->second;
    }

    Symbol of_full(int x) const {
        auto it = full.find(x);
        if (it == full.end())
            throw Error(ErrorCode::UnknownVariable, "variable not in conversion result");
        return it->second;
    }

    std::map<int, BigInt> lengths;  // input-variable lengths, for `of`
    std::map<int, Symbol> full;     // input variable -> output symbol

private:
    const BigInt& len_of(int x) const {
        auto it = lengths.find(x);
        if (it == lengths.end())
            throw Error(ErrorCode::UnknownVariable, "variable not in conversion result");
        return it->second;
    }
};

namespace detail {

// Weight-reducing elimination of sliced symbols.  Each slice X[lo,hi] with
// weight H = h(X) for lo = 0 and 2h(X) otherwise is replaced by material of
// strictly smaller total weight: straddling slices become a pair of child
// prefix/suffix slices, one-sided slices are renamed into the child, and
// slices of length <= 1 bottom out at shared terminal variables.
class IgConverter {
public:
    explicit IgConverter(const IntervalGrammar& ig) : ig_(ig), builder_(ig.alphabet()) {}

    IgConversion run() {
        // Reserve the input variable names for the full-range copies so the
        // output SLP reads like the input grammar.
        for (int x = 1; x <= ig_.var_count(); ++x)
            full_var_[x] = builder_.declare(ig_.variables().name(x));
        // Deterministic processing order: height, then name, then interval.
        std::vector<int> order(ig_.topo_order());
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (ig_.height(a) != ig_.height(b)) return ig_.height(a) < ig_.height(b);
            return ig_.variables().name(a) < ig_.variables().name(b);
        });
        for (int x : order) define_full(x);
        // Materialize the slices that occur textually in the input.
        for (int x = 1; x <= ig_.var_count(); ++x) {
            const IgRule& r = ig_.rule(x);
            if (r.kind == IgRule::Slice) resolve(r.y, r.a, r.b);
            if (r.kind == IgRule::SlicePair) {
                resolve(r.y, r.a, r.b);
                resolve(r.z, r.c, r.d);
            }
        }
        IgConversion out{builder_.finalize(), memo_};
        for (int x = 1; x <= ig_.var_count(); ++x) {
            out.lengths[x] = ig_.length(x);
            out.full[x] = full_var_[x];
        }
        return out;
    }

private:
    // The output symbol for eval(x)[lo,hi]; x may be barred.
    Symbol resolve(Symbol x, const BigInt& lo, const BigInt& hi) {
        if (!positive(x)) {
            const BigInt& n = ig_.length(x);
            return bar(resolve(bar(x), n - hi, n - lo));
        }
        if (lo == 0 && hi == ig_.length(x)) return full_var_[x];
        auto key = std::make_tuple(var_of(x), lo, hi);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        Symbol s = resolve_uncached(x, lo, hi);
        memo_.emplace(key, s);
        return s;
    }

    Symbol resolve_uncached(int x, const BigInt& lo, const BigInt& hi) {
        if (hi == lo) return empty_var();
        if (hi - lo == 1) return letter_var(ig_.letter_at(x, lo));
        const IgRule& r = ig_.rule(x);
        switch (r.kind) {
            case IgRule::Terminal:
                throw Error(ErrorCode::InternalInvariantViolation, "slice of terminal, len >= 2");
            case IgRule::Slice:
                // eval(X) = eval(Y)[a,b]; rename into the child (weight
                // 2h(Y) < 2h(X)).
                return resolve(r.y, r.a + lo, r.a + hi);
            case IgRule::SlicePair: {
                BigInt v = r.b - r.a;
                if (hi <= v) return resolve(r.y, r.a + lo, r.a + hi);
                if (lo >= v) return resolve(r.z, r.c + lo - v, r.c + hi - v);
                // Straddling: suffix of the left child, prefix of the right
                // child; their weights are h(Y) + h(Z) < 2 h(X).
                if (ig_.height(r.y) + ig_.height(r.z) >= 2 * ig_.height(x))
                    throw Error(ErrorCode::InternalInvariantViolation,
                                "weight did not decrease");
                Symbol p = resolve(r.y, r.a + lo, r.b);
                Symbol q = resolve(r.z, r.c, r.c + hi - v);
                return builder_.add_pair(
                    builder_.fresh_name(ig_.variables().name(x)), p, q);
            }
        }
        throw Error(ErrorCode::InternalInvariantViolation, "unreachable");
    }

    void define_full(int x) {
        const IgRule& r = ig_.rule(x);
        int var = full_var_[x];
        switch (r.kind) {
            case IgRule::Terminal:
                builder_.define(var, r.letter < 0 ? Rule::empty() : Rule::terminal(r.letter));
                return;
            case IgRule::Slice: {
                Symbol s = resolve(r.y, r.a, r.b);
                builder_.define(var, Rule::pair(s, empty_var()));
                return;
            }
            case IgRule::SlicePair: {
                Symbol p = resolve(r.y, r.a, r.b);
                Symbol q = resolve(r.z, r.c, r.d);
                builder_.define(var, Rule::pair(p, q));
                return;
            }
        }
    }

    Symbol empty_var() {
        if (empty_ == 0) empty_ = builder_.add_empty(builder_.fresh_name("E"));
        return empty_;
    }

    Symbol letter_var(Letter a) {
        if (a < 0) return empty_var();
        auto it = letter_vars_.find(a);
        if (it != letter_vars_.end()) return it->second;
        Symbol s = builder_.add_terminal(builder_.fresh_name("L"), a);
        letter_vars_.emplace(a, s);
        return s;
    }

    const IntervalGrammar& ig_;
    SlpBuilder builder_;
    std::map<int, Symbol> full_var_;
    std::map<std::tuple<int, BigInt, BigInt>, Symbol> memo_;
    std::map<Letter, Symbol> letter_vars_;
    Symbol empty_ = 0;
};

}  // namespace detail

inline IgConversion ig_to_slp(const IntervalGrammar& ig) {
    return detail::IgConverter(ig).run();
}

}  // namespace slpwq

#endif
