#ifndef SLPWQ_QUERIES_HPP
#define SLPWQ_QUERIES_HPP

#include <map>
#include <set>
#include <tuple>

#include "slpwq/slp.hpp"

namespace slpwq {

// uv = vu, decided via the Fine-Wilf criterion: commuting words are powers
// of a common primitive root of length gcd(|u|,|v|).
inline bool commutes(const Word& u, const Word& v) {
    if (u.empty() || v.empty()) return true;
    BigInt g = big_gcd(BigInt(u.size()), BigInt(v.size()));
    std::size_t root = static_cast<std::size_t>(to_long(g));
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u[i] != u[i % root]) return false;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != u[i % root]) return false;
    return true;
}

// The bookkeeping primitive of the interval-question engine: the three mixed
// questions at offsets j, j-p, j-q are jointly equivalent to the two at
// offsets j, j-gcd(p,q).
inline std::pair<BigInt, BigInt> merge_mixed(const BigInt& j, const BigInt& p, const BigInt& q) {
    if (!(1 <= p && p < q && q < j))
        throw Error(ErrorCode::PreconditionViolated, "merge_mixed requires 1 <= p < q < j");
    return {j, j - big_gcd(p, q)};
}

// X[i,j] ?= Y[k,l]: true iff 0 <= j-i = l-k <= min(|X|,|Y|) and the factors
// agree.  Out-of-range indices or mismatched lengths are reported as
// MalformedQuestion, not treated as false.
struct IntervalQuestion {
    Symbol x;
    BigInt i, j;
    Symbol y;
    BigInt k, l;
};

namespace detail {

// Standard-type question A[i,j] ?= B[0, j-i].
struct StdQuestion {
    Symbol a;
    BigInt i, j;
    Symbol b;
};

// Decides the conjunction of a batch of standard questions without
// decompression.  Questions are processed top-down by h(A)+h(B); straddling
// splits generate mixed questions, of which at most two per ordered variable
// pair are retained via merge_mixed.
class QuestionEngine {
public:
    explicit QuestionEngine(const Slp& slp) : slp_(slp) {}

    bool all_true(std::vector<StdQuestion> qs) {
        work_.clear();
        mixed_.clear();
        for (auto& q : qs)
            if (!push_standard(q)) return false;
        for (;;) {
            auto next = pop_max();
            if (!next) return true;
            if (!step(*next)) return false;
        }
    }

private:
    using Key = std::tuple<int, Symbol, BigInt, BigInt, Symbol>;  // (hsum, a, i, j, b)

    int hsum(const StdQuestion& q) const { return slp_.height(q.a) + slp_.height(q.b); }

    // Returns false if the question is immediately false.
    bool push_standard(const StdQuestion& q) {
        BigInt n = q.j - q.i;
        if (n == 0) return true;
        if (q.a == q.b && q.i == 0) return true;
        if (n == 1) return slp_.letter_at(q.a, q.i) == slp_.letter_at(q.b, 0);
        work_.insert(Key{hsum(q), q.a, q.i, q.j, q.b});
        return true;
    }

    // Mixed question: prefix of eval(X) of length t equals the length-t
    // suffix of eval(Y).  Stored under a canonical orientation, since
    // mixed(X,t,Y) is equivalent to mixed(Ybar,t,Xbar).
    bool push_mixed(Symbol x, BigInt t, Symbol y) {
        if (t == 0) return true;
        if (t == 1) return slp_.letter_at(x, 0) == slp_.letter_at(y, slp_.length(y) - 1);
        std::pair<Symbol, Symbol> key{x, y};
        std::pair<Symbol, Symbol> alt{bar(y), bar(x)};
        if (alt < key) key = alt;
        auto& offsets = mixed_[key];
        offsets.insert(t);  // the offset is the same in either orientation
        while (offsets.size() > 2) {
            auto it = offsets.rbegin();
            BigInt o3 = *it++;
            BigInt o2 = *it++;
            BigInt o1 = *it;
            auto kept = merge_mixed(o3, o3 - o2, o3 - o1);
            offsets.erase(o1);
            offsets.erase(o2);
            if (kept.second > 0) offsets.insert(kept.second);
        }
        return true;
    }

    // The mixed question for pair (X,Y) at offset t, viewed as the standard
    // question Y[|Y|-t, |Y|] ?= X[0, t].
    StdQuestion mixed_as_standard(Symbol x, const BigInt& t, Symbol y) const {
        return StdQuestion{y, slp_.length(y) - t, slp_.length(y), x};
    }

    std::optional<StdQuestion> pop_max() {
        int best_h = -1;
        bool best_is_mixed = false;
        std::map<std::pair<Symbol, Symbol>, std::set<BigInt>>::iterator best_store;
        if (!work_.empty()) best_h = std::get<0>(*work_.rbegin());
        for (auto it = mixed_.begin(); it != mixed_.end(); ++it) {
            if (it->second.empty()) continue;
            int h = slp_.height(it->first.first) + slp_.height(it->first.second);
            if (h > best_h) {
                best_h = h;
                best_is_mixed = true;
                best_store = it;
            }
        }
        if (best_h < 0) return std::nullopt;
        if (best_is_mixed) {
            Symbol x = best_store->first.first;
            Symbol y = best_store->first.second;
            BigInt t = *best_store->second.rbegin();
            best_store->second.erase(std::prev(best_store->second.end()));
            if (best_store->second.empty()) mixed_.erase(best_store);
            return mixed_as_standard(x, t, y);
        }
        auto it = std::prev(work_.end());
        Key k = *it;
        work_.erase(it);
        return StdQuestion{std::get<1>(k), std::get<2>(k), std::get<3>(k), std::get<4>(k)};
    }

    // One replacement step on a standard question with a pair rule A -> CD.
    bool step(const StdQuestion& q) {
        BigInt n = q.j - q.i;
        Rule r = slp_.rule_of(q.a);
        if (r.kind == Rule::Terminal)
            throw Error(ErrorCode::InternalInvariantViolation, "terminal with |A| >= 2");
        Symbol c = r.left, d = r.right;
        const BigInt& lc = slp_.length(c);
        if (q.j <= lc) return push_standard(StdQuestion{c, q.i, q.j, q.b});
        if (q.i >= lc) return push_standard(StdQuestion{d, q.i - lc, q.j - lc, q.b});
        BigInt t = lc - q.i;  // prefix of B matched against a suffix of C
        if (!push_mixed(q.b, t, c)) return false;
        return push_standard(StdQuestion{q.b, t, n, d});
    }

    const Slp& slp_;
    std::set<Key> work_;
    std::map<std::pair<Symbol, Symbol>, std::set<BigInt>> mixed_;
};

// Phase 1: rewrite one general interval question into standard questions by
// descending pair rules on the left operand.
inline bool to_standard(const Slp& slp, Symbol a, BigInt i, BigInt j, Symbol b, BigInt k,
                        std::vector<StdQuestion>& out) {
    for (;;) {
        BigInt n = j - i;
        if (n == 0) return true;
        if (k == 0) {
            out.push_back(StdQuestion{a, i, j, b});
            return true;
        }
        if (n == 1) return slp.letter_at(a, i) == slp.letter_at(b, k);
        Rule r = slp.rule_of(a);
        if (r.kind == Rule::Terminal)
            throw Error(ErrorCode::InternalInvariantViolation, "terminal with |A| >= 2");
        const BigInt& lc = slp.length(r.left);
        if (j <= lc) {
            a = r.left;
        } else if (i >= lc) {
            a = r.right;
            i -= lc;
            j -= lc;
        } else {
            // A[i,j] straddles the junction: suffix of C against B[k,m],
            // then B[m, k+n] against a prefix of D.
            BigInt m = k + (lc - i);
            // C[i,|C|] = B[k,m]  <=>  Bbar[|B|-m, |B|-k] = Cbar[0, m-k]
            out.push_back(
                StdQuestion{bar(b), slp.length(b) - m, slp.length(b) - k, bar(r.left)});
            a = r.right;
            j = n - (m - k);
            i = 0;
            k = m;
        }
    }
}

}  // namespace detail

// Answers each question exactly; malformed questions raise MalformedQuestion.
inline std::vector<bool> answer_interval_questions(const Slp& slp,
                                                   const std::vector<IntervalQuestion>& qs) {
    for (const auto& q : qs) {
        if (q.i < 0 || q.i > q.j || q.j > slp.length(q.x) || q.k < 0 || q.k > q.l ||
            q.l > slp.length(q.y) || q.j - q.i != q.l - q.k)
            throw Error(ErrorCode::MalformedQuestion, "malformed interval question");
    }
    std::vector<bool> answers;
    answers.reserve(qs.size());
    detail::QuestionEngine engine(slp);
    for (const auto& q : qs) {
        std::vector<detail::StdQuestion> std_qs;
        bool ok = detail::to_standard(slp, q.x, q.i, q.j, q.y, q.k, std_qs);
        answers.push_back(ok && engine.all_true(std::move(std_qs)));
    }
    return answers;
}

inline bool equal_eval(const Slp& slp, Symbol x, Symbol y) {
    if (slp.length(x) != slp.length(y)) return false;
    detail::QuestionEngine engine(slp);
    std::vector<detail::StdQuestion> qs;
    if (!detail::to_standard(slp, x, 0, slp.length(x), y, 0, qs)) return false;
    return engine.all_true(std::move(qs));
}

// Length of the longest common prefix of eval(x) and eval(y), by binary
// search over standard interval questions.
inline BigInt longest_common_prefix(const Slp& slp, Symbol x, Symbol y) {
    BigInt lo = 0, hi = std::min(slp.length(x), slp.length(y));
    detail::QuestionEngine engine(slp);
    auto prefix_eq = [&](const BigInt& p) {
        if (p == 0) return true;
        std::vector<detail::StdQuestion> qs;
        if (!detail::to_standard(slp, x, 0, p, y, 0, qs)) return false;
        return engine.all_true(std::move(qs));
    };
    while (lo < hi) {
        BigInt mid = lo + (hi - lo + 1) / 2;
        if (prefix_eq(mid))
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

}  // namespace slpwq

#endif
