#ifndef SLPWQ_REORDER_HPP
#define SLPWQ_REORDER_HPP

#include <functional>
#include <map>

#include "slpwq/alphabet.hpp"

namespace slpwq {

// Run-length form of a reduced index sequence: (x1 y1)^e1 (x2 y2)^e2 ... d,
// with an optional single tail letter d.
struct IndexRun {
    int x, y;
    long exp;
};

struct ReorderedWord {
    std::vector<IndexRun> runs;
    int tail = -1;

    std::vector<int> expand() const {
        std::vector<int> out;
        for (const IndexRun& r : runs)
            for (long i = 0; i < r.exp; ++i) {
                out.push_back(r.x);
                out.push_back(r.y);
            }
        if (tail >= 0) out.push_back(tail);
        return out;
    }

    long length() const {
        long n = (tail >= 0) ? 1 : 0;
        for (const IndexRun& r : runs) n += 2 * r.exp;
        return n;
    }
};

namespace detail {

using PairType = std::pair<int, int>;  // unordered, stored (min, max)

inline PairType ptype(int x, int y) { return {std::min(x, y), std::max(x, y)}; }

// Arranges one run per pair type so that the word starts with `a`, ends with
// `c`, and neighbouring runs meet in distinct letters.  Types are few (at
// most one per unordered letter pair), so exhaustive search is fine.
inline bool arrange(const std::map<PairType, long>& types, int a, int c,
                    std::vector<IndexRun>& out) {
    std::vector<std::pair<PairType, long>> list(types.begin(), types.end());
    std::vector<bool> used(list.size(), false);
    out.clear();

    std::function<bool()> step = [&]() {
        if (out.size() == list.size()) return out.back().y == c;
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (used[i]) continue;
            auto [t, cnt] = list[i];
            for (int o = 0; o < 2; ++o) {
                int s = o ? t.second : t.first;
                int e = o ? t.first : t.second;
                if (s == e) continue;
                if (out.empty() ? s != a : s == out.back().y) continue;
                used[i] = true;
                out.push_back(IndexRun{s, e, cnt});
                if (step()) return true;
                out.pop_back();
                used[i] = false;
            }
        }
        return false;
    };
    return step();
}

inline std::vector<int> alphabet_of(const std::map<int, long>& counts) {
    std::vector<int> out;
    for (const auto& [x, n] : counts)
        if (n > 0) out.push_back(x);
    return out;
}

}  // namespace detail

// Rebuilds a reduced index sequence into run-length form with the same
// letter counts and the same first and last letters.  The output has at most
// one run per unordered letter pair plus an optional tail letter.
inline ReorderedWord reorder(const std::vector<int>& w) {
    long n = static_cast<long>(w.size());
    if (n == 0) throw Error(ErrorCode::PreconditionViolated, "empty index sequence");
    for (long i = 0; i + 1 < n; ++i)
        if (w[i] == w[i + 1])
            throw Error(ErrorCode::NotReduced, "index sequence repeats a position");
    int a = w.front(), c = w.back();
    std::map<int, long> counts;
    for (int x : w) ++counts[x];
    std::vector<int> alph = detail::alphabet_of(counts);
    ReorderedWord out;

    if (alph.size() <= 2) {
        // The sequence is forced: (ac)^(n/2) or (ab)^(n/2) a.
        if (n % 2 == 0) {
            out.runs.push_back(IndexRun{a, c, n / 2});
        } else {
            if (n > 1) out.runs.push_back(IndexRun{a, w[1], n / 2});
            out.tail = a;
        }
        return out;
    }

    if (2 * counts[a] >= n) {
        if (n % 2 == 1) {
            // a occupies every other position; a = c and each other letter
            // pairs with a.
            for (int b : alph)
                if (b != a) out.runs.push_back(IndexRun{a, b, counts[b]});
            out.tail = a;
        } else if (a != c) {
            for (int b : alph)
                if (b != a && b != c) out.runs.push_back(IndexRun{a, b, counts[b]});
            out.runs.push_back(IndexRun{a, c, counts[c]});
        } else {
            // a = c: start with one (a b) run, continue with (b a) runs.
            bool head = true;
            for (int b : alph) {
                if (b == a) continue;
                if (head)
                    out.runs.push_back(IndexRun{a, b, counts[b]});
                else
                    out.runs.push_back(IndexRun{b, a, counts[b]});
                head = false;
            }
        }
        return out;
    }

    if (n % 2 == 1) {
        // Drop the final letter, rebuild the even-length rest, reattach the
        // letter as the tail; the rest ends in w[n-2] != c so this stays
        // reduced.
        std::vector<int> head(w.begin(), w.end() - 1);
        out = reorder(head);
        if (out.tail >= 0)
            throw Error(ErrorCode::InternalInvariantViolation, "even rebuild produced a tail");
        out.tail = c;
        return out;
    }

    // Even length with a in the minority: pair up positions so each pair has
    // two distinct letters, one run per pair type.
    std::map<int, long> rem = counts;
    std::map<detail::PairType, long> types;
    for (long step = 0; step < n / 2; ++step) {
        // Pair the two most frequent remaining letters; counts never exceed
        // half the remainder, so this always finds a valid pair.
        int x = -1, y = -1;
        for (const auto& [l, k] : rem) {
            if (k == 0) continue;
            if (x < 0 || k > rem[x]) {
                y = x;
                x = l;
            } else if (y < 0 || k > rem[y]) {
                y = l;
            }
        }
        if (y < 0)
            throw Error(ErrorCode::InternalInvariantViolation, "pairing ran out of letters");
        --rem[x];
        --rem[y];
        ++types[detail::ptype(x, y)];
    }

    if (detail::arrange(types, a, c, out.runs)) return out;

    // Repair: exchange partners across two pair types and retry.
    std::vector<detail::PairType> keys;
    for (const auto& [t, k] : types) keys.push_back(t);
    for (std::size_t i = 0; i < keys.size(); ++i) {
        for (std::size_t j = 0; j < keys.size(); ++j) {
            if (i == j) continue;
            auto [w1, x1] = keys[i];
            auto [y1, z1] = keys[j];
            for (auto [p, q] : {std::pair<detail::PairType, detail::PairType>{
                                    detail::ptype(w1, y1), detail::ptype(x1, z1)},
                                {detail::ptype(w1, z1), detail::ptype(x1, y1)}}) {
                if (p.first == p.second || q.first == q.second) continue;
                std::map<detail::PairType, long> t2 = types;
                if (--t2[keys[i]] == 0) t2.erase(keys[i]);
                if (--t2[keys[j]] == 0) t2.erase(keys[j]);
                ++t2[p];
                ++t2[q];
                if (detail::arrange(t2, a, c, out.runs)) return out;
            }
        }
    }
    throw Error(ErrorCode::InternalInvariantViolation, "no reduced arrangement found");
}

}  // namespace slpwq

#endif
