#ifndef SLPWQ_TEST_UTIL_HPP
#define SLPWQ_TEST_UTIL_HPP

#include <random>

#include "slpwq/build.hpp"
#include "slpwq/slp.hpp"

namespace slpwq::testutil {

inline InvolutiveAlphabet ab_group_alphabet() {
    InvolutiveAlphabet g;
    g.add_pair("a", "A");
    g.add_pair("b", "B");
    return g;
}

// Small random SLP over a/A, b/B: each variable is a terminal, the empty
// word, or a pair of (possibly barred) earlier variables.
inline Slp random_slp(std::mt19937& rng, int vars, bool allow_empty = true) {
    InvolutiveAlphabet g = ab_group_alphabet();
    SlpBuilder b(g);
    std::uniform_int_distribution<int> coin(0, 99);
    for (int i = 0; i < vars; ++i) {
        std::string name = "V" + std::to_string(i);
        int roll = coin(rng);
        if (i < 2 || roll < 25) {
            if (allow_empty && roll < 5)
                b.add_empty(name);
            else
                b.add_terminal(name, static_cast<Letter>(roll % 4));
        } else {
            std::uniform_int_distribution<int> pick(0, i - 1);
            auto draw = [&]() {
                Symbol s = pick(rng) + 1;
                return coin(rng) < 50 ? s : bar(s);
            };
            b.add_pair(name, draw(), draw());
        }
    }
    return b.finalize();
}

// Reference decompression by direct recursion on the rules.
inline Word naive_eval(const Slp& slp, Symbol x) {
    Rule r = slp.rule_of(x);
    if (r.kind == Rule::Terminal) {
        Word w;
        if (r.letter >= 0) w.push_back(r.letter);
        return w;
    }
    Word out = naive_eval(slp, r.left);
    Word right = naive_eval(slp, r.right);
    out.insert(out.end(), right.begin(), right.end());
    return out;
}

}  // namespace slpwq::testutil

#endif
