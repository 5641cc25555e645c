#include <catch2/catch_amalgamated.hpp>

#include "slpwq/queries.hpp"
#include "test_util.hpp"

using namespace slpwq;
using namespace slpwq::testutil;

namespace {

bool naive_commutes(const Word& u, const Word& v) {
    Word uv = u, vu = v;
    uv.insert(uv.end(), v.begin(), v.end());
    vu.insert(vu.end(), u.begin(), u.end());
    return uv == vu;
}

}  // namespace

TEST_CASE("commutes agrees with direct concatenation on random words") {
    std::mt19937 rng(42);
    std::uniform_int_distribution<int> len(0, 12), letter(0, 2);
    for (int iter = 0; iter < 2000; ++iter) {
        Word u(len(rng)), v(len(rng));
        for (auto& l : u) l = letter(rng);
        for (auto& l : v) l = letter(rng);
        REQUIRE(commutes(u, v) == naive_commutes(u, v));
    }
    // Powers of a common root commute.
    Word r{0, 1, 0};
    Word u, v;
    for (int i = 0; i < 3; ++i) u.insert(u.end(), r.begin(), r.end());
    for (int i = 0; i < 5; ++i) v.insert(v.end(), r.begin(), r.end());
    REQUIRE(commutes(u, v));
}

TEST_CASE("merge_mixed") {
    auto [a, b] = merge_mixed(BigInt(20), BigInt(4), BigInt(6));
    REQUIRE(a == 20);
    REQUIRE(b == 18);  // gcd(4, 6) = 2
    REQUIRE_THROWS_MATCHES(merge_mixed(BigInt(5), BigInt(3), BigInt(2)), Error,
                           Catch::Matchers::Predicate<Error>([](const Error& e) {
                               return e.code() == ErrorCode::PreconditionViolated;
                           }));
    REQUIRE_THROWS_MATCHES(merge_mixed(BigInt(5), BigInt(2), BigInt(5)), Error,
                           Catch::Matchers::Predicate<Error>([](const Error& e) {
                               return e.code() == ErrorCode::PreconditionViolated;
                           }));
}

TEST_CASE("interval questions agree with extraction on random grammars") {
    std::mt19937 rng(2024);
    for (int iter = 0; iter < 300; ++iter) {
        Slp s = random_slp(rng, 10);
        std::vector<IntervalQuestion> qs;
        std::vector<bool> expected;
        std::uniform_int_distribution<int> pick(1, s.var_count());
        for (int q = 0; q < 8; ++q) {
            Symbol x = pick(rng), y = pick(rng);
            if (rng() & 1) x = bar(x);
            if (rng() & 1) y = bar(y);
            Word wx = naive_eval(s, x), wy = naive_eval(s, y);
            std::uniform_int_distribution<std::size_t> px(0, wx.size());
            std::size_t i = px(rng), j = px(rng);
            if (i > j) std::swap(i, j);
            std::size_t n = j - i;
            if (n > wy.size()) continue;
            std::uniform_int_distribution<std::size_t> py(0, wy.size() - n);
            std::size_t k = py(rng);
            qs.push_back(IntervalQuestion{x, BigInt(i), BigInt(j), y, BigInt(k), BigInt(k + n)});
            expected.push_back(Word(wx.begin() + i, wx.begin() + j) ==
                               Word(wy.begin() + k, wy.begin() + k + n));
        }
        REQUIRE(answer_interval_questions(s, qs) == expected);
    }
}

TEST_CASE("malformed questions are errors, not negatives") {
    std::mt19937 rng(1);
    Slp s = random_slp(rng, 6);
    Symbol x = 1;
    BigInt lx = s.length(x);
    BigInt wrong = (lx == 0) ? BigInt(lx + 1) : BigInt(lx - 1);
    std::vector<IntervalQuestion> bad{{x, 0, lx, x, 0, wrong}};
    REQUIRE_THROWS_MATCHES(answer_interval_questions(s, bad), Error,
                           Catch::Matchers::Predicate<Error>([](const Error& e) {
                               return e.code() == ErrorCode::MalformedQuestion;
                           }));
    std::vector<IntervalQuestion> oob{{x, 0, lx + 1, x, 0, lx + 1}};
    REQUIRE_THROWS_MATCHES(answer_interval_questions(s, oob), Error,
                           Catch::Matchers::Predicate<Error>([](const Error& e) {
                               return e.code() == ErrorCode::MalformedQuestion;
                           }));
}

TEST_CASE("equality of astronomically long words") {
    InvolutiveAlphabet g = ab_group_alphabet();
    SlpBuilder b(g);
    Symbol a = b.add_terminal("Ta", g.id("a"));
    // a^(2^40) built two structurally different ways
    Symbol x = power_symbol(b, a, BigInt(1) << 40, "X");
    Symbol a32 = power_symbol(b, a, 32, "Y");
    Symbol y = power_symbol(b, a32, (BigInt(1) << 40) / 32, "Y");
    // and a near miss of length 2^40 with one b in the middle
    Symbol bb = b.add_terminal("Tb", g.id("b"));
    Symbol half = power_symbol(b, a, (BigInt(1) << 39) - 1, "Z");
    Symbol z0 = b.add_pair("Z0", half, bb);
    Symbol z1 = b.add_pair("Z1", z0, half);
    Symbol z = b.add_pair("Zr", z1, a);
    Slp s = b.finalize();
    REQUIRE(s.length(x) == BigInt(1) << 40);
    REQUIRE(s.length(y) == BigInt(1) << 40);
    REQUIRE(s.length(z) == BigInt(1) << 40);
    REQUIRE(equal_eval(s, x, y));
    REQUIRE_FALSE(equal_eval(s, x, z));
    REQUIRE(longest_common_prefix(s, x, z) == (BigInt(1) << 39) - 1);
    REQUIRE(longest_common_prefix(s, x, y) == BigInt(1) << 40);
}

TEST_CASE("lcp agrees with naive on random grammars") {
    std::mt19937 rng(99);
    for (int iter = 0; iter < 300; ++iter) {
        Slp s = random_slp(rng, 10);
        std::uniform_int_distribution<int> pick(1, s.var_count());
        Symbol x = pick(rng), y = pick(rng);
        if (rng() & 1) x = bar(x);
        if (rng() & 1) y = bar(y);
        Word wx = naive_eval(s, x), wy = naive_eval(s, y);
        std::size_t p = 0;
        while (p < wx.size() && p < wy.size() && wx[p] == wy[p]) ++p;
        REQUIRE(longest_common_prefix(s, x, y) == BigInt(p));
    }
}

TEST_CASE("equal_eval agrees with naive on random grammars") {
    std::mt19937 rng(555);
    int positives = 0;
    for (int iter = 0; iter < 400; ++iter) {
        Slp s = random_slp(rng, 9);
        std::uniform_int_distribution<int> pick(1, s.var_count());
        Symbol x = pick(rng), y = pick(rng);
        if (rng() & 1) x = bar(x);
        if (rng() & 1) y = bar(y);
        bool naive = naive_eval(s, x) == naive_eval(s, y);
        positives += naive;
        REQUIRE(equal_eval(s, x, y) == naive);
    }
    REQUIRE(positives > 0);  // the sample exercises the true branch
}
