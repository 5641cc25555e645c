#include <catch2/catch_amalgamated.hpp>

#include "slpwq/equation.hpp"
#include "test_util.hpp"

using namespace slpwq;
using namespace slpwq::testutil;

namespace {

InvolutiveAlphabet abc_alphabet() {
    InvolutiveAlphabet g;
    g.add_pair("a", "A");
    g.add_pair("b", "B");
    g.add_pair("c", "C");
    return g;
}

Word parse_word(const InvolutiveAlphabet& g, const std::string& s) {
    Word w;
    for (char ch : s) w.push_back(g.id(std::string(1, ch)));
    return w;
}

// The worked fixture: A X B ~X ~A = Y ~B Y ~A B ~Y with A = "a", B = "b",
// sigma(X) = bcbCBBabc, sigma(Y) = abcbCB (uppercase = barred letters).
struct Fixture {
    EquationSystem sys;
    SolutionAssignment sol;
    int A, B, X, Y;
};

Fixture make_fixture() {
    Fixture f;
    f.sys.gamma = abc_alphabet();
    f.A = f.sys.vars.add("Av");
    f.B = f.sys.vars.add("Bv");
    f.X = f.sys.vars.add("X");
    f.Y = f.sys.vars.add("Y");
    Equation e;
    e.lhs = {f.A, f.X, f.B, bar(f.X), bar(f.A)};
    e.rhs = {f.Y, bar(f.B), f.Y, bar(f.A), f.B, bar(f.Y)};
    f.sys.equations.push_back(e);
    f.sys.constants[f.A] = parse_word(f.sys.gamma, "a");
    f.sys.constants[f.B] = parse_word(f.sys.gamma, "b");
    f.sol.sigma[f.A] = parse_word(f.sys.gamma, "a");
    f.sol.sigma[f.B] = parse_word(f.sys.gamma, "b");
    f.sol.sigma[f.X] = parse_word(f.sys.gamma, "bcbCBBabc");
    f.sol.sigma[f.Y] = parse_word(f.sys.gamma, "abcbCB");
    return f;
}

}  // namespace

TEST_CASE("identity equation accepts any assignment") {
    EquationSystem sys;
    sys.gamma = abc_alphabet();
    int x = sys.vars.add("X");
    sys.equations.push_back(Equation{{x}, {x}});
    SolutionAssignment sol;
    sol.sigma[x] = parse_word(sys.gamma, "cab");
    REQUIRE(verify_solution(sys, sol));
}

TEST_CASE("worked example verifies; a shortened assignment does not") {
    Fixture f = make_fixture();
    REQUIRE(verify_solution(f.sys, f.sol));
    SolutionAssignment bad = f.sol;
    bad.sigma[f.Y].pop_back();
    REQUIRE_FALSE(verify_solution(f.sys, bad));
}

TEST_CASE("missing assignments are errors") {
    EquationSystem sys;
    sys.gamma = abc_alphabet();
    int x = sys.vars.add("X");
    sys.equations.push_back(Equation{{x}, {x}});
    SolutionAssignment sol;
    REQUIRE_THROWS_MATCHES(verify_solution(sys, sol), Error,
                           Catch::Matchers::Predicate<Error>([](const Error& e) {
                               return e.code() == ErrorCode::MissingAssignment;
                           }));
}

TEST_CASE("compressed verification avoids decompression") {
    EquationSystem sys;
    sys.gamma = abc_alphabet();
    int x = sys.vars.add("X");
    int y = sys.vars.add("Y");
    sys.equations.push_back(Equation{{x}, {y, y}});
    SlpBuilder b(sys.gamma);
    Symbol a = b.add_terminal("Ta", sys.gamma.id("a"));
    Symbol ybig = power_symbol(b, a, BigInt(1) << 29, "Py");
    Symbol xbig = power_symbol(b, a, BigInt(1) << 30, "Px");
    Symbol tb = b.add_terminal("Tb", sys.gamma.id("b"));
    Symbol xbad = b.add_pair("Bad", xbig, tb);
    Slp s = b.finalize();
    REQUIRE(verify_solution_compressed(sys, s, {{x, xbig}, {y, ybig}}));
    REQUIRE_FALSE(verify_solution_compressed(sys, s, {{x, xbad}, {y, ybig}}));
}

TEST_CASE("compressed verification matches plain verification on random systems") {
    std::mt19937 rng(808);
    InvolutiveAlphabet g = abc_alphabet();
    std::uniform_int_distribution<int> wlen(1, 20), parts(2, 4), letter(0, 5);
    for (int iter = 0; iter < 60; ++iter) {
        // Plant a solution: one word, two random factorizations.
        Word w(wlen(rng));
        for (auto& l : w) l = letter(rng);
        EquationSystem sys;
        sys.gamma = g;
        SolutionAssignment sol;
        std::map<Word, int> dict;
        auto factorize = [&](std::vector<Symbol>& side) {
            int k = parts(rng);
            std::vector<std::size_t> splits{0, w.size()};
            for (int i = 1; i < k; ++i)
                splits.push_back(std::uniform_int_distribution<std::size_t>(0, w.size())(rng));
            std::sort(splits.begin(), splits.end());
            for (std::size_t i = 0; i + 1 < splits.size(); ++i) {
                Word part(w.begin() + splits[i], w.begin() + splits[i + 1]);
                Word inv = g.involution(part);
                if (dict.count(part)) {
                    side.push_back(dict[part]);
                } else if (dict.count(inv)) {
                    side.push_back(bar(Symbol(dict[inv])));
                } else {
                    int v = sys.vars.add("V" + std::to_string(dict.size()));
                    dict[part] = v;
                    sol.sigma[v] = part;
                    side.push_back(v);
                }
            }
        };
        Equation e;
        factorize(e.lhs);
        factorize(e.rhs);
        sys.equations.push_back(e);
        REQUIRE(verify_solution(sys, sol));

        // Honest compressed binding, then a corrupted one.
        SlpBuilder b(g);
        std::map<int, Symbol> binding;
        for (auto& [word, v] : dict) binding[v] = word_symbol(b, word, "W");
        Slp s = b.finalize();
        REQUIRE(verify_solution_compressed(sys, s, binding));
        if (!w.empty()) {
            Word corrupt = w;
            corrupt[0] = g.bar(corrupt[0]);
            SlpBuilder b2(g);
            std::map<int, Symbol> bad;
            for (auto& [word, v] : dict) bad[v] = word_symbol(b2, word, "W");
            int victim = dict.begin()->second;
            Word vw = sol.sigma[victim];
            vw.push_back(letter(rng));
            bad[victim] = word_symbol(b2, vw, "W");
            Slp s2 = b2.finalize();
            SolutionAssignment badsol = sol;
            badsol.sigma[victim] = vw;
            REQUIRE(verify_solution_compressed(sys, s2, bad) == verify_solution(sys, badsol));
        }
    }
}

TEST_CASE("cuts of the worked example") {
    Fixture f = make_fixture();
    CutDecomposition dec = compute_cuts(f.sys, f.sol);
    REQUIRE(dec.words[0].size() == 21);
    REQUIRE(dec.cuts[0] == std::set<long>{0, 1, 6, 7, 10, 11, 13, 14, 15, 20, 21});
    REQUIRE(static_cast<long>(dec.cuts[0].size()) <= dec.d);
}

TEST_CASE("cuts of trivial systems") {
    InvolutiveAlphabet g = abc_alphabet();
    {
        EquationSystem sys;
        sys.gamma = g;
        int x = sys.vars.add("X");
        int y = sys.vars.add("Y");
        sys.equations.push_back(Equation{{x}, {y}});
        SolutionAssignment sol;
        sol.sigma[x] = sol.sigma[y] = parse_word(g, "abc");
        CutDecomposition dec = compute_cuts(sys, sol);
        REQUIRE(dec.cuts[0] == std::set<long>{0, 3});
    }
    {
        EquationSystem sys;
        sys.gamma = g;
        int x = sys.vars.add("X");
        int y = sys.vars.add("Y");
        int z = sys.vars.add("Z");
        sys.equations.push_back(Equation{{x, y}, {z}});
        SolutionAssignment sol;
        sol.sigma[x] = parse_word(g, "a");
        sol.sigma[y] = parse_word(g, "b");
        sol.sigma[z] = parse_word(g, "ab");
        CutDecomposition dec = compute_cuts(sys, sol);
        REQUIRE(dec.cuts[0] == std::set<long>{0, 1, 2});
    }
}

TEST_CASE("compute_cuts rejects non-solutions") {
    Fixture f = make_fixture();
    f.sol.sigma[f.Y].pop_back();
    REQUIRE_THROWS_MATCHES(compute_cuts(f.sys, f.sol), Error,
                           Catch::Matchers::Predicate<Error>([](const Error& e) {
                               return e.code() == ErrorCode::NotASolution;
                           }));
}

TEST_CASE("derived cuts, atoms and classes of the worked example") {
    Fixture f = make_fixture();
    CutDecomposition dec = compute_cuts(f.sys, f.sol);
    maximal_free_intervals(dec);
    std::vector<long> want{0, 1, 3, 4, 6, 7, 8, 10, 11, 13, 14, 15, 17, 18, 20, 21};
    REQUIRE(dec.derived[0] == want);
    REQUIRE(dec.atom_letter[0].size() == 15);
    REQUIRE(dec.classes_up_to_involution == 3);
    // The unique length-2 class: [1,3] evaluates to "bc" and recurs at
    // [8,10] and [15,17]; [4,6], [11,13], [18,20] carry its involution.
    auto letter_at = [&](long lo) { return dec.atom_letter[0][dec.atom_index(0, lo)]; };
    Letter q = letter_at(1);
    REQUIRE(dec.class_word[q] == parse_word(f.sys.gamma, "bc"));
    REQUIRE(letter_at(8) == q);
    REQUIRE(letter_at(15) == q);
    REQUIRE(letter_at(4) == dec.tilde.bar(q));
    REQUIRE(letter_at(11) == dec.tilde.bar(q));
    REQUIRE(letter_at(18) == dec.tilde.bar(q));
    REQUIRE(static_cast<long>(dec.tilde.size()) <= 2 * dec.d - 2);
}

TEST_CASE("single-variable system has one atom and one class") {
    InvolutiveAlphabet g = abc_alphabet();
    EquationSystem sys;
    sys.gamma = g;
    int x = sys.vars.add("X");
    int y = sys.vars.add("Y");
    sys.equations.push_back(Equation{{x}, {y}});
    SolutionAssignment sol;
    sol.sigma[x] = sol.sigma[y] = parse_word(g, "abc");
    CutDecomposition dec = compute_cuts(sys, sol);
    maximal_free_intervals(dec);
    REQUIRE(dec.atom_letter[0].size() == 1);
    REQUIRE(dec.classes_up_to_involution == 1);
}

namespace {

// Brute-force closure of the interval relation, for the oracle test.
struct BruteResult {
    // per equation: the set of maximal free positive intervals
    std::vector<std::set<std::pair<long, long>>> maximal;
};

BruteResult brute_force_mfi(const CutDecomposition& dec) {
    using State = std::tuple<int, long, long>;  // ordered interval, may be reversed
    // Enumerate closure from each positive interval.
    auto neighbours = [&](const State& s) {
        std::vector<State> out;
        auto [e, a, b] = s;
        for (const Occurrence& o1 : dec.occurrences[e]) {
            long lo = std::min(a, b), hi = std::max(a, b);
            if (!(o1.l <= lo && hi <= o1.r)) continue;
            for (std::size_t f = 0; f < dec.occurrences.size(); ++f) {
                for (const Occurrence& o2 : dec.occurrences[f]) {
                    if (var_of(o2.sym) != var_of(o1.sym)) continue;
                    if (o1.sym == o2.sym)
                        out.emplace_back(o2.eq, o2.l + (a - o1.l), o2.l + (b - o1.l));
                    else
                        out.emplace_back(o2.eq, o2.r - (a - o1.l), o2.r - (b - o1.l));
                }
            }
        }
        return out;
    };
    auto is_free = [&](int e, long a, long b) {
        std::set<State> seen;
        std::deque<State> queue{{e, a, b}};
        seen.insert({e, a, b});
        while (!queue.empty()) {
            State s = queue.front();
            queue.pop_front();
            auto [se, sa, sb] = s;
            long lo = std::min(sa, sb), hi = std::max(sa, sb);
            for (long c : dec.cuts[se])
                if (lo < c && c < hi) return false;
            for (const State& t : neighbours(s))
                if (seen.insert(t).second) queue.push_back(t);
        }
        return true;
    };
    BruteResult res;
    res.maximal.resize(dec.words.size());
    for (std::size_t e = 0; e < dec.words.size(); ++e) {
        long m = static_cast<long>(dec.words[e].size());
        std::vector<std::vector<bool>> free(m + 1, std::vector<bool>(m + 1, false));
        for (long a = 0; a <= m; ++a)
            for (long b = a + 1; b <= m; ++b)
                free[a][b] = is_free(static_cast<int>(e), a, b);
        for (long a = 0; a <= m; ++a) {
            for (long b = a + 1; b <= m; ++b) {
                if (!free[a][b]) continue;
                bool maximal = true;
                for (long a2 = 0; a2 <= a && maximal; ++a2)
                    for (long b2 = b; b2 <= m && maximal; ++b2)
                        if (free[a2][b2] && b2 - a2 > b - a) maximal = false;
                if (maximal) res.maximal[e].insert({a, b});
            }
        }
    }
    return res;
}

}  // namespace

TEST_CASE("atoms coincide with brute-force maximal free intervals") {
    std::mt19937 rng(1618);
    InvolutiveAlphabet g = abc_alphabet();
    std::uniform_int_distribution<int> wlen(1, 14), parts(2, 3), letter(0, 5);
    for (int iter = 0; iter < 60; ++iter) {
        Word w(wlen(rng));
        for (auto& l : w) l = letter(rng);
        EquationSystem sys;
        sys.gamma = g;
        SolutionAssignment sol;
        std::map<Word, int> dict;
        auto factorize = [&](std::vector<Symbol>& side) {
            int k = parts(rng);
            std::vector<std::size_t> splits{0, w.size()};
            for (int i = 1; i < k; ++i)
                splits.push_back(std::uniform_int_distribution<std::size_t>(0, w.size())(rng));
            std::sort(splits.begin(), splits.end());
            for (std::size_t i = 0; i + 1 < splits.size(); ++i) {
                Word part(w.begin() + splits[i], w.begin() + splits[i + 1]);
                Word inv = g.involution(part);
                if (dict.count(part)) {
                    side.push_back(dict[part]);
                } else if (dict.count(inv)) {
                    side.push_back(bar(Symbol(dict[inv])));
                } else {
                    int v = sys.vars.add("V" + std::to_string(dict.size()));
                    dict[part] = v;
                    sol.sigma[v] = part;
                    side.push_back(v);
                }
            }
        };
        Equation e;
        factorize(e.lhs);
        factorize(e.rhs);
        sys.equations.push_back(e);
        if (sys.denotational_length() > 8) continue;
        CutDecomposition dec = compute_cuts(sys, sol);
        maximal_free_intervals(dec);
        BruteResult brute = brute_force_mfi(dec);
        for (std::size_t eq = 0; eq < dec.words.size(); ++eq) {
            std::set<std::pair<long, long>> atoms;
            for (std::size_t k = 0; k + 1 < dec.derived[eq].size(); ++k)
                atoms.insert({dec.derived[eq][k], dec.derived[eq][k + 1]});
            REQUIRE(atoms == brute.maximal[eq]);
        }
    }
}

TEST_CASE("generic solution of the worked example recomposes") {
    Fixture f = make_fixture();
    CutDecomposition dec = compute_cuts(f.sys, f.sol);
    maximal_free_intervals(dec);
    GenericSolution gen = generic_solution(dec, f.sol);
    // |sigma_tilde(L)| = 15 over the interval alphabet.
    std::size_t total = 0;
    for (Symbol s : f.sys.equations[0].lhs) total += gen.sigma_tilde.at(var_of(s)).size();
    REQUIRE(total == 15);
    // omega . sigma_tilde recovers sigma.
    for (auto& [x, tw] : gen.sigma_tilde) {
        Word back;
        for (Letter l : tw) {
            const Word& piece = gen.omega[l];
            back.insert(back.end(), piece.begin(), piece.end());
        }
        REQUIRE(back == f.sol.sigma.at(x));
    }
}

TEST_CASE("generic recomposition on random instances") {
    std::mt19937 rng(9090);
    InvolutiveAlphabet g = abc_alphabet();
    std::uniform_int_distribution<int> wlen(0, 16), parts(2, 4), letter(0, 5);
    for (int iter = 0; iter < 80; ++iter) {
        Word w(wlen(rng));
        for (auto& l : w) l = letter(rng);
        EquationSystem sys;
        sys.gamma = g;
        SolutionAssignment sol;
        std::map<Word, int> dict;
        Equation e;
        auto factorize = [&](std::vector<Symbol>& side) {
            int k = parts(rng);
            std::vector<std::size_t> splits{0, w.size()};
            for (int i = 1; i < k; ++i)
                splits.push_back(std::uniform_int_distribution<std::size_t>(0, w.size())(rng));
            std::sort(splits.begin(), splits.end());
            for (std::size_t i = 0; i + 1 < splits.size(); ++i) {
                Word part(w.begin() + splits[i], w.begin() + splits[i + 1]);
                Word inv = g.involution(part);
                if (dict.count(part)) {
                    side.push_back(dict[part]);
                } else if (dict.count(inv)) {
                    side.push_back(bar(Symbol(dict[inv])));
                } else {
                    int v = sys.vars.add("V" + std::to_string(dict.size()));
                    dict[part] = v;
                    sol.sigma[v] = part;
                    side.push_back(v);
                }
            }
        };
        factorize(e.lhs);
        factorize(e.rhs);
        sys.equations.push_back(e);
        CutDecomposition dec = compute_cuts(sys, sol);
        maximal_free_intervals(dec);
        GenericSolution gen = generic_solution(dec, sol);
        for (auto& [x, tw] : gen.sigma_tilde) {
            Word back;
            for (Letter l : tw) {
                const Word& piece = gen.omega[l];
                back.insert(back.end(), piece.begin(), piece.end());
            }
            REQUIRE(back == sol.sigma.at(x));
        }
        // Compression reproduces the generic solution exactly.
        CompressedGeneric comp = compress_generic(dec, gen);
        for (auto& [x, tw] : gen.sigma_tilde) {
            auto it = comp.var_of_system.find(x);
            REQUIRE(it != comp.var_of_system.end());
            REQUIRE(comp.slp.eval(it->second) == tw);
        }
    }
}

TEST_CASE("compression of the worked example") {
    Fixture f = make_fixture();
    CutDecomposition dec = compute_cuts(f.sys, f.sol);
    maximal_free_intervals(dec);
    GenericSolution gen = generic_solution(dec, f.sol);
    CompressedGeneric comp = compress_generic(dec, gen);
    for (auto& [x, tw] : gen.sigma_tilde)
        REQUIRE(comp.slp.eval(comp.var_of_system.at(x)) == tw);
    // Same check through the equality engine against directly built SLPs.
    SlpBuilder b(comp.slp);
    Symbol direct = word_symbol(b, gen.sigma_tilde.at(f.X), "D");
    Slp joined = b.finalize();
    REQUIRE(equal_eval(joined, comp.var_of_system.at(f.X), direct));
}

TEST_CASE("compression size scales with the square of the log of the length") {
    // Doubling chain: X_0 = X_1 X_1, ..., X_{k-1} = X_k X_k, sigma(X_i) =
    // a^(2^(k-i)).  The generic word of the top equation has length 2^k.
    InvolutiveAlphabet g = abc_alphabet();
    for (int k : {4, 8, 12, 16}) {
        EquationSystem sys;
        sys.gamma = g;
        SolutionAssignment sol;
        std::vector<int> xs;
        for (int i = 0; i <= k; ++i) {
            xs.push_back(sys.vars.add("X" + std::to_string(i)));
            sol.sigma[xs[i]] = Word(std::size_t(1) << (k - i), g.id("a"));
        }
        for (int i = 0; i + 1 <= k; ++i)
            sys.equations.push_back(Equation{{xs[i]}, {xs[i + 1], xs[i + 1]}});
        CutDecomposition dec = compute_cuts(sys, sol);
        maximal_free_intervals(dec);
        GenericSolution gen = generic_solution(dec, sol);
        CompressedGeneric comp = compress_generic(dec, gen);
        REQUIRE(comp.slp.eval(comp.var_of_system.at(xs[k])).size() == 1);
        REQUIRE(comp.slp.length(comp.var_of_system.at(xs[0])) == BigInt(1) << k);
        double d = static_cast<double>(sys.denotational_length());
        double logN = static_cast<double>(k + 1);
        REQUIRE(static_cast<double>(comp.slp.size()) <= 50.0 * d * d * logN * logN);
    }
}

TEST_CASE("substitution with the original interval words recovers sigma") {
    Fixture f = make_fixture();
    CutDecomposition dec = compute_cuts(f.sys, f.sol);
    maximal_free_intervals(dec);
    GenericSolution gen = generic_solution(dec, f.sol);
    CompressedGeneric comp = compress_generic(dec, gen);

    SlpBuilder db(f.sys.gamma);
    std::map<Letter, Symbol> omega_prime;
    for (Letter l = 0; l < static_cast<Letter>(gen.tilde.size()); ++l) {
        if (gen.tilde.bar(l) < l) continue;  // handle each pair once
        Symbol s = word_symbol(db, gen.omega[l], "D");
        omega_prime[l] = s;
        omega_prime[gen.tilde.bar(l)] = (gen.tilde.bar(l) == l) ? s : bar(s);
    }
    Slp donor = db.finalize();
    SubstitutionResult sub = substitute_intervals(comp.slp, donor, omega_prime);
    for (auto& [x, v] : comp.var_of_system)
        REQUIRE(sub.slp.eval(sub.var_map.at(v)) == f.sol.sigma.at(x));
}

TEST_CASE("substituting a different word for the long class keeps the equation") {
    Fixture f = make_fixture();
    CutDecomposition dec = compute_cuts(f.sys, f.sol);
    maximal_free_intervals(dec);
    GenericSolution gen = generic_solution(dec, f.sol);
    CompressedGeneric comp = compress_generic(dec, gen);
    Letter q = dec.atom_letter[0][dec.atom_index(0, 1)];  // the "bc" class

    for (const std::string& replacement : {std::string("ccab"), std::string("")}) {
        SlpBuilder db(f.sys.gamma);
        std::map<Letter, Symbol> omega_prime;
        for (Letter l = 0; l < static_cast<Letter>(gen.tilde.size()); ++l) {
            if (gen.tilde.bar(l) < l) continue;
            Word w = (l == q || gen.tilde.bar(l) == q) ? parse_word(f.sys.gamma, replacement)
                                                       : gen.omega[l];
            if (gen.tilde.bar(l) == q) w = f.sys.gamma.involution(w);
            Symbol s = word_symbol(db, w, "D");
            omega_prime[l] = s;
            omega_prime[gen.tilde.bar(l)] = (gen.tilde.bar(l) == l) ? s : bar(s);
        }
        Slp donor = db.finalize();
        SubstitutionResult sub = substitute_intervals(comp.slp, donor, omega_prime);
        std::map<int, Symbol> binding;
        for (auto& [x, v] : comp.var_of_system) binding[x] = sub.var_map.at(v);
        REQUIRE(verify_solution_compressed(f.sys, sub.slp, binding));
    }
}

TEST_CASE("mismatched donors are rejected") {
    Fixture f = make_fixture();
    CutDecomposition dec = compute_cuts(f.sys, f.sol);
    maximal_free_intervals(dec);
    GenericSolution gen = generic_solution(dec, f.sol);
    CompressedGeneric comp = compress_generic(dec, gen);
    SlpBuilder db(f.sys.gamma);
    std::map<Letter, Symbol> omega_prime;
    for (Letter l = 0; l < static_cast<Letter>(gen.tilde.size()); ++l)
        omega_prime[l] = word_symbol(db, gen.omega[l], "D");
    // Corrupt one barred donor so it is no longer the involution.
    Letter q = dec.atom_letter[0][dec.atom_index(0, 1)];
    omega_prime[gen.tilde.bar(q)] = word_symbol(db, parse_word(f.sys.gamma, "ab"), "D");
    Slp donor = db.finalize();
    REQUIRE_THROWS_MATCHES(substitute_intervals(comp.slp, donor, omega_prime), Error,
                           Catch::Matchers::Predicate<Error>([](const Error& e) {
                               return e.code() == ErrorCode::InvolutionMismatch;
                           }));
}
