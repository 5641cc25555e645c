#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "slpwq/formats.hpp"
#include "slpwq/queries.hpp"
#include "test_util.hpp"

using namespace slpwq;
using namespace slpwq::testutil;

TEST_CASE("parse_slp on a small grammar") {
    Slp slp = parse_slp(
        "# doubling grammar\n"
        "alphabet a/A b/B\n"
        "X -> Y ~Z\n"
        "Y -> 'a'\n"
        "Z -> ''\n");
    REQUIRE(slp.size() == 3);
    int x = slp.variables().id("X");
    REQUIRE(slp.eval(x) == Word{slp.alphabet().id("a")});
    REQUIRE(slp.eval(bar(Symbol(x))) == Word{slp.alphabet().id("A")});
}

TEST_CASE("parse_slp accepts self-inverse letters and multi-char names") {
    Slp slp = parse_slp(
        "alphabet s y3/y3-\n"
        "X -> 'y3-'\n"
        "Y -> 's'\n"
        "Z -> X Y\n");
    REQUIRE(slp.alphabet().bar(slp.alphabet().id("s")) == slp.alphabet().id("s"));
    REQUIRE(slp.eval(slp.variables().id("Z")) ==
            Word{slp.alphabet().id("y3-"), slp.alphabet().id("s")});
}

TEST_CASE("parse_slp rejects malformed input") {
    auto code = [](const std::string& text) {
        try {
            parse_slp(text);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InternalInvariantViolation;
    };
    REQUIRE(code("alphabet a/A\nX -> Y Z\n") == ErrorCode::ParseError);      // unknown vars
    REQUIRE(code("alphabet a/A\nX -> 'b'\n") == ErrorCode::ParseError);      // unknown letter
    REQUIRE(code("alphabet a/A\n1x -> 'a'\n") == ErrorCode::ParseError);     // bad var name
    REQUIRE(code("alphabet a/A\nX 'a'\n") == ErrorCode::ParseError);         // no arrow
    REQUIRE(code("alphabet a/A\nX -> 'a\n") == ErrorCode::ParseError);       // open quote
    REQUIRE(code("alphabet a/A\nX -> X X\n") == ErrorCode::CyclicDependency);
}

TEST_CASE("slp printing round-trips") {
    std::mt19937 rng(20240823);
    for (int t = 0; t < 50; ++t) {
        Slp slp = random_slp(rng, 12);
        std::string text = print_slp(slp);
        Slp back = parse_slp(text);
        REQUIRE(print_slp(back) == text);
        REQUIRE(back.size() == slp.size());
        for (int x = 1; x <= slp.variables().count(); ++x)
            REQUIRE(naive_eval(back, x) == naive_eval(slp, x));
    }
}

TEST_CASE("parse_ig and printing round-trip") {
    IntervalGrammar ig = parse_ig(
        "alphabet a/A b/B\n"
        "W -> 'a'\n"
        "V -> 'b'\n"
        "U -> ''\n"
        "Z -> W[0,1] V[0,1]\n"
        "Y -> Z[0,2] Z[0,2]\n"
        "X -> Y[1,4] ~Y[0,2]\n");
    REQUIRE(ig.length(ig.variables().id("X")) == 5);
    std::string text = print_ig(ig);
    IntervalGrammar back = parse_ig(text);
    REQUIRE(print_ig(back) == text);

    IgConversion conv = ig_to_slp(ig);
    int x = ig.variables().id("X");
    Symbol s = conv.of_full(x);
    // eval(Y) = "aaa"[0,3] = aaa; eval(X) = "aa" reversed-barred slice etc.
    Word w = conv.slp.eval(s);
    REQUIRE(w.size() == 5);
}

TEST_CASE("ig rules 'Z -> W W' parse as full slices") {
    // Pair rules without brackets are rejected: the IG format requires
    // explicit intervals.
    REQUIRE_THROWS_AS(parse_ig("alphabet a/A\nZ -> W W\nW -> 'a'\n"), Error);
}

TEST_CASE("equation system and solution files") {
    EquationSystem sys = parse_equation_system(
        "alphabet a/A b/B c/C\n"
        "eq: Av X B ~X ~Av = Y ~B Y ~Av B ~Y\n"
        "const: Av = \"a\"\n"
        "const: B = \"b\"\n");
    REQUIRE(sys.equations.size() == 1);
    REQUIRE(sys.equations[0].lhs.size() == 5);
    REQUIRE(sys.constants.at(sys.vars.id("Av")) == Word{sys.gamma.id("a")});

    SolutionAssignment sol = parse_solution(sys,
                                            "Av = \"a\"\n"
                                            "B = \"b\"\n"
                                            "X = \"bcbCBBabc\"\n"
                                            "Y = \"abcbCB\"\n");
    REQUIRE(verify_solution(sys, sol));

    std::string sys_text = print_equation_system(sys);
    EquationSystem back = parse_equation_system(sys_text);
    REQUIRE(print_equation_system(back) == sys_text);
    std::string sol_text = print_solution(sys, sol);
    SolutionAssignment sol_back = parse_solution(back, sol_text);
    REQUIRE(sol_back.sigma == sol.sigma);
}

TEST_CASE("multi-letter words use whitespace splitting") {
    EquationSystem sys = parse_equation_system(
        "alphabet ab/AB c/C\n"
        "eq: X = Y\n"
        "const: X = \"ab c ab\"\n");
    REQUIRE(sys.constants.at(sys.vars.id("X")) ==
            Word{sys.gamma.id("ab"), sys.gamma.id("c"), sys.gamma.id("ab")});
}

TEST_CASE("endomorphism files") {
    EndomorphismTable table = parse_endomorphisms(
        "alphabet a/A b/B\n"
        "alpha: a -> a b ; b -> b\n"
        "beta: a -> A ; b -> b a\n");
    REQUIRE(table.has("alpha"));
    REQUIRE(table.image("alpha", table.alphabet().id("a")) ==
            Word{table.alphabet().id("a"), table.alphabet().id("b")});
    REQUIRE(table.image("beta", table.alphabet().id("a")) == Word{table.alphabet().id("A")});
    // Barred images follow by involution.
    REQUIRE(table.image("alpha", table.alphabet().id("A")) ==
            Word{table.alphabet().id("B"), table.alphabet().id("A")});
}

TEST_CASE("free product system files") {
    FSystem sys = parse_fsystem(
        "factor x: Z^1\n"
        "factor y: Z/6 + Z^2\n"
        "eq: X Y = Z\n"
        "parikh: X counts{x:2,y:1} ab{x:(3),y:(1,0,0)} first x last y\n"
        "alph: Y {x,y} first x last y\n"
        "neq1: Z\n");
    REQUIRE(sys.spec.size() == 2);
    REQUIRE(sys.spec.factor(0).rank == 1);
    REQUIRE(sys.spec.factor(1).rank == 2);
    REQUIRE(sys.spec.factor(1).torsion == std::vector<long>{6});
    REQUIRE(sys.equations.size() == 1);
    REQUIRE(sys.constraints.size() == 3);

    const ParikhConstraint& pc = sys.constraints[0].second;
    REQUIRE(sys.constraints[0].first == sys.vars.id("X"));
    REQUIRE(pc.kind == ParikhConstraint::Exact);
    REQUIRE(pc.exact.counts == std::vector<BigInt>{2, 1});
    REQUIRE(pc.exact.abelian[0] == Element{3});
    REQUIRE(pc.exact.abelian[1] == Element{1, 0, 0});
    REQUIRE(pc.exact.first == 0);
    REQUIRE(pc.exact.last == 1);

    const ParikhConstraint& ac = sys.constraints[1].second;
    REQUIRE(ac.kind == ParikhConstraint::Alphabetic);
    REQUIRE(ac.alph == std::set<int>{0, 1});

    REQUIRE(sys.constraints[2].second.kind == ParikhConstraint::NotIdentity);
}

TEST_CASE("inequality lines add fresh variables") {
    FSystem sys = parse_fsystem(
        "factor x: Z^1\n"
        "neq1: X = Y\n");
    REQUIRE(sys.vars.has("neq0"));
    REQUIRE(sys.equations.size() == 1);
    REQUIRE(sys.constraints.size() == 1);
    REQUIRE(sys.constraints[0].second.kind == ParikhConstraint::NotIdentity);
}

TEST_CASE("free product solutions round-trip") {
    FSystem sys = parse_fsystem(
        "factor x: Z^1\n"
        "factor y: Z/6 + Z^2\n"
        "eq: X Y = Z\n");
    FSolution sol = parse_fsolution(sys,
                                    "X = (x:2)(y:1,0,3)\n"
                                    "Y = (y:-1,0,0)\n"
                                    "Z = 1\n");
    REQUIRE(sol.of(sys.vars.id("X")).size() == 2);
    // Torsion coordinates are normalized on input.
    FSolution neg = parse_fsolution(sys, "X = (y:0,0,-2)\n");
    REQUIRE(neg.of(sys.vars.id("X"))[0].g == Element{0, 0, 4});
    REQUIRE(sol.of(sys.vars.id("Z")).empty());

    std::string text = print_fsolution(sys, sol);
    FSolution back = parse_fsolution(sys, text);
    REQUIRE(back.sigma == sol.sigma);
}

TEST_CASE("parikh images print in constraint syntax") {
    FSystem sys = parse_fsystem("factor x: Z^1\nfactor y: Z^1\n");
    DeltaWord w = {Block{0, {2}}, Block{1, {3}}};
    std::string s = print_parikh(sys.spec, parikh_of_word(sys.spec, w));
    REQUIRE(s == "counts{x:1,y:1} ab{x:(2),y:(3)} first x last y");
    REQUIRE(print_parikh(sys.spec, parikh_of_word(sys.spec, DeltaWord{})) ==
            "counts{x:0,y:0} ab{x:(0),y:(0)} first 1 last 1");
}

TEST_CASE("certificates round-trip through text") {
    FSystem sys = parse_fsystem(
        "factor x: Z^1\n"
        "factor y: Z^1\n"
        "eq: X = Y Z\n");
    FSolution sol = parse_fsolution(sys,
                                    "Y = (x:3)(y:1)\n"
                                    "Z = (y:2)(x:1)\n"
                                    "X = (x:3)(y:3)(x:1)\n");
    REQUIRE(verify_f_solution(sys, sol));
    CompressedFSolution comp = compress_solution_alphabetic(sys, sol);
    REQUIRE(verify_certificate(sys, comp.slp, comp.binding));

    std::string text = print_certificate(sys, comp.slp, comp.binding);
    Certificate cert = parse_certificate(sys, text);
    REQUIRE(verify_certificate(sys, cert.slp, cert.binding));
    REQUIRE(cert.binding.size() == comp.binding.size());
    REQUIRE(print_certificate(sys, cert.slp, cert.binding) == text);
}
