#include "property_suites.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace epistemia;

namespace {

PartialEpistemicModel tiny_model() {
    // Two agents, three worlds: agent 0 relates {0,1}, agent 1 relates {1,2};
    // agent 1 is dead at world 0 and agent 0 is dead at world 2.
    RelationData d = RelationData::empty(2, 3);
    d.add_edge(0, 0, 0);
    d.add_edge(0, 1, 1);
    d.add_edge(0, 0, 1);
    d.add_edge(1, 1, 1);
    d.add_edge(1, 2, 2);
    d.add_edge(1, 1, 2);
    std::vector<AtomSet> labels = {AtomSet{{0, 0}}, AtomSet{{0, 0}, {1, 1}}, AtomSet{{1, 1}}};
    return PartialEpistemicModel({"u", "v", "w"}, PerRelation::checked(std::move(d)),
                                 std::move(labels));
}

} // namespace

TEST_CASE("printing uses minimal parentheses and derived forms") {
    REQUIRE(print(make_false()) == "false");
    REQUIRE(print(make_true()) == "true");
    REQUIRE(print(make_alive(1)) == "alive(1)");
    REQUIRE(print(make_atom(0, 2)) == "input(0,2)");
    REQUIRE(print(make_neg(make_atom(0, 1))) == "~input(0,1)");
    REQUIRE(print(make_implies(make_atom(0, 0), make_atom(1, 1))) ==
            "input(0,0) -> input(1,1)");
    REQUIRE(print(make_knows(2, make_and(make_atom(0, 0), make_atom(1, 0)))) ==
            "K 2 (input(0,0) & input(1,0))");
    REQUIRE(print(make_or(make_and(make_atom(0, 0), make_atom(0, 1)), make_atom(1, 0))) ==
            "input(0,0) & input(0,1) | input(1,0)");
    // A disjunction on the left of another disjunction needs parentheses
    // because | only chains to the right.
    REQUIRE(print(make_or(make_or(make_atom(0, 0), make_atom(0, 1)), make_atom(1, 0))) ==
            "(input(0,0) | input(0,1)) | input(1,0)");
}

TEST_CASE("grammar precedence and associativity") {
    // a -> b | c -> d groups as a -> (b | (c -> d)).
    FormulaPtr f = parse("input(0,0) -> input(0,1) | input(1,0) -> input(1,1)");
    FormulaPtr want = make_implies(
        make_atom(0, 0),
        make_or(make_atom(0, 1), make_implies(make_atom(1, 0), make_atom(1, 1))));
    REQUIRE(equal(f, want));

    REQUIRE(equal(parse("~K1 input(0,0) & input(0,1)"),
                  make_and(make_neg(make_knows(1, make_atom(0, 0))), make_atom(0, 1))));

    // & binds tighter than |, which binds tighter than ->.
    REQUIRE(equal(parse("input(0,0) & input(0,1) | input(1,0)"),
                  make_or(make_and(make_atom(0, 0), make_atom(0, 1)), make_atom(1, 0))));

    // K reaches only the next unary formula.
    REQUIRE(equal(parse("K 0 input(0,0) & input(0,1)"),
                  make_and(make_knows(0, make_atom(0, 0)), make_atom(0, 1))));

    // The nested knowledge chain with explicit parentheses.
    FormulaPtr chain =
        parse("K 2 K 1 K 2 (alive(0) -> input(0,0) | alive(1) -> input(1,0))");
    FormulaPtr inner = make_implies(make_alive(0),
                                    make_or(make_atom(0, 0), make_implies(make_alive(1),
                                                                          make_atom(1, 0))));
    REQUIRE(equal(chain, make_knows(2, make_knows(1, make_knows(2, inner)))));

    // Whitespace is insignificant: K0 is K applied by agent 0.
    REQUIRE(equal(parse("K0input(0,0)"), make_knows(0, make_atom(0, 0))));
    REQUIRE(equal(parse("  K  0  input( 0 , 0 )  "), make_knows(0, make_atom(0, 0))));

    REQUIRE(equal(parse("alive(0,1)"), make_alive(std::vector<Agent>{0, 1})));
    REQUIRE(equal(parse("alive(0,1)"),
                  make_and(make_alive(0), make_alive(1))));
}

TEST_CASE("parse errors") {
    REQUIRE_THROWS_AS(parse(""), error);
    REQUIRE_THROWS_AS(parse("input(0,0"), error);
    REQUIRE_THROWS_AS(parse("input(0,0) |"), error);
    REQUIRE_THROWS_AS(parse("input(0,0) input(1,1)"), error);
    REQUIRE_THROWS_AS(parse("Know 0 input(0,0)"), error);
    REQUIRE_THROWS_AS(parse("K x input(0,0)"), error);

    ParseLimits limits{2, std::vector<int>{0, 1}};
    REQUIRE_NOTHROW(parse("K1 input(0,1)", limits));
    REQUIRE_THROWS_WITH(parse("K2 input(0,0)", limits),
                        Catch::Matchers::ContainsSubstring("out of declared range"));
    REQUIRE_THROWS_WITH(parse("input(0,7)", limits),
                        Catch::Matchers::ContainsSubstring("outside the declared value set"));
    REQUIRE_THROWS_WITH(parse("alive(2)", limits),
                        Catch::Matchers::ContainsSubstring("out of declared range"));
}

TEST_CASE("round trip: parse after print is the identity") {
    suites::Rng rng(42);
    for (int i = 0; i < 1000; ++i) {
        FormulaPtr f = suites::random_formula(rng, 3, 3, 5);
        std::string text = print(f);
        FormulaPtr back = parse(text);
        INFO(text);
        REQUIRE(equal(f, back));
        REQUIRE(print(back) == text);
    }
}

TEST_CASE("evaluation semantics") {
    PartialEpistemicModel m = tiny_model();
    int u = 0, v = 1, w = 2;

    REQUIRE(eval(m, u, make_atom(0, 0)));
    REQUIRE_FALSE(eval(m, u, make_atom(1, 1)));
    REQUIRE(eval(m, u, make_neg(make_atom(1, 1))));

    // K0 at u quantifies over {u, v}: input(0,0) holds at both.
    REQUIRE(eval(m, u, make_knows(0, make_atom(0, 0))));
    // input(1,1) fails at u itself, so agent 0 cannot know it.
    REQUIRE_FALSE(eval(m, u, make_knows(0, make_atom(1, 1))));
    // Agent 1 is dead at u: K1 anything is vacuously true, even K1 false.
    REQUIRE(eval(m, u, make_knows(1, make_false())));
    REQUIRE_FALSE(eval(m, u, make_alive(1)));
    REQUIRE(eval(m, u, make_alive(0)));
    // At v both agents are alive.
    REQUIRE(eval(m, v, make_alive(std::vector<Agent>{0, 1})));
    REQUIRE(eval(m, w, make_knows(1, make_atom(1, 1))));

    ValidityResult vr = is_valid(m, make_atom(0, 0));
    REQUIRE_FALSE(vr.valid);
    REQUIRE(vr.witness == w); // least falsifying world
    REQUIRE(is_valid(m, make_or(make_atom(0, 0), make_atom(1, 1))).valid);
}

TEST_CASE("guarded positive fragment recognition") {
    FormulaPtr guard01 = make_implies(make_alive(std::vector<Agent>{0, 1}), make_atom(0, 0));
    REQUIRE(is_guarded_positive(guard01));
    REQUIRE(is_guarded_positive(make_and(guard01, guard01)));
    REQUIRE(is_guarded_positive(make_or(guard01, guard01)));
    REQUIRE(is_guarded_positive(make_knows(2, guard01)));
    REQUIRE(is_guarded_positive(build_phi(3)));
    REQUIRE(is_guarded_positive(build_phi(4)));
    REQUIRE(is_guarded_positive(
        make_implies(make_alive(0), make_neg(make_atom(0, 1))))); // body may use negation

    REQUIRE_FALSE(is_guarded_positive(make_atom(0, 0)));
    REQUIRE_FALSE(is_guarded_positive(make_neg(guard01)));
    REQUIRE_FALSE(is_guarded_positive(make_knows(0, make_atom(0, 0))));
    // The body must only mention atoms of guarded agents.
    REQUIRE_FALSE(is_guarded_positive(make_implies(make_alive(0), make_atom(1, 0))));
    REQUIRE_FALSE(is_guarded_positive(make_alive(0)));
}

TEST_CASE("the consensus obstruction formula") {
    REQUIRE_THROWS_AS(build_phi(2), error);

    // phi_i is the left fold of alive-guarded input facts over all agents.
    FormulaPtr phi0 = build_phi_disjunct(3, 0);
    FormulaPtr want0 = make_or(
        make_or(make_implies(make_alive(0), make_atom(0, 0)),
                make_implies(make_alive(1), make_atom(1, 0))),
        make_implies(make_alive(2), make_atom(2, 0)));
    REQUIRE(equal(phi0, want0));

    // build_phi(3) is the disjunction of the three knowledge chains
    // K2 K1 K2 phi_0, K0 K2 K0 phi_1, K1 K0 K1 phi_2, folded left.
    FormulaPtr want = make_or(
        make_or(make_knows(2, make_knows(1, make_knows(2, build_phi_disjunct(3, 0)))),
                make_knows(0, make_knows(2, make_knows(0, build_phi_disjunct(3, 1))))),
        make_knows(1, make_knows(0, make_knows(1, build_phi_disjunct(3, 2)))));
    REQUIRE(equal(build_phi(3), want));

    // The printed form parses back to the same AST.
    REQUIRE(equal(parse(print(build_phi(3))), build_phi(3)));
    REQUIRE(equal(parse(print(build_phi(4))), build_phi(4)));
}

TEST_CASE("property: memoized evaluator matches the naive oracle") {
    auto res = suites::evaluator_suite(1000, 20260825);
    INFO(res.first_failure);
    REQUIRE(res.cases == 1000);
    REQUIRE(res.violations == 0);
}
