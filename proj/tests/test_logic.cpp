#include <gtest/gtest.h>

#include "fhml/logic.hpp"
#include "fhml/parse.hpp"
#include "gen.hpp"

using namespace fhml;

namespace {
Formula P(const std::string& s) { return parse_formula(s, nullptr, true); }

const char* kAll = "!mu X. some x. <o:x> (X | mu Y. some y. <o:y> (Y | x = y))";
const char* kAllNu = "nu X. all x. [o:x] (X & nu Y. all y. [o:y] (Y & x != y))";
const char* kSut = "nu X. fresh s. <S:s> (mu Y. (<U:s> Y | <T:s> X))";
} // namespace

TEST(Size, Examples) {
    EXPECT_EQ(size(P("#0 = #1")), 2);
    EXPECT_EQ(size(P("fresh x. x = x")), 3);
    EXPECT_EQ(size(P("mu X(x). <o:x> X(x) (#0)")), 7);
    EXPECT_EQ(size(P("#0 != #1")), 2);
    EXPECT_EQ(size(P("[o:#0] (#0 = #0 & #1 = #1)")), 7);
}

TEST(BoundingDepth, Examples) {
    EXPECT_EQ(bounding_depth(P("#0 = #1")), 0);
    EXPECT_EQ(bounding_depth(P("fresh x. x = #0")), 1);
    EXPECT_EQ(bounding_depth(P("nu X(x,y). fresh z. <o:z> X(z,y) (#0,#1)")), 3);
    EXPECT_EQ(bounding_depth(P(kAll)), 2);
}

TEST(Binding, FirmClosedZeta) {
    EXPECT_TRUE(is_firm(P("fresh x. x = #0")));
    EXPECT_FALSE(is_closed(P("X")));
    EXPECT_EQ(zeta(P("x = y")), 2);
    EXPECT_EQ(zeta(P("x = x")), 1);
    EXPECT_EQ(free_rec_vars(P("mu X. X | Y")), (std::set<std::string>{"Y"}));
}

TEST(Normalize, RenamesRepeatedFixpoints) {
    Formula f = normalize_binders(P("(mu X. <o:#0> X) | mu X. <o:#1> X"));
    ASSERT_EQ(f->op, Op::Or);
    EXPECT_NE(f->a->rec, f->b->rec);
    EXPECT_NO_THROW(alternation(f));
    EXPECT_EQ(to_string(f->b->a->a), f->b->rec);
}

TEST(Normalize, UniqueFormulaUnchanged) {
    Formula f = P(kSut);
    EXPECT_TRUE(equal(normalize_binders(f), f));
}

TEST(Normalize, ShadowedValueBinder) {
    Formula f = normalize_binders(P("some x. some x. x = #0"));
    EXPECT_EQ(f->x, "x");
    EXPECT_EQ(f->a->x, "x1");
    EXPECT_EQ(f->a->a->vals[0].var, "x1");
}

TEST(Normalize, FreeRecursionVariableKeepsName) {
    Formula f = normalize_binders(P("X | mu X. <o:#0> X"));
    EXPECT_EQ(f->a->rec, "X");
    EXPECT_NE(f->b->rec, "X");
}

TEST(NegationFree, Examples) {
    EXPECT_EQ(to_string(negation_free(P("!(#0 = #1)"))), "#0 != #1");
    Formula g = P(kSut);
    EXPECT_TRUE(equal(negation_free(g), g));
    EXPECT_TRUE(equal(negation_free(P(kAll)), P(kAllNu)));
    EXPECT_EQ(to_string(negation_free(P("!fresh x. <o:x> x = #0"))), "fresh x. [o:x] (x != #0)");
}

TEST(NegationFree, RejectsBadInput) {
    EXPECT_THROW(negation_free(P("!(x = #0)")), Error);
    EXPECT_THROW(negation_free(P("!X")), Error);
    EXPECT_THROW(validate(P("mu X. !X")), Error);
    EXPECT_NO_THROW(validate(P("mu X. !!X")));
}

TEST(Subst, Examples) {
    EXPECT_TRUE(equal(subst_values(P("x = #0"), {{{"x"}, {1}}}), P("#1 = #0")));
    Formula f = P("some x. <o:x> x = y");
    EXPECT_TRUE(equal(subst_values(f, {}), f));
    // bound occurrences stay untouched
    EXPECT_TRUE(equal(subst_values(f, {{{"x"}, {3}}}), f));
    EXPECT_TRUE(equal(subst_values(f, {{{"y"}, {3}}}), P("some x. <o:x> x = #3")));
    Formula def = P("mu X(x). <o:x> X(x) (#0)");
    EXPECT_TRUE(equal(subst_rec(P("X(#0)"), {def}), def));
    // later blocks apply to the result of earlier ones
    EXPECT_TRUE(equal(subst_values(P("x = y"), {{{"x"}, {1}}, {{"y"}, {2}}}), P("#1 = #2")));
}

TEST(Subst, RejectsCapture) {
    // the definition mentions y, which would be captured under `some y`
    Formula def = P("mu X. y = #0");
    EXPECT_THROW(subst_rec(P("some y. X"), {def}), Error);
}

TEST(Unfold, Examples) {
    Formula f = P("mu X(x). <o:x> X(x) (#0)");
    Formula u = unfold(f);
    ASSERT_EQ(u->op, Op::Diamond);
    EXPECT_EQ(u->vals[0].name, 0u);
    EXPECT_TRUE(equal(u->a, f));
    EXPECT_TRUE(equal(unfold(P("nu X. #0 = #1")), P("#0 = #1")));
    EXPECT_THROW(unfold(P("#0 = #0")), Error);
    EXPECT_TRUE(equal(unfold(u->a), u));
}

TEST(Alternation, Examples) {
    EXPECT_EQ(alternation_depth(P("#0 = #1")), 0);
    Alternation a = alternation(P(kSut));
    EXPECT_EQ(a.adepth_of("X"), 2);
    EXPECT_EQ(a.adepth_of("Y"), 1);
    EXPECT_EQ(a.depth, 2);
    EXPECT_EQ(alternation_depth(P("mu X. some x. <o:x> (X | mu Y. some y. <o:y> (Y | x = y))")), 1);
    // sibling fixpoints of opposite kind do not alternate
    EXPECT_EQ(alternation_depth(P("(mu X. <o:#0> X) & nu Y. <o:#0> Y")), 1);
    // a nested fixpoint that does not mention the outer variable does not alternate either
    EXPECT_EQ(alternation_depth(P("nu X. <o:#0> X & mu Y. <o:#0> Y")), 1);
    EXPECT_THROW(alternation(P("(mu X. X) | mu X. X")), Error);
}

TEST(Rank, Examples) {
    Formula f = P(kSut);
    Alternation a = alternation(f);
    EXPECT_EQ(rank(P("#0 = #0"), a), 0);
    EXPECT_EQ(rank(f, a), 2);
    Formula y = f->a->a->a;
    ASSERT_EQ(y->op, Op::Mu);
    EXPECT_EQ(rank(y, a), 1);
}

TEST(Validate, Arity) {
    Signature sig{{"o", 1}};
    EXPECT_THROW(validate(P("<o:#0,#1> #0 = #0"), &sig), Error);
    EXPECT_THROW(validate(P("<p:#0> #0 = #0"), &sig), Error);
    EXPECT_THROW(validate(P("mu X(x). X(#0,#1) (#0)")), Error);
    EXPECT_NO_THROW(validate(P(kAll), &sig));
}

TEST(Properties, NegationFreeSize) {
    gen::Rng rng(101);
    gen::FormulaShape sh;
    sh.p_not = 0.25;
    sh.max_names = 2;
    gen::FormulaGen g(rng, sh);
    for (int i = 0; i < 300; ++i) {
        Formula f = g();
        Formula h = negation_free(f);
        EXPECT_EQ(count_not(h), 0);
        EXPECT_LE(size(h), size(f) - count_not(f)) << to_string(f);
        EXPECT_TRUE(equal(negation_free(h), h));
    }
}

TEST(Properties, SizeBound) {
    gen::Rng rng(102);
    gen::FormulaShape sh;
    sh.max_names = 3;
    sh.max_binders = 3;
    gen::FormulaGen g(rng, sh);
    int tested = 0;
    while (tested < 300) {
        Formula f = normalize_binders(g());
        if (!gen::all_binders_used(f)) continue;
        ++tested;
        int lhs = static_cast<int>(support(f).size()) + 2 * bounding_depth(f) + zeta(f);
        EXPECT_LE(lhs, size(f)) << to_string(f);
    }
}

TEST(Properties, SubstitutionCommutesWithPermutation) {
    gen::Rng rng(103);
    for (int i = 0; i < 200; ++i) {
        Permutation p = gen::random_permutation(rng, 5);
        Formula f = P("some z. <o:x> (x = y | [o:z] y != #1) & #3 = x");
        NameSeq args{static_cast<Name>(gen::pick(rng, 0, 4)), static_cast<Name>(gen::pick(rng, 0, 4))};
        Formula lhs = act(p, subst_values(f, {{{"x", "y"}, args}}));
        Formula rhs = subst_values(act(p, f), {{{"x", "y"}, act(p, args)}});
        EXPECT_TRUE(equal(lhs, rhs));
    }
}

TEST(Properties, RankParityAndUnfoldSupport) {
    gen::Rng rng(104);
    gen::FormulaShape sh;
    sh.max_names = 2;
    gen::FormulaGen g(rng, sh);
    for (int i = 0; i < 200; ++i) {
        Formula f = normalize_binders(g());
        Alternation a = alternation(f);
        std::function<void(const Formula&)> walk = [&](const Formula& h) {
            int r = rank(h, a);
            EXPECT_EQ(r % 2 == 1, h->op == Op::Mu);
            EXPECT_LE(r, a.depth + 1);
            if (h->a) walk(h->a);
            if (h->b) walk(h->b);
        };
        walk(f);
        if (is_fix(f->op)) {
            NameSet s = support(f), t = support(unfold(f));
            EXPECT_TRUE(std::includes(s.begin(), s.end(), t.begin(), t.end()));
            if (gen::all_binders_used(f)) {
                EXPECT_EQ(t, s);
            }
        }
    }
}
