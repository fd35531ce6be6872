#include <map>

#include <gtest/gtest.h>

#include <nestloc/integrals.hpp>
#include <nestloc/toric.hpp>

using namespace nestloc;

namespace
{

const std::vector<weight_spec> &specs()
{
    static const std::vector<weight_spec> s = {
        {rational(3), rational(7)}, {rational(-5, 2), rational(11, 3)}, {rational(101, 7), rational(-13, 5)}};
    return s;
}

} // namespace

TEST(Toric, FixedPointsAndSmoothness)
{
    EXPECT_EQ(p2().fixed_points(), 3u);
    EXPECT_EQ(p1xp1().fixed_points(), 4u);
    for (const auto &s : {p2(), p1xp1()}) {
        for (const auto &c : s.charts()) {
            EXPECT_EQ(std::abs(c.determinant()), 1);
        }
    }
}

TEST(Toric, TangentWeightsSumToZeroOverEachTorusCurve)
{
    // Each torus-invariant curve joins two fixed points; its tangent weights
    // there are opposite. So the multiset of all weights is symmetric.
    for (const auto &s : {p2(), p1xp1()}) {
        std::map<exponent, int> count;
        for (const auto &c : s.charts()) {
            ++count[c.w1];
            ++count[c.w2];
        }
        for (const auto &[w, k] : count) {
            EXPECT_EQ((count[exponent{-w.a, -w.b}]), k) << s.name();
        }
    }
}

TEST(Toric, RejectsNonBasisWeights)
{
    EXPECT_THROW(toric_surface("bad", surface_family::p2, {{{2, 0}, {0, 1}, {0, 0}}}), invalid_argument_error);
    EXPECT_THROW(surface_by_name("f1"), invalid_argument_error);
}

TEST(Toric, LineBundleWeights)
{
    const auto s = p2();
    EXPECT_TRUE(line_bundle(s, {0}).is_trivial());
    const auto o2 = line_bundle(s, {2});
    EXPECT_EQ(o2.weights, (std::vector<exponent>{{0, 0}, {2, 0}, {0, 2}}));
    EXPECT_THROW(line_bundle(s, {1, 1}), invalid_argument_error);
    EXPECT_THROW(line_bundle(p1xp1(), {1}), invalid_argument_error);
}

TEST(Toric, ParseLineBundle)
{
    const auto s = p1xp1();
    EXPECT_EQ(parse_line_bundle(s, "O(1,0)"), line_bundle(s, {1, 0}));
    EXPECT_EQ(parse_line_bundle(s, "O"), trivial_bundle(s));
    EXPECT_EQ(parse_line_bundle(p2(), "O(-1)"), line_bundle(p2(), {-1}));
    EXPECT_THROW(parse_line_bundle(s, "O(1)"), invalid_argument_error);
    EXPECT_THROW(parse_line_bundle(s, "L(1,0)"), invalid_argument_error);
    EXPECT_THROW(parse_line_bundle(s, "O(1,x)"), invalid_argument_error);
}

TEST(Toric, HrrPinsTheConventions)
{
    const auto s = p2();
    for (const auto &spec : specs()) {
        EXPECT_EQ(hrr_check(s, line_bundle(s, {1}), spec), 3);
        EXPECT_EQ(hrr_check(s, line_bundle(s, {2}), spec), 6);
        EXPECT_EQ(hrr_check(p1xp1(), line_bundle(p1xp1(), {1, 1}), spec), 4);
        EXPECT_EQ(hrr_check(p1xp1(), line_bundle(p1xp1(), {0, 0}), spec), 1);
        EXPECT_EQ(hrr_check(p1xp1(), line_bundle(p1xp1(), {1, 0}), spec), 2);
    }
}

TEST(Toric, HrrBothRoutesAgreeWithMonomialCounts)
{
    const auto s = p2();
    for (long d = -2; d <= 5; ++d) {
        // Lattice points of d * simplex; for d = -1, -2 chi vanishes.
        const long expected = (d + 1) * (d + 2) / 2;
        EXPECT_EQ(hrr_check(s, line_bundle(s, {d}), specs()[1]), expected) << d;
        EXPECT_EQ(hrr_k_theoretic(s, line_bundle(s, {d}), {3, -7}), expected) << d;
    }
    const auto q = p1xp1();
    for (long a = -1; a <= 3; ++a) {
        for (long b = -1; b <= 3; ++b) {
            const long expected = (a + 1) * (b + 1);
            EXPECT_EQ(hrr_check(q, line_bundle(q, {a, b}), specs()[2]), expected);
            EXPECT_EQ(hrr_k_theoretic(q, line_bundle(q, {a, b}), {5, 2}), expected);
        }
    }
}

TEST(Toric, KTheoreticCharacterIsTheMonomialSum)
{
    // For effective O(d) the character is the sum of lattice points of d * simplex.
    const auto s = p2();
    laurent_poly chr;
    hrr_k_theoretic(s, line_bundle(s, {2}), {1, 3}, &chr);
    laurent_poly expected;
    for (long a = 0; a <= 2; ++a) {
        for (long b = 0; a + b <= 2; ++b) {
            expected += laurent_poly::monomial({a + 3 * b, 0});
        }
    }
    EXPECT_EQ(chr, expected);
}

TEST(Toric, NonGenericCocharacterIsRejected)
{
    EXPECT_THROW(hrr_k_theoretic(p2(), line_bundle(p2(), {1}), {1, 1}), non_generic_spec_error);
}
