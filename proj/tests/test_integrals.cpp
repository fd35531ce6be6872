#include <gtest/gtest.h>

#include <nestloc/chern_calculus.hpp>
#include <nestloc/integrals.hpp>

using namespace nestloc;

namespace
{

const std::vector<weight_spec> &specs()
{
    static const std::vector<weight_spec> s = {
        {rational(3), rational(7)}, {rational(-5, 2), rational(11, 3)}, {rational(101, 7), rational(-13, 5)}};
    return s;
}

laurent_poly t(long a, long b)
{
    return laurent_poly::monomial({a, b});
}

} // namespace

TEST(ChernSeries, Examples)
{
    EXPECT_EQ(chern_series(laurent_poly(), specs()[0], 3), truncated_series(3));
    const auto a = chern_series(t(1, 0), {1, 0}, 2);
    EXPECT_EQ(a[0], 1);
    EXPECT_EQ(a[1], 1);
    EXPECT_EQ(a[2], 0);
    const auto b = chern_series(t(1, 0) - t(0, 1), {2, 3}, 2);
    EXPECT_EQ(b[0], 1);
    EXPECT_EQ(b[1], -1);
    EXPECT_EQ(b[2], 3);
}

TEST(ChernSeries, MultiplicativeOnSums)
{
    const laurent_poly a = t(1, 0) + laurent_poly::monomial({2, -1}, 3);
    const laurent_poly b = t(-1, 1) - laurent_poly::monomial({0, 2}, 2);
    for (const auto &spec : specs()) {
        EXPECT_EQ(chern_series(a + b, spec, 6), chern_series(a, spec, 6) * chern_series(b, spec, 6));
    }
}

TEST(ChernSeries, AgreesWithFormalSplittingPrinciple)
{
    // A character with multiplicities, evaluated through the formal ring:
    // total Chern class prod (1 + x)^m with x the evaluated weight.
    const laurent_poly chr = laurent_poly::monomial({1, 0}, 2) - t(0, 1) + laurent_poly::monomial({1, -2}, 3);
    const int D = 6;
    for (const auto &spec : specs()) {
        formal_ring ring(D);
        const int h = ring.add_generator("h", 1);
        graded_element total = ring.one();
        for (const auto &[e, m] : chr.terms()) {
            const auto factor = ring.one() + ring.constant(spec.eval(e)) * ring.generator(h);
            total *= m > 0 ? factor.pow(static_cast<int>(m.get_si())) : factor.inverse().pow(static_cast<int>(-m.get_si()));
        }
        const auto per_degree = total.evaluate({rational(1)});
        const auto series = chern_series(chr, spec, D);
        for (int k = 0; k <= D; ++k) {
            EXPECT_EQ(series[k], per_degree[static_cast<std::size_t>(k)]) << k;
        }
    }
}

TEST(EulerClass, Examples)
{
    EXPECT_EQ(euler_class(t(1, 0) + t(0, 1), {1, 1}), 1);
    EXPECT_EQ(euler_class(t(1, 0) - t(0, 1), {2, 3}), rational(2, 3));
    EXPECT_THROW(euler_class(t(1, 0) + laurent_poly::constant(1), specs()[0]), zero_weight_error);
    EXPECT_THROW(euler_class(t(1, -1), {5, 5}), non_generic_spec_error);
}

TEST(Integrals, FixedPointCounts)
{
    for (const auto &spec : specs()) {
        EXPECT_EQ(integrate_ambient(p2(), {2}, tangent_class(0, 4), spec), 9);
        EXPECT_EQ(integrate_ambient(p2(), {3}, tangent_class(0, 6), spec), 22);
        EXPECT_EQ(integrate_ambient(p1xp1(), {2}, tangent_class(0, 4), spec), 14);
    }
}

TEST(Integrals, ClassicalNumbersOnTheSurface)
{
    const auto s = p2();
    const auto o1 = line_bundle(s, {1});
    for (const auto &spec : specs()) {
        EXPECT_EQ(integrate_ambient(s, {1}, taut_class(o1, 0, 1).times(taut_class(o1, 0, 1)), spec), 1);
        // c_2(T P^2) = 3, c_1^2 = 9
        EXPECT_EQ(integrate_ambient(s, {1}, tangent_class(0, 2), spec), 3);
        EXPECT_EQ(integrate_ambient(s, {1}, tangent_class(0, 1).times(tangent_class(0, 1)), spec), 9);
        const auto q = p1xp1();
        // h1 h2 = 1, h1^2 = 0 on P^1 x P^1; c_1^2 = 8
        const auto a = line_bundle(q, {1, 0});
        const auto b = line_bundle(q, {0, 1});
        EXPECT_EQ(integrate_ambient(q, {1}, taut_class(a, 0, 1).times(taut_class(b, 0, 1)), spec), 1);
        EXPECT_EQ(integrate_ambient(q, {1}, taut_class(a, 0, 1).times(taut_class(a, 0, 1)), spec), 0);
        EXPECT_EQ(integrate_ambient(q, {1}, tangent_class(0, 1).times(tangent_class(0, 1)), spec), 8);
    }
}

TEST(Integrals, TopSegreOfTautologicalOnHilb2)
{
    // Integrality of a top tautological number, computed at three specs.
    const auto s = p2();
    const auto o1 = line_bundle(s, {1});
    insertion ins;
    for (int k = 0; k < 4; ++k) {
        ins = ins.times(taut_class(o1, 0, 1));
    }
    const auto v = consistency_run([&](const weight_spec &spec) { return integrate_ambient(s, {2}, ins, spec); },
                                   specs());
    EXPECT_EQ(v.get_den(), 1);
}

TEST(Integrals, VirtualExamples)
{
    const auto s = p2();
    for (const auto &spec : specs()) {
        EXPECT_EQ(integrate_virtual(s, {0, 0}, {}, spec), 1);
    }
    const auto c3 = taut_class(line_bundle(s, {1}), 0, 3);
    EXPECT_NO_THROW(consistency_run([&](const weight_spec &spec) { return integrate_virtual(s, {2, 1}, c3, spec); },
                                    specs()));
}

TEST(Integrals, PushforwardIdentitySmall)
{
    const auto s = p2();
    const auto o1 = line_bundle(s, {1});
    const auto phi = taut_class(o1, 0, 1).times(taut_class(o1, 1, 1));
    const auto prefix = co_chern_class(trivial_bundle(s), 0, 1, 2);
    for (const auto &spec : specs()) {
        EXPECT_EQ(integrate_ambient(s, {1, 1}, prefix.times(phi), spec), integrate_virtual(s, {1, 1}, phi, spec));
    }
}

TEST(Integrals, DiagonalPushforwardOnSurface)
{
    // On S x S, c_2(E12) is the class of the diagonal, so pairing with
    // a x b gives int_S a b.
    const auto s = p2();
    const auto o1 = line_bundle(s, {1});
    const auto prefix = co_chern_class(trivial_bundle(s), 0, 1, 2);
    for (const auto &spec : specs()) {
        EXPECT_EQ(integrate_ambient(s, {1, 1}, prefix.times(taut_class(o1, 0, 2)), spec), 0);
        EXPECT_EQ(integrate_ambient(s, {1, 1}, prefix.times(tangent_class(0, 2)), spec), 3);
    }
}

TEST(Integrals, DegreeMismatchAndSpecDependence)
{
    const auto s = p2();
    const auto bad = tangent_class(0, 4).times(taut_class(line_bundle(s, {1}), 0, 1));
    EXPECT_THROW(integrate_ambient(s, {2}, bad, specs()[0]), degree_mismatch_error);
    EXPECT_THROW(integrate_virtual(s, {2, 1}, bad, specs()[0]), degree_mismatch_error);
    const integration_options unchecked{false, 1};
    EXPECT_THROW(consistency_run([&](const weight_spec &spec) { return integrate_ambient(s, {2}, bad, spec, unchecked); },
                                 specs()),
                 spec_dependence_error);
    EXPECT_THROW(consistency_run([](const weight_spec &) { return rational(0); }, {specs()[0]}),
                 invalid_argument_error);
}

TEST(Integrals, IndexingErrors)
{
    const auto s = p2();
    EXPECT_THROW(integrate_ambient(s, {1}, taut_class(line_bundle(s, {1}), 1, 2), specs()[0]), index_mismatch_error);
    EXPECT_THROW(integrate_ambient(s, {1}, taut_class(line_bundle(p1xp1(), {1, 0}), 0, 2), specs()[0]),
                 index_mismatch_error);
    EXPECT_THROW(integrate_virtual(s, {1, 2}, {}, specs()[0]), invalid_argument_error);
}

TEST(Integrals, ParallelMatchesSerial)
{
    const auto s = p1xp1();
    const std::vector<int> sizes{2, 2};
    const auto phis = insertion_basis(s, sizes, 4);
    const auto prefix = co_chern_class(trivial_bundle(s), 0, 1, 4);
    for (unsigned jobs : {2u, 3u, 4u, 7u}) {
        EXPECT_EQ(integrate_ambient_batch(s, sizes, prefix, phis, specs()[1], {true, jobs}),
                  integrate_ambient_batch(s, sizes, prefix, phis, specs()[1], {true, 1}));
        EXPECT_EQ(integrate_virtual_batch(s, sizes, {}, phis, specs()[1], {true, jobs}),
                  integrate_virtual_batch(s, sizes, {}, phis, specs()[1], {true, 1}));
    }
}

TEST(InsertionBasis, Examples)
{
    const auto s = p2();
    const auto zero = insertion_basis(s, {2, 1}, 0);
    ASSERT_EQ(zero.size(), 1u);
    EXPECT_TRUE(zero.front().factors.empty());
    const auto one = insertion_basis({1}, 1, {line_bundle(s, {1})});
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(to_string(one.front()), "c1(taut(O(1))@1)");
}

TEST(InsertionBasis, CountsAreMonomialCounts)
{
    // Generators of degrees 1..n per factor and bundle; count monomials of
    // each degree by a coin-change recursion.
    const std::vector<int> sizes{2, 1};
    std::vector<int> degs;
    for (int n : sizes) {
        for (int b = 0; b < 3; ++b) {
            for (int j = 1; j <= n; ++j) {
                degs.push_back(j);
            }
        }
    }
    std::vector<long> ways(7, 0);
    ways[0] = 1;
    for (int d : degs) {
        for (int k = d; k <= 6; ++k) {
            ways[static_cast<std::size_t>(k)] += ways[static_cast<std::size_t>(k - d)];
        }
    }
    for (int k = 0; k <= 6; ++k) {
        const auto basis = insertion_basis(p2(), sizes, k);
        EXPECT_EQ(static_cast<long>(basis.size()), ways[static_cast<std::size_t>(k)]);
        for (const auto &phi : basis) {
            EXPECT_EQ(phi.total_degree(), k);
        }
    }
}

TEST(Sampler, DeterministicAndGeneric)
{
    spec_sampler a(42);
    spec_sampler b(42);
    for (int k = 0; k < 10; ++k) {
        const auto x = a.next();
        EXPECT_EQ(x, b.next());
        EXPECT_NE(x.s1, 0);
        EXPECT_NE(x.s2, 0);
    }
    spec_sampler c(43);
    EXPECT_NE(spec_sampler(42).next(), c.next());
}

TEST(Sampler, ResamplesOnNonGenericSpecs)
{
    spec_sampler sampler(1);
    int calls = 0;
    const auto out = sample_batch(
        [&](const weight_spec &spec) {
            if (++calls % 2 == 1) {
                throw non_generic_spec_error("synthetic");
            }
            return std::vector<rational>{spec.s1};
        },
        sampler, 3);
    EXPECT_EQ(out.specs.size(), 3u);
    EXPECT_EQ(calls, 6);
    EXPECT_THROW(sample_batch([](const weight_spec &) -> std::vector<rational> { throw non_generic_spec_error("x"); },
                              sampler, 3, 4),
                 non_generic_spec_error);
}

TEST(Integrals, TopClassDoesNotVanish)
{
    // Control for the vanishing checks: at i = 0 the class c_{n1+n2} is the
    // pushforward of the nested virtual class and pairs nontrivially.
    for (const auto &s : {p2(), p1xp1()}) {
        const std::vector<int> sizes{2, 1};
        const auto prefix = co_chern_class(trivial_bundle(s), 0, 1, 3);
        const auto values = integrate_ambient_batch(s, sizes, prefix, insertion_basis(s, sizes, 3), specs()[0]);
        std::size_t nonzero = 0;
        for (const auto &v : values) {
            nonzero += v != 0 ? 1 : 0;
        }
        EXPECT_GE(nonzero, 10u) << s.name();
    }
}
