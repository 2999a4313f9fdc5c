#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "aspec/constructions.hpp"
#include "aspec/errors.hpp"
#include "aspec/groups.hpp"
#include "oracles.hpp"

using namespace aspec;

namespace {

std::vector<double> turns_of(const std::vector<UnitPoint>& pts)
{
    std::vector<double> out;
    for (const auto& p : pts)
        out.push_back(p.turns());
    return out;
}

std::vector<double> turns_of(const std::vector<std::complex<double>>& zs)
{
    std::vector<double> out;
    for (auto z : zs)
        out.push_back(oracle::turns(z));
    return out;
}

std::vector<double> weight_turns(const TadpoleParams& t)
{
    std::vector<double> out;
    for (const auto& w : t.weights)
        out.push_back(w.turns());
    return out;
}

oracle::Matrix oracle_tadpole(const TadpoleParams& t)
{
    return oracle::tadpole(t.p, weight_turns(t), t.shift, t.offsets);
}

} // namespace

TEST(IsPrime, MatchesTrialDivision)
{
    for (std::int64_t n = -3; n < 2000; ++n)
        EXPECT_EQ(is_prime(n), oracle::is_prime(n)) << n;
}

TEST(CycleMatrix, SpectrumIsRootsOfUnity)
{
    for (std::int64_t p : {2, 3, 5, 7}) {
        auto s = spectrum(cycle_matrix(p));
        std::vector<UnitPoint> roots;
        for (std::int64_t j = 0; j < p; ++j)
            roots.push_back(UnitPoint::root(j, p));
        EXPECT_EQ(s.points, roots);
    }
    EXPECT_THROW(cycle_matrix(1), InvalidParams);
}

TEST(SpectrumDck, MatchesCharPolyOracle)
{
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::int64_t p : {3, 5, 7}) {
        for (int t = 0; t < 20; ++t) {
            std::vector<UnitPoint> w;
            UnitPoint prod;
            for (std::int64_t i = 0; i + 1 < p; ++i) {
                w.push_back(t % 2 ? UnitPoint::approx(u(gen)) : UnitPoint::root(static_cast<std::int64_t>(u(gen) * 30), 30));
                prod = prod * w.back();
            }
            w.push_back(prod.inverse());
            for (std::int64_t k = 0; k < p; ++k) {
                auto s = spectrum_dck(w, k, p);
                auto ref = oracle::eigenvalues(UMatrix::monomial_cycle(w, k).to_dense());
                EXPECT_LT(oracle::multiset_arc_distance(turns_of(s.points), turns_of(ref)), 1e-7);
            }
        }
    }
}

TEST(SpectrumDck, RequiresDeterminantOne)
{
    std::vector<UnitPoint> w{UnitPoint::root(1, 3), UnitPoint{}, UnitPoint{}};
    EXPECT_THROW(spectrum_dck(w, 1, 3), DeterminantNotOne);
    EXPECT_THROW(spectrum_dck(w, 1, 4), InvalidParams);
}

TEST(Tadpole, DenseFormMatchesOracle)
{
    std::mt19937_64 engine(2);
    for (int t = 0; t < 50; ++t) {
        auto params = sample_tadpole(5, engine, {.exact_weights = t % 2 == 0});
        auto m = tadpole(params);
        EXPECT_EQ(m.dim(), 10u);
        EXPECT_LT((m.to_dense() - oracle_tadpole(params)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Tadpole, Validation)
{
    auto t = tadpole_identity(3);
    t.shift = 3;
    EXPECT_THROW(tadpole(t), InvalidParams);
    t = tadpole_identity(3);
    t.offsets = {0, 3};
    EXPECT_THROW(tadpole(t), InvalidParams);
    t = tadpole_identity(3);
    t.weights[0] = UnitPoint::root(1, 3);
    EXPECT_THROW(tadpole(t), InvalidParams);
    EXPECT_THROW(tadpole(tadpole_identity(4)), InvalidParams);
    EXPECT_THROW(tadpole(tadpole_identity(2)), InvalidParams);
}

TEST(TadpoleMul, WrapExample)
{
    auto a = tadpole_identity(3);
    a.shift = 1;
    auto b = tadpole_identity(3);
    b.shift = 2;
    auto c = tadpole_mul(a, b);
    EXPECT_EQ(c.shift, 0);
    EXPECT_EQ(c.offsets, (std::vector<std::int64_t>{1, 2}));
}

TEST(TadpoleMul, NoCarryBelowP)
{
    auto a = tadpole_identity(5);
    a.shift = 1;
    auto b = tadpole_identity(5);
    b.shift = 2;
    auto c = tadpole_mul(a, b);
    EXPECT_EQ(c.shift, 3);
    EXPECT_EQ(c.offsets, (std::vector<std::int64_t>{0, 0, 0, 0}));
}

TEST(TadpoleMul, MatchesDenseProduct)
{
    std::mt19937_64 engine(3);
    for (std::int64_t p : {3, 5, 7}) {
        for (int t = 0; t < 100; ++t) {
            auto a = sample_tadpole(p, engine, {.exact_weights = true});
            auto b = sample_tadpole(p, engine, {.exact_weights = true});
            auto law = tadpole_mul(a, b);
            EXPECT_LT((oracle_tadpole(law) - oracle_tadpole(a) * oracle_tadpole(b)).cwiseAbs().maxCoeff(), 1e-12)
                << "p=" << p << " k=" << a.shift << " l=" << b.shift;
        }
    }
    auto x = tadpole_identity(3);
    EXPECT_THROW(tadpole_mul(x, tadpole_identity(5)), PrimeMismatch);
}

TEST(TadpoleInverse, IsTwoSided)
{
    std::mt19937_64 engine(4);
    for (int t = 0; t < 100; ++t) {
        auto a = sample_tadpole(5, engine, {.exact_weights = true});
        auto inv = tadpole_inverse(a);
        EXPECT_EQ(tadpole_mul(a, inv), tadpole_identity(5));
        EXPECT_EQ(tadpole_mul(inv, a), tadpole_identity(5));
    }
}

TEST(TadpoleCase, Classification)
{
    auto a = tadpole_identity(3);
    auto b = tadpole_identity(3);
    EXPECT_EQ(tadpole_case(a, b), 1);
    b.shift = 1;
    EXPECT_EQ(tadpole_case(a, b), 2);
    a.shift = 1;
    EXPECT_EQ(tadpole_case(a, b), 3);
    b.shift = 2;
    EXPECT_EQ(tadpole_case(a, b), 4);
}

TEST(TadpoleBound, SampledPairsAgainstOracle)
{
    std::mt19937_64 engine(5);
    for (std::int64_t p : {3, 5}) {
        double bound = 1.0 / (2.0 * static_cast<double>(p * p));
        for (int t = 0; t < 150; ++t) {
            auto a = sample_tadpole(p, engine);
            auto b = sample_tadpole(p, engine);
            auto d = pair_defect(tadpole(a), tadpole(b));
            EXPECT_LE(d.asm_defect.value, bound + 1e-9);
            EXPECT_NEAR(d.asm_defect.value, oracle::pair_defect(oracle_tadpole(a), oracle_tadpole(b)), 1e-6);
        }
    }
}

TEST(TadpoleBound, ExactCasesOneToThreeAreSubmultiplicative)
{
    std::mt19937_64 engine(6);
    int seen = 0;
    for (int t = 0; t < 400; ++t) {
        auto a = sample_tadpole(3, engine, {.exact_weights = true});
        auto b = sample_tadpole(3, engine, {.exact_weights = true});
        if (tadpole_case(a, b) == 4)
            continue;
        ++seen;
        auto d = pair_defect(tadpole(a), tadpole(b));
        ASSERT_TRUE(d.exact);
        EXPECT_EQ(*d.asm_defect.exact, Rational(0));
    }
    EXPECT_GT(seen, 100);
}

TEST(TadpoleWitness, AttainsHalfInverseP2)
{
    for (std::int64_t p : {3, 5, 7}) {
        auto [a, b] = tadpole_case4_witness(p);
        EXPECT_EQ(tadpole_case(a, b), 4);
        auto d = pair_defect(tadpole(a), tadpole(b));
        ASSERT_TRUE(d.exact);
        EXPECT_EQ(*d.asm_defect.exact, Rational(1, 2 * p * p));
        EXPECT_NEAR(oracle::pair_defect(oracle_tadpole(a), oracle_tadpole(b)), 1.0 / (2.0 * p * p), 1e-7);
    }
}

TEST(TadpoleWitness, ProductSetIsAllP2Roots)
{
    auto [a, b] = tadpole_case4_witness(3);
    auto sa = distinct_points(spectrum(tadpole(a)).points);
    auto sb = distinct_points(spectrum(tadpole(b)).points);
    std::vector<UnitPoint> prods;
    for (const auto& x : sa)
        for (const auto& y : sb)
            prods.push_back(x * y);
    prods = distinct_points(prods);
    ASSERT_EQ(prods.size(), 9u);
    for (std::int64_t j = 0; j < 9; ++j)
        EXPECT_EQ(prods[static_cast<std::size_t>(j)], UnitPoint::root(j, 9));
}

TEST(TadpoleWitness, AnyHeadAndShift)
{
    std::mt19937_64 engine(7);
    for (int t = 0; t < 20; ++t) {
        auto head = sample_tadpole(5, engine, {.exact_weights = true}).weights;
        for (std::int64_t k = 1; k < 5; ++k) {
            auto [a, b] = tadpole_case4_witness(5, head, k);
            EXPECT_EQ(*pair_defect(tadpole(a), tadpole(b)).asm_defect.exact, Rational(1, 50));
        }
    }
    EXPECT_THROW(tadpole_case4_witness(5, std::vector<UnitPoint>(5), 0), InvalidParams);
}

TEST(TadpoleRoots, ClosureMatchesParameterCount)
{
    auto g = close(tadpole_root_generators(3));
    ASSERT_TRUE(g.complete());
    EXPECT_EQ(g.order(), tadpole_root_group_order(3));
    EXPECT_EQ(g.order(), 2187u);

    // Enumerate every parameter tuple with 9th-root weights of determinant 1.
    std::set<std::string> keys;
    std::vector<std::int64_t> e(3);
    for (e[0] = 0; e[0] < 9; ++e[0])
        for (e[1] = 0; e[1] < 9; ++e[1])
            for (std::int64_t k = 0; k < 3; ++k)
                for (std::int64_t a1 = 0; a1 < 3; ++a1)
                    for (std::int64_t a2 = 0; a2 < 3; ++a2) {
                        TadpoleParams t;
                        t.p = 3;
                        t.weights = {UnitPoint::root(e[0], 9), UnitPoint::root(e[1], 9),
                                     UnitPoint::root(-e[0] - e[1], 9)};
                        t.shift = k;
                        t.offsets = {a1, a2};
                        auto m = tadpole(t);
                        keys.insert(g.key_of(m));
                        EXPECT_TRUE(g.index_of(m).has_value());
                    }
    EXPECT_EQ(keys.size(), 2187u);
}

TEST(MillerMoreno, DefaultParameters)
{
    auto mm = default_miller_moreno(3, 7);
    EXPECT_EQ(mm.theta_exponents, (std::vector<std::vector<std::int64_t>>{{1, 2, 4}}));
    EXPECT_EQ(mm.dim(), 3u);
    EXPECT_THROW(default_miller_moreno(3, 11), InvalidParams);
    EXPECT_THROW(default_miller_moreno(4, 7), InvalidParams);
    auto mm5 = default_miller_moreno(5, 11);
    EXPECT_EQ(mm5.theta_exponents[0].size(), 5u);
}

TEST(MillerMoreno, Validation)
{
    auto mm = default_miller_moreno(3, 7);
    mm.theta_exponents = {{1, 1, 1}};
    EXPECT_THROW(validate(mm), InvalidParams); // scalar X_i
    mm.theta_exponents = {{1, 2, 3}};
    EXPECT_THROW(validate(mm), InvalidParams); // det != 1
    mm.theta_exponents = {{0, 3, 4}};
    EXPECT_THROW(validate(mm), InvalidParams); // theta of order 1
    mm = default_miller_moreno(3, 7);
    mm.betas = {RationalAngle(1, 2)};
    EXPECT_THROW(validate(mm), InvalidParams); // beta order not a power of 3
    mm.betas = {RationalAngle(1, 9)};
    EXPECT_NO_THROW(validate(mm));
}

TEST(MillerMoreno, GeneratorsAndTrailingScalars)
{
    auto mm = default_miller_moreno(3, 7);
    mm.betas = {RationalAngle(0, 1), RationalAngle(1, 3)};
    auto [x, y] = miller_moreno(mm);
    EXPECT_EQ(x.dim(), 4u);
    auto xd = x.to_dense();
    auto yd = y.to_dense();
    EXPECT_LT(std::abs(xd(3, 3) - 1.0), 1e-15);
    EXPECT_LT(std::abs(yd(3, 3) - oracle::unit(1.0 / 3.0)), 1e-15);
    EXPECT_LT(std::abs(yd(0, 1) - 1.0), 1e-15);
    EXPECT_LT(std::abs(xd(1, 1) - oracle::unit(2.0 / 7.0)), 1e-15);
}

TEST(MmGap, CountingBoundAgainstOracle)
{
    for (auto [p, q] : std::vector<std::pair<std::int64_t, std::int64_t>>{{3, 7}, {3, 13}, {3, 31}, {5, 11}}) {
        auto mm = default_miller_moreno(p, q);
        auto g = mm_gap_analysis(mm);
        EXPECT_LE(static_cast<std::int64_t>(g.distinct_products), g.count_bound);
        EXPECT_LE(g.count_bound, g.n2_minus_1);

        // Independent count from oracle eigenvalues of X^k Y and Y^-1.
        auto [x, y] = miller_moreno(mm);
        oracle::Matrix xd = x.to_dense();
        oracle::Matrix yd = y.to_dense();
        oracle::Matrix xk = xd;
        auto sy = oracle::eigenvalues(yd.adjoint());
        std::size_t most = 0;
        for (std::int64_t k = 1; k < q; ++k, xk = xk * xd) {
            auto sa = oracle::eigenvalues(xk * yd);
            std::vector<double> prods;
            for (auto a : sa)
                for (auto b : sy) {
                    double t = oracle::turns(a * b);
                    if (std::none_of(prods.begin(), prods.end(), [&](double s) { return oracle::arc(s, t) < 1e-6; }))
                        prods.push_back(t);
                }
            most = std::max(most, prods.size());
        }
        EXPECT_EQ(g.distinct_products, most) << "p=" << p << " q=" << q;
    }
}

TEST(MmGap, LargeQBreaksHalfInverseN2)
{
    auto g = mm_gap_analysis(default_miller_moreno(3, 151));
    EXPECT_GT(g.predicted_lower, g.half_inverse_n2);
    ASSERT_TRUE(g.max_pair_defect.exact);
    EXPECT_GE(*g.max_pair_defect.exact, g.predicted_lower);
    EXPECT_GT(*g.max_pair_defect.exact, Rational(1, 18));
    EXPECT_GT(g.witness_k, 0);
    EXPECT_TRUE(g.product_set_constant);
}

TEST(Sr, EigenvaluesMatchOracle)
{
    rnd::Engine engine(8);
    SrParams params{.n = 4, .r = 0.7, .lambda = std::nullopt};
    for (int t = 0; t < 200; ++t) {
        auto a = sr_sample(params, engine);
        auto b = sr_sample(params, engine);
        EXPECT_LT(a.x.norm(), 0.7);
        EXPECT_LT(a.y.norm(), 0.7);
        auto ea = oracle::eigenvalues(a.matrix().entries);
        auto eab = oracle::eigenvalues(a.matrix().entries * b.matrix().entries);
        auto largest = [](const std::vector<std::complex<double>>& v) {
            return *std::max_element(v.begin(), v.end(), [](auto l, auto r) { return std::abs(l) < std::abs(r); });
        };
        EXPECT_LT(std::abs(largest(ea) - a.eigenvalue()), 1e-8);
        EXPECT_LT(std::abs(largest(eab) - sr_product_eigenvalue(a, b)), 1e-8);
    }
}

TEST(Sr, BoundHoldsOnSamples)
{
    EXPECT_NEAR(sr_bound(0.5), 16.0 / 9.0, 1e-15);
    rnd::Engine engine(9);
    for (double r : {0.3, 0.5, 0.9}) {
        SrParams params{.n = 3, .r = r};
        for (int t = 0; t < 5000; ++t) {
            auto a = sr_sample(params, engine);
            auto b = sr_sample(params, engine);
            double ratio = std::abs(sr_product_eigenvalue(a, b) / (a.eigenvalue() * b.eigenvalue()) - 1.0);
            EXPECT_LE(ratio, sr_bound(r));
        }
    }
    EXPECT_THROW(sr_sample({.r = 1.0}, engine), InvalidParams);
    EXPECT_THROW(sr_sample({.n = 1}, engine), InvalidParams);
}

TEST(Sr, AdversarialPairApproachesBound)
{
    // Opposite vectors along one axis give exactly 4 s^2 / (1 - s^2)^2.
    double r = 0.5;
    double s = 0.999 * r;
    RankOneElement a;
    RankOneElement b;
    ComplexVector e = ComplexVector::Zero(2);
    e(0) = 1.0;
    a.x = s * e;
    a.y = -s * e;
    b.x = -s * e;
    b.y = s * e;
    double ratio = std::abs(sr_product_eigenvalue(a, b) / (a.eigenvalue() * b.eigenvalue()) - 1.0);
    EXPECT_LE(ratio, sr_bound(r));
    EXPECT_NEAR(ratio, sr_bound(s), 1e-12);
}

TEST(QSet, MatchesFractionScanOracle)
{
    for (std::int64_t p : {3, 5}) {
        for (auto eps : {Rational(1, 2 * p) - Rational(1, 100), Rational(1, 2 * p) - Rational(1, 40),
                         Rational(1, 2 * p) - Rational(1, 13), Rational(1, 4 * p), Rational(1, 2 * p) - Rational(1, 300)}) {
            QSetParams params{.p = p, .epsilon_p = eps};
            auto r = q_set(params);
            Rational half = Rational(1) / (2 * params.delta());
            EXPECT_EQ(r.cutoff, BigInt(numerator(half) / denominator(half)));
            std::vector<std::int64_t> expect;
            for (std::int64_t q = 2; q <= r.scanned_to; ++q)
                if (oracle::is_prime(q) && oracle::q_member(p, eps, q))
                    expect.push_back(q);
            EXPECT_EQ(r.members, expect) << "p=" << p << " eps=" << eps;
            EXPECT_NE(std::find(r.members.begin(), r.members.end(), p), r.members.end());
            // Nothing beyond the cutoff qualifies.
            auto limit = r.cutoff.convert_to<std::int64_t>();
            for (std::int64_t q = limit + 1; q <= 2 * limit + 50; ++q)
                if (oracle::is_prime(q))
                    EXPECT_FALSE(oracle::q_member(p, eps, q)) << q;
        }
    }
}

TEST(QSet, Examples)
{
    auto r = q_set({.p = 3, .epsilon_p = Rational(1, 6) - Rational(1, 100)});
    EXPECT_EQ(r.cutoff, 50);
    EXPECT_NE(std::find(r.members.begin(), r.members.end(), 3), r.members.end());
    auto r5 = q_set({.p = 5, .epsilon_p = Rational(1, 10) - Rational(1, 50)});
    EXPECT_EQ(r5.cutoff, 25);
}

TEST(QSet, BoundaryIsOpen)
{
    // For q = 5 and p = 3 the closest k/q to an odd multiple of 1/6 is 1/30 away.
    EXPECT_TRUE(q_verdict(3, Rational(1, 30), 5).member);
    auto v = q_verdict(3, Rational(1, 30) + Rational(1, 1000000), 5);
    EXPECT_FALSE(v.member);
    ASSERT_TRUE(v.witness_k);
    EXPECT_EQ(*v.witness_k, 1);
}

TEST(QSet, Errors)
{
    EXPECT_THROW(q_set({.p = 4, .epsilon_p = Rational(1, 20)}), InvalidParams);
    EXPECT_THROW(q_set({.p = 3, .epsilon_p = Rational(1, 6)}), InvalidParams);
    EXPECT_THROW(q_set({.p = 3, .epsilon_p = Rational(0)}), InvalidParams);
    EXPECT_THROW(q_set({.p = 3, .epsilon_p = Rational(1, 6) - Rational(1, 1000000000)}), InvalidParams);
    auto truncated = q_set({.p = 3, .epsilon_p = Rational(1, 6) - Rational(1, 1000000000)}, 100);
    EXPECT_TRUE(truncated.truncated);
    EXPECT_EQ(truncated.scanned_to, 100);
}
