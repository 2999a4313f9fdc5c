#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "aspec/constructions.hpp"
#include "aspec/errors.hpp"
#include "aspec/groups.hpp"
#include "aspec/measure.hpp"
#include "oracles.hpp"

using namespace aspec;

namespace {

std::vector<UMatrix> q8()
{
    return {UMatrix::diagonal({UnitPoint::root(1, 4), UnitPoint::root(3, 4)}),
            UMatrix::monomial_cycle({UnitPoint::root(0, 1), UnitPoint::root(1, 2)}, 1)};
}

Spectrum exact_spectrum(std::vector<UnitPoint> pts)
{
    Spectrum s;
    s.dim = pts.size();
    s.points = std::move(pts);
    return s;
}

} // namespace

TEST(PairDefect, HandExample)
{
    // sigma(A) sigma(B) = {0, 1/2}; gamma = 1/4 is 1/4 away from both.
    auto a = exact_spectrum({UnitPoint::root(0, 1), UnitPoint::root(1, 2)});
    auto b = exact_spectrum({UnitPoint::root(0, 1)});
    auto ab = exact_spectrum({UnitPoint::root(1, 4), UnitPoint::root(1, 2)});
    auto d = pair_defect(a, b, ab);
    EXPECT_TRUE(d.exact);
    EXPECT_EQ(*d.asm_defect.exact, Rational(1, 4));
    EXPECT_EQ(d.gamma, UnitPoint::root(1, 4));
    EXPECT_NEAR(d.sub_defect, std::sqrt(2.0), 1e-12);
}

TEST(PairDefect, EmptySpectrumThrows)
{
    EXPECT_THROW(pair_defect(Spectrum{}, exact_spectrum({UnitPoint{}}), exact_spectrum({UnitPoint{}})), InvalidParams);
}

TEST(PairDefect, Q8AllPairsMatchBruteForce)
{
    auto g = close(q8());
    double worst = 0.0;
    for (const auto& a : g.elements())
        for (const auto& b : g.elements()) {
            auto d = pair_defect(a, b);
            EXPECT_TRUE(d.exact);
            double ref = oracle::pair_defect(a.to_dense(), b.to_dense());
            EXPECT_NEAR(d.asm_defect.value, ref, 1e-9);
            worst = std::max(worst, ref);
        }
    EXPECT_NEAR(worst, 0.25, 1e-9);
}

TEST(MeasureAsm, Q8IsExactlyOneQuarter)
{
    auto r = measure_asm(close(q8()));
    EXPECT_EQ(r.pair_count, 64u);
    EXPECT_EQ(r.group_order, 8u);
    EXPECT_TRUE(r.exact);
    EXPECT_FALSE(r.lower_bound);
    ASSERT_TRUE(r.epsilon_star.exact);
    EXPECT_EQ(*r.epsilon_star.exact, Rational(1, 4));
    ASSERT_TRUE(r.worst);
    EXPECT_EQ(r.worst->sets.size(), 3u);
    std::uint64_t total = r.histogram.overflow;
    for (auto c : r.histogram.bins)
        total += c;
    EXPECT_EQ(total, 64u);
}

TEST(MeasureAsm, CyclicIsZero)
{
    auto r = measure_asm(close({cycle_matrix(5)}));
    EXPECT_EQ(*r.epsilon_star.exact, Rational(0));
    EXPECT_EQ(r.histogram.zeros, 25u);
}

TEST(MeasureAsm, MillerMorenoQ7MatchesOracle)
{
    auto [x, y] = miller_moreno(default_miller_moreno(3, 7));
    auto g = close({x, y});
    auto r = measure_asm(g);
    EXPECT_EQ(*r.epsilon_star.exact, Rational(1, 7));
    std::vector<oracle::Matrix> els;
    for (const auto& e : g.elements())
        els.push_back(e.to_dense());
    EXPECT_NEAR(oracle::epsilon_star(els), 1.0 / 7.0, 1e-6);
}

TEST(MeasureAsm, WorkerCountDoesNotChangeReport)
{
    auto [x, y] = miller_moreno(default_miller_moreno(3, 13));
    auto g = close({x, y}, {.build_cayley = true});
    auto one = measure_asm(g, {.workers = 1});
    auto three = measure_asm(g, {.workers = 3});
    EXPECT_EQ(one, three);
    auto no_table = measure_asm(close({x, y}), {.workers = 2});
    EXPECT_EQ(one, no_table);
}

TEST(MeasureAsm, RecordsPairsOnRequest)
{
    auto r = measure_asm(close(q8()), {.record_pairs = true});
    ASSERT_EQ(r.pairs.size(), 64u);
    for (std::size_t t = 0; t < r.pairs.size(); ++t) {
        EXPECT_EQ(r.pairs[t].index, t);
        EXPECT_EQ(r.pairs[t].first, t / 8);
        EXPECT_EQ(r.pairs[t].second, t % 8);
    }
}

TEST(MeasureAsm, IncompleteClosure)
{
    auto g = close(tadpole_root_generators(3), {.max_elements = 50});
    EXPECT_THROW(measure_asm(g), IncompleteClosure);
    auto r = measure_asm(g, {.allow_incomplete = true});
    EXPECT_TRUE(r.lower_bound);
    EXPECT_FALSE(r.complete);
    EXPECT_FALSE(r.notes.empty());
}

TEST(MeasureAsmSampled, DeterministicAcrossWorkers)
{
    auto sampler = tadpole_pair_sampler(3);
    auto a = measure_asm_sampled(sampler, 3000, 42, {.workers = 1});
    auto b = measure_asm_sampled(sampler, 3000, 42, {.workers = 4});
    EXPECT_EQ(a, b);
    auto c = measure_asm_sampled(sampler, 3000, 43, {.workers = 1});
    EXPECT_NE(a.epsilon_star.value, c.epsilon_star.value);
    EXPECT_TRUE(a.lower_bound);
    EXPECT_EQ(a.seed, 42u);
}

TEST(MeasureAsmSampled, PrefixIsStable)
{
    // Pair i depends only on (seed, i), so a longer run sees the same first pairs.
    auto sampler = tadpole_pair_sampler(3);
    auto shorter = measure_asm_sampled(sampler, 1500, 5, {.record_pairs = true});
    auto longer = measure_asm_sampled(sampler, 3000, 5, {.record_pairs = true});
    for (std::size_t i = 0; i < 1500; ++i)
        EXPECT_EQ(shorter.pairs[i].defect, longer.pairs[i].defect);
}

TEST(MeasureAsmSampled, ZeroPairsRejected)
{
    EXPECT_THROW(measure_asm_sampled(tadpole_pair_sampler(3), 0, 1), std::invalid_argument);
}

TEST(SubPairDefect, NonzeroConvention)
{
    std::vector<std::complex<double>> a{{2.0, 0.0}, {0.0, 0.0}};
    std::vector<std::complex<double>> b{{1.0, 0.0}, {0.0, 0.0}};
    std::vector<std::complex<double>> ab{{3.0, 0.0}, {0.0, 0.0}};
    auto d = sub_pair_defect(a, b, ab, 2.0, 1.0);
    // Zero eigenvalues take no part: |3 - 2| / (2 * 1).
    EXPECT_NEAR(d.defect, 0.5, 1e-15);
    EXPECT_EQ(d.gamma, std::complex<double>(3.0, 0.0));
    EXPECT_THROW(sub_pair_defect(a, b, ab, 0.0, 1.0), ZeroSpectralRadius);
}

TEST(SubPairDefect, UnitaryConversionBound)
{
    // eps'-ASM unitary pairs are (2 pi eps')-submultiplicative.
    auto g = close(q8());
    for (const auto& a : g.elements())
        for (const auto& b : g.elements()) {
            auto asm_d = pair_defect(a, b).asm_defect.value;
            auto sub_d = sub_pair_defect(GeneralMatrix{a.to_dense()}, GeneralMatrix{b.to_dense()}).defect;
            EXPECT_LE(sub_d, 2.0 * std::numbers::pi * asm_d + 1e-9);
        }
}

TEST(MeasureSub, ExhaustiveOnUnitaryElements)
{
    auto g = close(q8());
    std::vector<GeneralMatrix> els;
    for (const auto& e : g.elements())
        els.push_back(GeneralMatrix{e.to_dense()});
    auto r = measure_sub(els);
    EXPECT_EQ(r.metric, Metric::Sub);
    // |i - 1| at gamma = i against products {1, -1}.
    EXPECT_NEAR(r.epsilon_star.value, std::sqrt(2.0), 1e-9);
    EXPECT_FALSE(r.notes.empty());
}

TEST(MeasureSubSampled, DeterministicAndBounded)
{
    auto sampler = sr_pair_sampler({.n = 3, .r = 0.5});
    auto a = measure_sub_sampled(sampler, 2000, 9, {.workers = 1});
    auto b = measure_sub_sampled(sampler, 2000, 9, {.workers = 2});
    EXPECT_EQ(a, b);
    EXPECT_LE(a.epsilon_star.value, sr_bound(0.5));
}

TEST(ConversionCheck, Values)
{
    auto c = conversion_check(0.25);
    EXPECT_NEAR(c.sub_bound, std::numbers::pi / 2.0, 1e-15);
    EXPECT_NEAR(c.asm_bound, 0.125, 1e-15);
    EXPECT_THROW(conversion_check(-1.0), std::invalid_argument);
}

TEST(Histogram, BinsAndMerge)
{
    auto h = Histogram::make(0.5, 5);
    h.add(0.0);
    h.add(0.15);
    h.add(0.49);
    h.add(0.5);
    h.add(0.75);
    EXPECT_EQ(h.bins[0], 1u);
    EXPECT_EQ(h.bins[1], 1u);
    // The upper edge is closed: a defect of exactly 1/2 lands in the last bin.
    EXPECT_EQ(h.bins[4], 2u);
    EXPECT_EQ(h.overflow, 1u);
    EXPECT_EQ(h.zeros, 1u);
    auto other = Histogram::make(0.5, 5);
    other.add(0.15);
    h.merge(other);
    EXPECT_EQ(h.bins[1], 2u);
}
