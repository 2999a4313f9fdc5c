#include "aspec_cli/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "aspec/constructions.hpp"
#include "aspec/errors.hpp"
#include "aspec/groups.hpp"
#include "aspec/io.hpp"
#include "aspec/linalg.hpp"
#include "aspec/measure.hpp"
#include "aspec/random.hpp"

namespace aspec::cli {

namespace {

using nlohmann::json;

constexpr double kLemmaTolerance = 1e-8;
constexpr double kBoundSlack = 1e-9;
constexpr double kClosedFormTolerance = 1e-10;
constexpr double kConversionSlack = 1e-12;

std::vector<UnitPoint> random_det_one(std::int64_t p, rnd::Engine& e)
{
    std::vector<UnitPoint> w;
    UnitPoint prod;
    for (std::int64_t i = 0; i + 1 < p; ++i) {
        UnitPoint z;
        if (rnd::index(e, 2) == 0) {
            auto den = 1 + static_cast<std::int64_t>(rnd::index(e, 60));
            z = UnitPoint::root(static_cast<std::int64_t>(rnd::index(e, static_cast<std::uint64_t>(den))), den);
        } else {
            z = UnitPoint::approx(rnd::uniform(e));
        }
        prod = prod * z;
        w.push_back(z);
    }
    w.push_back(prod.inverse());
    return w;
}

json points_json(const std::vector<UnitPoint>& pts)
{
    auto arr = json::array();
    for (const auto& p : pts)
        arr.push_back(io::to_json(p));
    return arr;
}

VerifyResult lemma_spectrum(const VerifyOptions& o)
{
    VerifyResult r;
    r.name = "lemma-spectrum";
    double worst = 0.0;
    std::uint64_t checks = 0;
    for (std::uint64_t t = 0; t < o.trials && r.counterexample.is_null(); ++t) {
        auto e = rnd::chunk_engine(o.seed, t);
        auto w = random_det_one(o.p, e);
        for (std::int64_t k = 0; k < o.p; ++k) {
            auto closed = spectrum_dck(w, k, o.p);
            auto dense = eigensolve_dense(UMatrix::monomial_cycle(w, k).to_dense());
            std::vector<UnitPoint> numeric;
            for (auto z : dense.values)
                numeric.push_back(UnitPoint::from_complex(z));
            double d = multiset_distance(closed.points, numeric);
            worst = std::max(worst, d);
            ++checks;
            if (d > kLemmaTolerance) {
                r.counterexample = {{"trial", t}, {"k", k}, {"weights", points_json(w)}, {"distance", d}};
                break;
            }
        }
    }
    r.pass = r.counterexample.is_null();
    r.evidence = {{"p", o.p}, {"trials", o.trials}, {"checks", checks}, {"max_distance", worst},
                  {"tolerance", kLemmaTolerance}};
    return r;
}

VerifyResult tadpole_closure(const VerifyOptions& o)
{
    VerifyResult r;
    r.name = "tadpole-closure";
    const std::uint64_t expected = tadpole_root_group_order(o.p);
    json closure;
    if (expected <= o.max_elements) {
        auto g = close(tadpole_root_generators(o.p), {.max_elements = o.max_elements});
        closure = {{"order", g.order()}, {"expected", expected}, {"complete", g.complete()}};
        if (!g.complete() || g.order() != expected)
            r.counterexample = {{"closure", closure}};
    } else {
        closure = {{"skipped", true}, {"expected", expected}, {"max_elements", o.max_elements}};
    }

    // Closed-form product and inverse against the matrix product.
    TadpoleSampling exact{.exact_weights = true};
    std::uint64_t checked = 0;
    for (std::uint64_t t = 0; t < o.pairs && r.counterexample.is_null(); ++t) {
        auto e = rnd::chunk_engine(o.seed, t);
        auto a = sample_tadpole(o.p, e, exact);
        auto b = sample_tadpole(o.p, e, exact);
        auto law = canonical_key(tadpole(tadpole_mul(a, b)), true, 0.0);
        auto direct = canonical_key(tadpole(a) * tadpole(b), true, 0.0);
        auto inv = canonical_key(tadpole(tadpole_inverse(a)) * tadpole(a), true, 0.0);
        auto id = canonical_key(UMatrix::identity(static_cast<std::size_t>(2 * o.p)), true, 0.0);
        ++checked;
        if (law != direct || inv != id)
            r.counterexample = {{"a", io::to_json(a)}, {"b", io::to_json(b)}, {"product_law", law == direct},
                                {"inverse", inv == id}};
    }
    r.pass = r.counterexample.is_null();
    r.evidence = {{"p", o.p}, {"closure", closure}, {"product_law_pairs", checked}};
    return r;
}

VerifyResult tadpole_bound(const VerifyOptions& o)
{
    VerifyResult r;
    r.name = "tadpole-bound";
    const Rational bound(1, 2 * o.p * o.p);
    const double limit = to_double(bound) + kBoundSlack;

    MeasureOptions mo;
    mo.workers = o.workers;
    auto report = measure_asm_sampled(tadpole_pair_sampler(o.p), o.pairs, o.seed, mo);
    if (report.epsilon_star.value > limit)
        r.counterexample = {{"worst", report.worst->first}, {"second", report.worst->second},
                            {"defect", report.epsilon_star.value}};

    // Cases 1-3 are exactly submultiplicative on rational weights.
    std::uint64_t cases[5] = {0, 0, 0, 0, 0};
    TadpoleSampling exact{.exact_weights = true};
    for (std::uint64_t t = 0; t < o.pairs && r.counterexample.is_null(); ++t) {
        auto e = rnd::chunk_engine(o.seed + 1, t);
        auto a = sample_tadpole(o.p, e, exact);
        auto b = sample_tadpole(o.p, e, exact);
        int c = tadpole_case(a, b);
        ++cases[c];
        auto d = pair_defect(tadpole(a), tadpole(b));
        bool bad = d.asm_defect.value > limit || (c < 4 && !(d.exact && *d.asm_defect.exact == 0));
        if (bad)
            r.counterexample = {{"a", io::to_json(a)}, {"b", io::to_json(b)}, {"case", c},
                                {"defect", io::to_json(d.asm_defect)}};
    }
    r.pass = r.counterexample.is_null();
    r.evidence = {{"p", o.p},
                  {"pairs", o.pairs},
                  {"bound", rational_string(bound)},
                  {"max_defect", io::to_json(report.epsilon_star)},
                  {"exact_cases", {{"1", cases[1]}, {"2", cases[2]}, {"3", cases[3]}, {"4", cases[4]}}}};
    return r;
}

VerifyResult mm_gap(const VerifyOptions& o)
{
    VerifyResult r;
    r.name = "mm-gap";
    auto g = mm_gap_analysis(default_miller_moreno(o.p, o.q));
    r.evidence = io::to_json(g);
    r.pass = static_cast<std::int64_t>(g.distinct_products) <= g.count_bound;
    if (!r.pass)
        r.counterexample = {{"distinct_products", g.distinct_products}, {"count_bound", g.count_bound}};
    return r;
}

VerifyResult sr_bound_check(const VerifyOptions& o)
{
    VerifyResult r;
    r.name = "sr-bound";
    SrParams params{.n = o.n, .r = o.r};
    const double bound = sr_bound(o.r);
    double worst = 0.0;
    double worst_mismatch = 0.0;
    std::uint64_t violations = 0;
    rnd::Engine e;
    for (std::uint64_t t = 0; t < o.samples && r.counterexample.is_null(); ++t) {
        if (t % kSampleChunk == 0)
            e = rnd::chunk_engine(o.seed, t / kSampleChunk);
        auto a = sr_sample(params, e);
        auto b = sr_sample(params, e);
        // Numeric eigenvalues against gamma / (alpha beta) - 1 from the closed forms.
        double ratio = sub_pair_defect(a.matrix(), b.matrix()).defect;
        double closed = std::abs(sr_product_eigenvalue(a, b) / (a.eigenvalue() * b.eigenvalue()) - 1.0);
        worst = std::max(worst, ratio);
        worst_mismatch = std::max(worst_mismatch, std::abs(ratio - closed));
        if (ratio > bound)
            ++violations;
        if (ratio > bound || std::abs(ratio - closed) > kClosedFormTolerance)
            r.counterexample = {{"sample", t}, {"ratio", ratio}, {"closed_form", closed}, {"bound", bound}};
    }
    r.pass = r.counterexample.is_null();
    r.evidence = {{"r", o.r},       {"n", o.n},         {"samples", o.samples},
                  {"bound", bound}, {"max_ratio", worst}, {"violations", violations},
                  {"max_closed_form_mismatch", worst_mismatch}};
    return r;
}

bool conversions_hold(const UnitPoint& z, const UnitPoint& w, double& chord, double& arc)
{
    chord = chord_distance(z, w);
    arc = 2.0 * std::numbers::pi * arg_distance(z, w).value;
    return chord <= arc + kConversionSlack && arc <= std::numbers::pi * chord + kConversionSlack;
}

VerifyResult conversions(const VerifyOptions& o)
{
    VerifyResult r;
    r.name = "conversions";
    std::uint64_t checked = 0;
    double chord = 0.0;
    double arc = 0.0;
    auto fail = [&](const UnitPoint& z, const UnitPoint& w) {
        r.counterexample = {{"z", io::to_json(z)}, {"w", io::to_json(w)}, {"chord", chord}, {"arc", arc}};
    };
    for (std::uint64_t t = 0; t < o.samples && r.counterexample.is_null(); ++t) {
        auto e = rnd::chunk_engine(o.seed, t);
        auto z = UnitPoint::approx(rnd::uniform(e));
        auto w = UnitPoint::approx(rnd::uniform(e));
        ++checked;
        if (!conversions_hold(z, w, chord, arc))
            fail(z, w);
    }
    for (std::int64_t i = 0; i < 60 && r.counterexample.is_null(); ++i)
        for (std::int64_t j = 0; j < 60; ++j) {
            auto z = UnitPoint::root(i, 60);
            auto w = UnitPoint::root(j, 60);
            ++checked;
            if (!conversions_hold(z, w, chord, arc)) {
                fail(z, w);
                break;
            }
        }
    r.pass = r.counterexample.is_null();
    r.evidence = {{"random_pairs", o.samples}, {"root_pairs", 3600}, {"checked", checked}};
    return r;
}

} // namespace

VerifyResult run_verify(const std::string& name, const VerifyOptions& options)
{
    if (name == "lemma-spectrum")
        return lemma_spectrum(options);
    if (name == "tadpole-closure")
        return tadpole_closure(options);
    if (name == "tadpole-bound")
        return tadpole_bound(options);
    if (name == "mm-gap")
        return mm_gap(options);
    if (name == "sr-bound")
        return sr_bound_check(options);
    if (name == "conversions")
        return conversions(options);
    throw std::invalid_argument("unknown check \"" + name + "\"");
}

} // namespace aspec::cli
