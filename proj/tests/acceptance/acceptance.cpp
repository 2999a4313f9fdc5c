// Acceptance run: one PASS/FAIL line per criterion.
//
//   aspec_acceptance [--expect-fail 5,7] [--only 3]
//
// Exit status is 0 when the set of failing criteria equals the expected set.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "aspec/constructions.hpp"
#include "aspec/groups.hpp"
#include "aspec/io.hpp"
#include "aspec/measure.hpp"
#include "aspec_cli/cli.hpp"
#include "oracles.hpp"

using namespace aspec;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            if (!detail.empty())
                detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& what)
    {
        if (!detail.empty())
            detail += "; ";
        detail += what;
    }
};

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

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

std::vector<UMatrix> q8()
{
    return {UMatrix::diagonal({UnitPoint::root(1, 4), UnitPoint::root(3, 4)}),
            UMatrix::monomial_cycle({UnitPoint::root(0, 1), UnitPoint::root(1, 2)}, 1)};
}

// 1: sigma(D C^k) against independent eigenvalues.
Outcome spectrum_lemma()
{
    Outcome o;
    auto t0 = Clock::now();
    rnd::Engine engine(101);
    double worst = 0.0;
    for (std::int64_t p : {3, 5, 7, 11}) {
        for (int t = 0; t < 100; ++t) {
            std::vector<UnitPoint> w;
            UnitPoint prod;
            for (std::int64_t i = 0; i + 1 < p; ++i) {
                // Alternate exact and approximate weights.
                if (t % 2 == 0)
                    w.push_back(UnitPoint::root(static_cast<std::int64_t>(rnd::index(engine, 60)), 60));
                else
                    w.push_back(UnitPoint::approx(rnd::uniform(engine)));
                prod = prod * w.back();
            }
            w.push_back(prod.inverse());
            for (std::int64_t k = 0; k < p; ++k) {
                auto s = spectrum_dck(w, k, p);
                auto ref = oracle::eigenvalues(UMatrix::monomial_cycle(w, k).to_dense());
                worst = std::max(worst, oracle::multiset_arc_distance(turns_of(s.points), turns_of(ref)));
            }
        }
    }
    double secs = seconds_since(t0);
    o.require(worst <= 1e-8, "max distance " + fmt(worst));
    o.require(secs < 10.0, "took " + fmt(secs) + " s");
    o.note("max distance " + fmt(worst) + ", " + fmt(secs) + " s");
    return o;
}

// 2: sampled tadpole pairs stay within 1/(2p^2); exact cases 1-3 are zero.
Outcome tadpole_bound()
{
    Outcome o;
    auto t0 = Clock::now();
    for (std::int64_t p : {3, 5}) {
        double bound = 1.0 / (2.0 * static_cast<double>(p * p));
        auto r = measure_asm_sampled(tadpole_pair_sampler(p), 10000, 2024, {.workers = 0});
        o.require(r.epsilon_star.value <= bound + 1e-9, "p=" + std::to_string(p) + " max " + fmt(r.epsilon_star.value));
        o.note("p=" + std::to_string(p) + " max " + fmt(r.epsilon_star.value) + " <= " + fmt(bound));

        rnd::Engine engine(static_cast<std::uint64_t>(p));
        int nonzero = 0;
        for (int t = 0; t < 2000; ++t) {
            auto a = sample_tadpole(p, engine, {.exact_weights = true});
            auto b = sample_tadpole(p, engine, {.exact_weights = true});
            if (tadpole_case(a, b) == 4)
                continue;
            auto d = pair_defect(tadpole(a), tadpole(b));
            if (!d.exact || *d.asm_defect.exact != 0)
                ++nonzero;
        }
        o.require(nonzero == 0, std::to_string(nonzero) + " nonzero case 1-3 defects at p=" + std::to_string(p));
    }
    double secs = seconds_since(t0);
    o.require(secs < 60.0, "took " + fmt(secs) + " s");
    return o;
}

// 3: the case-4 construction reaches the bound.
Outcome tadpole_witness()
{
    Outcome o;
    for (std::int64_t p : {3, 5, 7}) {
        auto [a, b] = tadpole_case4_witness(p);
        auto d = pair_defect(tadpole(a), tadpole(b));
        double target = 1.0 / (2.0 * static_cast<double>(p * p));
        double ref = oracle::pair_defect(tadpole(a).to_dense(), tadpole(b).to_dense());
        o.require(d.asm_defect.value >= 0.9 * target, "p=" + std::to_string(p) + " defect " + fmt(d.asm_defect.value));
        o.require(std::abs(ref - d.asm_defect.value) < 1e-6, "oracle disagrees at p=" + std::to_string(p));
        o.note("p=" + std::to_string(p) + " " + (d.exact ? rational_string(*d.asm_defect.exact) : fmt(d.asm_defect.value)));
    }
    return o;
}

// 4: Q8 has epsilon* = 1/4.
Outcome q8_value()
{
    Outcome o;
    auto g = close(q8());
    auto r = measure_asm(g);
    o.require(r.epsilon_star.exact && *r.epsilon_star.exact == Rational(1, 4), "epsilon* " + fmt(r.epsilon_star.value));
    std::vector<oracle::Matrix> dense;
    for (const auto& e : oracle::closure({q8()[0].to_dense(), q8()[1].to_dense()}))
        dense.push_back(e);
    double ref = oracle::epsilon_star(dense);
    o.require(dense.size() == 8 && std::abs(ref - 0.25) < 1e-9, "brute force " + fmt(ref));
    o.note("order " + std::to_string(g.order()) + ", epsilon* " + rational_string(*r.epsilon_star.exact));
    return o;
}

// 5: Miller-Moreno groups at q = 151 and q = 7.
Outcome miller_moreno_values()
{
    Outcome o;
    auto t0 = Clock::now();
    {
        auto [x, y] = miller_moreno(default_miller_moreno(3, 151));
        auto g = close({x, y}, {.build_cayley = true});
        auto r = measure_asm(g, {.workers = 0});
        o.require(g.order() == 453, "q=151 order " + std::to_string(g.order()));
        o.require(r.epsilon_star.value > 1.0 / 18.0 + 1e-12, "q=151 epsilon* " + fmt(r.epsilon_star.value));
        o.note("q=151 order " + std::to_string(g.order()) + " epsilon* " +
               (r.epsilon_star.exact ? rational_string(*r.epsilon_star.exact) : fmt(r.epsilon_star.value)));
    }
    {
        auto [x, y] = miller_moreno(default_miller_moreno(3, 7));
        auto g = close({x, y});
        auto r = measure_asm(g);
        double e = r.epsilon_star.value;
        bool in_range = e > 0.0 && e <= 1.0 / 14.0 + 1e-12;
        o.require(in_range, "q=7 epsilon* " + (r.epsilon_star.exact ? rational_string(*r.epsilon_star.exact) : fmt(e)) +
                                " is outside (0, 1/14]");
        // Regression value for the defined construction.
        o.require(r.epsilon_star.exact && *r.epsilon_star.exact == Rational(1, 7), "q=7 regression value changed");
    }
    double secs = seconds_since(t0);
    o.require(secs < 120.0, "took " + fmt(secs) + " s");
    return o;
}

// 6: product-set counting bound.
Outcome gap_counting()
{
    Outcome o;
    for (auto [p, q] : std::vector<std::pair<std::int64_t, std::int64_t>>{{3, 7}, {3, 13}, {3, 151}, {5, 11}}) {
        auto g = mm_gap_analysis(default_miller_moreno(p, q));
        std::string tag = "(" + std::to_string(p) + "," + std::to_string(q) + ")";
        o.require(static_cast<std::int64_t>(g.distinct_products) <= g.count_bound,
                  tag + " " + std::to_string(g.distinct_products) + " > " + std::to_string(g.count_bound));
        o.note(tag + " " + std::to_string(g.distinct_products) + "<=" + std::to_string(g.count_bound));
    }
    return o;
}

// 7: S_r ratio bound with closed-form eigenvalues checked numerically.
Outcome sr_bound_check()
{
    Outcome o;
    for (double r : {0.3, 0.5, 0.9}) {
        SrParams params{.n = 3, .r = r, .lambda = std::nullopt};
        double worst = 0.0;
        double mismatch = 0.0;
        for (std::uint64_t t = 0; t < 100000; ++t) {
            rnd::Engine engine = rnd::chunk_engine(7, t);
            auto a = sr_sample(params, engine);
            auto b = sr_sample(params, engine);
            auto gamma = sr_product_eigenvalue(a, b);
            double ratio = std::abs(gamma - a.eigenvalue() * b.eigenvalue()) / std::abs(a.eigenvalue() * b.eigenvalue());
            worst = std::max(worst, ratio);
            if (t % 100 == 0) {
                auto ev = eigensolve_dense((a.matrix().entries * b.matrix().entries).eval());
                double best = 1e300;
                for (auto z : ev.values)
                    best = std::min(best, std::abs(z - gamma));
                mismatch = std::max(mismatch, best / std::max(1.0, std::abs(gamma)));
            }
        }
        o.require(worst <= sr_bound(r), "r=" + fmt(r) + " ratio " + fmt(worst));
        o.require(mismatch <= 1e-10, "r=" + fmt(r) + " closed form off by " + fmt(mismatch));
        o.note("r=" + fmt(r) + " " + fmt(worst) + "<=" + fmt(sr_bound(r)));
    }
    return o;
}

// 8: arc and chord conversions.
Outcome conversions()
{
    Outcome o;
    rnd::Engine engine(8);
    int bad = 0;
    for (int t = 0; t < 100000; ++t) {
        auto z = UnitPoint::approx(rnd::uniform(engine));
        auto w = UnitPoint::approx(rnd::uniform(engine));
        double arc = 2.0 * std::numbers::pi * arg_distance(z, w).value;
        double chord = chord_distance(z, w);
        if (chord > arc + 1e-12 || arc > std::numbers::pi * chord + 1e-12)
            ++bad;
    }
    for (std::int64_t j = 0; j < 60; ++j)
        for (std::int64_t k = 0; k < 60; ++k) {
            auto z = UnitPoint::root(j, 60);
            auto w = UnitPoint::root(k, 60);
            double arc = 2.0 * std::numbers::pi * arg_distance(z, w).value;
            double chord = chord_distance(z, w);
            if (chord > arc + 1e-12 || arc > std::numbers::pi * chord + 1e-12)
                ++bad;
        }
    auto c = conversion_check(0.1);
    o.require(std::abs(c.sub_bound - 0.2 * std::numbers::pi) < 1e-15 && std::abs(c.asm_bound - 0.05) < 1e-15,
              "conversion_check constants");
    o.require(bad == 0, std::to_string(bad) + " violations");
    o.note("103600 pairs");
    return o;
}

// 9: Q(p) membership against a plain scan.
Outcome qset_check()
{
    Outcome o;
    int cases = 0;
    for (std::int64_t p : {3, 5}) {
        for (std::int64_t d : {7, 13, 40, 100, 301}) {
            Rational delta(1, d);
            if (delta >= Rational(1, 2 * p))
                continue;
            QSetParams params;
            params.p = p;
            params.epsilon_p = Rational(1, 2 * p) - delta;
            auto r = q_set(params);
            std::vector<std::int64_t> expect;
            for (std::int64_t q = 2; q <= 2 * d + 10; ++q)
                if (oracle::is_prime(q) && oracle::q_member(p, params.epsilon_p, q))
                    expect.push_back(q);
            ++cases;
            o.require(r.members == expect, "p=" + std::to_string(p) + " delta=1/" + std::to_string(d));
        }
    }
    o.note(std::to_string(cases) + " parameter sets");
    return o;
}

// 10: seeded CLI output is reproducible and round-trips through JSON.
Outcome determinism()
{
    Outcome o;
    auto run = [](std::vector<std::string> args) {
        std::ostringstream out;
        std::ostringstream err;
        int code = cli::run_cli(args, out, err);
        return std::make_pair(code, out.str());
    };
    std::vector<std::string> args{"measure", "--builtin", "tadpole", "--p", "3", "--pairs", "5000", "--seed", "99",
                                  "--deterministic"};
    auto a = run(args);
    auto with1 = args;
    with1.insert(with1.end(), {"--workers", "1"});
    auto with4 = args;
    with4.insert(with4.end(), {"--workers", "4"});
    auto b = run(with1);
    auto c = run(with4);
    o.require(a.first == 0 && b.first == 0 && c.first == 0, "nonzero exit");
    o.require(a.second == b.second && a.second == c.second, "outputs differ");
    try {
        auto report = io::report_from_json(json::parse(a.second));
        o.require(io::to_json(report).dump(2) + "\n" == a.second, "JSON round-trip changed the report");
    } catch (const std::exception& e) {
        o.require(false, std::string("parse: ") + e.what());
    }
    o.note(std::to_string(a.second.size()) + " bytes identical across runs");
    return o;
}

std::set<int> parse_list(const std::string& s)
{
    std::set<int> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty())
            out.insert(std::stoi(item));
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    std::set<int> expect_fail;
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--expect-fail" && i + 1 < argc)
            expect_fail = parse_list(argv[++i]);
        else if (arg == "--only" && i + 1 < argc)
            only = parse_list(argv[++i]);
        else {
            std::cerr << "usage: aspec_acceptance [--expect-fail N,...] [--only N,...]\n";
            return 1;
        }
    }

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"spectrum of D C^k", spectrum_lemma},
        {"tadpole sampled bound", tadpole_bound},
        {"tadpole case-4 witness", tadpole_witness},
        {"Q8 epsilon*", q8_value},
        {"Miller-Moreno values", miller_moreno_values},
        {"product-set counting bound", gap_counting},
        {"S_r ratio bound", sr_bound_check},
        {"arc/chord conversions", conversions},
        {"Q(p) membership", qset_check},
        {"deterministic CLI output", determinism},
    };

    std::set<int> failed;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        int n = static_cast<int>(i + 1);
        if (!only.empty() && !only.contains(n))
            continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        if (!o.pass)
            failed.insert(n);
        std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << " (" << criteria[i].first << ") "
                  << o.detail << (!o.pass && expect_fail.contains(n) ? " [expected]" : "") << std::endl;
    }

    std::set<int> expected = expect_fail;
    if (!only.empty())
        std::erase_if(expected, [&](int n) { return !only.contains(n); });
    if (failed != expected) {
        std::cout << "acceptance: failing set differs from expected\n";
        return 1;
    }
    std::cout << "acceptance: " << failed.size() << " expected failure(s), all other criteria pass\n";
    return 0;
}
