#include "aspec/measure.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "aspec/errors.hpp"

namespace aspec {

namespace {

// Candidates whose double distance is within this of the double minimum are
// re-evaluated exactly; double angles carry ~1e-16 rounding.
constexpr double kExactSlack = 1e-12;

double circ(double x, double y)
{
    double d = x - y;
    d -= std::nearbyint(d);
    return std::abs(d);
}

struct GammaResult {
    Magnitude distance;
    std::size_t product = 0;
};

GammaResult nearest_product(const UnitPoint& gamma, double gamma_turns, const std::vector<UnitPoint>& products,
                            const std::vector<double>& product_turns, bool exact)
{
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < products.size(); ++k) {
        double d = circ(gamma_turns, product_turns[k]);
        if (d < best) {
            best = d;
            best_k = k;
        }
    }
    if (!exact)
        return {arg_distance(gamma, products[best_k]), best_k};

    GammaResult r{arg_distance(gamma, products[best_k]), best_k};
    for (std::size_t k = 0; k < products.size(); ++k) {
        if (k == best_k || circ(gamma_turns, product_turns[k]) > best + kExactSlack)
            continue;
        auto d = arg_distance(gamma, products[k]);
        if (compare(d, r.distance) < 0 || (compare(d, r.distance) == 0 && k < r.product))
            r = {d, k};
    }
    return r;
}

struct ProductSet {
    std::vector<UnitPoint> points;
    std::vector<double> turns;
    std::vector<std::pair<std::size_t, std::size_t>> factors;
};

ProductSet product_set(const std::vector<UnitPoint>& a, const std::vector<UnitPoint>& b)
{
    ProductSet ps;
    ps.points.reserve(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            ps.points.push_back(a[i] * b[j]);
            ps.turns.push_back(ps.points.back().turns());
            ps.factors.emplace_back(i, j);
        }
    }
    return ps;
}

Witness make_witness(const Spectrum& a, const Spectrum& b, const PairDefect& d, nlohmann::json first,
                     nlohmann::json second)
{
    Witness w;
    w.first = std::move(first);
    w.second = std::move(second);
    w.defect = d.asm_defect;
    w.sub_defect = d.sub_defect;
    w.gamma = d.gamma;
    w.alpha = d.alpha;
    w.beta = d.beta;
    auto sa = distinct_points(a.points);
    auto sb = distinct_points(b.points);
    std::vector<UnitPoint> prod;
    for (const auto& x : sa)
        for (const auto& y : sb)
            prod.push_back(x * y);
    w.sets = {{"sigma_A", sa}, {"sigma_B", sb}, {"sigma_A_sigma_B", distinct_points(std::move(prod))}};
    return w;
}

std::vector<UnitPoint> angles_of(std::span<const std::complex<double>> zs)
{
    std::vector<UnitPoint> out;
    for (auto z : zs)
        if (z != std::complex<double>(0.0, 0.0))
            out.push_back(UnitPoint::from_complex(z));
    return out;
}

Witness make_sub_witness(const SubSample& s, const SubPairDefect& d)
{
    Witness w;
    w.first = s.first;
    w.second = s.second;
    w.defect = Magnitude::approx(d.defect);
    w.sub_defect = d.defect;
    w.values = {d.gamma, d.alpha, d.beta};
    if (d.gamma != std::complex<double>(0.0, 0.0))
        w.gamma = UnitPoint::from_complex(d.gamma);
    if (d.alpha != std::complex<double>(0.0, 0.0))
        w.alpha = UnitPoint::from_complex(d.alpha);
    if (d.beta != std::complex<double>(0.0, 0.0))
        w.beta = UnitPoint::from_complex(d.beta);
    auto sa = angles_of(s.sigma_a);
    auto sb = angles_of(s.sigma_b);
    std::vector<UnitPoint> prod;
    for (auto x : s.sigma_a)
        for (auto y : s.sigma_b)
            if (x * y != std::complex<double>(0.0, 0.0))
                prod.push_back(UnitPoint::from_complex(x * y));
    sort_by_angle(sa);
    sort_by_angle(sb);
    sort_by_angle(prod);
    w.sets = {{"sigma_A", sa}, {"sigma_B", sb}, {"sigma_A_sigma_B", prod}};
    return w;
}

// Per-worker state of a pair fold.
template <class Payload>
struct Accumulator {
    bool has = false;
    Magnitude best;
    std::uint64_t best_index = 0;
    Payload payload{};
    Histogram histogram;
    bool all_exact = true;
    std::vector<PairRow> rows;

    void offer(const Magnitude& m, std::uint64_t index, const auto& make_payload)
    {
        int c = has ? compare(m, best) : 1;
        if (c > 0 || (c == 0 && index < best_index)) {
            has = true;
            best = m;
            best_index = index;
            payload = make_payload();
        }
    }

    void merge(Accumulator&& other)
    {
        if (other.has) {
            int c = has ? compare(other.best, best) : 1;
            if (c > 0 || (c == 0 && other.best_index < best_index)) {
                has = true;
                best = std::move(other.best);
                best_index = other.best_index;
                payload = std::move(other.payload);
            }
        }
        histogram.merge(other.histogram);
        all_exact = all_exact && other.all_exact;
        rows.insert(rows.end(), std::make_move_iterator(other.rows.begin()),
                    std::make_move_iterator(other.rows.end()));
    }
};

unsigned effective_workers(unsigned requested)
{
    if (requested == 0)
        requested = std::max(1U, std::thread::hardware_concurrency());
    return requested;
}

// Runs body(worker, accumulator) on `workers` threads and merges in worker order.
template <class Acc, class Body>
Acc run_workers(unsigned workers, const Acc& prototype, Body body)
{
    std::vector<Acc> locals(workers, prototype);
    if (workers == 1) {
        body(0U, locals[0]);
    } else {
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> threads;
        for (unsigned w = 0; w < workers; ++w) {
            threads.emplace_back([&, w] {
                try {
                    body(w, locals[w]);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : threads)
            t.join();
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }
    Acc out = prototype;
    for (auto& l : locals)
        out.merge(std::move(l));
    std::sort(out.rows.begin(), out.rows.end(),
              [](const PairRow& x, const PairRow& y) { return x.index < y.index; });
    return out;
}

PairRow make_row(std::uint64_t index, std::uint64_t first, std::uint64_t second, const Magnitude& m)
{
    return PairRow{index, first, second, m.value, m.exact ? rational_string(*m.exact) : std::string{}};
}

} // namespace

// --- single pairs ----------------------------------------------------------------

PairDefect pair_defect(const Spectrum& a, const Spectrum& b, const Spectrum& ab)
{
    if (a.points.empty() || b.points.empty() || ab.points.empty())
        throw InvalidParams("pair_defect needs nonempty spectra");
    auto sa = distinct_points(a.points);
    auto sb = distinct_points(b.points);
    auto sg = distinct_points(ab.points);
    bool exact = a.exact && b.exact && ab.exact;

    auto ps = product_set(sa, sb);

    PairDefect out;
    out.exact = exact;
    bool first = true;
    std::size_t best_gamma = 0;
    std::size_t best_product = 0;
    for (std::size_t g = 0; g < sg.size(); ++g) {
        auto r = nearest_product(sg[g], sg[g].turns(), ps.points, ps.turns, exact);
        if (first || compare(r.distance, out.asm_defect) > 0) {
            first = false;
            out.asm_defect = r.distance;
            best_gamma = g;
            best_product = r.product;
        }
    }
    out.gamma = sg[best_gamma];
    out.alpha = sa[ps.factors[best_product].first];
    out.beta = sb[ps.factors[best_product].second];
    out.sub_defect = 2.0 * std::sin(std::numbers::pi * out.asm_defect.value);
    return out;
}

PairDefect pair_defect(const UMatrix& a, const UMatrix& b)
{
    return pair_defect(spectrum(a), spectrum(b), spectrum(a * b));
}

SubPairDefect sub_pair_defect(std::span<const std::complex<double>> sigma_a,
                              std::span<const std::complex<double>> sigma_b,
                              std::span<const std::complex<double>> sigma_ab, double rho_a, double rho_b,
                              double zero_tolerance)
{
    double scale = rho_a * rho_b;
    if (!(scale > 0.0))
        throw ZeroSpectralRadius("chord defect needs rho(A) rho(B) > 0");

    SubPairDefect out;
    std::vector<std::pair<std::complex<double>, std::complex<double>>> factors;
    for (auto x : sigma_a)
        for (auto y : sigma_b)
            if (std::abs(x) > zero_tolerance * rho_a && std::abs(y) > zero_tolerance * rho_b)
                factors.emplace_back(x, y);

    bool first = true;
    for (auto g : sigma_ab) {
        if (std::abs(g) <= zero_tolerance * scale)
            continue;
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_k = 0;
        for (std::size_t k = 0; k < factors.size(); ++k) {
            double d = std::abs(g - factors[k].first * factors[k].second);
            if (d < best) {
                best = d;
                best_k = k;
            }
        }
        if (factors.empty())
            throw ZeroSpectralRadius("no nonzero eigenvalue products to match");
        double defect = best / scale;
        if (first || defect > out.defect) {
            first = false;
            out.defect = defect;
            out.gamma = g;
            out.alpha = factors[best_k].first;
            out.beta = factors[best_k].second;
        }
    }
    return out;
}

SubPairDefect sub_pair_defect(const GeneralMatrix& a, const GeneralMatrix& b)
{
    auto ea = eigensolve_dense(a.entries);
    auto eb = eigensolve_dense(b.entries);
    auto eab = eigensolve_dense(a.entries * b.entries);
    auto rho = [](const EigenResult& e) {
        double r = 0.0;
        for (auto z : e.values)
            r = std::max(r, std::abs(z));
        return r;
    };
    return sub_pair_defect(ea.values, eb.values, eab.values, rho(ea), rho(eb));
}

// --- histogram -------------------------------------------------------------------

Histogram Histogram::make(double upper, std::size_t bin_count)
{
    Histogram h;
    h.upper = upper;
    h.bins.assign(std::max<std::size_t>(bin_count, 1), 0);
    return h;
}

void Histogram::add(double v)
{
    if (v == 0.0)
        ++zeros;
    if (v > upper) {
        ++overflow;
        return;
    }
    auto b = static_cast<std::size_t>(v / upper * static_cast<double>(bins.size()));
    ++bins[std::min(b, bins.size() - 1)];
}

void Histogram::merge(const Histogram& other)
{
    if (bins.size() != other.bins.size())
        throw std::invalid_argument("histogram bin counts differ");
    for (std::size_t i = 0; i < bins.size(); ++i)
        bins[i] += other.bins[i];
    overflow += other.overflow;
    zeros += other.zeros;
}

bool AsmReport::operator==(const AsmReport& o) const
{
    return subject == o.subject && metric == o.metric && mode == o.mode && pair_count == o.pair_count &&
           seed == o.seed && group_order == o.group_order && complete == o.complete && exact == o.exact &&
           lower_bound == o.lower_bound && epsilon_star == o.epsilon_star && worst == o.worst &&
           histogram == o.histogram && notes == o.notes;
}

// --- exhaustive ------------------------------------------------------------------

AsmReport measure_asm(const GroupClosure& g, const MeasureOptions& options)
{
    if (!g.complete() && !options.allow_incomplete)
        throw IncompleteClosure("exhaustive measurement needs a complete closure");

    const auto& els = g.elements();
    const std::uint64_t n = els.size();
    std::vector<Spectrum> spectra;
    spectra.reserve(els.size());
    for (const auto& e : els)
        spectra.push_back(spectrum(e));

    struct Best {
        std::uint64_t i = 0;
        std::uint64_t j = 0;
        PairDefect defect;
    };
    using Acc = Accumulator<Best>;
    Acc prototype;
    prototype.histogram = Histogram::make(0.5, options.histogram_bins);

    unsigned workers = effective_workers(options.workers);
    const std::uint64_t total = n * n;
    const auto* table = g.complete() && g.cayley() ? &*g.cayley() : nullptr;

    auto acc = run_workers(workers, prototype, [&](unsigned w, Acc& local) {
        std::uint64_t begin = total * w / workers;
        std::uint64_t end = total * (w + 1) / workers;
        for (std::uint64_t t = begin; t < end; ++t) {
            std::uint64_t i = t / n;
            std::uint64_t j = t % n;
            PairDefect d = table ? pair_defect(spectra[i], spectra[j], spectra[(*table)[t]])
                                 : pair_defect(spectra[i], spectra[j], spectrum(els[i] * els[j]));
            local.histogram.add(d.asm_defect.value);
            local.all_exact = local.all_exact && d.exact;
            if (options.record_pairs)
                local.rows.push_back(make_row(t, i, j, d.asm_defect));
            local.offer(d.asm_defect, t, [&] { return Best{i, j, d}; });
        }
    });

    AsmReport r;
    r.metric = Metric::Asm;
    r.mode = Mode::Exhaustive;
    r.pair_count = total;
    r.group_order = n;
    r.complete = g.complete();
    r.lower_bound = !g.complete();
    r.exact = acc.all_exact;
    r.epsilon_star = acc.best;
    r.histogram = std::move(acc.histogram);
    r.pairs = std::move(acc.rows);
    if (acc.has) {
        const auto& b = acc.payload;
        r.worst = make_witness(spectra[b.i], spectra[b.j], b.defect, {{"index", b.i}}, {{"index", b.j}});
    }
    if (!g.complete())
        r.notes.push_back("closure incomplete: epsilon_star is a lower bound");
    return r;
}

// --- sampled ---------------------------------------------------------------------

AsmReport measure_asm_sampled(const PairSampler& sampler, std::uint64_t pair_count, std::uint64_t seed,
                              const MeasureOptions& options)
{
    if (pair_count == 0)
        throw std::invalid_argument("pair_count must be at least 1");

    struct Best {
        SampledPair pair{UMatrix::identity(1), UMatrix::identity(1), {}, {}};
        PairDefect defect;
    };
    using Acc = Accumulator<Best>;
    Acc prototype;
    prototype.histogram = Histogram::make(0.5, options.histogram_bins);

    unsigned workers = effective_workers(options.workers);
    const std::uint64_t chunks = (pair_count + kSampleChunk - 1) / kSampleChunk;

    auto acc = run_workers(workers, prototype, [&](unsigned w, Acc& local) {
        for (std::uint64_t c = w; c < chunks; c += workers) {
            auto engine = rnd::chunk_engine(seed, c);
            std::uint64_t end = std::min(pair_count, (c + 1) * kSampleChunk);
            for (std::uint64_t t = c * kSampleChunk; t < end; ++t) {
                SampledPair sp = sampler(engine, t);
                PairDefect d = pair_defect(sp.a, sp.b);
                local.histogram.add(d.asm_defect.value);
                local.all_exact = local.all_exact && d.exact;
                if (options.record_pairs)
                    local.rows.push_back(make_row(t, t, t, d.asm_defect));
                local.offer(d.asm_defect, t, [&] { return Best{sp, d}; });
            }
        }
    });

    AsmReport r;
    r.metric = Metric::Asm;
    r.mode = Mode::Sampled;
    r.pair_count = pair_count;
    r.seed = seed;
    r.complete = false;
    r.lower_bound = true;
    r.exact = acc.all_exact;
    r.epsilon_star = acc.best;
    r.histogram = std::move(acc.histogram);
    r.pairs = std::move(acc.rows);
    const auto& b = acc.payload;
    r.worst = make_witness(spectrum(b.pair.a), spectrum(b.pair.b), b.defect, b.pair.first, b.pair.second);
    r.notes.push_back("sampled: epsilon_star is a lower bound on the supremum over the group");
    return r;
}

// --- chord metric ----------------------------------------------------------------

namespace {

const char* kNonzeroNote = "chord metric uses nonzero eigenvalues only (gamma, alpha, beta != 0)";

double sub_histogram_upper() { return 2.0; }

} // namespace

AsmReport measure_sub(std::span<const GeneralMatrix> elements, const MeasureOptions& options)
{
    if (elements.empty())
        throw std::invalid_argument("measure_sub needs at least one element");
    const std::uint64_t n = elements.size();
    std::vector<EigenResult> eig;
    std::vector<double> rho;
    for (const auto& e : elements) {
        eig.push_back(eigensolve_dense(e.entries));
        double r = 0.0;
        for (auto z : eig.back().values)
            r = std::max(r, std::abs(z));
        if (!(r > 0.0))
            throw ZeroSpectralRadius("element with zero spectral radius");
        rho.push_back(r);
    }

    struct Best {
        SubSample sample;
        SubPairDefect defect;
    };
    using Acc = Accumulator<Best>;
    Acc prototype;
    prototype.histogram = Histogram::make(sub_histogram_upper(), options.histogram_bins);
    prototype.all_exact = false;

    unsigned workers = effective_workers(options.workers);
    const std::uint64_t total = n * n;
    auto acc = run_workers(workers, prototype, [&](unsigned w, Acc& local) {
        std::uint64_t begin = total * w / workers;
        std::uint64_t end = total * (w + 1) / workers;
        for (std::uint64_t t = begin; t < end; ++t) {
            std::uint64_t i = t / n;
            std::uint64_t j = t % n;
            auto eab = eigensolve_dense(elements[i].entries * elements[j].entries);
            auto d = sub_pair_defect(eig[i].values, eig[j].values, eab.values, rho[i], rho[j]);
            local.histogram.add(d.defect);
            auto m = Magnitude::approx(d.defect);
            if (options.record_pairs)
                local.rows.push_back(make_row(t, i, j, m));
            local.offer(m, t, [&] {
                return Best{SubSample{eig[i].values, eig[j].values, eab.values, rho[i], rho[j], {{"index", i}},
                                      {{"index", j}}},
                            d};
            });
        }
    });

    AsmReport r;
    r.metric = Metric::Sub;
    r.mode = Mode::Exhaustive;
    r.pair_count = total;
    r.group_order = n;
    r.exact = false;
    r.epsilon_star = acc.best;
    r.histogram = std::move(acc.histogram);
    r.pairs = std::move(acc.rows);
    r.worst = make_sub_witness(acc.payload.sample, acc.payload.defect);
    r.notes.emplace_back(kNonzeroNote);
    return r;
}

AsmReport measure_sub_sampled(const SubSampler& sampler, std::uint64_t pair_count, std::uint64_t seed,
                              const MeasureOptions& options)
{
    if (pair_count == 0)
        throw std::invalid_argument("pair_count must be at least 1");

    struct Best {
        SubSample sample;
        SubPairDefect defect;
    };
    using Acc = Accumulator<Best>;
    Acc prototype;
    prototype.histogram = Histogram::make(sub_histogram_upper(), options.histogram_bins);
    prototype.all_exact = false;

    unsigned workers = effective_workers(options.workers);
    const std::uint64_t chunks = (pair_count + kSampleChunk - 1) / kSampleChunk;
    auto acc = run_workers(workers, prototype, [&](unsigned w, Acc& local) {
        for (std::uint64_t c = w; c < chunks; c += workers) {
            auto engine = rnd::chunk_engine(seed, c);
            std::uint64_t end = std::min(pair_count, (c + 1) * kSampleChunk);
            for (std::uint64_t t = c * kSampleChunk; t < end; ++t) {
                SubSample s = sampler(engine, t);
                auto d = sub_pair_defect(s.sigma_a, s.sigma_b, s.sigma_ab, s.rho_a, s.rho_b);
                local.histogram.add(d.defect);
                auto m = Magnitude::approx(d.defect);
                if (options.record_pairs)
                    local.rows.push_back(make_row(t, t, t, m));
                local.offer(m, t, [&] { return Best{s, d}; });
            }
        }
    });

    AsmReport r;
    r.metric = Metric::Sub;
    r.mode = Mode::Sampled;
    r.pair_count = pair_count;
    r.seed = seed;
    r.complete = false;
    r.lower_bound = true;
    r.exact = false;
    r.epsilon_star = acc.best;
    r.histogram = std::move(acc.histogram);
    r.pairs = std::move(acc.rows);
    r.worst = make_sub_witness(acc.payload.sample, acc.payload.defect);
    r.notes.emplace_back(kNonzeroNote);
    r.notes.emplace_back("sampled: epsilon_star is a lower bound on the supremum over the semigroup");
    return r;
}

ConversionBounds conversion_check(double e)
{
    if (!(e >= 0.0))
        throw std::invalid_argument("epsilon must be nonnegative");
    return {2.0 * std::numbers::pi * e, 0.5 * e};
}

} // namespace aspec
