#include "aspec_cli/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "aspec/constructions.hpp"
#include "aspec/errors.hpp"
#include "aspec/groups.hpp"
#include "aspec/io.hpp"
#include "aspec/measure.hpp"
#include "aspec_cli/verify.hpp"

namespace aspec::cli {

namespace {

using nlohmann::json;

// Anything past this cutoff gets a warning and needs an explicit --q-max.
constexpr std::int64_t kLargeCutoff = 1'000'000;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string format = "json";
    std::string output;
    bool deterministic = false;
};

/// "k", "k/N" or a plain decimal such as "0.0555556", parsed exactly.
Rational parse_exact_number(const std::string& text)
{
    if (text.find_first_of(".eE") == std::string::npos)
        return parse_rational(text);
    std::size_t used = 0;
    std::stod(text, &used); // validates the syntax
    if (used != text.size() || text.find_first_of("eE") != std::string::npos)
        throw std::invalid_argument("expected k/N or a plain decimal, got \"" + text + "\"");
    auto dot = text.find('.');
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    std::string scale = "1" + std::string(text.size() - dot - 1, '0');
    return parse_rational(digits + "/" + scale);
}

unsigned default_workers()
{
    if (const char* env = std::getenv("ASPEC_WORKERS")) {
        try {
            return static_cast<unsigned>(std::stoul(env));
        } catch (const std::exception&) {
            throw UsageError(std::string("ASPEC_WORKERS must be a non-negative integer, got \"") + env + "\"");
        }
    }
    return 0;
}

void emit(const Common& c, const std::string& text, std::ostream& out)
{
    if (c.output.empty()) {
        out << text;
        return;
    }
    std::ofstream f(c.output, std::ios::binary);
    if (!f)
        throw UsageError("cannot write " + c.output);
    f << text;
}

json read_json_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw UsageError("cannot read " + path);
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw FormatError(path + ": " + e.what());
    }
}

std::string magnitude_text(const Magnitude& m)
{
    if (m.exact)
        return rational_string(*m.exact) + " (" + io::format_decimal(m.value) + ")";
    return io::format_decimal(m.value) + " +/- " + io::format_decimal(m.uncertainty);
}

std::string human_report(const AsmReport& r)
{
    std::ostringstream s;
    s << "subject:      " << r.subject << '\n'
      << "metric:       " << (r.metric == Metric::Asm ? "argument" : "chord") << '\n'
      << "mode:         " << (r.mode == Mode::Exhaustive ? "exhaustive" : "sampled") << '\n'
      << "pairs:        " << r.pair_count << '\n';
    if (r.group_order)
        s << "group order:  " << r.group_order << (r.complete ? "" : " (incomplete)") << '\n';
    if (r.seed)
        s << "seed:         " << *r.seed << '\n';
    s << "epsilon_star: " << magnitude_text(r.epsilon_star) << (r.lower_bound ? "  [lower bound]" : "") << '\n';
    if (r.worst)
        s << "worst pair:   " << r.worst->first.dump() << " x " << r.worst->second.dump() << '\n';
    for (const auto& n : r.notes)
        s << "note:         " << n << '\n';
    return s.str();
}

// --- measure ---------------------------------------------------------------------

struct MeasureArgs {
    std::string builtin;
    std::string group;
    std::int64_t p = 3;
    std::int64_t q = 7;
    double r = 0.5;
    std::size_t n = 3;
    std::optional<std::uint64_t> pairs;
    std::uint64_t seed = 0;
    std::optional<unsigned> workers;
    std::size_t max_elements = 100000;
    std::string assert_le;
    bool csv_pairs = false;
    bool exact_weights = false;
    bool witness = false;
    bool roots = false;
    bool numeric = false;
};

std::vector<UMatrix> q8_generators()
{
    return {UMatrix::diagonal({UnitPoint::root(1, 4), UnitPoint::root(3, 4)}),
            UMatrix::monomial_cycle({UnitPoint::root(0, 1), UnitPoint::root(1, 2)}, 1)};
}

AsmReport measure_closure(std::vector<UMatrix> gens, const MeasureArgs& a, const MeasureOptions& mo)
{
    auto g = close(std::move(gens), {.max_elements = a.max_elements, .build_cayley = true});
    if (!g.complete())
        throw IncompleteClosure("closure exceeded --max-elements " + std::to_string(a.max_elements) +
                                "; raise it to measure this group");
    return measure_asm(g, mo);
}

AsmReport run_measure(const MeasureArgs& a)
{
    MeasureOptions mo;
    mo.workers = a.workers ? *a.workers : default_workers();
    mo.record_pairs = a.csv_pairs;

    if (!a.group.empty()) {
        auto doc = io::closure_from_json(read_json_file(a.group));
        auto r = measure_closure(std::move(doc.generators), a, mo);
        r.subject = "group:" + a.group;
        return r;
    }
    const auto& b = a.builtin;
    if (b == "q8") {
        auto r = measure_closure(q8_generators(), a, mo);
        r.subject = "q8";
        return r;
    }
    if (b == "cyclic") {
        auto r = measure_closure({cycle_matrix(a.p)}, a, mo);
        r.subject = "cyclic p=" + std::to_string(a.p);
        return r;
    }
    if (b == "miller-moreno") {
        auto [x, y] = miller_moreno(default_miller_moreno(a.p, a.q));
        auto r = measure_closure({x, y}, a, mo);
        r.subject = "miller-moreno p=" + std::to_string(a.p) + " q=" + std::to_string(a.q);
        return r;
    }
    if (b == "tadpole") {
        if (a.roots) {
            auto r = measure_closure(tadpole_root_generators(a.p), a, mo);
            r.subject = "tadpole roots p=" + std::to_string(a.p);
            return r;
        }
        if (a.witness) {
            auto [ta, tb] = tadpole_case4_witness(a.p);
            PairSampler fixed = [ta = ta, tb = tb](rnd::Engine&, std::uint64_t) {
                return SampledPair{tadpole(ta), tadpole(tb), io::to_json(ta), io::to_json(tb)};
            };
            auto r = measure_asm_sampled(fixed, 1, a.seed, mo);
            r.subject = "tadpole case-4 witness p=" + std::to_string(a.p);
            return r;
        }
        auto r = measure_asm_sampled(tadpole_pair_sampler(a.p, {.exact_weights = a.exact_weights}),
                                     a.pairs.value_or(10000), a.seed, mo);
        r.subject = "tadpole p=" + std::to_string(a.p);
        return r;
    }
    if (b == "sr") {
        SrParams params{.n = a.n, .r = a.r};
        auto r = measure_sub_sampled(sr_pair_sampler(params, a.numeric ? SrEigen::Numeric : SrEigen::ClosedForm),
                                     a.pairs.value_or(10000), a.seed, mo);
        r.subject = "sr n=" + std::to_string(a.n) + " r=" + io::format_decimal(a.r);
        return r;
    }
    throw UsageError("unknown builtin \"" + b + "\"; expected tadpole, miller-moreno, q8, cyclic or sr");
}

bool exceeds(const Magnitude& m, const Rational& threshold)
{
    if (m.exact)
        return *m.exact > threshold;
    return m.value > to_double(threshold);
}

// --- qset ------------------------------------------------------------------------

struct QSetArgs {
    std::int64_t p = 3;
    std::string epsilon;
    std::string delta;
    std::optional<std::int64_t> q_max;
};

std::string qset_text(const QSetArgs& a, const Common& c, std::ostream& err)
{
    QSetParams params;
    params.p = a.p;
    if (a.epsilon.empty() == a.delta.empty())
        throw UsageError("qset needs exactly one of --epsilon and --delta");
    if (!a.epsilon.empty())
        params.epsilon_p = parse_exact_number(a.epsilon);
    else
        params.epsilon_p = Rational(1, 2 * a.p) - parse_exact_number(a.delta);
    if (!is_prime(a.p))
        throw UsageError("--p must be prime");
    if (params.epsilon_p <= 0 || params.epsilon_p >= Rational(1, 2 * a.p))
        throw UsageError("epsilon_p must lie in (0, 1/(2p))");

    BigInt cutoff = numerator(floor(Rational(1) / (2 * params.delta())));
    if (cutoff > kLargeCutoff) {
        if (!a.q_max)
            throw UsageError("cutoff floor(1/(2 delta)) = " + cutoff.str() +
                             " is too large to scan; pass --q-max to truncate");
        err << "warning: cutoff " << cutoff.str() << " is large; scanning only up to q = " << *a.q_max << '\n';
    }
    auto result = q_set(params, a.q_max);
    if (c.format == "csv") {
        std::ostringstream s;
        s << "q,member,witness_k,witness_centre\n";
        for (const auto& v : result.verdicts) {
            s << v.q << ',' << (v.member ? 1 : 0) << ',';
            if (v.witness_k)
                s << *v.witness_k << ',' << (2 * *v.witness_j + 1) << '/' << (2 * a.p);
            else
                s << ',';
            s << '\n';
        }
        return s.str();
    }
    if (c.format == "human") {
        std::ostringstream s;
        s << "delta:   " << rational_string(result.delta) << '\n'
          << "cutoff:  " << result.cutoff.str() << (result.truncated ? " (scan truncated)" : "") << '\n'
          << "members:";
        for (auto q : result.members)
            s << ' ' << q;
        s << '\n';
        return s.str();
    }
    return io::to_json(result, params).dump(2) + "\n";
}

// --- build -----------------------------------------------------------------------

struct BuildArgs {
    std::string name;
    std::int64_t p = 3;
    std::int64_t q = 7;
    std::string params;
    std::uint64_t seed = 0;
    bool witness = false;
};

json run_build(const BuildArgs& a)
{
    json doc;
    doc["construction"] = a.name;
    std::vector<UMatrix> mats;
    if (a.name == "q8") {
        mats = q8_generators();
    } else if (a.name == "cyclic") {
        mats = {cycle_matrix(a.p)};
        doc["params"] = {{"p", a.p}};
    } else if (a.name == "miller-moreno") {
        auto mm = a.params.empty() ? default_miller_moreno(a.p, a.q) : io::miller_moreno_from_json(read_json_file(a.params));
        auto [x, y] = miller_moreno(mm);
        mats = {x, y};
        doc["params"] = io::to_json(mm);
    } else if (a.name == "tadpole") {
        std::vector<TadpoleParams> ts;
        if (!a.params.empty()) {
            auto j = read_json_file(a.params);
            if (j.is_array())
                for (const auto& e : j)
                    ts.push_back(io::tadpole_from_json(e));
            else
                ts.push_back(io::tadpole_from_json(j));
        } else if (a.witness) {
            auto [ta, tb] = tadpole_case4_witness(a.p);
            ts = {ta, tb};
        } else {
            auto e = rnd::chunk_engine(a.seed, 0);
            ts = {sample_tadpole(a.p, e, {.exact_weights = true}), sample_tadpole(a.p, e, {.exact_weights = true})};
        }
        auto params = json::array();
        for (const auto& t : ts) {
            mats.push_back(tadpole(t));
            params.push_back(io::to_json(t));
        }
        doc["params"] = std::move(params);
    } else if (a.name == "tadpole-roots") {
        mats = tadpole_root_generators(a.p);
        doc["params"] = {{"p", a.p}};
    } else {
        throw UsageError("unknown construction \"" + a.name +
                         "\"; expected q8, cyclic, miller-moreno, tadpole or tadpole-roots");
    }
    auto gens = json::array();
    for (const auto& m : mats)
        gens.push_back(io::to_json(m));
    doc["generators"] = std::move(gens);
    return doc;
}

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv", "human"}));
    app->add_option("--output,-o", c.output, "Write to this file instead of stdout");
    app->add_flag("--deterministic", c.deterministic, "Omit the timestamp so seeded runs are byte-identical");
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Spectral submultiplicativity toolkit", "aspec"};
    app.require_subcommand(1);

    Common common;

    MeasureArgs ma;
    auto* measure = app.add_subcommand("measure", "Measure epsilon* of a builtin or a group file");
    auto* source = measure->add_option_group("source");
    source->add_option("--builtin", ma.builtin, "tadpole | miller-moreno | q8 | cyclic | sr");
    source->add_option("--group", ma.group, "JSON file with a generator list");
    source->require_option(1);
    measure->add_option("--p", ma.p, "Prime p");
    measure->add_option("--q", ma.q, "Prime q (miller-moreno)");
    measure->add_option("--r", ma.r, "Radius r (sr)");
    measure->add_option("--n", ma.n, "Dimension n (sr)");
    measure->add_option("--pairs,--samples", ma.pairs, "Sampled pair count");
    measure->add_option("--seed", ma.seed, "Sampling seed");
    measure->add_option("--workers", ma.workers, "Worker threads (default: $ASPEC_WORKERS or all cores)");
    measure->add_option("--max-elements", ma.max_elements, "Closure budget");
    measure->add_option("--assert-le", ma.assert_le, "Exit 2 when epsilon* exceeds this value");
    measure->add_flag("--csv-pairs", ma.csv_pairs, "CSV: one row per pair");
    measure->add_flag("--exact-weights", ma.exact_weights, "tadpole: rational head weights");
    measure->add_flag("--witness", ma.witness, "tadpole: the constructed case-4 pair only");
    measure->add_flag("--roots", ma.roots, "tadpole: exhaustive over the root-of-unity subgroup");
    measure->add_flag("--numeric", ma.numeric, "sr: numeric eigenvalues instead of closed forms");
    add_common(measure, common);

    QSetArgs qa;
    auto* qset = app.add_subcommand("qset", "List the primes in Q(p)");
    qset->add_option("--p", qa.p, "Prime p")->required();
    qset->add_option("--epsilon", qa.epsilon, "epsilon_p as k/N or a decimal");
    qset->add_option("--delta", qa.delta, "delta_p = 1/(2p) - epsilon_p instead of --epsilon");
    qset->add_option("--q-max", qa.q_max, "Scan at most up to this q");
    add_common(qset, common);

    std::string check;
    VerifyOptions vo;
    std::optional<unsigned> verify_workers;
    auto* verify = app.add_subcommand("verify", "Run a property suite");
    verify->add_option("check", check, "Suite name")->required()->check(CLI::IsMember(std::vector<std::string>(
                                                                       std::begin(kVerifyNames), std::end(kVerifyNames))));
    verify->add_option("--p", vo.p, "Prime p");
    verify->add_option("--q", vo.q, "Prime q");
    verify->add_option("--r", vo.r, "Radius r");
    verify->add_option("--n", vo.n, "Dimension n");
    verify->add_option("--trials", vo.trials, "Random trials");
    verify->add_option("--pairs", vo.pairs, "Sampled pairs");
    verify->add_option("--samples", vo.samples, "Samples");
    verify->add_option("--seed", vo.seed, "Seed");
    verify->add_option("--workers", verify_workers, "Worker threads");
    verify->add_option("--max-elements", vo.max_elements, "Closure budget");
    add_common(verify, common);

    std::string report_path;
    auto* plotdata = app.add_subcommand("plotdata", "Unit-circle points of a report as CSV");
    plotdata->add_option("report", report_path, "Report JSON file")->required();
    plotdata->add_option("--output,-o", common.output, "Write to this file instead of stdout");

    BuildArgs ba;
    auto* build = app.add_subcommand("build", "Emit a construction's matrices as JSON");
    build->add_option("construction", ba.name, "q8 | cyclic | miller-moreno | tadpole | tadpole-roots")->required();
    build->add_option("--p", ba.p, "Prime p");
    build->add_option("--q", ba.q, "Prime q");
    build->add_option("--params", ba.params, "Parameter JSON file");
    build->add_option("--seed", ba.seed, "Seed for sampled parameters");
    build->add_flag("--witness", ba.witness, "tadpole: the case-4 witness pair");
    build->add_option("--output,-o", common.output, "Write to this file instead of stdout");

    std::vector<std::string> argv_store{"aspec"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store)
        argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (measure->parsed()) {
            std::optional<Rational> threshold;
            if (!ma.assert_le.empty())
                threshold = parse_exact_number(ma.assert_le);
            auto report = run_measure(ma);
            std::string text;
            if (common.format == "csv")
                text = io::report_csv(report, ma.csv_pairs);
            else if (common.format == "human")
                text = human_report(report);
            else
                text = io::to_json(report, common.deterministic ? "" : io::utc_timestamp()).dump(2) + "\n";
            emit(common, text, out);
            if (threshold && exceeds(report.epsilon_star, *threshold)) {
                err << "assertion failed: epsilon_star " << magnitude_text(report.epsilon_star) << " > "
                    << ma.assert_le << '\n';
                return kViolation;
            }
            return kOk;
        }
        if (qset->parsed()) {
            emit(common, qset_text(qa, common, err), out);
            return kOk;
        }
        if (verify->parsed()) {
            vo.workers = verify_workers ? *verify_workers : default_workers();
            auto result = run_verify(check, vo);
            json j{{"check", result.name}, {"pass", result.pass}, {"evidence", result.evidence}};
            if (!result.pass)
                j["counterexample"] = result.counterexample;
            if (common.format == "human")
                emit(common, std::string(result.pass ? "pass" : "FAIL") + ": " + check + " " + result.evidence.dump() + "\n",
                     out);
            else
                emit(common, j.dump(2) + "\n", out);
            return result.pass ? kOk : kViolation;
        }
        if (plotdata->parsed()) {
            auto j = read_json_file(report_path);
            // An empty document is a report with nothing to plot.
            std::string text = j.is_null() || (j.is_object() && j.empty()) ? "set_name,angle,exactness\n"
                                                                           : io::plotdata_csv(io::report_from_json(j));
            emit(common, text, out);
            return kOk;
        }
        if (build->parsed()) {
            emit(common, run_build(ba).dump(2) + "\n", out);
            return kOk;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

} // namespace aspec::cli
