#include "aspec/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <limits>
#include <sstream>

#include "aspec/errors.hpp"

namespace aspec::io {

namespace {

template <class F>
auto guarded(const char* what, F&& f)
{
    try {
        return f();
    } catch (const json::exception& e) {
        throw FormatError(std::string(what) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string(what) + ": " + e.what());
    }
}

const json& field(const json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key))
        throw FormatError(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

std::complex<double> complex_from_json(const json& j)
{
    if (!j.is_array() || j.size() != 2)
        throw FormatError("complex entry must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json points_json(const std::vector<UnitPoint>& pts)
{
    auto arr = json::array();
    for (const auto& p : pts)
        arr.push_back(to_json(p));
    return arr;
}

std::vector<UnitPoint> points_from_json(const json& j)
{
    if (!j.is_array())
        throw FormatError("expected an array of angles");
    std::vector<UnitPoint> out;
    for (const auto& e : j)
        out.push_back(unit_point_from_json(e));
    return out;
}

const char* metric_name(Metric m) { return m == Metric::Asm ? "asm" : "sub"; }
const char* mode_name(Mode m) { return m == Mode::Exhaustive ? "exhaustive" : "sampled"; }

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_decimal(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double parse_double(const json& j)
{
    if (j.is_number())
        return j.get<double>();
    if (!j.is_string())
        throw FormatError("expected a number or decimal string");
    const auto& s = j.get_ref<const std::string&>();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw FormatError("bad decimal \"" + s + "\"");
    }
    if (used != s.size())
        throw FormatError("bad decimal \"" + s + "\"");
    return v;
}

json to_json(const BigInt& v)
{
    if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
        return v.convert_to<std::int64_t>();
    return v.str();
}

BigInt big_int_from_json(const json& j)
{
    if (j.is_number_integer())
        return j.is_number_unsigned() ? BigInt(j.get<std::uint64_t>()) : BigInt(j.get<std::int64_t>());
    if (j.is_string()) {
        try {
            Rational v = parse_rational(j.get<std::string>());
            if (denominator(v) == 1)
                return numerator(v);
        } catch (const std::invalid_argument&) {
        }
        throw FormatError("bad integer \"" + j.get<std::string>() + "\"");
    }
    throw FormatError("expected an integer");
}

json to_json(const RationalAngle& a) { return {{"num", to_json(a.num())}, {"den", to_json(a.den())}}; }

RationalAngle rational_angle_from_json(const json& j)
{
    BigInt den = big_int_from_json(field(j, "den"));
    if (den <= 0)
        throw FormatError("angle denominator must be positive");
    return {big_int_from_json(field(j, "num")), den};
}

json to_json(const UnitPoint& z)
{
    if (const auto* e = z.exact_angle())
        return to_json(*e);
    const auto* a = z.approx_angle();
    return {{"turns", format_double(a->turns)}, {"uncertainty", format_double(a->uncertainty)}};
}

UnitPoint unit_point_from_json(const json& j)
{
    if (j.is_object() && j.contains("num"))
        return rational_angle_from_json(j);
    if (j.is_object() && j.contains("turns"))
        return UnitPoint::approx(parse_double(j.at("turns")), j.contains("uncertainty") ? parse_double(j.at("uncertainty")) : 0.0);
    throw FormatError("angle must be {\"num\", \"den\"} or {\"turns\"}");
}

json to_json(const Magnitude& m)
{
    json j;
    j["exact"] = m.exact ? json(rational_string(*m.exact)) : json(nullptr);
    j["decimal"] = format_decimal(m.value);
    j["value"] = format_double(m.value);
    j["uncertainty"] = format_double(m.uncertainty);
    return j;
}

Magnitude magnitude_from_json(const json& j)
{
    return guarded("magnitude", [&] {
        Magnitude m;
        const auto& ex = field(j, "exact");
        if (!ex.is_null())
            m.exact = parse_rational(ex.get<std::string>());
        m.value = parse_double(field(j, "value"));
        m.uncertainty = parse_double(field(j, "uncertainty"));
        return m;
    });
}

// --- matrices --------------------------------------------------------------------

json to_json(const UMatrix& m)
{
    json j;
    j["dim"] = m.dim();
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Dense>) {
                j["variant"] = "dense";
                j["unitary"] = v.unitary;
                auto rows = json::array();
                for (Eigen::Index r = 0; r < v.entries.rows(); ++r) {
                    auto row = json::array();
                    for (Eigen::Index c = 0; c < v.entries.cols(); ++c)
                        row.push_back(complex_json(v.entries(r, c)));
                    rows.push_back(std::move(row));
                }
                j["entries"] = std::move(rows);
            } else if constexpr (std::is_same_v<T, Diagonal>) {
                j["variant"] = "diagonal";
                j["entries"] = points_json(v.entries);
            } else if constexpr (std::is_same_v<T, MonomialCycle>) {
                j["variant"] = "monomial_cycle";
                j["weights"] = points_json(v.weights);
                j["shift"] = v.shift;
            } else {
                j["variant"] = "block_diag";
                auto blocks = json::array();
                for (const auto& b : v.blocks)
                    blocks.push_back(to_json(b));
                j["blocks"] = std::move(blocks);
            }
        },
        m.variant());
    return j;
}

UMatrix matrix_from_json(const json& j)
{
    return guarded("matrix", [&] {
        auto variant = field(j, "variant").get<std::string>();
        UMatrix m;
        if (variant == "dense") {
            const auto& rows = field(j, "entries");
            auto n = static_cast<Eigen::Index>(rows.size());
            ComplexMatrix e(n, n);
            for (Eigen::Index r = 0; r < n; ++r) {
                const auto& row = rows.at(static_cast<std::size_t>(r));
                if (static_cast<Eigen::Index>(row.size()) != n)
                    throw FormatError("dense matrix must be square");
                for (Eigen::Index c = 0; c < n; ++c)
                    e(r, c) = complex_from_json(row.at(static_cast<std::size_t>(c)));
            }
            m = UMatrix::dense(std::move(e), j.value("unitary", true));
        } else if (variant == "diagonal") {
            m = UMatrix::diagonal(points_from_json(field(j, "entries")));
        } else if (variant == "monomial_cycle") {
            m = UMatrix::monomial_cycle(points_from_json(field(j, "weights")), field(j, "shift").get<std::int64_t>());
        } else if (variant == "block_diag") {
            std::vector<UMatrix> blocks;
            for (const auto& b : field(j, "blocks"))
                blocks.push_back(matrix_from_json(b));
            if (blocks.empty())
                throw FormatError("block_diag needs at least one block");
            m = UMatrix::block_diag(std::move(blocks));
        } else {
            throw FormatError("unknown matrix variant \"" + variant + "\"");
        }
        if (j.contains("dim") && j.at("dim").get<std::size_t>() != m.dim())
            throw FormatError("matrix dim does not match its entries");
        return m;
    });
}

// --- closures --------------------------------------------------------------------

json closure_to_json(const GroupClosure& g, bool include_cayley)
{
    json j;
    auto gens = json::array();
    for (const auto& m : g.generators())
        gens.push_back(to_json(m));
    j["generators"] = std::move(gens);
    j["order"] = g.order();
    j["complete"] = g.complete();
    if (include_cayley && g.cayley())
        j["cayley"] = *g.cayley();
    return j;
}

ClosureDocument closure_from_json(const json& j)
{
    return guarded("closure", [&] {
        ClosureDocument doc;
        for (const auto& m : field(j, "generators"))
            doc.generators.push_back(matrix_from_json(m));
        if (j.contains("order"))
            doc.order = j.at("order").get<std::size_t>();
        if (j.contains("complete"))
            doc.complete = j.at("complete").get<bool>();
        if (j.contains("cayley"))
            doc.cayley = j.at("cayley").get<std::vector<std::uint32_t>>();
        if (doc.cayley && doc.order && doc.cayley->size() != *doc.order * *doc.order)
            throw FormatError("cayley table must have order^2 entries");
        return doc;
    });
}

// --- reports ---------------------------------------------------------------------

json to_json(const AsmReport& r, const std::string& timestamp)
{
    json j;
    j["subject"] = r.subject;
    j["metric"] = metric_name(r.metric);
    j["mode"] = mode_name(r.mode);
    j["pair_count"] = r.pair_count;
    j["seed"] = r.seed ? json(*r.seed) : json(nullptr);
    j["group_order"] = r.group_order;
    j["complete"] = r.complete;
    j["exact"] = r.exact;
    j["lower_bound"] = r.lower_bound;
    j["epsilon_star"] = to_json(r.epsilon_star);
    if (r.worst) {
        const auto& w = *r.worst;
        json wj;
        wj["first"] = w.first;
        wj["second"] = w.second;
        wj["defect"] = to_json(w.defect);
        wj["sub_defect"] = format_double(w.sub_defect);
        wj["gamma"] = to_json(w.gamma);
        wj["alpha"] = to_json(w.alpha);
        wj["beta"] = to_json(w.beta);
        auto values = json::array();
        for (auto z : w.values)
            values.push_back(complex_json(z));
        wj["values"] = std::move(values);
        auto sets = json::array();
        for (const auto& s : w.sets)
            sets.push_back({{"name", s.name}, {"points", points_json(s.points)}});
        wj["sets"] = std::move(sets);
        j["worst"] = std::move(wj);
    } else {
        j["worst"] = nullptr;
    }
    j["histogram"] = {{"upper", format_double(r.histogram.upper)},
                      {"bins", r.histogram.bins},
                      {"overflow", r.histogram.overflow},
                      {"zeros", r.histogram.zeros}};
    j["notes"] = r.notes;
    if (!timestamp.empty())
        j["timestamp"] = timestamp;
    return j;
}

AsmReport report_from_json(const json& j)
{
    return guarded("report", [&] {
        AsmReport r;
        r.subject = field(j, "subject").get<std::string>();
        auto metric = field(j, "metric").get<std::string>();
        if (metric != "asm" && metric != "sub")
            throw FormatError("unknown metric \"" + metric + "\"");
        r.metric = metric == "asm" ? Metric::Asm : Metric::Sub;
        auto mode = field(j, "mode").get<std::string>();
        if (mode != "exhaustive" && mode != "sampled")
            throw FormatError("unknown mode \"" + mode + "\"");
        r.mode = mode == "exhaustive" ? Mode::Exhaustive : Mode::Sampled;
        r.pair_count = field(j, "pair_count").get<std::uint64_t>();
        if (!field(j, "seed").is_null())
            r.seed = j.at("seed").get<std::uint64_t>();
        r.group_order = field(j, "group_order").get<std::uint64_t>();
        r.complete = field(j, "complete").get<bool>();
        r.exact = field(j, "exact").get<bool>();
        r.lower_bound = field(j, "lower_bound").get<bool>();
        r.epsilon_star = magnitude_from_json(field(j, "epsilon_star"));
        const auto& wj = field(j, "worst");
        if (!wj.is_null()) {
            Witness w;
            w.first = field(wj, "first");
            w.second = field(wj, "second");
            w.defect = magnitude_from_json(field(wj, "defect"));
            w.sub_defect = parse_double(field(wj, "sub_defect"));
            w.gamma = unit_point_from_json(field(wj, "gamma"));
            w.alpha = unit_point_from_json(field(wj, "alpha"));
            w.beta = unit_point_from_json(field(wj, "beta"));
            for (const auto& z : field(wj, "values"))
                w.values.push_back(complex_from_json(z));
            for (const auto& s : field(wj, "sets"))
                w.sets.push_back({field(s, "name").get<std::string>(), points_from_json(field(s, "points"))});
            r.worst = std::move(w);
        }
        const auto& h = field(j, "histogram");
        r.histogram.upper = parse_double(field(h, "upper"));
        r.histogram.bins = field(h, "bins").get<std::vector<std::uint64_t>>();
        r.histogram.overflow = field(h, "overflow").get<std::uint64_t>();
        r.histogram.zeros = field(h, "zeros").get<std::uint64_t>();
        r.notes = field(j, "notes").get<std::vector<std::string>>();
        return r;
    });
}

std::string report_csv(const AsmReport& r, bool pairs)
{
    std::ostringstream out;
    if (pairs) {
        out << "index,first,second,defect,exact\n";
        for (const auto& row : r.pairs)
            out << row.index << ',' << row.first << ',' << row.second << ',' << format_double(row.defect) << ','
                << row.exact << '\n';
        return out.str();
    }
    out << "subject,metric,mode,pair_count,seed,group_order,complete,exact,lower_bound,epsilon_star,"
           "epsilon_star_decimal\n";
    out << csv_field(r.subject) << ',' << metric_name(r.metric) << ',' << mode_name(r.mode) << ',' << r.pair_count
        << ',' << (r.seed ? std::to_string(*r.seed) : "") << ',' << r.group_order << ',' << r.complete << ','
        << r.exact << ',' << r.lower_bound << ','
        << (r.epsilon_star.exact ? rational_string(*r.epsilon_star.exact) : "") << ','
        << format_decimal(r.epsilon_star.value) << '\n';
    return out.str();
}

std::string plotdata_csv(const AsmReport& r)
{
    std::ostringstream out;
    out << "set_name,angle,exactness\n";
    if (!r.worst)
        return out.str();
    auto row = [&](const std::string& name, const UnitPoint& z) {
        out << csv_field(name) << ',' << format_double(z.turns()) << ',' << (z.is_exact() ? "exact" : "approx")
            << '\n';
    };
    for (const auto& s : r.worst->sets)
        for (const auto& z : s.points)
            row(s.name, z);
    if (r.metric == Metric::Asm)
        row("witness_gamma", r.worst->gamma);
    return out.str();
}

// --- parameters ------------------------------------------------------------------

json to_json(const TadpoleParams& t)
{
    return {{"p", t.p}, {"d_angles", points_json(t.weights)}, {"k", t.shift}, {"a", t.offsets}};
}

TadpoleParams tadpole_from_json(const json& j)
{
    return guarded("tadpole parameters", [&] {
        TadpoleParams t;
        t.p = field(j, "p").get<std::int64_t>();
        t.weights = points_from_json(field(j, "d_angles"));
        t.shift = field(j, "k").get<std::int64_t>();
        t.offsets = field(j, "a").get<std::vector<std::int64_t>>();
        return t;
    });
}

json to_json(const MillerMorenoParams& mm)
{
    auto betas = json::array();
    for (const auto& b : mm.betas)
        betas.push_back(to_json(b));
    return {{"p", mm.p}, {"q", mm.q}, {"theta_exponents", mm.theta_exponents}, {"betas", betas}};
}

MillerMorenoParams miller_moreno_from_json(const json& j)
{
    return guarded("Miller-Moreno parameters", [&] {
        MillerMorenoParams mm;
        mm.p = field(j, "p").get<std::int64_t>();
        mm.q = field(j, "q").get<std::int64_t>();
        mm.theta_exponents = field(j, "theta_exponents").get<std::vector<std::vector<std::int64_t>>>();
        for (const auto& b : field(j, "betas"))
            mm.betas.push_back(rational_angle_from_json(b));
        return mm;
    });
}

json to_json(const SrParams& s)
{
    return {{"n", s.n}, {"r", format_double(s.r)}, {"lambda", s.lambda ? complex_json(*s.lambda) : json(nullptr)}};
}

SrParams sr_from_json(const json& j)
{
    return guarded("S_r parameters", [&] {
        SrParams s;
        s.n = field(j, "n").get<std::size_t>();
        s.r = parse_double(field(j, "r"));
        const auto& l = field(j, "lambda");
        if (l.is_null())
            s.lambda.reset();
        else
            s.lambda = complex_from_json(l);
        return s;
    });
}

json to_json(const QSetParams& q) { return {{"p", q.p}, {"epsilon_p", to_json(RationalAngle(q.epsilon_p))}}; }

QSetParams qset_params_from_json(const json& j)
{
    return guarded("Q(p) parameters", [&] {
        QSetParams q;
        q.p = field(j, "p").get<std::int64_t>();
        const auto& e = field(j, "epsilon_p");
        q.epsilon_p = Rational(big_int_from_json(field(e, "num")), big_int_from_json(field(e, "den")));
        return q;
    });
}

json to_json(const QSetResult& r, const QSetParams& params)
{
    json j;
    j["p"] = params.p;
    j["epsilon_p"] = rational_string(params.epsilon_p);
    j["delta"] = rational_string(r.delta);
    j["cutoff"] = to_json(r.cutoff);
    j["cutoff_rule"] = "primes q > floor(1/(2 delta)) admit some k/q inside an excluded interval";
    j["scanned_to"] = r.scanned_to;
    j["truncated"] = r.truncated;
    j["members"] = r.members;
    auto verdicts = json::array();
    for (const auto& v : r.verdicts) {
        json vj{{"q", v.q}, {"member", v.member}};
        if (v.witness_k) {
            vj["witness_k"] = *v.witness_k;
            vj["witness_centre"] = rational_string(Rational(2 * *v.witness_j + 1, 2 * params.p));
        }
        verdicts.push_back(std::move(vj));
    }
    j["verdicts"] = std::move(verdicts);
    return j;
}

json to_json(const GapAnalysis& g)
{
    json j;
    j["n"] = g.n;
    j["m"] = g.m;
    j["p"] = g.p;
    j["q"] = g.q;
    j["distinct_products"] = g.distinct_products;
    j["count_bound"] = g.count_bound;
    j["n2_minus_1"] = g.n2_minus_1;
    j["widest_gap"] = rational_string(g.widest_gap);
    j["midpoint"] = g.midpoint.str();
    j["midpoint_distance"] = rational_string(g.midpoint_distance);
    j["nearest_q_root"] = g.nearest_q_root.str();
    j["witness_k"] = g.witness_k;
    j["witness_distance"] = rational_string(g.witness_distance);
    j["predicted_lower"] = rational_string(g.predicted_lower);
    j["half_inverse_n2"] = rational_string(g.half_inverse_n2);
    j["max_pair_defect"] = to_json(g.max_pair_defect);
    j["max_pair_defect_k"] = g.max_pair_defect_k;
    j["product_set_constant"] = g.product_set_constant;
    return j;
}

std::string utc_timestamp()
{
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace aspec::io
