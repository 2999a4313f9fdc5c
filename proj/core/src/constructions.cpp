#include "aspec/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "aspec/errors.hpp"

namespace aspec {

namespace {

std::int64_t mod(std::int64_t a, std::int64_t m) { return ((a % m) + m) % m; }

std::int64_t power_mod(std::int64_t base, std::int64_t exp, std::int64_t m)
{
    std::int64_t result = 1 % m;
    base = mod(base, m);
    while (exp > 0) {
        if (exp & 1)
            result = static_cast<std::int64_t>((static_cast<__int128>(result) * base) % m);
        base = static_cast<std::int64_t>((static_cast<__int128>(base) * base) % m);
        exp >>= 1;
    }
    return result;
}

bool det_is_one(std::span<const UnitPoint> weights, double tolerance)
{
    UnitPoint det = determinant(weights);
    return coincide(det, UnitPoint{}, tolerance);
}

std::vector<UnitPoint> all_roots(std::int64_t p)
{
    std::vector<UnitPoint> out;
    for (std::int64_t j = 0; j < p; ++j)
        out.push_back(UnitPoint::root(j, p));
    return out;
}

nlohmann::json tadpole_descriptor(const TadpoleParams& t)
{
    nlohmann::json d;
    d["p"] = t.p;
    d["k"] = t.shift;
    d["a"] = t.offsets;
    auto& w = d["d_angles"] = nlohmann::json::array();
    for (const auto& x : t.weights)
        w.push_back(x.str());
    return d;
}

} // namespace

bool is_prime(std::int64_t n)
{
    if (n < 2)
        return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

UMatrix cycle_matrix(std::int64_t p)
{
    if (p < 2)
        throw InvalidParams("cycle matrix needs p >= 2");
    return UMatrix::monomial_cycle(std::vector<UnitPoint>(static_cast<std::size_t>(p)), 1);
}

UnitPoint determinant(std::span<const UnitPoint> weights)
{
    UnitPoint det;
    for (const auto& w : weights)
        det = det * w;
    return det;
}

Spectrum spectrum_dck(std::span<const UnitPoint> weights, std::int64_t k, std::int64_t p, double tolerance)
{
    if (p < 2 || static_cast<std::int64_t>(weights.size()) != p)
        throw InvalidParams("spectrum_dck needs p >= 2 weights");
    if (!det_is_one(weights, tolerance))
        throw DeterminantNotOne("det(D) = " + determinant(weights).str() + " turns, expected 0");
    Spectrum s;
    s.dim = static_cast<std::size_t>(p);
    if (mod(k, p) == 0) {
        s.points.assign(weights.begin(), weights.end());
        s.exact = std::all_of(weights.begin(), weights.end(), [](const UnitPoint& w) { return w.is_exact(); });
    } else {
        s.points = all_roots(p);
        s.exact = true;
    }
    sort_by_angle(s.points);
    return s;
}

// --- tadpoles ------------------------------------------------------------------

void validate(const TadpoleParams& t, double tolerance)
{
    if (t.p < 3 || !is_prime(t.p))
        throw InvalidParams("tadpole p must be an odd prime, got " + std::to_string(t.p));
    if (static_cast<std::int64_t>(t.weights.size()) != t.p)
        throw InvalidParams("tadpole needs p head weights");
    if (!det_is_one(t.weights, tolerance))
        throw InvalidParams("tadpole head weights must have determinant 1");
    if (t.shift < 0 || t.shift >= t.p)
        throw InvalidParams("tadpole shift k must be in [0, p-1]");
    if (static_cast<std::int64_t>(t.offsets.size()) != t.p - 1)
        throw InvalidParams("tadpole needs p-1 tail offsets");
    for (auto a : t.offsets)
        if (a < 0 || a >= t.p)
            throw InvalidParams("tadpole tail offsets must be in [0, p-1]");
}

TadpoleParams tadpole_identity(std::int64_t p)
{
    TadpoleParams t;
    t.p = p;
    t.weights.assign(static_cast<std::size_t>(p), UnitPoint{});
    t.shift = 0;
    t.offsets.assign(static_cast<std::size_t>(p - 1), 0);
    return t;
}

std::vector<UnitPoint> tadpole_tail(const TadpoleParams& t)
{
    std::vector<UnitPoint> tail{UnitPoint{}};
    for (std::int64_t j = 1; j < t.p; ++j)
        tail.push_back(UnitPoint::root(j * t.shift + t.offsets[static_cast<std::size_t>(j - 1)] * t.p, t.p * t.p));
    return tail;
}

UMatrix tadpole(const TadpoleParams& t)
{
    validate(t);
    return UMatrix::block_diag({UMatrix::monomial_cycle(t.weights, t.shift), UMatrix::diagonal(tadpole_tail(t))});
}

TadpoleParams tadpole_mul(const TadpoleParams& a, const TadpoleParams& b)
{
    if (a.p != b.p)
        throw PrimeMismatch("tadpole product of p=" + std::to_string(a.p) + " and p=" + std::to_string(b.p));
    const std::int64_t p = a.p;
    const std::int64_t carry = (a.shift + b.shift >= p) ? 1 : 0;
    TadpoleParams c;
    c.p = p;
    c.shift = mod(a.shift + b.shift, p);
    for (std::int64_t j = 1; j < p; ++j) {
        auto idx = static_cast<std::size_t>(j - 1);
        c.offsets.push_back(mod(a.offsets[idx] + b.offsets[idx] + carry * j, p));
    }
    for (std::int64_t i = 0; i < p; ++i)
        c.weights.push_back(a.weights[static_cast<std::size_t>(i)] *
                            b.weights[static_cast<std::size_t>(mod(i + a.shift, p))]);
    return c;
}

TadpoleParams tadpole_inverse(const TadpoleParams& t)
{
    const std::int64_t p = t.p;
    TadpoleParams inv;
    inv.p = p;
    inv.shift = mod(-t.shift, p);
    // Head: (D C^k)^-1 = (C^-k D^-1 C^k) C^-k.
    for (std::int64_t r = 0; r < p; ++r)
        inv.weights.push_back(t.weights[static_cast<std::size_t>(mod(r - t.shift, p))].inverse());
    // Tail: -(j k + a_j p) = j (p - k) + (-j - a_j) p when k != 0.
    const std::int64_t wrap = t.shift == 0 ? 0 : 1;
    for (std::int64_t j = 1; j < p; ++j)
        inv.offsets.push_back(mod(-t.offsets[static_cast<std::size_t>(j - 1)] - wrap * j, p));
    return inv;
}

int tadpole_case(const TadpoleParams& a, const TadpoleParams& b)
{
    bool da = a.shift == 0;
    bool db = b.shift == 0;
    if (da && db)
        return 1;
    if (da || db)
        return 2;
    return mod(a.shift + b.shift, a.p) == 0 ? 4 : 3;
}

TadpoleParams sample_tadpole(std::int64_t p, rnd::Engine& engine, const TadpoleSampling& how)
{
    TadpoleParams t;
    t.p = p;
    UnitPoint sum;
    for (std::int64_t i = 0; i + 1 < p; ++i) {
        UnitPoint w;
        if (how.exact_weights) {
            auto den = 1 + static_cast<std::int64_t>(rnd::index(engine, static_cast<std::uint64_t>(how.max_denominator)));
            auto num = static_cast<std::int64_t>(rnd::index(engine, static_cast<std::uint64_t>(den)));
            w = UnitPoint::root(num, den);
        } else {
            w = UnitPoint::approx(rnd::uniform(engine));
        }
        sum = sum * w;
        t.weights.push_back(w);
    }
    t.weights.push_back(sum.inverse());
    t.shift = static_cast<std::int64_t>(rnd::index(engine, static_cast<std::uint64_t>(p)));
    for (std::int64_t j = 1; j < p; ++j)
        t.offsets.push_back(static_cast<std::int64_t>(rnd::index(engine, static_cast<std::uint64_t>(p))));
    return t;
}

PairSampler tadpole_pair_sampler(std::int64_t p, const TadpoleSampling& how)
{
    if (p < 3 || !is_prime(p))
        throw InvalidParams("tadpole p must be an odd prime");
    return [p, how](rnd::Engine& engine, std::uint64_t) {
        auto a = sample_tadpole(p, engine, how);
        auto b = sample_tadpole(p, engine, how);
        return SampledPair{tadpole(a), tadpole(b), tadpole_descriptor(a), tadpole_descriptor(b)};
    };
}

std::pair<TadpoleParams, TadpoleParams> tadpole_case4_witness(std::int64_t p, std::vector<UnitPoint> head_weights,
                                                              std::int64_t k)
{
    if (k < 1 || k >= p)
        throw InvalidParams("case-4 witness needs k in [1, p-1]");
    TadpoleParams a = tadpole_identity(p);
    a.weights = std::move(head_weights);
    a.shift = k;
    validate(a);

    // Target product head E: p-1 entries at angle 1/(2p^2), the last fixing det E = 1.
    std::vector<UnitPoint> target(static_cast<std::size_t>(p), UnitPoint::root(1, 2 * p * p));
    target.back() = UnitPoint::root(-(p - 1), 2 * p * p);

    // D_A * shift_k(D_B) = E  =>  D_B[i] = E[i-k] / D_A[i-k].
    TadpoleParams b = tadpole_identity(p);
    b.shift = p - k;
    for (std::int64_t i = 0; i < p; ++i) {
        auto src = static_cast<std::size_t>(mod(i - k, p));
        b.weights[static_cast<std::size_t>(i)] = target[src] * a.weights[src].inverse();
    }
    validate(b);
    return {a, b};
}

std::pair<TadpoleParams, TadpoleParams> tadpole_case4_witness(std::int64_t p)
{
    std::vector<UnitPoint> head;
    UnitPoint sum;
    for (std::int64_t i = 0; i + 1 < p; ++i) {
        head.push_back(UnitPoint::root(i + 1, 5 * p));
        sum = sum * head.back();
    }
    head.push_back(sum.inverse());
    return tadpole_case4_witness(p, std::move(head), 1);
}

std::vector<UMatrix> tadpole_root_generators(std::int64_t p)
{
    std::vector<UMatrix> gens;
    auto rotate = tadpole_identity(p);
    rotate.shift = 1;
    gens.push_back(tadpole(rotate));
    for (std::int64_t j = 1; j < p; ++j) {
        auto t = tadpole_identity(p);
        t.offsets[static_cast<std::size_t>(j - 1)] = 1;
        gens.push_back(tadpole(t));
    }
    auto weight = tadpole_identity(p);
    weight.weights[0] = UnitPoint::root(1, p * p);
    weight.weights[1] = UnitPoint::root(-1, p * p);
    gens.push_back(tadpole(weight));
    return gens;
}

std::uint64_t tadpole_root_group_order(std::int64_t p)
{
    auto up = static_cast<std::uint64_t>(p);
    std::uint64_t order = up; // shifts
    for (std::int64_t i = 0; i < p - 1; ++i)
        order *= up * up * up; // one free p^2-th root weight and one tail offset
    return order;
}

// --- Miller-Moreno -------------------------------------------------------------

std::size_t MillerMorenoParams::dim() const
{
    return theta_exponents.size() * static_cast<std::size_t>(p) + (betas.size() - theta_exponents.size());
}

void validate(const MillerMorenoParams& mm)
{
    if (!is_prime(mm.p) || !is_prime(mm.q))
        throw InvalidParams("Miller-Moreno p and q must be prime");
    if (mm.theta_exponents.empty())
        throw InvalidParams("Miller-Moreno needs at least one block (m >= 1)");
    if (mm.betas.size() < mm.theta_exponents.size())
        throw InvalidParams("Miller-Moreno needs l >= m betas");
    for (const auto& row : mm.theta_exponents) {
        if (static_cast<std::int64_t>(row.size()) != mm.p)
            throw InvalidParams("each theta row needs p exponents");
        std::int64_t sum = 0;
        bool constant = true;
        for (auto e : row) {
            if (mod(e, mm.q) == 0)
                throw InvalidParams("each theta must have order exactly q");
            if (mod(e - row.front(), mm.q) != 0)
                constant = false;
            sum = mod(sum + e, mm.q);
        }
        if (constant)
            throw InvalidParams("each X_i must be non-scalar");
        if (sum != 0)
            throw InvalidParams("each X_i must have determinant 1");
    }
    for (const auto& b : mm.betas) {
        BigInt d = b.den();
        while (d % mm.p == 0)
            d /= mm.p;
        if (d != 1)
            throw InvalidParams("beta " + b.str() + " does not have p-power order");
    }
}

MillerMorenoParams default_miller_moreno(std::int64_t p, std::int64_t q)
{
    if (!is_prime(p) || !is_prime(q))
        throw InvalidParams("Miller-Moreno p and q must be prime");
    if (mod(q, p) != 1)
        throw InvalidParams("default Miller-Moreno pair needs q = 1 (mod p)");
    std::int64_t g = 2;
    for (; g < q; ++g)
        if (power_mod(g, p, q) == 1 && mod(g, q) != 1)
            break;
    MillerMorenoParams mm;
    mm.p = p;
    mm.q = q;
    std::vector<std::int64_t> row;
    for (std::int64_t i = 0; i < p; ++i)
        row.push_back(power_mod(g, i, q));
    mm.theta_exponents.push_back(std::move(row));
    mm.betas.emplace_back();
    validate(mm);
    return mm;
}

std::pair<UMatrix, UMatrix> miller_moreno(const MillerMorenoParams& mm)
{
    validate(mm);
    std::vector<UMatrix> xs;
    std::vector<UMatrix> ys;
    for (std::size_t i = 0; i < mm.blocks(); ++i) {
        std::vector<UnitPoint> theta;
        for (auto e : mm.theta_exponents[i])
            theta.push_back(UnitPoint::root(e, mm.q));
        xs.push_back(UMatrix::diagonal(std::move(theta)));
        ys.push_back(UMatrix::monomial_cycle(std::vector<UnitPoint>(static_cast<std::size_t>(mm.p), mm.betas[i]), 1));
    }
    if (mm.betas.size() > mm.blocks()) {
        std::size_t extra = mm.betas.size() - mm.blocks();
        xs.push_back(UMatrix::diagonal(std::vector<UnitPoint>(extra)));
        ys.push_back(UMatrix::diagonal({mm.betas.begin() + static_cast<std::ptrdiff_t>(mm.blocks()), mm.betas.end()}));
    }
    return {UMatrix::block_diag(std::move(xs)), UMatrix::block_diag(std::move(ys))};
}

GapAnalysis mm_gap_analysis(const MillerMorenoParams& mm)
{
    auto [x, y] = miller_moreno(mm);
    const auto n = static_cast<std::int64_t>(mm.dim());
    const auto m = static_cast<std::int64_t>(mm.blocks());
    const std::int64_t p = mm.p;

    GapAnalysis g;
    g.n = n;
    g.m = m;
    g.p = p;
    g.q = mm.q;
    g.count_bound = n * n - n - m * p * p + p + m * p;
    g.n2_minus_1 = n * n - 1;
    g.predicted_lower = Rational(1, 2 * (n * n - 1)) - Rational(1, mm.q);
    g.half_inverse_n2 = Rational(1, 2 * n * n);

    UMatrix y_inv = y.inverse();
    auto sigma_y_inv = distinct_points(spectrum(y_inv).points);

    std::vector<UnitPoint> first_products;
    bool have_witness = false;
    bool have_gap = false;
    UMatrix xk = UMatrix::identity(static_cast<std::size_t>(n));
    for (std::int64_t k = 1; k < mm.q; ++k) {
        xk = xk * x;
        UMatrix a = xk * y;
        auto sigma_a = distinct_points(spectrum(a).points);
        std::vector<UnitPoint> prods;
        for (const auto& s : sigma_a)
            for (const auto& t : sigma_y_inv)
                prods.push_back(s * t);
        prods = distinct_points(std::move(prods));
        g.distinct_products = std::max(g.distinct_products, prods.size());
        if (k == 1)
            first_products = prods;
        else if (prods != first_products)
            g.product_set_constant = false;

        // Widest gap between consecutive product angles, wrapping at 1.
        Rational widest(0);
        std::size_t at = 0;
        for (std::size_t i = 0; i < prods.size(); ++i) {
            const auto& lo = prods[i].exact_angle()->value();
            Rational hi = i + 1 < prods.size() ? prods[i + 1].exact_angle()->value()
                                               : prods.front().exact_angle()->value() + Rational(1);
            if (hi - lo > widest) {
                widest = hi - lo;
                at = i;
            }
        }
        RationalAngle mid(prods[at].exact_angle()->value() + widest / 2);
        if (!have_gap || widest < g.widest_gap) {
            g.widest_gap = widest;
            g.midpoint = mid;
            g.midpoint_distance = widest / 2;
            have_gap = true;
        }

        RationalAngle root = nearest_root_of_unity(UnitPoint(mid), mm.q);
        auto sigma_xk = spectrum(xk).points;
        bool member = std::any_of(sigma_xk.begin(), sigma_xk.end(), [&](const UnitPoint& s) {
            return *s.exact_angle() == root;
        });
        if (member) {
            Rational dist(1);
            for (const auto& pt : prods)
                dist = std::min(dist, *arg_distance(UnitPoint(root), pt).exact);
            if (!have_witness || dist < g.witness_distance) {
                g.witness_distance = dist;
                g.nearest_q_root = root;
                g.witness_k = k;
                have_witness = true;
            }
        }

        auto d = pair_defect(a, y_inv);
        if (k == 1 || compare(d.asm_defect, g.max_pair_defect) > 0) {
            g.max_pair_defect = d.asm_defect;
            g.max_pair_defect_k = k;
        }
    }
    if (!have_witness)
        g.nearest_q_root = nearest_root_of_unity(UnitPoint(g.midpoint), mm.q);
    return g;
}

// --- S_r ------------------------------------------------------------------------

GeneralMatrix RankOneElement::matrix() const
{
    auto n = x.size() + 1;
    ComplexVector u(n);
    ComplexVector v(n);
    u(0) = 1.0;
    v(0) = 1.0;
    u.tail(x.size()) = y;
    v.tail(x.size()) = x;
    return GeneralMatrix{lambda * u * v.adjoint()};
}

std::complex<double> RankOneElement::eigenvalue() const { return lambda * (1.0 + x.dot(y)); }

std::complex<double> sr_product_eigenvalue(const RankOneElement& a, const RankOneElement& b)
{
    // A = lambda (1; b_vec)(1; a_vec)^*, B = mu (1; y)(1; x)^*.
    return a.lambda * b.lambda * (1.0 + a.x.dot(b.y)) * (1.0 + b.x.dot(a.y));
}

double sr_bound(double r)
{
    double s = 1.0 - r * r;
    return 4.0 * r * r / (s * s);
}

namespace {

ComplexVector ball_vector(std::size_t dim, double radius, rnd::Engine& engine)
{
    ComplexVector v(static_cast<Eigen::Index>(dim));
    for (auto i = 0; i < v.size(); ++i) {
        double re = rnd::normal(engine);
        double im = rnd::normal(engine);
        v(i) = {re, im};
    }
    double norm = v.norm();
    double real_dim = 2.0 * static_cast<double>(dim);
    double rad = radius * std::pow(rnd::uniform(engine), 1.0 / real_dim);
    return norm > 0.0 ? ComplexVector(v * (rad / norm)) : v;
}

nlohmann::json rank_one_descriptor(const RankOneElement& e)
{
    auto vec = [](const ComplexVector& v) {
        auto arr = nlohmann::json::array();
        for (auto i = 0; i < v.size(); ++i)
            arr.push_back({v(i).real(), v(i).imag()});
        return arr;
    };
    return {{"lambda", {e.lambda.real(), e.lambda.imag()}}, {"x", vec(e.x)}, {"y", vec(e.y)}};
}

} // namespace

RankOneElement sr_sample(const SrParams& params, rnd::Engine& engine)
{
    if (!(params.r > 0.0 && params.r < 1.0))
        throw InvalidParams("S_r needs 0 < r < 1");
    if (params.n < 2)
        throw InvalidParams("S_r needs dimension n >= 2");
    RankOneElement e;
    double radius = 0.999 * params.r;
    e.x = ball_vector(params.n - 1, radius, engine);
    e.y = ball_vector(params.n - 1, radius, engine);
    if (params.lambda) {
        e.lambda = *params.lambda;
    } else {
        double modulus = 0.5 + 1.5 * rnd::uniform(engine);
        e.lambda = std::polar(modulus, 2.0 * std::numbers::pi * rnd::uniform(engine));
    }
    return e;
}

SubSampler sr_pair_sampler(const SrParams& params, SrEigen how)
{
    if (!(params.r > 0.0 && params.r < 1.0))
        throw InvalidParams("S_r needs 0 < r < 1");
    return [params, how](rnd::Engine& engine, std::uint64_t) {
        auto a = sr_sample(params, engine);
        auto b = sr_sample(params, engine);
        SubSample s;
        s.first = rank_one_descriptor(a);
        s.second = rank_one_descriptor(b);
        if (how == SrEigen::ClosedForm) {
            std::vector<std::complex<double>> zeros(params.n - 1, {0.0, 0.0});
            auto with = [&](std::complex<double> z) {
                std::vector<std::complex<double>> v{z};
                v.insert(v.end(), zeros.begin(), zeros.end());
                return v;
            };
            s.sigma_a = with(a.eigenvalue());
            s.sigma_b = with(b.eigenvalue());
            s.sigma_ab = with(sr_product_eigenvalue(a, b));
            s.rho_a = std::abs(a.eigenvalue());
            s.rho_b = std::abs(b.eigenvalue());
        } else {
            auto ma = a.matrix();
            auto mb = b.matrix();
            s.sigma_a = eigensolve_dense(ma.entries).values;
            s.sigma_b = eigensolve_dense(mb.entries).values;
            s.sigma_ab = eigensolve_dense(ma.entries * mb.entries).values;
            s.rho_a = spectral_radius(ma);
            s.rho_b = spectral_radius(mb);
        }
        return s;
    };
}

// --- Q(p) -----------------------------------------------------------------------

Rational QSetParams::delta() const { return Rational(1, 2 * p) - epsilon_p; }

QVerdict q_verdict(std::int64_t p, const Rational& delta, std::int64_t q)
{
    QVerdict v;
    v.q = q;
    v.member = true;
    // The fractions k/q nearest a centre (2j+1)/(2p) are floor/ceil of the
    // centre times q; if neither lies in the open interval, none does.
    for (std::int64_t j = 0; j < p && v.member; ++j) {
        Rational centre(2 * j + 1, 2 * p);
        Rational scaled = centre * Rational(q);
        BigInt lo = numerator(floor(scaled));
        for (BigInt k : {lo, BigInt(lo + 1)}) {
            if (k < 1 || k > q - 1)
                continue;
            Rational diff = Rational(k, q) - centre;
            if (diff < 0)
                diff = -diff;
            if (diff < delta) {
                v.member = false;
                v.witness_k = k.convert_to<std::int64_t>();
                v.witness_j = j;
                break;
            }
        }
    }
    return v;
}

QSetResult q_set(const QSetParams& params, std::optional<std::int64_t> q_max)
{
    if (!is_prime(params.p))
        throw InvalidParams("Q(p) needs p prime");
    if (params.epsilon_p <= 0 || params.epsilon_p >= Rational(1, 2 * params.p))
        throw InvalidParams("epsilon_p must lie in (0, 1/(2p))");
    QSetResult r;
    r.delta = params.delta();
    r.cutoff = numerator(floor(Rational(1) / (2 * r.delta)));
    BigInt limit = r.cutoff;
    if (q_max && BigInt(*q_max) < limit) {
        limit = *q_max;
        r.truncated = true;
    }
    if (limit > kMaxQScan)
        throw InvalidParams("scan bound " + limit.str() + " exceeds " + std::to_string(kMaxQScan) +
                            "; pass a smaller q_max");
    r.scanned_to = limit.convert_to<std::int64_t>();
    if (r.scanned_to < 2)
        return r;

    std::vector<bool> composite(static_cast<std::size_t>(r.scanned_to) + 1, false);
    for (std::int64_t q = 2; q <= r.scanned_to; ++q) {
        if (composite[static_cast<std::size_t>(q)])
            continue;
        for (std::int64_t mlt = q * q; mlt <= r.scanned_to; mlt += q)
            composite[static_cast<std::size_t>(mlt)] = true;
        auto v = q_verdict(params.p, r.delta, q);
        if (v.member)
            r.members.push_back(q);
        r.verdicts.push_back(std::move(v));
    }
    return r;
}

} // namespace aspec
