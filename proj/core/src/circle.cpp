#include "aspec/circle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace aspec {

namespace {

constexpr double kUlp = std::numeric_limits<double>::epsilon();

Rational frac(const Rational& r) { return r - floor(r); }

double wrap_turns(double t)
{
    double w = t - std::floor(t);
    return w >= 1.0 ? 0.0 : w;
}

// Signed difference reduced into [-1/2, 1/2].
double centered(double d) { return d - std::nearbyint(d); }

BigInt parse_int(const std::string& s)
{
    std::size_t start = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (start == s.size())
        throw std::invalid_argument("expected an integer, got '" + s + "'");
    for (std::size_t i = start; i < s.size(); ++i)
        if (s[i] < '0' || s[i] > '9')
            throw std::invalid_argument("expected an integer, got '" + s + "'");
    // cpp_int would read a leading 0 as octal.
    std::string digits = s.substr(start);
    digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
    BigInt v(digits);
    return s[0] == '-' ? BigInt(-v) : v;
}

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\n\r");
    auto e = s.find_last_not_of(" \t\n\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

} // namespace

Rational parse_rational(const std::string& text)
{
    std::string t = trim(text);
    auto slash = t.find('/');
    if (slash == std::string::npos)
        return Rational(parse_int(t));
    BigInt num = parse_int(trim(t.substr(0, slash)));
    BigInt den = parse_int(trim(t.substr(slash + 1)));
    if (den == 0)
        throw std::invalid_argument("zero denominator in '" + text + "'");
    return Rational(num, den);
}

std::string rational_string(const Rational& r)
{
    return numerator(r).str() + "/" + denominator(r).str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational floor(const Rational& r)
{
    BigInt n = numerator(r);
    BigInt d = denominator(r);
    BigInt q = n / d; // truncates toward zero
    if (n < 0 && q * d != n)
        q -= 1;
    return Rational(q);
}

// --- RationalAngle ---------------------------------------------------------

RationalAngle::RationalAngle(const Rational& turns) : value_(frac(turns)) {}

RationalAngle::RationalAngle(const BigInt& num, const BigInt& den)
{
    if (den <= 0)
        throw std::invalid_argument("angle denominator must be positive");
    value_ = frac(Rational(num, den));
}

RationalAngle RationalAngle::root(std::int64_t j, std::int64_t n)
{
    return RationalAngle(BigInt(j), BigInt(n));
}

RationalAngle RationalAngle::operator+(const RationalAngle& other) const
{
    return RationalAngle(value_ + other.value_);
}

RationalAngle RationalAngle::operator-(const RationalAngle& other) const
{
    return RationalAngle(value_ - other.value_);
}

RationalAngle RationalAngle::operator-() const { return RationalAngle(-value_); }

RationalAngle RationalAngle::times(const BigInt& k) const { return RationalAngle(value_ * Rational(k)); }

RationalAngle RationalAngle::nth_root(std::int64_t n, std::int64_t j) const
{
    if (n < 1)
        throw std::invalid_argument("root order must be positive");
    return RationalAngle((value_ + Rational(j)) / Rational(n));
}

// --- UnitPoint -------------------------------------------------------------

UnitPoint UnitPoint::approx(double turns, double uncertainty)
{
    if (!std::isfinite(turns))
        throw std::invalid_argument("angle must be finite");
    if (!(uncertainty >= 0.0))
        throw std::invalid_argument("angle uncertainty must be nonnegative");
    UnitPoint p;
    p.value_ = ApproxAngle{wrap_turns(turns), uncertainty};
    return p;
}

UnitPoint UnitPoint::from_complex(std::complex<double> z, double uncertainty)
{
    return approx(std::arg(z) / (2.0 * std::numbers::pi), uncertainty);
}

double UnitPoint::turns() const
{
    if (auto* e = exact_angle())
        return e->turns();
    return std::get<ApproxAngle>(value_).turns;
}

double UnitPoint::uncertainty() const
{
    if (is_exact())
        return 0.0;
    return std::get<ApproxAngle>(value_).uncertainty;
}

std::complex<double> UnitPoint::to_complex() const
{
    return std::polar(1.0, 2.0 * std::numbers::pi * turns());
}

UnitPoint UnitPoint::inverse() const
{
    if (auto* e = exact_angle())
        return UnitPoint(-*e);
    auto a = std::get<ApproxAngle>(value_);
    return approx(-a.turns, a.uncertainty);
}

std::string UnitPoint::str() const
{
    if (auto* e = exact_angle())
        return e->str();
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", turns());
    return buf;
}

UnitPoint mul(const UnitPoint& z, const UnitPoint& w)
{
    auto* ez = z.exact_angle();
    auto* ew = w.exact_angle();
    if (ez && ew)
        return UnitPoint(*ez + *ew);
    double unc = z.uncertainty() + w.uncertainty();
    if (ez || ew)
        unc += kUlp;
    return UnitPoint::approx(z.turns() + w.turns(), unc);
}

UnitPoint pow(const UnitPoint& z, std::int64_t k)
{
    if (auto* e = z.exact_angle())
        return UnitPoint(e->times(BigInt(k)));
    double m = std::abs(static_cast<double>(k));
    return UnitPoint::approx(z.turns() * static_cast<double>(k), z.uncertainty() * m + m * kUlp);
}

// --- Magnitude ---------------------------------------------------------------

Magnitude Magnitude::of(const Rational& r) { return Magnitude{to_double(r), 0.0, r}; }

Magnitude Magnitude::approx(double v, double uncertainty) { return Magnitude{v, uncertainty, std::nullopt}; }

int compare(const Magnitude& a, const Magnitude& b)
{
    if (a.exact && b.exact)
        return *a.exact < *b.exact ? -1 : (*a.exact == *b.exact ? 0 : 1);
    return a.value < b.value ? -1 : (a.value == b.value ? 0 : 1);
}

// --- distances ---------------------------------------------------------------

Magnitude arg_distance(const UnitPoint& z, const UnitPoint& w)
{
    auto* ez = z.exact_angle();
    auto* ew = w.exact_angle();
    if (ez && ew) {
        Rational d = (*ez - *ew).value();
        Rational other = Rational(1) - d;
        return Magnitude::of(d < other ? d : other);
    }
    double d = std::abs(centered(z.turns() - w.turns()));
    return Magnitude::approx(d, z.uncertainty() + w.uncertainty());
}

double chord_distance(const UnitPoint& z, const UnitPoint& w)
{
    return 2.0 * std::sin(std::numbers::pi * arg_distance(z, w).value);
}

bool coincide(const UnitPoint& z, const UnitPoint& w, double tolerance)
{
    auto* ez = z.exact_angle();
    auto* ew = w.exact_angle();
    if (ez && ew)
        return *ez == *ew;
    auto d = arg_distance(z, w);
    return d.value <= tolerance + d.uncertainty;
}

RationalAngle nearest_root_of_unity(const UnitPoint& z, std::int64_t q)
{
    if (q < 1)
        throw std::invalid_argument("root order must be at least 1");
    std::int64_t lo = 0;
    int cmp = 0; // sign of (fractional part - 1/2)
    if (auto* e = z.exact_angle()) {
        Rational x = e->value() * Rational(q);
        Rational f = floor(x);
        lo = numerator(f).convert_to<std::int64_t>();
        Rational rest = x - f;
        Rational half(1, 2);
        cmp = rest < half ? -1 : (rest == half ? 0 : 1);
    } else {
        double x = z.turns() * static_cast<double>(q);
        double f = std::floor(x);
        lo = static_cast<std::int64_t>(f);
        double rest = x - f;
        cmp = rest < 0.5 ? -1 : (rest == 0.5 ? 0 : 1);
    }
    lo %= q;
    std::int64_t hi = (lo + 1) % q;
    std::int64_t j = cmp < 0 ? lo : (cmp > 0 ? hi : std::min(lo, hi));
    return RationalAngle::root(j, q);
}

} // namespace aspec
