#pragma once

/**
 * @file circle.hpp
 * @brief Exact and approximate arithmetic on the complex unit circle.
 *
 * Points are measured in turns: the value x stands for e^{2 pi i x}.  An
 * exact point carries a reduced rational x in [0, 1); an approximate point
 * carries a double in [0, 1) together with an absolute uncertainty bound.
 * Multiplying points adds angles mod 1, so every root-of-unity computation in
 * the library stays in rational arithmetic until it meets an approximate
 * input.
 */

#include <compare>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include <boost/multiprecision/cpp_int.hpp>

namespace aspec {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Default absolute tolerance for comparisons that involve approximate angles.
inline constexpr double kAngleTolerance = 1e-9;

/// Parses "k", "k/N" or "-k/N" into a rational.  Throws std::invalid_argument.
Rational parse_rational(const std::string& text);
/// Renders as "num/den" ("0/1" for zero).
std::string rational_string(const Rational& r);
double to_double(const Rational& r);
Rational floor(const Rational& r);

/// The angle num/den of a full turn, reduced into [0, 1).
class RationalAngle {
public:
    RationalAngle() = default;
    explicit RationalAngle(const Rational& turns);
    RationalAngle(const BigInt& num, const BigInt& den);

    /// j/n, the j-th power of the primitive n-th root of unity.
    static RationalAngle root(std::int64_t j, std::int64_t n);

    const Rational& value() const { return value_; }
    BigInt num() const { return numerator(value_); }
    BigInt den() const { return denominator(value_); }
    double turns() const { return to_double(value_); }
    bool is_zero() const { return value_ == 0; }

    RationalAngle operator+(const RationalAngle& other) const;
    RationalAngle operator-(const RationalAngle& other) const;
    RationalAngle operator-() const;
    /// Angle of z^k.
    RationalAngle times(const BigInt& k) const;
    /// Angle of the j-th of the n distinct n-th roots of this point.
    RationalAngle nth_root(std::int64_t n, std::int64_t j) const;

    std::strong_ordering operator<=>(const RationalAngle& other) const
    {
        return value_ < other.value_ ? std::strong_ordering::less
               : value_ > other.value_ ? std::strong_ordering::greater
                                       : std::strong_ordering::equal;
    }
    bool operator==(const RationalAngle& other) const = default;

    std::string str() const { return rational_string(value_); }

private:
    Rational value_{0};
};

struct ApproxAngle {
    double turns = 0.0;       // in [0, 1)
    double uncertainty = 0.0; // absolute, in turns
    bool operator==(const ApproxAngle&) const = default;
};

/// A point on the unit circle, exact or approximate.
class UnitPoint {
public:
    UnitPoint() : value_(RationalAngle{}) {}
    UnitPoint(const RationalAngle& angle) : value_(angle) {} // NOLINT(google-explicit-constructor)

    static UnitPoint exact(const RationalAngle& angle) { return UnitPoint(angle); }
    static UnitPoint root(std::int64_t j, std::int64_t n) { return UnitPoint(RationalAngle::root(j, n)); }
    /// Wraps `turns` into [0, 1).  Throws std::invalid_argument for a
    /// non-finite angle or negative uncertainty.
    static UnitPoint approx(double turns, double uncertainty = 0.0);
    /// Projects a nonzero complex number onto the circle by its argument.
    static UnitPoint from_complex(std::complex<double> z, double uncertainty = 0.0);

    bool is_exact() const { return std::holds_alternative<RationalAngle>(value_); }
    const RationalAngle* exact_angle() const { return std::get_if<RationalAngle>(&value_); }
    const ApproxAngle* approx_angle() const { return std::get_if<ApproxAngle>(&value_); }

    double turns() const;
    double uncertainty() const;
    std::complex<double> to_complex() const;
    UnitPoint inverse() const;

    /// Structural identity (same representation), used for round-trips.
    bool operator==(const UnitPoint&) const = default;

    /// "k/N" for exact points, 17 significant digits otherwise.
    std::string str() const;

private:
    std::variant<RationalAngle, ApproxAngle> value_;
};

UnitPoint mul(const UnitPoint& z, const UnitPoint& w);
inline UnitPoint operator*(const UnitPoint& z, const UnitPoint& w) { return mul(z, w); }
UnitPoint pow(const UnitPoint& z, std::int64_t k);

/// A nonnegative real that is exact when it came out of exact inputs.
struct Magnitude {
    double value = 0.0;
    double uncertainty = 0.0;
    std::optional<Rational> exact;

    static Magnitude of(const Rational& r);
    static Magnitude approx(double v, double uncertainty = 0.0);

    bool is_exact() const { return exact.has_value(); }
    bool operator==(const Magnitude&) const = default;
};

/// Exact comparison when both sides are exact, double comparison otherwise.
int compare(const Magnitude& a, const Magnitude& b);

/// (1/2pi)|arg(z/w)| with arg in (-pi, pi]: the shorter arc in turns, in [0, 1/2].
Magnitude arg_distance(const UnitPoint& z, const UnitPoint& w);
/// |z - w| as complex numbers.
double chord_distance(const UnitPoint& z, const UnitPoint& w);
/// True when the points are equal: rationally if both exact, else within
/// `tolerance` plus the points' own uncertainty.
bool coincide(const UnitPoint& z, const UnitPoint& w, double tolerance = kAngleTolerance);

/// j/q minimizing the arc distance to z; ties go to the smaller exponent j.
/// Throws std::invalid_argument when q < 1.
RationalAngle nearest_root_of_unity(const UnitPoint& z, std::int64_t q);

} // namespace aspec
