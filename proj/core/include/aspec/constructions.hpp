#pragma once

/**
 * @file constructions.hpp
 * @brief Builders for the extremal examples and their closed-form laws.
 *
 * - cycle matrices C and the spectrum of D * C^k for det(D) = 1;
 * - tadpole matrices: the 2p x 2p direct sum of a head D * C^k and a tail
 *   diag(1, xi^(k + a_1 p), ..., xi^((p-1)k + a_(p-1) p)) with xi = e^(2 pi i / p^2),
 *   together with their product law and a sampler over the (infinite) group;
 * - Miller-Moreno generator pairs X, Y and the gap analysis showing why
 *   large q breaks the 1/(2n^2) argument bound;
 * - the rank-one semigroup S_r of matrices lambda * (1 x^*; y y x^*);
 * - the finite prime sets Q(p).
 */

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "aspec/circle.hpp"
#include "aspec/linalg.hpp"
#include "aspec/measure.hpp"
#include "aspec/random.hpp"

namespace aspec {

bool is_prime(std::int64_t n);

/// The p x p cycle matrix: ones on the superdiagonal and at (p, 1).
/// Throws InvalidParams for p < 2.
UMatrix cycle_matrix(std::int64_t p);

/// sigma(D C^k) for det(D) = 1: sigma(D) when p | k, else all p-th roots of
/// unity.  Approximate weights pass the determinant check within
/// `tolerance`.  Throws DeterminantNotOne, InvalidParams.
Spectrum spectrum_dck(std::span<const UnitPoint> weights, std::int64_t k, std::int64_t p,
                      double tolerance = kAngleTolerance);

/// Sum of angles mod 1, i.e. the angle of det(D).
UnitPoint determinant(std::span<const UnitPoint> weights);

// --- tadpoles ------------------------------------------------------------------

struct TadpoleParams {
    std::int64_t p = 3;
    std::vector<UnitPoint> weights;     // diagonal of D, det(D) = 1
    std::int64_t shift = 0;             // k in [0, p-1]
    std::vector<std::int64_t> offsets;  // a_1..a_(p-1) in [0, p-1]

    bool operator==(const TadpoleParams&) const = default;
};

/// Throws InvalidParams.
void validate(const TadpoleParams& t, double tolerance = kAngleTolerance);
TadpoleParams tadpole_identity(std::int64_t p);
/// Tail angles: entry 0 is 1, entry j is xi^(j k + a_j p).
std::vector<UnitPoint> tadpole_tail(const TadpoleParams& t);
/// BlockDiag(MonomialCycle head, Diagonal tail).  Throws InvalidParams.
UMatrix tadpole(const TadpoleParams& t);

/// Closed-form product: shift (k + l) mod p; tail offsets
/// c_j = a_j + b_j + j * [k + l >= p] (mod p); weights D_A * (C^k D_B C^-k).
/// Throws PrimeMismatch.
TadpoleParams tadpole_mul(const TadpoleParams& a, const TadpoleParams& b);
TadpoleParams tadpole_inverse(const TadpoleParams& t);

/// Case split of a pair by which of A, B, AB have diagonal heads:
/// 1 both diagonal, 2 exactly one diagonal, 3 none of A, B, AB diagonal,
/// 4 A and B not diagonal but AB diagonal.
int tadpole_case(const TadpoleParams& a, const TadpoleParams& b);

struct TadpoleSampling {
    /// Rational weights with denominators up to `max_denominator`
    /// instead of uniform real angles.
    bool exact_weights = false;
    std::int64_t max_denominator = 60;
};

/// Uniform draw: weight angles i.i.d. on [0, 1) with the last one fixing
/// det(D) = 1; shift and offsets uniform.
TadpoleParams sample_tadpole(std::int64_t p, rnd::Engine& engine, const TadpoleSampling& how = {});
PairSampler tadpole_pair_sampler(std::int64_t p, const TadpoleSampling& how = {});

/// Case-4 pair whose product head is diag(e, ..., e, e^-(p-1)) with
/// e = e^(2 pi i / (2 p^2)): every eigenvalue but one sits half-way between
/// consecutive p^2-th roots.  Throws InvalidParams for k not in [1, p-1].
std::pair<TadpoleParams, TadpoleParams> tadpole_case4_witness(std::int64_t p, std::vector<UnitPoint> head_weights,
                                                              std::int64_t k);
/// Same, with a fixed exact det-1 head and k = 1.
std::pair<TadpoleParams, TadpoleParams> tadpole_case4_witness(std::int64_t p);

/// Generators of the finite tadpole subgroup whose weights are p^2-th roots
/// of unity: (I, k=1, a=0), (I, k=0, a=e_j) and (diag(xi, xi^-1, 1, ...), 0, 0).
std::vector<UMatrix> tadpole_root_generators(std::int64_t p);
/// Order of that subgroup counted from its parameterization: p^(2(p-1)) * p * p^(p-1).
std::uint64_t tadpole_root_group_order(std::int64_t p);

// --- Miller-Moreno pairs --------------------------------------------------------

struct MillerMorenoParams {
    std::int64_t p = 3;
    std::int64_t q = 7;
    /// m rows of p exponents e_ij: theta_ij = e^(2 pi i e_ij / q).
    std::vector<std::vector<std::int64_t>> theta_exponents;
    /// beta_1..beta_l; the first m scale the cycle blocks, the rest are
    /// trailing scalars.  Each has p-power order.
    std::vector<RationalAngle> betas;

    std::size_t blocks() const { return theta_exponents.size(); }
    std::size_t dim() const;
    bool operator==(const MillerMorenoParams&) const = default;
};

/// Throws InvalidParams.
void validate(const MillerMorenoParams& mm);
/// m = l = 1, beta_1 = 1, exponents (1, g, ..., g^(p-1)) mod q with g of
/// multiplicative order p.  Throws InvalidParams unless p, q are prime and
/// q = 1 mod p.
MillerMorenoParams default_miller_moreno(std::int64_t p, std::int64_t q);
/// (X, Y).  Throws InvalidParams.
std::pair<UMatrix, UMatrix> miller_moreno(const MillerMorenoParams& mm);

struct GapAnalysis {
    std::int64_t n = 0;
    std::int64_t m = 0;
    std::int64_t p = 0;
    std::int64_t q = 0;
    /// Largest |sigma(X^k Y) sigma(Y^-1)| over k in [1, q-1].
    std::size_t distinct_products = 0;
    /// n^2 - n - m p^2 + p + m p.
    std::int64_t count_bound = 0;
    std::int64_t n2_minus_1 = 0;
    /// Smallest widest gap of the product set over k.
    Rational widest_gap;
    RationalAngle midpoint;
    Rational midpoint_distance;
    RationalAngle nearest_q_root;
    /// First k in [1, q-1] with nearest_q_root in sigma(X^k), or 0 if none.
    std::int64_t witness_k = 0;
    /// Smallest distance from nearest_q_root to the product set over such k.
    Rational witness_distance;
    /// 1/(2(n^2-1)) - 1/q and 1/(2 n^2).
    Rational predicted_lower;
    Rational half_inverse_n2;
    /// Largest pair defect of (X^k Y, Y^-1) over k, and the k attaining it.
    Magnitude max_pair_defect;
    std::int64_t max_pair_defect_k = 0;
    bool product_set_constant = true;
};

GapAnalysis mm_gap_analysis(const MillerMorenoParams& mm);

// --- S_r ------------------------------------------------------------------------

struct SrParams {
    std::size_t n = 3;
    double r = 0.5;
    /// Fixed scalar; random modulus in [1/2, 2] and phase when empty.
    std::optional<std::complex<double>> lambda = std::complex<double>(1.0, 0.0);
};

/// lambda * (1; y)(1; x)^*, i.e. lambda * (1 x^*; y y x^*).
struct RankOneElement {
    std::complex<double> lambda{1.0, 0.0};
    ComplexVector x;
    ComplexVector y;

    GeneralMatrix matrix() const;
    /// lambda (1 + x^* y).
    std::complex<double> eigenvalue() const;
};

/// gamma = lambda mu (1 + a^* y)(1 + x^* b) for A = (lambda, a, b), B = (mu, x, y).
std::complex<double> sr_product_eigenvalue(const RankOneElement& a, const RankOneElement& b);
/// 4 r^2 / (1 - r^2)^2.
double sr_bound(double r);
/// Vectors uniform on the ball of radius 0.999 r.  Throws InvalidParams.
RankOneElement sr_sample(const SrParams& params, rnd::Engine& engine);

enum class SrEigen { ClosedForm, Numeric };
SubSampler sr_pair_sampler(const SrParams& params, SrEigen how = SrEigen::ClosedForm);

// --- Q(p) -----------------------------------------------------------------------

struct QSetParams {
    std::int64_t p = 3;
    Rational epsilon_p;
    /// 1/(2p) - epsilon_p.
    Rational delta() const;
};

struct QVerdict {
    std::int64_t q = 0;
    bool member = false;
    /// First k/q found inside an open interval around (2j+1)/(2p).
    std::optional<std::int64_t> witness_k;
    std::optional<std::int64_t> witness_j;
};

struct QSetResult {
    Rational delta;
    /// floor(1/(2 delta)); primes above it are never members.
    BigInt cutoff;
    /// Largest q examined: min(cutoff, q_max).
    std::int64_t scanned_to = 0;
    bool truncated = false;
    std::vector<std::int64_t> members;
    std::vector<QVerdict> verdicts;
};

/// Throws InvalidParams when p is not prime, epsilon_p is outside
/// (0, 1/(2p)), or the scan bound exceeds `kMaxQScan`.
QSetResult q_set(const QSetParams& params, std::optional<std::int64_t> q_max = std::nullopt);
QVerdict q_verdict(std::int64_t p, const Rational& delta, std::int64_t q);

inline constexpr std::int64_t kMaxQScan = 50'000'000;

} // namespace aspec
