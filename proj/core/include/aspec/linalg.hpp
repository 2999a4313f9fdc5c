#pragma once

/**
 * @file linalg.hpp
 * @brief Structured unitary matrices and their spectra.
 *
 * A UMatrix is one of
 *  - Dense: arbitrary complex entries (numeric spectrum),
 *  - Diagonal: unit-circle entries,
 *  - MonomialCycle: D * C^k with D diagonal and C the cycle matrix
 *    (ones on the superdiagonal and in the bottom-left corner),
 *  - BlockDiag: a direct sum of the above.
 *
 * Products of structured matrices stay structured, and spectra of
 * structured matrices are computed in closed form: the cycle i -> i+k of
 * D * C^k with length L contributes the L-th roots of the product of the
 * weights along it.  With exact weights the spectrum is exact.
 */

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "aspec/circle.hpp"

namespace aspec {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kUnitarityTolerance = 1e-9;

struct Dense {
    ComplexMatrix entries;
    bool unitary = true;
    /// Set when the matrix is the materialized product of exact structured factors.
    bool exactness_lost = false;
};

struct Diagonal {
    std::vector<UnitPoint> entries;
};

/// D * C^shift, with `weights` the diagonal of D.
struct MonomialCycle {
    std::vector<UnitPoint> weights;
    std::int64_t shift = 0;
};

class UMatrix;

struct BlockDiag {
    std::vector<UMatrix> blocks;
};

/// One nonzero entry of a monomial row: the row has `value` in column `col`.
struct MonomialEntry {
    std::size_t col = 0;
    UnitPoint value;
};

class UMatrix {
public:
    using Variant = std::variant<Dense, Diagonal, MonomialCycle, BlockDiag>;

    UMatrix() : UMatrix(identity(1)) {}

    static UMatrix dense(ComplexMatrix entries, bool unitary = true);
    static UMatrix dense(Dense d);
    static UMatrix diagonal(std::vector<UnitPoint> entries);
    /// Throws InvalidParams for an empty weight list.
    static UMatrix monomial_cycle(std::vector<UnitPoint> weights, std::int64_t shift);
    /// Nested block lists are flattened; a single block collapses to itself.
    static UMatrix block_diag(std::vector<UMatrix> blocks);
    static UMatrix identity(std::size_t n);

    std::size_t dim() const { return dim_; }
    const Variant& variant() const { return value_; }

    bool is_structured() const;
    /// Structured, and every unit-circle entry is exact.
    bool is_exact() const;
    bool is_diagonal() const;

    /// Row-by-row monomial description; nullopt for Dense content.
    std::optional<std::vector<MonomialEntry>> monomial_form() const;
    ComplexMatrix to_dense() const;
    /// Structured inverse; conjugate transpose for dense unitary input.
    UMatrix inverse() const;

private:
    UMatrix(Variant v, std::size_t dim) : value_(std::move(v)), dim_(dim) {}

    Variant value_;
    std::size_t dim_ = 1;
};

/// Throws DimensionMismatch.
UMatrix matmul(const UMatrix& a, const UMatrix& b);
inline UMatrix operator*(const UMatrix& a, const UMatrix& b) { return matmul(a, b); }
UMatrix power(const UMatrix& a, std::int64_t k);

/// Eigenvalues with algebraic multiplicity, sorted by angle.
struct Spectrum {
    std::vector<UnitPoint> points;
    bool exact = true;
    std::size_t dim = 0;
};

/// Closed form for structured input, numeric eigensolver for Dense.
/// Throws NonUnitary when a dense input fails the unitarity check.
Spectrum spectrum(const UMatrix& a, double unitarity_tolerance = kUnitarityTolerance);

/// Angle-sorted copy with exact duplicates removed.
std::vector<UnitPoint> distinct_points(std::vector<UnitPoint> points);
void sort_by_angle(std::vector<UnitPoint>& points);

/// Smallest achievable maximum arc distance over cyclic alignments of the
/// two angle-sorted multisets.  Throws DimensionMismatch on size mismatch.
double multiset_distance(std::vector<UnitPoint> a, std::vector<UnitPoint> b);

struct EigenResult {
    std::vector<std::complex<double>> values; // sorted by angle, then modulus
    double error_bound = 0.0;                 // largest normalized residual
};

/// Throws ConvergenceFailure.
EigenResult eigensolve_dense(const ComplexMatrix& a);

double unitarity_defect(const ComplexMatrix& a);

/// Matrix used by the (non-unitary) semigroup path.
struct GeneralMatrix {
    ComplexMatrix entries;
};

GeneralMatrix matmul(const GeneralMatrix& a, const GeneralMatrix& b);
double spectral_radius(const GeneralMatrix& a);

} // namespace aspec
