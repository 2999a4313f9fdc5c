#pragma once

/**
 * @file measure.hpp
 * @brief Spectral defects of matrix pairs and the tightest epsilon of a group.
 *
 * For a pair (A, B) the argument defect is
 *
 *     max over gamma in sigma(AB) of  min over alpha in sigma(A), beta in sigma(B)
 *         of arg_distance(alpha * beta, gamma),
 *
 * and the group's epsilon* is the largest pair defect over ordered pairs.
 * Spectra are used as sets; multiplicities do not change a max-min.
 *
 * The chord variant divides |gamma - alpha beta| by rho(A) rho(B) and is
 * what the non-unitary semigroup path measures.  There only nonzero
 * eigenvalues take part (each rank-one element has a single one), and
 * reports carry a note saying so.
 */

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aspec/circle.hpp"
#include "aspec/groups.hpp"
#include "aspec/linalg.hpp"
#include "aspec/random.hpp"

namespace aspec {

struct PairDefect {
    Magnitude asm_defect;     // turns
    double sub_defect = 0.0;  // |gamma - alpha beta|, unitary so rho = 1
    UnitPoint gamma;
    UnitPoint alpha;
    UnitPoint beta;
    bool exact = false;
};

/// Throws InvalidParams on an empty spectrum.
PairDefect pair_defect(const Spectrum& a, const Spectrum& b, const Spectrum& ab);
PairDefect pair_defect(const UMatrix& a, const UMatrix& b);

struct SubPairDefect {
    double defect = 0.0;
    std::complex<double> gamma;
    std::complex<double> alpha;
    std::complex<double> beta;
};

inline constexpr double kZeroEigenvalueTolerance = 1e-9;

/// Chord defect over nonzero eigenvalues, normalized by rho_a * rho_b.
/// An eigenvalue counts as zero when its modulus is at most
/// `zero_tolerance` times the relevant spectral radius (or product).
/// Throws ZeroSpectralRadius.
SubPairDefect sub_pair_defect(std::span<const std::complex<double>> sigma_a,
                              std::span<const std::complex<double>> sigma_b,
                              std::span<const std::complex<double>> sigma_ab, double rho_a, double rho_b,
                              double zero_tolerance = kZeroEigenvalueTolerance);
/// Eigenvalues from the dense solver.
SubPairDefect sub_pair_defect(const GeneralMatrix& a, const GeneralMatrix& b);

enum class Metric { Asm, Sub };
enum class Mode { Exhaustive, Sampled };

struct Histogram {
    double upper = 0.5;
    std::vector<std::uint64_t> bins; // equal-width over [0, upper], upper in the last bin
    std::uint64_t overflow = 0;      // values > upper
    std::uint64_t zeros = 0;         // values exactly zero (also counted in bins[0])

    static Histogram make(double upper, std::size_t bin_count = 20);
    void add(double v);
    void merge(const Histogram& other);
    bool operator==(const Histogram&) const = default;
};

struct NamedSet {
    std::string name;
    std::vector<UnitPoint> points;
    bool operator==(const NamedSet&) const = default;
};

struct Witness {
    nlohmann::json first;  // {"index": i} for closures, parameters for samples
    nlohmann::json second;
    Magnitude defect;
    double sub_defect = 0.0;
    UnitPoint gamma;
    UnitPoint alpha;
    UnitPoint beta;
    /// Complex eigenvalues for the chord metric (gamma, alpha, beta).
    std::vector<std::complex<double>> values;
    /// sigma_A, sigma_B and their product set sigma_A_sigma_B.
    std::vector<NamedSet> sets;
    bool operator==(const Witness&) const = default;
};

struct PairRow {
    std::uint64_t index = 0;
    std::uint64_t first = 0;
    std::uint64_t second = 0;
    double defect = 0.0;
    std::string exact; // "num/den" or empty
};

struct AsmReport {
    std::string subject;
    Metric metric = Metric::Asm;
    Mode mode = Mode::Exhaustive;
    std::uint64_t pair_count = 0;
    std::optional<std::uint64_t> seed;
    std::uint64_t group_order = 0;
    bool complete = true;
    bool exact = true;
    /// Sampled runs and incomplete closures only bound epsilon* from below.
    bool lower_bound = false;
    Magnitude epsilon_star;
    std::optional<Witness> worst;
    Histogram histogram;
    std::vector<std::string> notes;
    /// Per-pair rows, only kept when requested; never serialized to JSON.
    std::vector<PairRow> pairs;

    bool operator==(const AsmReport& other) const;
};

struct MeasureOptions {
    unsigned workers = 1;
    bool record_pairs = false;
    /// Measure an incomplete closure over its enumerated elements (lower bound).
    bool allow_incomplete = false;
    std::size_t histogram_bins = 20;
};

/// Exhaustive epsilon* over all ordered pairs.  Throws IncompleteClosure
/// unless `allow_incomplete` is set.
AsmReport measure_asm(const GroupClosure& g, const MeasureOptions& options = {});

struct SampledPair {
    UMatrix a;
    UMatrix b;
    nlohmann::json first;
    nlohmann::json second;
};

/// Draws the pair with the given index; must only use the engine passed in.
using PairSampler = std::function<SampledPair(rnd::Engine&, std::uint64_t index)>;

/// Monte-Carlo lower bound.  Pair i draws from the engine of chunk
/// i / kSampleChunk, so results do not depend on the worker count.
AsmReport measure_asm_sampled(const PairSampler& sampler, std::uint64_t pair_count, std::uint64_t seed,
                              const MeasureOptions& options = {});

inline constexpr std::uint64_t kSampleChunk = 1024;

/// Eigen-data of one sampled pair for the chord metric.
struct SubSample {
    std::vector<std::complex<double>> sigma_a;
    std::vector<std::complex<double>> sigma_b;
    std::vector<std::complex<double>> sigma_ab;
    double rho_a = 0.0;
    double rho_b = 0.0;
    nlohmann::json first;
    nlohmann::json second;
};

using SubSampler = std::function<SubSample(rnd::Engine&, std::uint64_t index)>;

/// Exhaustive chord defect over all ordered pairs of the given elements.
AsmReport measure_sub(std::span<const GeneralMatrix> elements, const MeasureOptions& options = {});
AsmReport measure_sub_sampled(const SubSampler& sampler, std::uint64_t pair_count, std::uint64_t seed,
                              const MeasureOptions& options = {});

/// The two unit-circle conversions: an eps'-ASM unitary group is
/// (2 pi eps')-submultiplicative, and eps-submultiplicative gives (eps/2)-ASM.
struct ConversionBounds {
    double sub_bound = 0.0; // 2 pi * e
    double asm_bound = 0.0; // e / 2
};

/// Throws std::invalid_argument for negative input.
ConversionBounds conversion_check(double e);

} // namespace aspec
