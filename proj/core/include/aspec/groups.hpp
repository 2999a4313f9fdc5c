#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "aspec/linalg.hpp"

namespace aspec {

struct ClosureOptions {
    std::size_t max_elements = 100000;
    /// Grid used to round dense entries into canonical keys.
    double key_tolerance = 1e-7;
    bool build_cayley = false;
};

/// Canonical identity of a matrix.  Exact structured matrices are keyed by
/// their monomial rows and rational angles; anything else by entries
/// rounded to `tolerance`.
std::string canonical_key(const UMatrix& m, bool exact, double tolerance);

/**
 * Finite closure of a set of unitary generators.
 *
 * Elements are discovered breadth-first by word length, multiplying by the
 * generators on the right, starting from the identity (index 0).  When the
 * element budget runs out the closure is marked incomplete and everything
 * measured on it downstream is a lower bound.
 */
class GroupClosure {
public:
    const std::vector<UMatrix>& elements() const { return elements_; }
    const std::vector<UMatrix>& generators() const { return generators_; }
    std::size_t order() const { return elements_.size(); }
    bool complete() const { return complete_; }
    /// Keys are exact rational descriptions rather than rounded entries.
    bool exact_keys() const { return exact_keys_; }
    double key_tolerance() const { return tolerance_; }

    std::string key_of(const UMatrix& m) const { return canonical_key(m, exact_keys_, tolerance_); }
    std::optional<std::size_t> index_of(const UMatrix& m) const;

    /// Row-major |G| x |G| product table, when built.
    const std::optional<std::vector<std::uint32_t>>& cayley() const { return cayley_; }
    /// Throws IncompleteClosure.
    void build_cayley();
    /// Index of elements()[i] * elements()[j]; throws IncompleteClosure if
    /// the product falls outside an incomplete closure.
    std::size_t product_index(std::size_t i, std::size_t j) const;

private:
    friend GroupClosure close(std::vector<UMatrix> generators, const ClosureOptions& options);

    std::vector<UMatrix> elements_;
    std::vector<UMatrix> generators_;
    std::unordered_map<std::string, std::size_t> index_;
    std::optional<std::vector<std::uint32_t>> cayley_;
    bool complete_ = false;
    bool exact_keys_ = true;
    double tolerance_ = 1e-7;
};

/// Throws DimensionMismatch, NonUnitary, InvalidParams (no generators), and
/// ClosureRefused when a structured generator carries an approximate angle:
/// such generators typically generate infinite groups, which are measured by
/// sampling instead.
GroupClosure close(std::vector<UMatrix> generators, const ClosureOptions& options = {});

/// Indices of the elements commuting with every generator.  Throws IncompleteClosure.
std::vector<std::size_t> centre(const GroupClosure& g);
/// |G| / |Z(G)|.  Throws IncompleteClosure.
std::size_t quotient_order_mod_centre(const GroupClosure& g);

/// Burnside test: the algebra spanned by all products of `elements` is the
/// full matrix algebra M_dim(C).  Throws DimensionMismatch.
bool is_irreducible(std::span<const UMatrix> elements, std::size_t dim);

} // namespace aspec
