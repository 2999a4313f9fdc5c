#include "aspec/groups.hpp"

#include <cmath>
#include <deque>

#include "aspec/errors.hpp"

namespace aspec {

std::string canonical_key(const UMatrix& m, bool exact, double tolerance)
{
    std::string key;
    if (exact) {
        if (auto rows = m.monomial_form(); rows && m.is_exact()) {
            key.reserve(rows->size() * 12);
            for (const auto& r : *rows) {
                key += std::to_string(r.col);
                key += ':';
                key += r.value.exact_angle()->str();
                key += ';';
            }
            return key;
        }
    }
    ComplexMatrix d = m.to_dense();
    key.reserve(static_cast<std::size_t>(d.size()) * 8);
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        for (Eigen::Index j = 0; j < d.cols(); ++j) {
            auto re = std::llround(d(i, j).real() / tolerance);
            auto im = std::llround(d(i, j).imag() / tolerance);
            key += std::to_string(re);
            key += ',';
            key += std::to_string(im);
            key += ';';
        }
    }
    return key;
}

std::optional<std::size_t> GroupClosure::index_of(const UMatrix& m) const
{
    if (m.dim() != elements_.front().dim())
        return std::nullopt;
    auto it = index_.find(key_of(m));
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

std::size_t GroupClosure::product_index(std::size_t i, std::size_t j) const
{
    if (cayley_)
        return (*cayley_)[i * elements_.size() + j];
    auto idx = index_of(elements_[i] * elements_[j]);
    if (!idx)
        throw IncompleteClosure("product leaves the enumerated elements");
    return *idx;
}

void GroupClosure::build_cayley()
{
    if (!complete_)
        throw IncompleteClosure("Cayley table needs a complete closure");
    auto n = elements_.size();
    std::vector<std::uint32_t> table(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            table[i * n + j] = static_cast<std::uint32_t>(product_index(i, j));
    cayley_ = std::move(table);
}

GroupClosure close(std::vector<UMatrix> generators, const ClosureOptions& options)
{
    if (generators.empty())
        throw InvalidParams("closure needs at least one generator");
    auto n = generators.front().dim();
    bool exact = true;
    for (const auto& g : generators) {
        if (g.dim() != n)
            throw DimensionMismatch("generators differ in dimension");
        if (g.is_structured()) {
            if (!g.is_exact())
                throw ClosureRefused("generator has an approximate angle; its closure is generally infinite");
        } else {
            exact = false;
            double defect = unitarity_defect(g.to_dense());
            if (defect > kUnitarityTolerance)
                throw NonUnitary("generator fails the unitarity check");
        }
    }

    GroupClosure G;
    G.generators_ = std::move(generators);
    G.exact_keys_ = exact;
    G.tolerance_ = options.key_tolerance;

    auto add = [&](UMatrix m) {
        G.index_.emplace(G.key_of(m), G.elements_.size());
        G.elements_.push_back(std::move(m));
    };
    add(UMatrix::identity(n));

    G.complete_ = true;
    for (std::size_t at = 0; at < G.elements_.size() && G.complete_; ++at) {
        for (const auto& gen : G.generators_) {
            UMatrix prod = G.elements_[at] * gen;
            if (G.index_.contains(G.key_of(prod)))
                continue;
            if (G.elements_.size() >= options.max_elements) {
                G.complete_ = false;
                break;
            }
            add(std::move(prod));
        }
    }
    if (options.build_cayley && G.complete_)
        G.build_cayley();
    return G;
}

std::vector<std::size_t> centre(const GroupClosure& g)
{
    if (!g.complete())
        throw IncompleteClosure("centre needs a complete closure");
    std::vector<std::size_t> out;
    const auto& els = g.elements();
    for (std::size_t i = 0; i < els.size(); ++i) {
        bool central = true;
        for (const auto& gen : g.generators()) {
            if (g.key_of(els[i] * gen) != g.key_of(gen * els[i])) {
                central = false;
                break;
            }
        }
        if (central)
            out.push_back(i);
    }
    return out;
}

std::size_t quotient_order_mod_centre(const GroupClosure& g) { return g.order() / centre(g).size(); }

bool is_irreducible(std::span<const UMatrix> elements, std::size_t dim)
{
    if (elements.empty())
        return false;
    auto n = static_cast<Eigen::Index>(dim);
    auto full = n * n;
    constexpr double kRankThreshold = 1e-8;

    std::vector<ComplexMatrix> gens;
    for (const auto& e : elements) {
        if (e.dim() != dim)
            throw DimensionMismatch("element dimension differs from the stated dimension");
        gens.push_back(e.to_dense());
    }

    // Orthonormal basis of the span, grown by Gram-Schmidt with one re-orthogonalization pass.
    ComplexMatrix basis(full, 0);
    std::deque<ComplexMatrix> pending;
    auto try_add = [&](const ComplexMatrix& m) {
        ComplexVector v = Eigen::Map<const ComplexVector>(m.data(), full);
        double norm0 = v.norm();
        if (norm0 == 0.0)
            return;
        for (int pass = 0; pass < 2 && basis.cols() > 0; ++pass)
            v -= basis * (basis.adjoint() * v);
        double norm = v.norm();
        if (norm <= kRankThreshold * norm0)
            return;
        basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
        basis.col(basis.cols() - 1) = v / norm;
        pending.push_back(m);
    };

    for (const auto& g : gens) {
        try_add(g);
        if (basis.cols() == full)
            return true;
    }
    while (!pending.empty() && basis.cols() < full) {
        ComplexMatrix m = pending.front();
        pending.pop_front();
        for (const auto& g : gens) {
            try_add(m * g);
            if (basis.cols() == full)
                break;
        }
    }
    return basis.cols() == full;
}

} // namespace aspec
