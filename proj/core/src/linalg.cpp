#include "aspec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "aspec/errors.hpp"

namespace aspec {

namespace {

std::int64_t mod(std::int64_t a, std::int64_t m) { return ((a % m) + m) % m; }

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool all_exact(const std::vector<UnitPoint>& pts)
{
    return std::all_of(pts.begin(), pts.end(), [](const UnitPoint& p) { return p.is_exact(); });
}

// Diagonal, or MonomialCycle: both are D * C^k.
std::optional<MonomialCycle> as_cycle(const UMatrix& m)
{
    if (auto* d = std::get_if<Diagonal>(&m.variant()))
        return MonomialCycle{d->entries, 0};
    if (auto* c = std::get_if<MonomialCycle>(&m.variant()))
        return *c;
    return std::nullopt;
}

std::vector<std::size_t> partition_of(const BlockDiag& b)
{
    std::vector<std::size_t> dims;
    for (const auto& blk : b.blocks)
        dims.push_back(blk.dim());
    return dims;
}

// Splits a diagonal matrix (Diagonal or shift-0 cycle) along a block partition.
std::optional<std::vector<UMatrix>> split_diagonal(const UMatrix& m, const std::vector<std::size_t>& dims)
{
    auto cyc = as_cycle(m);
    if (!cyc || cyc->shift != 0)
        return std::nullopt;
    std::vector<UMatrix> out;
    std::size_t at = 0;
    for (std::size_t d : dims) {
        out.push_back(UMatrix::diagonal({cyc->weights.begin() + static_cast<std::ptrdiff_t>(at),
                                         cyc->weights.begin() + static_cast<std::ptrdiff_t>(at + d)}));
        at += d;
    }
    return out;
}

bool lost_exactness(const UMatrix& m)
{
    if (auto* d = std::get_if<Dense>(&m.variant()))
        return d->exactness_lost;
    return false;
}

bool dense_unitary(const UMatrix& m)
{
    if (auto* d = std::get_if<Dense>(&m.variant()))
        return d->unitary;
    return true;
}

UMatrix dense_product(const UMatrix& a, const UMatrix& b)
{
    return UMatrix::dense(Dense{a.to_dense() * b.to_dense(), dense_unitary(a) && dense_unitary(b),
                                (a.is_exact() && b.is_exact()) || lost_exactness(a) || lost_exactness(b)});
}

} // namespace

// --- construction ------------------------------------------------------------

UMatrix UMatrix::dense(ComplexMatrix entries, bool unitary)
{
    return dense(Dense{std::move(entries), unitary, false});
}

UMatrix UMatrix::dense(Dense d)
{
    if (d.entries.rows() == 0 || d.entries.rows() != d.entries.cols())
        throw DimensionMismatch("dense matrix must be square and nonempty");
    auto n = static_cast<std::size_t>(d.entries.rows());
    return UMatrix(std::move(d), n);
}

UMatrix UMatrix::diagonal(std::vector<UnitPoint> entries)
{
    if (entries.empty())
        throw InvalidParams("diagonal matrix needs at least one entry");
    auto n = entries.size();
    return UMatrix(Diagonal{std::move(entries)}, n);
}

UMatrix UMatrix::monomial_cycle(std::vector<UnitPoint> weights, std::int64_t shift)
{
    if (weights.empty())
        throw InvalidParams("cycle matrix needs at least one weight");
    auto n = weights.size();
    std::int64_t k = mod(shift, static_cast<std::int64_t>(n));
    return UMatrix(MonomialCycle{std::move(weights), k}, n);
}

UMatrix UMatrix::block_diag(std::vector<UMatrix> blocks)
{
    std::vector<UMatrix> flat;
    for (auto& b : blocks) {
        if (auto* inner = std::get_if<BlockDiag>(&b.value_))
            flat.insert(flat.end(), inner->blocks.begin(), inner->blocks.end());
        else
            flat.push_back(std::move(b));
    }
    if (flat.empty())
        throw InvalidParams("block-diagonal matrix needs at least one block");
    if (flat.size() == 1)
        return flat.front();
    std::size_t n = 0;
    for (const auto& b : flat)
        n += b.dim();
    return UMatrix(BlockDiag{std::move(flat)}, n);
}

UMatrix UMatrix::identity(std::size_t n)
{
    if (n == 0)
        throw InvalidParams("identity needs positive dimension");
    return UMatrix(Diagonal{std::vector<UnitPoint>(n)}, n);
}

// --- queries -----------------------------------------------------------------

bool UMatrix::is_structured() const
{
    return std::visit(overloaded{
                          [](const Dense&) { return false; },
                          [](const Diagonal&) { return true; },
                          [](const MonomialCycle&) { return true; },
                          [](const BlockDiag& b) {
                              return std::all_of(b.blocks.begin(), b.blocks.end(),
                                                 [](const UMatrix& m) { return m.is_structured(); });
                          },
                      },
                      value_);
}

bool UMatrix::is_exact() const
{
    return std::visit(overloaded{
                          [](const Dense&) { return false; },
                          [](const Diagonal& d) { return all_exact(d.entries); },
                          [](const MonomialCycle& c) { return all_exact(c.weights); },
                          [](const BlockDiag& b) {
                              return std::all_of(b.blocks.begin(), b.blocks.end(),
                                                 [](const UMatrix& m) { return m.is_exact(); });
                          },
                      },
                      value_);
}

bool UMatrix::is_diagonal() const
{
    return std::visit(overloaded{
                          [](const Dense& d) {
                              const auto& m = d.entries;
                              for (Eigen::Index i = 0; i < m.rows(); ++i)
                                  for (Eigen::Index j = 0; j < m.cols(); ++j)
                                      if (i != j && std::abs(m(i, j)) > 1e-12)
                                          return false;
                              return true;
                          },
                          [](const Diagonal&) { return true; },
                          [](const MonomialCycle& c) { return c.shift == 0; },
                          [](const BlockDiag& b) {
                              return std::all_of(b.blocks.begin(), b.blocks.end(),
                                                 [](const UMatrix& m) { return m.is_diagonal(); });
                          },
                      },
                      value_);
}

std::optional<std::vector<MonomialEntry>> UMatrix::monomial_form() const
{
    return std::visit(
        overloaded{
            [](const Dense&) -> std::optional<std::vector<MonomialEntry>> { return std::nullopt; },
            [](const Diagonal& d) -> std::optional<std::vector<MonomialEntry>> {
                std::vector<MonomialEntry> rows;
                for (std::size_t i = 0; i < d.entries.size(); ++i)
                    rows.push_back({i, d.entries[i]});
                return rows;
            },
            [](const MonomialCycle& c) -> std::optional<std::vector<MonomialEntry>> {
                std::vector<MonomialEntry> rows;
                auto p = c.weights.size();
                for (std::size_t i = 0; i < p; ++i)
                    rows.push_back({(i + static_cast<std::size_t>(c.shift)) % p, c.weights[i]});
                return rows;
            },
            [](const BlockDiag& b) -> std::optional<std::vector<MonomialEntry>> {
                std::vector<MonomialEntry> rows;
                std::size_t offset = 0;
                for (const auto& blk : b.blocks) {
                    auto inner = blk.monomial_form();
                    if (!inner)
                        return std::nullopt;
                    for (auto& e : *inner)
                        rows.push_back({e.col + offset, std::move(e.value)});
                    offset += blk.dim();
                }
                return rows;
            },
        },
        value_);
}

ComplexMatrix UMatrix::to_dense() const
{
    if (auto* d = std::get_if<Dense>(&value_))
        return d->entries;
    if (auto* b = std::get_if<BlockDiag>(&value_)) {
        auto n = static_cast<Eigen::Index>(dim_);
        ComplexMatrix m = ComplexMatrix::Zero(n, n);
        Eigen::Index at = 0;
        for (const auto& blk : b->blocks) {
            auto d = static_cast<Eigen::Index>(blk.dim());
            m.block(at, at, d, d) = blk.to_dense();
            at += d;
        }
        return m;
    }
    auto rows = *monomial_form();
    auto n = static_cast<Eigen::Index>(dim_);
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (std::size_t i = 0; i < rows.size(); ++i)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(rows[i].col)) = rows[i].value.to_complex();
    return m;
}

UMatrix UMatrix::inverse() const
{
    return std::visit(overloaded{
                          [](const Dense& d) {
                              if (d.unitary)
                                  return UMatrix::dense(d.entries.adjoint(), true);
                              return UMatrix::dense(d.entries.inverse(), false);
                          },
                          [](const Diagonal& d) {
                              std::vector<UnitPoint> inv;
                              for (const auto& e : d.entries)
                                  inv.push_back(e.inverse());
                              return UMatrix::diagonal(std::move(inv));
                          },
                          [](const MonomialCycle& c) {
                              auto p = static_cast<std::int64_t>(c.weights.size());
                              std::vector<UnitPoint> inv(c.weights.size());
                              for (std::int64_t r = 0; r < p; ++r)
                                  inv[static_cast<std::size_t>(r)] =
                                      c.weights[static_cast<std::size_t>(mod(r - c.shift, p))].inverse();
                              return UMatrix::monomial_cycle(std::move(inv), p - c.shift);
                          },
                          [](const BlockDiag& b) {
                              std::vector<UMatrix> inv;
                              for (const auto& blk : b.blocks)
                                  inv.push_back(blk.inverse());
                              return UMatrix::block_diag(std::move(inv));
                          },
                      },
                      value_);
}

// --- products ----------------------------------------------------------------

UMatrix matmul(const UMatrix& a, const UMatrix& b)
{
    if (a.dim() != b.dim())
        throw DimensionMismatch("matmul: " + std::to_string(a.dim()) + "x" + std::to_string(a.dim()) + " times " +
                                std::to_string(b.dim()) + "x" + std::to_string(b.dim()));

    auto* ba = std::get_if<BlockDiag>(&a.variant());
    auto* bb = std::get_if<BlockDiag>(&b.variant());
    if (ba || bb) {
        std::vector<UMatrix> left;
        std::vector<UMatrix> right;
        if (ba && bb && partition_of(*ba) == partition_of(*bb)) {
            left = ba->blocks;
            right = bb->blocks;
        } else if (ba && !bb) {
            if (auto split = split_diagonal(b, partition_of(*ba))) {
                left = ba->blocks;
                right = std::move(*split);
            }
        } else if (bb && !ba) {
            if (auto split = split_diagonal(a, partition_of(*bb))) {
                left = std::move(*split);
                right = bb->blocks;
            }
        }
        if (left.empty())
            return dense_product(a, b);
        std::vector<UMatrix> out;
        out.reserve(left.size());
        for (std::size_t i = 0; i < left.size(); ++i)
            out.push_back(matmul(left[i], right[i]));
        return UMatrix::block_diag(std::move(out));
    }

    auto* da = std::get_if<Diagonal>(&a.variant());
    auto* db = std::get_if<Diagonal>(&b.variant());
    if (da && db) {
        std::vector<UnitPoint> out;
        out.reserve(da->entries.size());
        for (std::size_t i = 0; i < da->entries.size(); ++i)
            out.push_back(da->entries[i] * db->entries[i]);
        return UMatrix::diagonal(std::move(out));
    }

    auto ca = as_cycle(a);
    auto cb = as_cycle(b);
    if (ca && cb) {
        // (D_A C^k)(D_B C^l) = D_A (C^k D_B C^-k) C^(k+l); conjugation shifts D_B by k.
        auto p = ca->weights.size();
        std::vector<UnitPoint> w;
        w.reserve(p);
        for (std::size_t i = 0; i < p; ++i)
            w.push_back(ca->weights[i] * cb->weights[(i + static_cast<std::size_t>(ca->shift)) % p]);
        return UMatrix::monomial_cycle(std::move(w), ca->shift + cb->shift);
    }

    return dense_product(a, b);
}

UMatrix power(const UMatrix& a, std::int64_t k)
{
    UMatrix base = k < 0 ? a.inverse() : a;
    std::uint64_t e = k < 0 ? static_cast<std::uint64_t>(-k) : static_cast<std::uint64_t>(k);
    UMatrix result = UMatrix::identity(a.dim());
    while (e > 0) {
        if (e & 1U)
            result = result * base;
        e >>= 1U;
        if (e > 0)
            base = base * base;
    }
    return result;
}

// --- spectra -----------------------------------------------------------------

void sort_by_angle(std::vector<UnitPoint>& points)
{
    std::stable_sort(points.begin(), points.end(), [](const UnitPoint& x, const UnitPoint& y) {
        auto* ex = x.exact_angle();
        auto* ey = y.exact_angle();
        if (ex && ey)
            return *ex < *ey;
        return x.turns() < y.turns();
    });
}

std::vector<UnitPoint> distinct_points(std::vector<UnitPoint> points)
{
    sort_by_angle(points);
    std::vector<UnitPoint> out;
    for (auto& p : points) {
        if (!out.empty() && p.is_exact() && out.back().is_exact() && *p.exact_angle() == *out.back().exact_angle())
            continue;
        out.push_back(std::move(p));
    }
    return out;
}

namespace {

void cycle_spectrum(const MonomialCycle& c, std::vector<UnitPoint>& out)
{
    auto p = static_cast<std::int64_t>(c.weights.size());
    if (c.shift == 0) {
        out.insert(out.end(), c.weights.begin(), c.weights.end());
        return;
    }
    std::int64_t g = std::gcd(c.shift, p);
    std::int64_t len = p / g;
    for (std::int64_t s = 0; s < g; ++s) {
        UnitPoint prod;
        for (std::int64_t t = 0; t < len; ++t)
            prod = prod * c.weights[static_cast<std::size_t>(mod(s + t * c.shift, p))];
        if (auto* e = prod.exact_angle()) {
            for (std::int64_t j = 0; j < len; ++j)
                out.emplace_back(e->nth_root(len, j));
        } else {
            double base = prod.turns();
            double unc = prod.uncertainty() / static_cast<double>(len);
            for (std::int64_t j = 0; j < len; ++j)
                out.push_back(UnitPoint::approx((base + static_cast<double>(j)) / static_cast<double>(len), unc));
        }
    }
}

void collect_spectrum(const UMatrix& a, double tol, std::vector<UnitPoint>& out)
{
    std::visit(overloaded{
                   [&](const Dense& d) {
                       double defect = unitarity_defect(d.entries);
                       if (defect > tol)
                           throw NonUnitary("matrix fails the unitarity check (defect " + std::to_string(defect) +
                                            ")");
                       auto eig = eigensolve_dense(d.entries);
                       for (const auto& z : eig.values) {
                           double unc = eig.error_bound + std::abs(1.0 - std::abs(z));
                           out.push_back(UnitPoint::from_complex(z, unc));
                       }
                   },
                   [&](const Diagonal& d) { out.insert(out.end(), d.entries.begin(), d.entries.end()); },
                   [&](const MonomialCycle& c) { cycle_spectrum(c, out); },
                   [&](const BlockDiag& b) {
                       for (const auto& blk : b.blocks)
                           collect_spectrum(blk, tol, out);
                   },
               },
               a.variant());
}

} // namespace

Spectrum spectrum(const UMatrix& a, double unitarity_tolerance)
{
    Spectrum s;
    s.dim = a.dim();
    s.points.reserve(a.dim());
    collect_spectrum(a, unitarity_tolerance, s.points);
    s.exact = all_exact(s.points);
    sort_by_angle(s.points);
    return s;
}

double multiset_distance(std::vector<UnitPoint> a, std::vector<UnitPoint> b)
{
    if (a.size() != b.size())
        throw DimensionMismatch("multisets differ in size");
    if (a.empty())
        return 0.0;
    sort_by_angle(a);
    sort_by_angle(b);
    auto n = a.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < n; ++s) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n && worst < best; ++i)
            worst = std::max(worst, arg_distance(a[i], b[(i + s) % n]).value);
        best = std::min(best, worst);
    }
    return best;
}

double unitarity_defect(const ComplexMatrix& a)
{
    ComplexMatrix g = a.adjoint() * a - ComplexMatrix::Identity(a.rows(), a.cols());
    return g.cwiseAbs().maxCoeff();
}

EigenResult eigensolve_dense(const ComplexMatrix& a)
{
    if (a.rows() == 0 || a.rows() != a.cols())
        throw DimensionMismatch("eigensolve needs a nonempty square matrix");
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(a, true);
    if (solver.info() != Eigen::Success)
        throw ConvergenceFailure("complex eigensolver did not converge");

    EigenResult r;
    const auto& vals = solver.eigenvalues();
    const auto& vecs = solver.eigenvectors();
    double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    double bound = 0.0;
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        ComplexVector v = vecs.col(i);
        double nv = v.norm();
        if (nv > 0.0)
            bound = std::max(bound, (a * v - vals(i) * v).norm() / nv);
        r.values.push_back(vals(i));
    }
    r.error_bound = bound + 4.0 * static_cast<double>(a.rows()) * std::numeric_limits<double>::epsilon() * scale;

    auto angle = [](std::complex<double> z) {
        if (z == std::complex<double>(0.0, 0.0))
            return 0.0;
        double t = std::arg(z) / (2.0 * std::numbers::pi);
        t -= std::floor(t);
        return t >= 1.0 ? 0.0 : t;
    };
    std::stable_sort(r.values.begin(), r.values.end(), [&](auto x, auto y) {
        double ax = angle(x);
        double ay = angle(y);
        if (ax != ay)
            return ax < ay;
        return std::abs(x) < std::abs(y);
    });
    return r;
}

GeneralMatrix matmul(const GeneralMatrix& a, const GeneralMatrix& b)
{
    if (a.entries.cols() != b.entries.rows())
        throw DimensionMismatch("matmul: incompatible general matrices");
    return GeneralMatrix{a.entries * b.entries};
}

double spectral_radius(const GeneralMatrix& a)
{
    auto eig = eigensolve_dense(a.entries);
    double rho = 0.0;
    for (const auto& z : eig.values)
        rho = std::max(rho, std::abs(z));
    return rho;
}

} // namespace aspec
