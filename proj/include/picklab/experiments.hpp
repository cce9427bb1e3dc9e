///
/// \file experiments.hpp
///
/// Multiplier-norm lower bounds on nested grids. When Mult(H) = H the bounds
/// stay within a fixed multiple of ||f||_H; unbounded growth under
/// refinement is numerical evidence that f is not a multiplier.
///

#ifndef PICKLAB_EXPERIMENTS_HPP
#define PICKLAB_EXPERIMENTS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <picklab/decimal.hpp>
#include <picklab/errors.hpp>
#include <picklab/pick.hpp>
#include <picklab/series_kernel.hpp>

namespace picklab
{

struct node_grid
{
    std::string id;
    std::vector<complex> nodes;
    std::size_t rings = 0;
    double max_radius = 0;
};

//
// Grid m (m = 1..rings) is the union of the circles of radius 1 - 2^{-j}
// carrying 8 * 2^j equispaced points, j = 1..m. Consecutive grids are nested.
//
inline std::vector<node_grid> nested_ring_grids(std::size_t rings)
{
    std::vector<node_grid> grids;
    std::vector<complex> nodes;
    for (std::size_t j = 1; j <= rings; ++j)
    {
        const double radius     = 1.0 - std::ldexp(1.0, -static_cast<int>(j));
        const std::size_t count = 8u << j;
        for (std::size_t p = 0; p < count; ++p)
        {
            nodes.push_back(std::polar(radius, 2.0 * std::numbers::pi * static_cast<double>(p) /
                                                   static_cast<double>(count)));
        }
        grids.push_back({"ring" + std::to_string(j), nodes, j, radius});
    }
    return grids;
}

struct grid_bound
{
    std::string grid_id;
    std::size_t n_nodes = 0;
    std::optional<double> lower_bound; // empty when the computation failed
    double sup_modulus = 0;            // max |f| over the grid (trivial bound)
    index_t kept_nodes = 0;
    std::string error;
};

enum class probe_verdict
{
    bounded,
    growing,
    inconclusive,
};

inline const char* to_string(probe_verdict v)
{
    switch (v)
    {
    case probe_verdict::bounded:
        return "bounded";
    case probe_verdict::growing:
        return "growing";
    case probe_verdict::inconclusive:
        return "inconclusive";
    }
    return "inconclusive";
}

struct probe_options
{
    // Heuristic reporting thresholds, not theorems.
    double growth_factor = 1.5;
    double bound_cap     = 10.0;
    multiplier_norm_options norm;
};

struct probe_report
{
    weight_spec kernel;
    std::string function_label;
    function_coefficients function;
    std::vector<grid_bound> bounds;
    double space_norm = 0;
    probe_verdict verdict = probe_verdict::inconclusive;
    double max_decrease = 0; // largest drop of the bound under refinement

    std::optional<double> last_bound() const
    {
        for (auto it = bounds.rbegin(); it != bounds.rend(); ++it)
        {
            if (it->lower_bound)
            {
                return it->lower_bound;
            }
        }
        return std::nullopt;
    }
};

namespace detail
{

inline probe_verdict classify(const std::vector<double>& b, double norm, const probe_options& o)
{
    if (b.size() >= 3)
    {
        const std::size_t n = b.size();
        if (b[n - 2] >= o.growth_factor * b[n - 3] && b[n - 1] >= o.growth_factor * b[n - 2] &&
            b[n - 3] > 0)
        {
            return probe_verdict::growing;
        }
    }
    if (b.empty())
    {
        return probe_verdict::inconclusive;
    }
    const bool capped = std::all_of(b.begin(), b.end(), [&](double x) {
        return norm > 0 ? x / norm < o.bound_cap : x == 0;
    });
    return capped ? probe_verdict::bounded : probe_verdict::inconclusive;
}

} // namespace detail

//
// Orthonormal bases of span{k_z : z in grid} in the coordinates
// e_n = sqrt(a_n) z^n, truncated at a common degree. Nodes are absorbed in
// order, so a grid extending the previous one spans a prefix of its columns.
//
struct grid_basis
{
    struct entry
    {
        std::size_t chain = 0;
        index_t rank      = 0;
        std::string error; // nonempty when the basis is unavailable
    };

    std::size_t truncation = 0;
    std::vector<cmatrix> chains;
    std::vector<entry> grids;
};

namespace detail
{

// Smallest N with sum_{n>N} a_n r^{2n} below 2^-106 of k(r, r).
inline std::size_t feature_truncation(const diagonal_kernel& k, double radius)
{
    auto a                 = k.weights().coefficients();
    const std::size_t nmax = k.max_degree();
    const double r2        = radius * radius;
    if (r2 == 0.0)
    {
        return 0;
    }
    double sum = 1.0, power = 1.0, tail = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n <= nmax; ++n)
    {
        power *= r2;
        const double term = a[n] * power;
        sum += term;
        const double q = k.ratio_sup(n) * r2;
        tail = q < 1.0 ? term * q / (1.0 - q) : std::numeric_limits<double>::infinity();
        if (tail <= 0x1.0p-106 * sum)
        {
            return n;
        }
    }
    if (tail <= 0x1.0p-80 * sum)
    {
        return nmax;
    }
    throw evaluation_error("feature series not converged at degree " + std::to_string(nmax) +
                               " for radius " + format_exact(radius),
                           tail);
}

inline bool extends(const std::vector<complex>& longer, const std::vector<complex>& shorter)
{
    return longer.size() >= shorter.size() &&
           std::equal(shorter.begin(), shorter.end(), longer.begin());
}

} // namespace detail

//
// Features whose residual against the current span is below
// sqrt(rank_tol) of their norm are skipped.
//
inline grid_basis build_grid_basis(const diagonal_kernel& k, const std::vector<node_grid>& grids,
                                   double rank_tol = multiplier_norm_options{}.rank_tol)
{
    grid_basis out;
    out.grids.resize(grids.size());
    double radius = 0;
    std::vector<bool> inside(grids.size(), true);
    for (std::size_t g = 0; g < grids.size(); ++g)
    {
        for (const auto& z : grids[g].nodes)
        {
            if (!(std::abs(z) < 1.0))
            {
                inside[g]          = false;
                out.grids[g].error = "grid node outside the open unit disc";
                break;
            }
        }
        if (inside[g])
        {
            for (const auto& z : grids[g].nodes)
            {
                radius = std::max(radius, std::abs(z));
            }
        }
    }
    try
    {
        out.truncation = detail::feature_truncation(k, radius);
    }
    catch (const error& e)
    {
        for (auto& e2 : out.grids)
        {
            e2.error = e.what();
        }
        return out;
    }

    auto a              = k.weights().coefficients();
    const index_t dim   = static_cast<index_t>(out.truncation) + 1;
    const double keep   = std::sqrt(rank_tol);
    cvector sqrt_a(dim);
    for (index_t n = 0; n < dim; ++n)
    {
        sqrt_a(n) = std::sqrt(a[static_cast<std::size_t>(n)]);
    }

    cmatrix q;
    std::size_t absorbed = 0;
    const std::vector<complex>* previous = nullptr;
    for (std::size_t g = 0; g < grids.size(); ++g)
    {
        if (!inside[g])
        {
            previous = nullptr;
            continue;
        }
        const auto& nodes = grids[g].nodes;
        if (previous == nullptr || !detail::extends(nodes, *previous))
        {
            if (previous != nullptr)
            {
                out.chains.push_back(std::move(q));
            }
            q        = cmatrix(dim, 0);
            absorbed = 0;
        }
        for (; absorbed < nodes.size(); ++absorbed)
        {
            cvector v(dim);
            const complex zc = std::conj(nodes[absorbed]);
            complex p(1.0);
            for (index_t n = 0; n < dim; ++n)
            {
                v(n) = sqrt_a(n) * p;
                p *= zc;
            }
            const double norm0 = v.norm();
            for (int pass = 0; pass < 2 && q.cols() > 0; ++pass)
            {
                v -= q * (q.adjoint() * v);
            }
            const double rest = v.norm();
            if (rest >= keep * norm0)
            {
                q.conservativeResize(Eigen::NoChange, q.cols() + 1);
                q.col(q.cols() - 1) = v / rest;
            }
        }
        out.grids[g].chain = out.chains.size();
        out.grids[g].rank  = q.cols();
        previous           = &nodes;
    }
    out.chains.push_back(std::move(q));
    return out;
}

//
// Lower bound ||M_f^* restricted to span{k_z}|| on each grid, evaluated as
// the norm of the compression of M_f^* (a banded matrix in the e_n basis)
// applied to the grid basis. Nested grids give nondecreasing bounds.
//
inline probe_report mult_norm_lower_bounds(const diagonal_kernel& k,
                                           const function_coefficients& f,
                                           const std::vector<node_grid>& grids,
                                           const grid_basis& basis,
                                           const probe_options& opts = {},
                                           std::string label = "f")
{
    probe_report rep;
    rep.kernel         = k.weights().origin();
    rep.function_label = std::move(label);
    rep.function       = f;
    rep.space_norm     = space_norm(f, k.weights());

    auto a            = k.weights().coefficients();
    auto fhat         = f.coefficients();
    const index_t dim = static_cast<index_t>(basis.truncation) + 1;

    // Y = T_f^* Q and H = Y^* Y per chain; a grid reads a leading block of H
    std::vector<cmatrix> hs;
    for (const auto& q : basis.chains)
    {
        cmatrix y = cmatrix::Zero(dim, q.cols());
        for (std::size_t m = 0; m < fhat.size(); ++m)
        {
            if (fhat[m] == complex(0.0))
            {
                continue;
            }
            const complex c = std::conj(fhat[m]);
            for (index_t n = 0; n + static_cast<index_t>(m) < dim; ++n)
            {
                const auto nm = static_cast<std::size_t>(n) + m;
                y.row(n) += (c * std::sqrt(a[static_cast<std::size_t>(n)] / a[nm])) *
                            q.row(static_cast<index_t>(nm));
            }
        }
        hs.push_back(y.adjoint() * y);
    }

    std::vector<double> ok;
    for (std::size_t g = 0; g < grids.size(); ++g)
    {
        grid_bound gb;
        gb.grid_id = grids[g].id;
        gb.n_nodes = grids[g].nodes.size();
        for (const auto& z : grids[g].nodes)
        {
            gb.sup_modulus = std::max(gb.sup_modulus, std::abs(f(z)));
        }
        const auto& e = basis.grids.at(g);
        if (!e.error.empty())
        {
            gb.error = e.error;
        }
        else
        {
            gb.kept_nodes = e.rank;
            double value  = 0;
            if (e.rank > 0)
            {
                const cmatrix block = hs[e.chain].topLeftCorner(e.rank, e.rank);
                const Eigen::SelfAdjointEigenSolver<cmatrix> es(block, Eigen::EigenvaluesOnly);
                value = std::sqrt(std::max(0.0, es.eigenvalues()(e.rank - 1)));
            }
            if (!std::isfinite(value))
            {
                gb.error = "non-finite multiplier norm";
            }
            else
            {
                gb.lower_bound = value;
                if (!ok.empty())
                {
                    rep.max_decrease = std::max(rep.max_decrease, ok.back() - value);
                }
                ok.push_back(value);
            }
        }
        rep.bounds.push_back(std::move(gb));
    }
    rep.verdict = detail::classify(ok, rep.space_norm, opts);
    return rep;
}

inline probe_report mult_norm_lower_bounds(const diagonal_kernel& k,
                                           const function_coefficients& f,
                                           const std::vector<node_grid>& grids,
                                           const probe_options& opts = {},
                                           std::string label = "f")
{
    return mult_norm_lower_bounds(k, f, grids, build_grid_basis(k, grids, opts.norm.rank_tol), opts,
                                  std::move(label));
}

struct shift_weight_diagnostics
{
    bool nonincreasing = false; // w_n >= w_{n+1} - eps_mono
    bool limit_one     = false; // w_n >= 1 - eps_mono
    bool kaluza        = false;
    double tail_fraction = 0;   // share of sum a_n carried by the upper half of the stored terms
    bool summable      = false; // tail_fraction below the flatness threshold
};

inline shift_weight_diagnostics diagnose_shift_weights(const std::vector<double>& w,
                                                       double flatness = 1e-2)
{
    shift_weight_diagnostics d;
    d.nonincreasing = true;
    d.limit_one     = true;
    for (std::size_t n = 0; n < w.size(); ++n)
    {
        if (n + 1 < w.size() && w[n] < w[n + 1] - eps_monotone)
        {
            d.nonincreasing = false;
        }
        if (w[n] < 1.0 - eps_monotone)
        {
            d.limit_one = false;
        }
    }
    const weight_sequence a = shift_weights(w);
    d.kaluza                = kaluza_test(a, a.max_degree());
    double total = 0, tail = 0;
    const std::size_t half = a.size() / 2;
    for (std::size_t n = 0; n < a.size(); ++n)
    {
        total += a[n];
        if (n >= half)
        {
            tail += a[n];
        }
    }
    d.tail_fraction = tail / total;
    d.summable      = d.tail_fraction <= flatness;
    return d;
}

struct salas_options
{
    probe_options probe;
    double flatness        = 1e-2;
    bool require_summable  = false; // reject instead of flag when sum beta(n)^{-2} looks divergent
};

struct salas_result
{
    shift_weight_diagnostics diagnostics;
    std::vector<probe_report> reports;
    bool any_growing = false;
};

struct labeled_function
{
    std::string label;
    function_coefficients f;
};

//
// Probe for Salas-type spaces given by shift weights w_n decreasing to 1.
// Monotonicity and the limit are enforced (they give the complete Pick
// property through Kaluza's lemma); summability of beta(n)^{-2} is reported.
//
inline salas_result salas_probe(const std::vector<double>& w,
                                const std::vector<labeled_function>& candidates,
                                const std::vector<node_grid>& grids,
                                const salas_options& opts = {})
{
    salas_result out;
    out.diagnostics = diagnose_shift_weights(w, opts.flatness);
    if (!out.diagnostics.nonincreasing)
    {
        throw domain_error("shift weights rejected: w_n is not nonincreasing");
    }
    if (!out.diagnostics.limit_one)
    {
        throw domain_error("shift weights rejected: w_n drops below 1, so it cannot decrease to 1");
    }
    if (!out.diagnostics.kaluza)
    {
        throw domain_error("shift weights rejected: a_n / a_{n+1} fails the Kaluza test");
    }
    if (opts.require_summable && !out.diagnostics.summable)
    {
        throw domain_error("shift weights rejected: sum beta(n)^{-2} does not look convergent");
    }
    const diagonal_kernel k(shift_weights(w));
    const auto basis = build_grid_basis(k, grids, opts.probe.norm.rank_tol);
    for (const auto& c : candidates)
    {
        out.reports.push_back(mult_norm_lower_bounds(k, c.f, grids, basis, opts.probe, c.label));
        out.any_growing = out.any_growing || out.reports.back().verdict == probe_verdict::growing;
    }
    return out;
}

struct equivalence_ratio
{
    double value = 0;              // max over functions and grids of bound / ||f||
    std::vector<double> per_grid;  // max over functions, one entry per grid
    std::vector<probe_report> reports;
};

//
// Empirical constant C with ||f||_Mult <= C ||f||_H on H_s, s < -1, read off
// the grid lower bounds.
//
inline equivalence_ratio hs_equivalence_ratio(double s,
                                              const std::vector<labeled_function>& functions,
                                              const std::vector<node_grid>& grids,
                                              const probe_options& opts = {},
                                              std::size_t max_degree = default_max_degree)
{
    if (!(s < -1.0))
    {
        throw domain_error("hs_equivalence_ratio needs s < -1");
    }
    const diagonal_kernel k(hs_weights(s, max_degree));
    const auto basis = build_grid_basis(k, grids, opts.norm.rank_tol);
    equivalence_ratio out;
    out.per_grid.assign(grids.size(), 0.0);
    for (const auto& fn : functions)
    {
        auto rep = mult_norm_lower_bounds(k, fn.f, grids, basis, opts, fn.label);
        if (rep.space_norm > 0)
        {
            for (std::size_t j = 0; j < rep.bounds.size(); ++j)
            {
                if (rep.bounds[j].lower_bound)
                {
                    const double ratio = *rep.bounds[j].lower_bound / rep.space_norm;
                    out.per_grid[j]    = std::max(out.per_grid[j], ratio);
                    out.value          = std::max(out.value, ratio);
                }
            }
        }
        out.reports.push_back(std::move(rep));
    }
    return out;
}

} // namespace picklab

#endif /* PICKLAB_EXPERIMENTS_HPP */
