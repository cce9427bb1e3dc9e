#include <cmath>
#include <complex>
#include <vector>

#include <gtest/gtest.h>

#include <picklab/experiments.hpp>

#include "oracles.hpp"

using namespace picklab;

namespace
{

function_coefficients random_series(seeded_rng& rng, const weight_sequence& a, std::size_t degree)
{
    std::vector<complex> c(degree + 1);
    for (std::size_t n = 0; n <= degree; ++n)
    {
        // decaying coefficients so that the truncated series has moderate norm
        c[n] = complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) * std::sqrt(a[n]) /
               (1.0 + static_cast<double>(n));
    }
    const function_coefficients f(std::move(c));
    return f.scaled(1.0 / space_norm(f, a));
}

} // namespace

TEST(Grids, NestedRings)
{
    const auto g = nested_ring_grids(4);
    ASSERT_EQ(g.size(), 4u);
    const std::size_t sizes[] = {16, 48, 112, 240};
    for (std::size_t m = 0; m < 4; ++m)
    {
        EXPECT_EQ(g[m].nodes.size(), sizes[m]);
        EXPECT_EQ(g[m].id, "ring" + std::to_string(m + 1));
        EXPECT_DOUBLE_EQ(g[m].max_radius, 1.0 - std::ldexp(1.0, -static_cast<int>(m + 1)));
        if (m > 0)
        {
            for (std::size_t i = 0; i < g[m - 1].nodes.size(); ++i)
            {
                EXPECT_EQ(g[m].nodes[i], g[m - 1].nodes[i]);
            }
        }
    }
    EXPECT_NEAR(std::abs(g[3].nodes.back()), 15.0 / 16.0, 1e-15);
}

TEST(Probe, IdentityOnSzego)
{
    const diagonal_kernel k(szego_weights());
    const auto rep = mult_norm_lower_bounds(k, function_coefficients::monomial(1), nested_ring_grids(4));
    for (const auto& b : rep.bounds)
    {
        ASSERT_TRUE(b.lower_bound.has_value()) << b.error;
        EXPECT_NEAR(*b.lower_bound, 1.0, 1e-9);
    }
    EXPECT_EQ(rep.verdict, probe_verdict::bounded);
    EXPECT_DOUBLE_EQ(rep.space_norm, 1.0);
}

TEST(Probe, AgreesWithPickBisectionOnSmallGrids)
{
    seeded_rng rng(101);
    for (const auto& k : {diagonal_kernel(szego_weights()), diagonal_kernel(hs_weights(-1.0)),
                          diagonal_kernel(hs_weights(-2.0))})
    {
        for (int trial = 0; trial < 5; ++trial)
        {
            const auto f = random_series(rng, k.weights(), 6);
            node_grid g{"small", oracle::disc_points(rng, 5, 0.7), 1, 0.7};
            std::vector<complex> w;
            for (const auto& z : g.nodes)
            {
                w.push_back(f(z));
            }
            const auto rep = mult_norm_lower_bounds(k, f, {g});
            ASSERT_TRUE(rep.bounds[0].lower_bound.has_value()) << rep.bounds[0].error;
            EXPECT_EQ(rep.bounds[0].kept_nodes, 5);
            EXPECT_NEAR(*rep.bounds[0].lower_bound, multiplier_norm(k, g.nodes, w), 1e-9);
        }
    }
}

TEST(Probe, NonNestedGridsAndOutsideNodes)
{
    const diagonal_kernel k(szego_weights());
    const std::vector<node_grid> grids{{"a", {0.0, 0.5}, 1, 0.5},
                                       {"b", {0.5, 0.0}, 1, 0.5},
                                       {"c", {0.0, 1.0}, 1, 1.0}};
    const auto rep = mult_norm_lower_bounds(k, function_coefficients::monomial(1), grids);
    EXPECT_NEAR(*rep.bounds[0].lower_bound, 1.0, 1e-12);
    EXPECT_NEAR(*rep.bounds[1].lower_bound, 1.0, 1e-12);
    EXPECT_FALSE(rep.bounds[2].lower_bound.has_value());
    EXPECT_FALSE(rep.bounds[2].error.empty());
}

TEST(Probe, ConstantsHaveTheirModulus)
{
    const diagonal_kernel k(hs_weights(-1.0));
    const complex c(0.6, -0.8);
    const auto rep = mult_norm_lower_bounds(k, function_coefficients({c * 2.0}), nested_ring_grids(3));
    for (const auto& b : rep.bounds)
    {
        EXPECT_NEAR(*b.lower_bound, 2.0, 1e-9);
    }
    EXPECT_EQ(rep.verdict, probe_verdict::bounded);
}

TEST(Probe, BoundsDominateSupModulusAndIncrease)
{
    seeded_rng rng(83);
    const diagonal_kernel k(hs_weights(-1.0));
    const auto grids = nested_ring_grids(4);
    for (int trial = 0; trial < 4; ++trial)
    {
        const auto f   = random_series(rng, k.weights(), 10);
        const auto rep = mult_norm_lower_bounds(k, f, grids);
        double prev    = 0;
        for (const auto& b : rep.bounds)
        {
            ASSERT_TRUE(b.lower_bound.has_value()) << b.error;
            EXPECT_GE(*b.lower_bound, b.sup_modulus - 1e-9);
            EXPECT_GE(*b.lower_bound, prev - 1e-9);
            prev = *b.lower_bound;
        }
        EXPECT_LE(rep.max_decrease, 1e-9);
    }
}

TEST(Probe, ScaleEquivariance)
{
    seeded_rng rng(89);
    const diagonal_kernel k(hs_weights(-1.0));
    const auto grids  = nested_ring_grids(3);
    const auto f      = random_series(rng, k.weights(), 8);
    const complex lam(1.5, -2.0);
    const auto base   = mult_norm_lower_bounds(k, f, grids);
    const auto scaled = mult_norm_lower_bounds(k, f.scaled(lam), grids);
    for (std::size_t j = 0; j < grids.size(); ++j)
    {
        EXPECT_NEAR(*scaled.bounds[j].lower_bound, std::abs(lam) * *base.bounds[j].lower_bound,
                    1e-8 * std::abs(lam) * *base.bounds[j].lower_bound);
    }
}

TEST(Probe, SzegoUnitSupNormPolynomials)
{
    const diagonal_kernel k(szego_weights());
    const auto grids = nested_ring_grids(4);
    const std::vector<function_coefficients> fs{
        function_coefficients::monomial(3),
        function_coefficients({0.0, 0.5, 0.5}),
        function_coefficients({complex(0, 0.5), 0.0, 0.0, 0.0, 0.5}),
    };
    for (const auto& f : fs)
    {
        const auto rep = mult_norm_lower_bounds(k, f, grids);
        for (const auto& b : rep.bounds)
        {
            EXPECT_LE(*b.lower_bound, 1.0 + 1e-6);
        }
    }
}

TEST(Probe, HsMinusTwoRandomSeriesIsBounded)
{
    seeded_rng rng(97);
    const diagonal_kernel k(hs_weights(-2.0));
    const auto rep = mult_norm_lower_bounds(k, random_series(rng, k.weights(), 30), nested_ring_grids(4));
    EXPECT_EQ(rep.verdict, probe_verdict::bounded);
}

TEST(Probe, VerdictClassifier)
{
    probe_options o;
    EXPECT_EQ(detail::classify({1.0, 2.0, 4.0}, 1.0, o), probe_verdict::growing);
    EXPECT_EQ(detail::classify({1.0, 1.4, 2.0}, 1.0, o), probe_verdict::bounded);
    EXPECT_EQ(detail::classify({1.0, 1.4, 12.0}, 1.0, o), probe_verdict::inconclusive);
    EXPECT_EQ(detail::classify({}, 1.0, o), probe_verdict::inconclusive);
}

TEST(Salas, SzegoWeightsAreBoundedButFlagged)
{
    const std::vector<double> w(512, 1.0);
    const std::vector<labeled_function> fs{{"z", function_coefficients::monomial(1)},
                                           {"z^3", function_coefficients::monomial(3)}};
    const auto res = salas_probe(w, fs, nested_ring_grids(3));
    EXPECT_FALSE(res.diagnostics.summable);
    EXPECT_TRUE(res.diagnostics.kaluza);
    EXPECT_FALSE(res.any_growing);
    for (const auto& r : res.reports)
    {
        EXPECT_EQ(r.verdict, probe_verdict::bounded);
    }
    salas_options strict;
    strict.require_summable = true;
    EXPECT_THROW(salas_probe(w, fs, nested_ring_grids(1), strict), domain_error);
}

TEST(Salas, HsMinusTwoShiftWeights)
{
    std::vector<double> w(1024);
    for (std::size_t n = 0; n < w.size(); ++n)
    {
        w[n] = (n + 2.0) / (n + 1.0); // sqrt(a_n / a_{n+1}) for a_n = (n+1)^{-2}
    }
    const std::vector<labeled_function> fs{{"z", function_coefficients::monomial(1)},
                                           {"1+z^2", function_coefficients({1.0, 0.0, 1.0})}};
    const auto res = salas_probe(w, fs, nested_ring_grids(3));
    EXPECT_TRUE(res.diagnostics.summable);
    for (const auto& r : res.reports)
    {
        EXPECT_EQ(r.verdict, probe_verdict::bounded) << r.function_label;
    }
}

TEST(Salas, RejectsWeightsViolatingTheShape)
{
    const std::vector<labeled_function> fs{{"z", function_coefficients::monomial(1)}};
    EXPECT_THROW(salas_probe({1.0, 1.2, 1.1}, fs, nested_ring_grids(1)), domain_error);
    EXPECT_THROW(salas_probe({1.2, 1.1, 0.9}, fs, nested_ring_grids(1)), domain_error);
}

TEST(EquivalenceRatio, Examples)
{
    const auto grids = nested_ring_grids(3);
    const auto one   = hs_equivalence_ratio(-2.0, {{"1", function_coefficients({1.0})}}, grids);
    EXPECT_NEAR(one.value, 1.0, 1e-9);

    std::vector<labeled_function> monomials;
    for (std::size_t n = 0; n <= 20; ++n)
    {
        monomials.push_back({"z^" + std::to_string(n), function_coefficients::monomial(n)});
    }
    const auto mono = hs_equivalence_ratio(-2.0, monomials, grids);
    EXPECT_TRUE(std::isfinite(mono.value));
    ASSERT_EQ(mono.per_grid.size(), grids.size());
    for (double r : mono.per_grid)
    {
        EXPECT_GE(r, 1.0 - 1e-9);
        EXPECT_LE(r, mono.value);
    }
    EXPECT_THROW(hs_equivalence_ratio(-1.0, monomials, grids), domain_error);
}
