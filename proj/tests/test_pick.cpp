#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include <picklab/pick.hpp>

#include "oracles.hpp"

using namespace picklab;

namespace
{

const diagonal_kernel& szego()
{
    static const diagonal_kernel k(szego_weights());
    return k;
}

const diagonal_kernel& dirichlet()
{
    static const diagonal_kernel k(hs_weights(-1.0));
    return k;
}

std::vector<complex> cross_nodes()
{
    return {0.0, 0.5, -0.5, complex(0, 0.5), complex(0, -0.5)};
}

} // namespace

TEST(PickProblem, Validation)
{
    EXPECT_THROW(pick_problem(szego(), {}, {}), domain_error);
    EXPECT_THROW(pick_problem(szego(), {0.1, 0.1}, {0.0, 0.0}), domain_error);
    EXPECT_THROW(pick_problem(szego(), {0.1, 0.2}, {0.0}), domain_error);
    EXPECT_THROW(pick_problem(szego(), {1.5}, {0.0}), domain_error);
    EXPECT_THROW(pick_problem(szego(), {0.1}, {0.0}, 0.0), domain_error);
    EXPECT_THROW(pick_problem(szego(), {complex(NAN, 0)}, {0.0}), numeric_error);
}

TEST(PickMatrix, Entries)
{
    const pick_problem one(szego(), {0.3}, {0.0});
    EXPECT_NEAR(pick_matrix(one)(0, 0).real(), 1.0 / (1.0 - 0.09), 1e-14);

    const double r = 0.5, w = 0.25;
    const auto m   = pick_matrix(pick_problem(szego(), {0.0, r}, {0.0, w}));
    EXPECT_NEAR(std::abs(m(0, 0) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(m(0, 1) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(m(1, 1) - (1 - w * w) / (1 - r * r)), 0.0, 1e-14);

    const auto flat = pick_matrix(pick_problem(szego(), {0.1, 0.4}, {1.0, 1.0}));
    EXPECT_LE(flat.max_abs(), 1e-15);
}

TEST(PickMatrix, MatchesOracleGram)
{
    seeded_rng rng(9);
    const auto z = oracle::disc_points(rng, 6, 0.9);
    const auto w = oracle::disc_points(rng, 6, 1.0);
    const pick_problem p(dirichlet(), z, w, 1.3);
    const auto m = pick_matrix(p);
    for (std::size_t i = 0; i < z.size(); ++i)
    {
        for (std::size_t j = 0; j < z.size(); ++j)
        {
            const complex expect =
                oracle::dirichlet_kernel(z[i], z[j]) * (1.69 - w[i] * std::conj(w[j])) / 1.69;
            EXPECT_LE(std::abs(m(i, j) - expect), 1e-12 * std::abs(expect) + 1e-15);
        }
    }
}

TEST(PickSolvable, Examples)
{
    EXPECT_TRUE(pick_solvable(pick_problem(szego(), {0.0, 0.5}, {0.0, 0.25})));
    EXPECT_FALSE(pick_solvable(pick_problem(szego(), {0.0, 0.5}, {0.0, 0.6})));
    EXPECT_TRUE(pick_solvable(pick_problem(dirichlet(), {0.1, -0.3, 0.7}, {0.0, 0.0, 0.0})));
}

TEST(PickSolvable, MonotoneInBound)
{
    seeded_rng rng(31);
    for (int trial = 0; trial < 30; ++trial)
    {
        const auto z = oracle::disc_points(rng, 4, 0.8);
        const auto w = oracle::disc_points(rng, 4, 1.0);
        const pick_problem p(szego(), z, w);
        const double norm = multiplier_norm(szego(), z, w);
        bool seen         = false;
        for (double t = 0.05; t < 4.0 * norm + 1.0; t *= 1.3)
        {
            const bool ok = pick_solvable(p.with_bound(t));
            EXPECT_FALSE(seen && !ok) << "trial " << trial << " t " << t;
            seen = seen || ok;
        }
        EXPECT_TRUE(seen);
    }
}

TEST(MultiplierNorm, Examples)
{
    EXPECT_NEAR(multiplier_norm(szego(), {0.1, 0.5, -0.2}, {0.7, 0.7, 0.7}), 0.7, 1e-9);
    EXPECT_NEAR(multiplier_norm(dirichlet(), {0.1, 0.5}, {complex(0, 2), complex(0, 2)}), 2.0, 1e-9);
    EXPECT_NEAR(multiplier_norm(szego(), {0.0, 0.5}, {0.0, 0.25}), 0.5, 1e-9);
    EXPECT_NEAR(multiplier_norm(szego(), cross_nodes(), cross_nodes()), 1.0, 1e-9);
    EXPECT_EQ(multiplier_norm(szego(), {0.2, 0.4}, {0.0, 0.0}), 0.0);
}

TEST(MultiplierNorm, MatchesPencilOracle)
{
    seeded_rng rng(41);
    for (int trial = 0; trial < 40; ++trial)
    {
        const bool use_szego = trial % 2 == 0;
        const auto z         = oracle::disc_points(rng, 5, 0.7);
        const auto w         = oracle::disc_points(rng, 5, 1.0);
        const auto gram      = use_szego ? oracle::gram(oracle::szego_kernel, z)
                                         : oracle::gram(oracle::dirichlet_kernel, z);
        const double expect  = oracle::multiplier_norm_pencil(gram, w);
        const double got     = multiplier_norm(use_szego ? szego() : dirichlet(), z, w);
        EXPECT_NEAR(got, expect, 1e-8 * std::max(1.0, expect)) << "trial " << trial;
    }
}

TEST(MultiplierNorm, TwoPointSchwarz)
{
    seeded_rng rng(43);
    for (int trial = 0; trial < 50; ++trial)
    {
        const double r = rng.uniform(0.05, 0.95);
        const complex w(rng.uniform(-1, 1), rng.uniform(-1, 1));
        EXPECT_NEAR(multiplier_norm(szego(), {0.0, r}, {0.0, w}), std::abs(w) / r, 1e-9);
    }
}

TEST(MultiplierNorm, ScalingRestrictionAndFeasibility)
{
    seeded_rng rng(47);
    for (int trial = 0; trial < 20; ++trial)
    {
        const auto z = oracle::disc_points(rng, 6, 0.85);
        auto w       = oracle::disc_points(rng, 6, 1.0);
        const diagonal_kernel& k = trial % 2 ? szego() : dirichlet();
        const double base        = multiplier_norm(k, z, w);

        const complex lambda(rng.uniform(-3, 3), rng.uniform(-3, 3));
        std::vector<complex> scaled;
        for (const auto& x : w)
        {
            scaled.push_back(lambda * x);
        }
        EXPECT_NEAR(multiplier_norm(k, z, scaled), std::abs(lambda) * base,
                    1e-8 * std::max(1.0, std::abs(lambda) * base));

        const std::vector<complex> zs(z.begin(), z.begin() + 4), ws(w.begin(), w.begin() + 4);
        EXPECT_LE(multiplier_norm(k, zs, ws), base + 1e-9);

        const pick_problem p(k, z, w);
        EXPECT_TRUE(pick_solvable(p.with_bound(base * (1 + 1e-6))));
        EXPECT_FALSE(pick_solvable(p.with_bound(base * (1 - 1e-3))));
    }
}

TEST(MultiplierNorm, MobiusInvariance)
{
    seeded_rng rng(53);
    int tested = 0;
    for (int trial = 0; trial < 40; ++trial)
    {
        const diagonal_kernel& k = trial % 2 ? szego() : dirichlet();
        const auto z             = oracle::disc_points(rng, 5, 0.8);
        auto w                   = oracle::disc_points(rng, 5, 0.6);
        const double norm        = multiplier_norm(k, z, w);
        if (norm > 1.0)
        {
            for (auto& x : w)
            {
                x /= 1.05 * norm;
            }
        }
        ASSERT_TRUE(pick_solvable(pick_problem(k, z, w)));
        const complex a = oracle::disc_points(rng, 1, 0.9).front();
        std::vector<complex> image, back;
        for (const auto& x : w)
        {
            image.push_back(mobius(a, x));
        }
        for (const auto& x : image)
        {
            back.push_back(mobius(a, x));
        }
        EXPECT_TRUE(pick_solvable(pick_problem(k, z, image))) << trial;
        EXPECT_TRUE(pick_solvable(pick_problem(k, z, back))) << trial;
        for (std::size_t i = 0; i < w.size(); ++i)
        {
            EXPECT_NEAR(std::abs(back[i] - w[i]), 0.0, 1e-14);
        }
        ++tested;
    }
    EXPECT_EQ(tested, 40);
}

TEST(MaxModulus, Examples)
{
    EXPECT_TRUE(max_modulus_check(szego(), 0.3, 1.0, 0.5, 1.0));
    EXPECT_FALSE(max_modulus_check(szego(), 0.3, 1.0, 0.5, 0.9));
    EXPECT_FALSE(max_modulus_check(dirichlet(), 0.0, 1.0, 0.5, 0.5));
    EXPECT_THROW(max_modulus_check(szego(), 0.3, 0.5, 0.5, 0.5), domain_error);
}

TEST(MaxModulus, RandomUnimodular)
{
    seeded_rng rng(59);
    for (int trial = 0; trial < 50; ++trial)
    {
        const diagonal_kernel& k = trial % 2 ? szego() : dirichlet();
        const auto pts           = oracle::disc_points(rng, 2, 0.95);
        const complex u          = std::polar(1.0, rng.uniform(0, 2 * std::numbers::pi));
        complex lambda           = oracle::disc_points(rng, 1, 1.0).front();
        EXPECT_FALSE(max_modulus_check(k, pts[0], u, pts[1], lambda)) << trial;
        EXPECT_TRUE(max_modulus_check(k, pts[0], u, pts[1], u)) << trial;
    }
}

TEST(Cyclicity, Examples)
{
    const auto nodes = cross_nodes();
    const std::vector<complex> zero(nodes.size(), 0.0), one(nodes.size(), 1.0);
    EXPECT_TRUE(cyclicity_certificate(szego(), nodes, zero).cyclic());
    const auto z = cyclicity_certificate(szego(), nodes, nodes);
    EXPECT_TRUE(z.cyclic());
    EXPECT_FALSE(z.reason.empty());
    const auto refused = cyclicity_certificate(szego(), nodes, one);
    EXPECT_FALSE(refused.cyclic());
    EXPECT_NE(refused.reason.find("vanish"), std::string::npos);

    std::vector<complex> big(nodes);
    for (auto& x : big)
    {
        x *= 1.5;
    }
    EXPECT_FALSE(cyclicity_certificate(szego(), nodes, big).cyclic());
    EXPECT_FALSE(cyclicity_certificate(szego(), {0.1, 0.2}, {0.0, 0.0}).cyclic());
}

TEST(Gleason, Examples)
{
    const auto same = make_gleason_pair(szego(), 0.3, 0.3);
    EXPECT_EQ(same.d, 0.0);
    EXPECT_EQ(same.char_dist, 0.0);

    const auto s = make_gleason_pair(szego(), 0.0, 0.5);
    EXPECT_NEAR(s.d, 0.5, 1e-12);
    EXPECT_NEAR(s.d_extremal, 0.5, 1e-9);
    EXPECT_NEAR(s.char_dist, 4.0 - 2.0 * std::sqrt(3.0), 1e-10);

    const auto d = make_gleason_pair(dirichlet(), 0.0, 0.5);
    EXPECT_NEAR(d.d, std::sqrt(1.0 - 0.25 / -std::log(0.75)), 1e-12);
    EXPECT_NEAR(d.d, 0.36197, 1e-4);
    EXPECT_NEAR(d.d_extremal, d.d, 1e-8);

    EXPECT_TRUE(same_gleason_part(szego(), 0.2, 0.2));
    EXPECT_TRUE(same_gleason_part(szego(), 0.0, 0.99));
    EXPECT_THROW(make_gleason_pair(diagonal_kernel(hs_weights(1.0, 64)), 0.0, 0.5), domain_error);
}

TEST(Gleason, CharacterDistanceIsStableNearZero)
{
    for (double d : {1e-300, 1e-20, 1e-8, 0.1, 0.9, 1.0})
    {
        // (1 - sqrt(1 - d^2)) / d without the cancellation
        const double a = d / (1.0 + std::sqrt((1.0 - d) * (1.0 + d)));
        EXPECT_NEAR(character_distance(d), 2.0 * a, 1e-15 * (1.0 + a));
        if (d >= 0.1)
        {
            EXPECT_NEAR(character_distance(d), 2.0 * (1.0 - std::sqrt(1.0 - d * d)) / d, 1e-14);
        }
        EXPECT_GE(character_distance(d), 0.0);
        EXPECT_LE(character_distance(d), 2.0);
    }
    EXPECT_NEAR(character_distance(1e-20), 1e-20, 1e-35);
}

TEST(Gleason, SymmetryAndPseudoHyperbolic)
{
    seeded_rng rng(61);
    for (int trial = 0; trial < 40; ++trial)
    {
        const auto p = oracle::disc_points(rng, 2, 0.97);
        for (const auto* k : {&szego(), &dirichlet()})
        {
            const auto zw = make_gleason_pair(*k, p[0], p[1]);
            const auto wz = make_gleason_pair(*k, p[1], p[0]);
            EXPECT_NEAR(zw.d, wz.d, 1e-10);
            EXPECT_NEAR(zw.char_dist, wz.char_dist, 1e-10);
            EXPECT_NEAR(zw.d, zw.d_extremal, 1e-8);
        }
        EXPECT_NEAR(make_gleason_pair(szego(), p[0], p[1]).d, oracle::pseudo_hyperbolic(p[0], p[1]),
                    1e-10);
    }
}

TEST(Gleason, OpenDiscIsOnePart)
{
    seeded_rng rng(67);
    for (int trial = 0; trial < 20; ++trial)
    {
        const auto p = oracle::disc_points(rng, 3, 0.95);
        const diagonal_kernel& k = trial % 2 ? szego() : dirichlet();
        EXPECT_TRUE(same_gleason_part(k, p[0], p[0]));
        EXPECT_EQ(same_gleason_part(k, p[0], p[1]), same_gleason_part(k, p[1], p[0]));
        if (same_gleason_part(k, p[0], p[1]) && same_gleason_part(k, p[1], p[2]))
        {
            EXPECT_TRUE(same_gleason_part(k, p[0], p[2]));
        }
    }
}
