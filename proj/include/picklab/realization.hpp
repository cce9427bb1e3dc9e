///
/// \file realization.hpp
///
/// Constructive factorization f = phi / (1 - psi) with contractive multipliers
/// phi, psi and psi(0) = 0, built from finitely many samples of f.
///
/// The kernel is written as k(z,w) = 1 / (1 - <b(z), b(w)>) with
/// b(z) = (sqrt(c_n) z^n)_{n=1..N}. With Phi(z) = (1, f(z) b(z)) the matrix
/// Q = [k(z_i,z_j) - f_i conj(f_j)] is positive exactly when the samples
/// extend to some f of norm <= 1. Factoring Q = G G^* turns Q into the Gram
/// identity
///
///     Phi_i Phi_j^* + (G_i (x) b_i)(G_j (x) b_j)^* = f_i conj(f_j) + G_i G_j^*,
///
/// so the contraction V = [A B; C D] with V x_i = y_i, where
/// x_i = [Phi_i^*; (G_i (x) b_i)^*] and y_i = [conj(f_i); G_i^*], realizes a
/// contractive multiplier
///
///     Psi(z) = A^* + C^* (I - Z(z) D^*)^{-1} Z(z) B^*,   Z(z) = I_r (x) b(z),
///
/// with Phi(z_i) Psi(z_i) = f_i. Splitting Psi = (phi, Psi~) and setting
/// psi = b Psi~ gives f_i (1 - psi(z_i)) = phi(z_i).
///

#ifndef PICKLAB_REALIZATION_HPP
#define PICKLAB_REALIZATION_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include <picklab/decimal.hpp>
#include <picklab/errors.hpp>
#include <picklab/numerics.hpp>
#include <picklab/pick.hpp>
#include <picklab/series_kernel.hpp>

namespace picklab
{

/// The sampled data do not extend to a function of norm <= 1.
class norm_hypothesis_error : public contract_violation
{
public:
    using contract_violation::contract_violation;
};

/// The embedding truncation is too short for the Gram identity to hold.
class truncation_error : public contract_violation
{
public:
    truncation_error(const std::string& what, double defect)
        : contract_violation(what), m_defect(defect)
    {
    }

    double defect() const noexcept
    {
        return m_defect;
    }

private:
    double m_defect;
};

//
// Truncated embedding b(z) = (sqrt(c_n) z^n)_{n=1..N}.
//
class embedding
{
public:
    embedding(diagonal_kernel kernel, std::size_t n) : m_kernel(std::move(kernel)), m_n(n)
    {
        if (n > m_kernel.max_degree())
        {
            throw length_error("embedding truncation exceeds stored weights");
        }
        const auto cp = is_complete_pick(m_kernel, n);
        if (!cp.passed())
        {
            throw not_complete_pick_error("embedding: c_" + std::to_string(*cp.witness) +
                                              " is negative",
                                          *cp.witness);
        }
        auto c = m_kernel.embedding_coefficients();
        m_sqrt_c.resize(static_cast<index_t>(n));
        for (std::size_t m = 1; m <= n; ++m)
        {
            m_sqrt_c(static_cast<index_t>(m - 1)) = std::sqrt(std::max(0.0, c[m]));
        }
    }

    std::size_t size() const noexcept
    {
        return m_n;
    }

    const diagonal_kernel& kernel() const noexcept
    {
        return m_kernel;
    }

    /// Components sqrt(c_n) z^n, n = 1..N.
    cvector operator()(complex z) const
    {
        if (std::abs(z) > 1.0)
        {
            throw domain_error("embedding evaluated outside the closed disc");
        }
        cvector b(static_cast<index_t>(m_n));
        complex power = 1.0;
        for (index_t m = 0; m < b.size(); ++m)
        {
            power *= z;
            b(m) = m_sqrt_c(m) * power;
        }
        return b;
    }

    /// sum_{n > N} c_n r^{2n} over the stored coefficients.
    double tail_bound(double radius) const
    {
        auto c         = m_kernel.embedding_coefficients();
        const double x = radius * radius;
        double power   = std::pow(x, static_cast<double>(m_n));
        double s       = 0;
        for (std::size_t m = m_n + 1; m < c.size(); ++m)
        {
            power *= x;
            s += std::abs(c[m]) * power;
        }
        return s;
    }

private:
    diagonal_kernel m_kernel;
    std::size_t m_n;
    Eigen::VectorXd m_sqrt_c;
};

/// b(z) for the kernel truncated at degree n. Checks ||b(z)|| < 1.
inline cvector embed(const diagonal_kernel& k, complex z, std::size_t n)
{
    cvector b = embedding(k, n)(z);
    if (!(b.norm() < 1.0))
    {
        throw domain_error("embedding: ||b(z)|| >= 1");
    }
    return b;
}

//
// Blocks of the contraction V = [A B; C D] acting on C^{1+N} (+) C^{rN},
// with C^r (x) C^N indexed rank-major (rho * N + m).
//
struct colligation
{
    cmatrix a; // 1 x (1+N)
    cmatrix b; // 1 x rN
    cmatrix c; // r x (1+N)
    cmatrix d; // r x rN
    index_t rank = 0;
    std::size_t truncation = 0;
    cmatrix g; // n x r factor of Q
    std::vector<complex> nodes;
    std::vector<complex> values;
    double gram_defect = 0;
    double factor_residual = 0;

    cmatrix stacked() const
    {
        const index_t cols = a.cols() + b.cols();
        cmatrix v(1 + rank, cols);
        v.topLeftCorner(1, a.cols())         = a;
        v.topRightCorner(1, b.cols())        = b;
        v.bottomLeftCorner(rank, c.cols())   = c;
        v.bottomRightCorner(rank, d.cols())  = d;
        return v;
    }
};

struct colligation_options
{
    std::optional<std::size_t> truncation; // fixed N; adaptive when empty
    double truncation_target = 1e-18;     // relative Gram tail for adaptive N
    double gram_tol_per_node = 1e-9;      // eps_gram = gram_tol_per_node * n
    double factor_tol        = 1e-14;     // pivot threshold for Q = G G^*
    double psd_tol           = eps_psd;   // positivity test on Q
};

namespace detail
{

inline void check_open_disc_nodes(const std::vector<complex>& nodes)
{
    check_nodes(nodes);
    for (const auto& z : nodes)
    {
        if (!(std::abs(z) < 1.0))
        {
            throw domain_error("sample nodes must lie in the open disc");
        }
    }
}

//
// Smallest N such that sum_{m>N} c_m |z_i z_j|^m |(G G^*)_ij| <= target for
// every pair.
//
inline std::size_t choose_truncation(const diagonal_kernel& k,
                                     const std::vector<complex>& nodes, const cmatrix& ggs,
                                     double target)
{
    auto c                = k.embedding_coefficients();
    const std::size_t top = k.max_degree();
    std::size_t best      = 1;
    std::vector<double> terms(top + 1);
    for (std::size_t i = 0; i < nodes.size(); ++i)
    {
        for (std::size_t j = 0; j <= i; ++j)
        {
            const double rho    = std::abs(nodes[i]) * std::abs(nodes[j]);
            const double weight = std::abs(ggs(static_cast<index_t>(i), static_cast<index_t>(j)));
            if (rho == 0 || weight == 0)
            {
                continue;
            }
            double power = 1;
            for (std::size_t m = 1; m <= top; ++m)
            {
                power *= rho;
                terms[m] = std::abs(c[m]) * power * weight;
            }
            double suffix = 0;
            std::size_t n = top;
            while (n >= 1)
            {
                if (suffix + terms[n] > target)
                {
                    break;
                }
                suffix += terms[n];
                --n;
            }
            best = std::max(best, std::max<std::size_t>(n, 1));
        }
    }
    return std::min(best, top);
}

} // namespace detail

inline colligation build_colligation(const diagonal_kernel& k,
                                     const std::vector<complex>& nodes,
                                     const std::vector<complex>& values,
                                     const colligation_options& opts = {})
{
    if (nodes.empty() || nodes.size() != values.size())
    {
        throw domain_error("build_colligation: need matching, nonempty nodes and values");
    }
    detail::check_open_disc_nodes(nodes);
    for (const auto& f : values)
    {
        if (!std::isfinite(f.real()) || !std::isfinite(f.imag()))
        {
            throw numeric_error("build_colligation: non-finite sample value");
        }
    }
    const index_t n = static_cast<index_t>(nodes.size());

    const hermitian_matrix kmat = kernel_matrix(k, nodes);
    const hermitian_matrix q    = hermitian_matrix::generate(n, [&](index_t i, index_t j) {
        return kmat(i, j) - values[i] * std::conj(values[j]);
    });
    if (!psd_check(q, opts.psd_tol))
    {
        throw norm_hypothesis_error(
            "norm hypothesis violated at samples: [k(z_i,z_j) - f_i conj(f_j)] is not PSD");
    }
    factorization_result fac;
    try
    {
        fac = pivoted_cholesky_psd(q, opts.factor_tol);
    }
    catch (const not_psd_error& e)
    {
        throw norm_hypothesis_error(std::string("norm hypothesis violated at samples: ") +
                                    e.what());
    }

    colligation out;
    out.rank            = fac.rank;
    out.g               = fac.g;
    out.nodes           = nodes;
    out.values          = values;
    out.factor_residual = fac.residual;
    const index_t r     = fac.rank;

    const cmatrix ggs = fac.g * fac.g.adjoint();
    const double qscale = std::max(1.0, q.max_abs());
    const std::size_t big_n =
        opts.truncation ? *opts.truncation
                        : detail::choose_truncation(k, nodes, ggs, opts.truncation_target * qscale);
    if (big_n < 1)
    {
        throw domain_error("build_colligation: truncation must be at least 1");
    }
    out.truncation = big_n;
    const embedding emb(k, big_n);
    const index_t nn = static_cast<index_t>(big_n);

    const index_t in_dim  = 1 + nn + r * nn;
    const index_t out_dim = 1 + r;
    cmatrix x             = cmatrix::Zero(in_dim, n);
    cmatrix y             = cmatrix::Zero(out_dim, n);
    for (index_t i = 0; i < n; ++i)
    {
        const cvector bi = emb(nodes[i]);
        const complex fi = values[i];
        x(0, i)          = 1.0;
        x.block(1, i, nn, 1) = (fi * bi).conjugate();
        for (index_t rho = 0; rho < r; ++rho)
        {
            x.block(1 + nn + rho * nn, i, nn, 1) = (fac.g(i, rho) * bi).conjugate();
        }
        y(0, i) = std::conj(fi);
        for (index_t rho = 0; rho < r; ++rho)
        {
            y(1 + rho, i) = std::conj(fac.g(i, rho));
        }
    }

    const double gram_tol = opts.gram_tol_per_node * static_cast<double>(n);
    span_contraction_result sc;
    try
    {
        sc = span_contraction(x, y, gram_tol);
    }
    catch (const contract_violation& e)
    {
        const cmatrix defect = x.adjoint() * x - y.adjoint() * y;
        throw truncation_error(std::string("truncation too small at N = ") +
                                   std::to_string(big_n) + ": " + e.what(),
                               detail::max_abs(defect));
    }
    out.gram_defect = sc.gram_defect;
    out.a           = sc.v.block(0, 0, 1, 1 + nn);
    out.b           = sc.v.block(0, 1 + nn, 1, r * nn);
    out.c           = sc.v.block(1, 0, r, 1 + nn);
    out.d           = sc.v.block(1, 1 + nn, r, r * nn);
    return out;
}

struct transfer_value
{
    cvector big_psi; // Psi(z), length 1 + N
    complex phi;     // first component
    complex psi;     // b(z) . Psi~(z)
    double condition = 1;
};

/// Largest admissible condition number of I - Z(z) D^*.
inline constexpr double max_resolvent_condition = 1e12;

inline transfer_value psi_eval(const colligation& col, const embedding& emb, complex z)
{
    if (emb.size() != col.truncation)
    {
        throw domain_error("psi_eval: embedding truncation does not match the colligation");
    }
    if (!(std::abs(z) < 1.0))
    {
        throw domain_error("psi_eval: point must lie in the open disc");
    }
    const index_t nn = static_cast<index_t>(col.truncation);
    const index_t r  = col.rank;
    const cvector b  = emb(z);

    transfer_value out;
    cvector big_psi = col.a.adjoint();
    if (r > 0)
    {
        // (Z D^*)_{rho,sigma} = sum_m b_m conj(D_{sigma, rho N + m})
        cmatrix zd(r, r);
        cvector zb(r);
        for (index_t rho = 0; rho < r; ++rho)
        {
            const auto dblock = col.d.block(0, rho * nn, r, nn);
            zd.row(rho)       = (dblock.conjugate() * b).transpose();
            zb(rho)           = (col.b.block(0, rho * nn, 1, nn).conjugate() * b)(0, 0);
        }
        const cmatrix m = cmatrix::Identity(r, r) - zd;
        Eigen::JacobiSVD<cmatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const auto& s = svd.singularValues();
        out.condition = s(r - 1) > 0 ? s(0) / s(r - 1) : std::numeric_limits<double>::infinity();
        if (!(out.condition <= max_resolvent_condition))
        {
            throw numeric_error("psi_eval: resolvent is ill-conditioned");
        }
        big_psi += col.c.adjoint() * svd.solve(zb);
    }
    out.phi = big_psi(0);
    out.psi = (b.transpose() * big_psi.tail(nn))(0, 0);
    out.big_psi = std::move(big_psi);
    return out;
}

struct certificate_check
{
    std::string name;
    double value     = 0;
    double tolerance = 0;
    bool passed      = false;
};

//
// Result of smirnov_factorize: the realization, the data it interpolates and
// the checks run against it. The sampled f satisfies
// f_i = scale * phi(z_i) / (1 - psi(z_i)).
//
class smirnov_certificate
{
public:
    smirnov_certificate(diagonal_kernel kernel, colligation col)
        : m_kernel(std::move(kernel)),
          m_col(std::move(col)),
          m_embedding(m_kernel, m_col.truncation)
    {
    }

    const diagonal_kernel& kernel() const noexcept
    {
        return m_kernel;
    }
    const colligation& realization() const noexcept
    {
        return m_col;
    }
    const embedding& embedding_map() const noexcept
    {
        return m_embedding;
    }

    transfer_value evaluate(complex z) const
    {
        return psi_eval(m_col, m_embedding, z);
    }
    complex phi(complex z) const
    {
        return evaluate(z).phi;
    }
    complex psi(complex z) const
    {
        return evaluate(z).psi;
    }

    bool passed() const
    {
        return std::all_of(checks.begin(), checks.end(),
                           [](const certificate_check& c) { return c.passed; });
    }

    double scale           = 1; // f = scale * (sampled values)
    double sample_residual = 0;
    std::vector<certificate_check> checks;
    std::vector<complex> grid;                 // verification grid
    std::uint64_t seed = 0;
    std::optional<double> off_sample_residual; // reported only
    bool off_sample_warning = false;

private:
    diagonal_kernel m_kernel;
    colligation m_col;
    embedding m_embedding;
};

struct smirnov_options
{
    colligation_options colligation;
    std::uint64_t seed        = 0x5eed;
    std::size_t grid_points   = 12;
    double grid_radius        = 0.9;
    std::size_t ring_points   = 64;
    double ring_radius        = 0.9;
    double lmi_tol            = 1e-6;
    double residual_tol       = 1e-8;
    double modulus_margin     = 1e-6;
    double off_sample_warning = 1e-3;
};

/// Seeded points uniform in the disc of the given radius.
inline std::vector<complex> random_disc_points(std::size_t count, double radius,
                                               std::uint64_t seed)
{
    seeded_rng rng(seed);
    std::vector<complex> pts;
    pts.reserve(count);
    while (pts.size() < count)
    {
        const double rr    = radius * std::sqrt(rng.uniform());
        const double theta = 2.0 * std::numbers::pi * rng.uniform();
        const complex z    = std::polar(rr, theta);
        if (std::find(pts.begin(), pts.end(), z) == pts.end())
        {
            pts.push_back(z);
        }
    }
    return pts;
}

inline std::vector<complex> ring_points(std::size_t count, double radius)
{
    std::vector<complex> pts(count);
    for (std::size_t j = 0; j < count; ++j)
    {
        pts[j] = std::polar(radius, 2.0 * std::numbers::pi * static_cast<double>(j) /
                                        static_cast<double>(count));
    }
    return pts;
}

namespace detail
{

inline certificate_check lmi_check(const diagonal_kernel& k, const std::vector<complex>& pts,
                                   const std::vector<complex>& vals, const std::string& name,
                                   double tol)
{
    const hermitian_matrix kmat = kernel_matrix(k, pts);
    const hermitian_matrix m = hermitian_matrix::generate(
        static_cast<index_t>(pts.size()),
        [&](index_t i, index_t j) { return kmat(i, j) * (1.0 - vals[i] * std::conj(vals[j])); });
    certificate_check c{name, 0.0, tol, false};
    c.value  = min_eigenvalue(m) / std::max(1.0, m.max_abs());
    c.passed = c.value >= -tol;
    return c;
}

} // namespace detail

//
// Recomputes every check of a certificate; LMI and modulus checks run on
// test_nodes.
//
inline std::vector<certificate_check> verify_certificate(const smirnov_certificate& cert,
                                                         const std::vector<complex>& test_nodes,
                                                         const smirnov_options& opts = {})
{
    std::vector<certificate_check> out;
    const auto& col = cert.realization();

    double residual = 0;
    for (std::size_t i = 0; i < col.nodes.size(); ++i)
    {
        const auto tv = cert.evaluate(col.nodes[i]);
        residual      = std::max(residual, std::abs(col.values[i] * (1.0 - tv.psi) - tv.phi));
    }
    out.push_back({"sample_residual", residual, opts.residual_tol, residual <= opts.residual_tol});

    const double psi0 = std::abs(cert.psi(0.0));
    out.push_back({"psi_at_zero", psi0, 0.0, psi0 == 0.0});

    const double vnorm = operator_norm(col.stacked());
    out.push_back({"colligation_norm", vnorm, 1.0 + contraction_residual_tolerance,
                   vnorm <= 1.0 + contraction_residual_tolerance});

    std::vector<complex> phis, psis;
    double max_psi = 0;
    for (const auto& z : test_nodes)
    {
        const auto tv = cert.evaluate(z);
        phis.push_back(tv.phi);
        psis.push_back(tv.psi);
        max_psi = std::max(max_psi, std::abs(tv.psi));
    }
    if (!test_nodes.empty())
    {
        out.push_back(detail::lmi_check(cert.kernel(), test_nodes, phis, "lmi_phi", opts.lmi_tol));
        out.push_back(detail::lmi_check(cert.kernel(), test_nodes, psis, "lmi_psi", opts.lmi_tol));
        out.push_back({"psi_modulus", max_psi, 1.0 - opts.modulus_margin,
                       max_psi <= 1.0 - opts.modulus_margin});
    }
    return out;
}

/// Samples of f: either Taylor coefficients (evaluated by Horner) or values
/// at the nodes.
using function_samples = std::variant<function_coefficients, std::vector<complex>>;

inline smirnov_certificate smirnov_factorize(const diagonal_kernel& k, const function_samples& f,
                                             const std::vector<complex>& nodes,
                                             const smirnov_options& opts = {})
{
    std::vector<complex> values;
    double scale = 1.0;
    const function_coefficients* coeffs = std::get_if<function_coefficients>(&f);
    if (coeffs)
    {
        const double norm = space_norm(*coeffs, k.weights());
        if (norm > 1.0)
        {
            scale = norm;
        }
        for (const auto& z : nodes)
        {
            values.push_back((*coeffs)(z) / scale);
        }
    }
    else
    {
        values = std::get<std::vector<complex>>(f);
    }

    smirnov_certificate cert(k, build_colligation(k, nodes, values, opts.colligation));
    cert.scale = scale;
    cert.seed  = opts.seed;
    cert.grid  = random_disc_points(opts.grid_points, opts.grid_radius, opts.seed);

    std::vector<complex> test = cert.grid;
    const auto ring           = ring_points(opts.ring_points, opts.ring_radius);
    cert.checks               = verify_certificate(cert, test, opts);
    // modulus check also covers the ring
    double max_psi = 0;
    for (const auto& z : ring)
    {
        max_psi = std::max(max_psi, std::abs(cert.psi(z)));
    }
    cert.checks.push_back({"psi_modulus_ring", max_psi, 1.0 - opts.modulus_margin,
                           max_psi <= 1.0 - opts.modulus_margin});
    cert.sample_residual = cert.checks.front().value;

    if (coeffs)
    {
        double off = 0;
        for (const auto& z : ring)
        {
            const auto tv = cert.evaluate(z);
            off = std::max(off, std::abs((*coeffs)(z) / scale * (1.0 - tv.psi) - tv.phi));
        }
        cert.off_sample_residual = off;
        cert.off_sample_warning  = off > opts.off_sample_warning;
    }
    return cert;
}

//
// Off-sample defect |f(z)(1 - psi(z)) - phi(z)| at each point, for f known by
// its coefficients.
//
inline std::vector<double> off_sample_residuals(const smirnov_certificate& cert,
                                                const function_coefficients& f,
                                                const std::vector<complex>& points)
{
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& z : points)
    {
        const auto tv = cert.evaluate(z);
        out.push_back(std::abs(f(z) / cert.scale * (1.0 - tv.psi) - tv.phi));
    }
    return out;
}

} // namespace picklab

#endif /* PICKLAB_REALIZATION_HPP */
