///
/// \file pick.hpp
///
/// Finite Nevanlinna-Pick problems for diagonal kernels: Pick matrices,
/// solvability, multiplier norms of finite data, maximum-modulus and
/// cyclicity certificates, and the Gleason-part geometry of point
/// evaluations.
///

#ifndef PICKLAB_PICK_HPP
#define PICKLAB_PICK_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <picklab/errors.hpp>
#include <picklab/numerics.hpp>
#include <picklab/series_kernel.hpp>

namespace picklab
{

/// Relative PSD tolerance of pick_solvable.
inline constexpr double eps_psd = 1e-9;

/// Margin below 2 separating distinct Gleason parts.
inline constexpr double eps_part = 1e-9;

/// Möbius involution theta_a(zeta) = (a - zeta) / (1 - conj(a) zeta).
inline complex mobius(complex a, complex zeta)
{
    return (a - zeta) / (1.0 - std::conj(a) * zeta);
}

namespace detail
{

inline void check_nodes(const std::vector<complex>& nodes)
{
    for (std::size_t i = 0; i < nodes.size(); ++i)
    {
        const complex z = nodes[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        {
            throw numeric_error("non-finite interpolation node");
        }
        if (std::abs(z) > 1.0)
        {
            throw domain_error("interpolation node outside the closed disc");
        }
        for (std::size_t j = 0; j < i; ++j)
        {
            if (nodes[j] == z)
            {
                throw domain_error("interpolation nodes " + std::to_string(j) + " and " +
                                   std::to_string(i) + " coincide");
            }
        }
    }
}

} // namespace detail

//
// Scalar Pick data: nodes z_i, targets w_i and a norm bound t.
//
class pick_problem
{
public:
    pick_problem(diagonal_kernel kernel, std::vector<complex> nodes,
                 std::vector<complex> targets, double bound = 1.0)
        : m_kernel(std::move(kernel)),
          m_nodes(std::move(nodes)),
          m_targets(std::move(targets)),
          m_bound(bound)
    {
        if (m_nodes.empty())
        {
            throw domain_error("Pick problem needs at least one node");
        }
        if (m_nodes.size() != m_targets.size())
        {
            throw domain_error("Pick problem: nodes and targets differ in length");
        }
        if (!std::isfinite(bound) || !(bound > 0))
        {
            throw domain_error("Pick problem: bound must be positive");
        }
        detail::check_nodes(m_nodes);
        for (const auto& w : m_targets)
        {
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
            {
                throw numeric_error("non-finite interpolation target");
            }
        }
    }

    const diagonal_kernel& kernel() const noexcept
    {
        return m_kernel;
    }
    const std::vector<complex>& nodes() const noexcept
    {
        return m_nodes;
    }
    const std::vector<complex>& targets() const noexcept
    {
        return m_targets;
    }
    double bound() const noexcept
    {
        return m_bound;
    }
    std::size_t size() const noexcept
    {
        return m_nodes.size();
    }

    pick_problem with_bound(double t) const
    {
        return pick_problem(m_kernel, m_nodes, m_targets, t);
    }

private:
    diagonal_kernel m_kernel;
    std::vector<complex> m_nodes;
    std::vector<complex> m_targets;
    double m_bound;
};

/// Gram matrix [k(z_i, z_j)].
inline hermitian_matrix kernel_matrix(const diagonal_kernel& k,
                                      const std::vector<complex>& nodes)
{
    return hermitian_matrix::generate(static_cast<index_t>(nodes.size()),
                                      [&](index_t i, index_t j) {
                                          return kernel_eval(k, nodes[i], nodes[j]);
                                      });
}

/// [k(z_i, z_j) (t^2 - w_i conj(w_j)) / t^2].
inline hermitian_matrix pick_matrix(const pick_problem& p)
{
    const double t2 = p.bound() * p.bound();
    const auto& z   = p.nodes();
    const auto& w   = p.targets();
    return hermitian_matrix::generate(
        static_cast<index_t>(p.size()), [&](index_t i, index_t j) {
            return kernel_eval(p.kernel(), z[i], z[j]) *
                   ((t2 - w[i] * std::conj(w[j])) / t2);
        });
}

/// Positivity of the Pick matrix; for complete Pick kernels this decides
/// whether an interpolating multiplier of norm <= bound exists.
inline bool pick_solvable(const pick_problem& p, double tol = eps_psd)
{
    return psd_check(pick_matrix(p), tol);
}

struct multiplier_norm_options
{
    double abs_tol   = 1e-11; // bisection width
    double rank_tol  = 1e-12; // relative pivot threshold for the kernel Gram
    double shift_tol = 1e-14; // slack in the positivity test
};

struct multiplier_norm_result
{
    double value = 0;      // t*: smallest feasible bound found
    double lower = 0;      // largest infeasible bound probed
    index_t rank = 0;      // number of nodes kept by the rank reduction
    int iterations = 0;
};

//
// Smallest t for which [k(z_i,z_j)(t^2 - w_i conj(w_j))] >= 0, by bisection.
//
// The kernel Gram is reduced with a pivoted Cholesky factorization K_P =
// G G^* on the numerically independent nodes P; positivity of the Pick
// matrix on P is then equivalent to I - C C^* / t^2 >= 0 with
// C = G^{-1} diag(w_P) G. Dropped nodes carry kernel functions that lie in
// the span of the kept ones to within the rank tolerance, so the result is
// the data norm on P (a lower bound for the full set, equal to it when all
// nodes are kept).
//
inline multiplier_norm_result
multiplier_norm_detailed(const diagonal_kernel& k, const std::vector<complex>& nodes,
                         const std::vector<complex>& targets,
                         const multiplier_norm_options& opts = {})
{
    if (nodes.empty() || nodes.size() != targets.size())
    {
        throw domain_error("multiplier_norm: need matching, nonempty nodes and targets");
    }
    detail::check_nodes(nodes);
    multiplier_norm_result out;
    double wmax = 0;
    for (const auto& w : targets)
    {
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
        {
            throw numeric_error("non-finite interpolation target");
        }
        wmax = std::max(wmax, std::abs(w));
    }
    if (wmax == 0)
    {
        out.rank = static_cast<index_t>(nodes.size());
        return out;
    }

    const hermitian_matrix gram = kernel_matrix(k, nodes);
    const factorization_result fac = pivoted_cholesky_psd(gram, opts.rank_tol);
    const index_t r                = fac.rank;
    out.rank                       = r;

    // Lower-triangular factor of K_P in pivot order.
    cmatrix g(r, r);
    Eigen::VectorXcd wp(r);
    for (index_t i = 0; i < r; ++i)
    {
        const index_t p = fac.pivots[i];
        g.row(i)        = fac.g.row(p);
        wp(i)           = targets[p];
    }
    for (index_t i = 0; i < r; ++i)
    {
        for (index_t j = i + 1; j < r; ++j)
        {
            g(i, j) = 0.0;
        }
    }
    const cmatrix dg = wp.asDiagonal() * g;
    const cmatrix c  = g.triangularView<Eigen::Lower>().solve(dg);
    cmatrix ccs      = c * c.adjoint();
    ccs              = 0.5 * (ccs + ccs.adjoint()).eval();

    const cmatrix eye = cmatrix::Identity(r, r);
    auto feasible     = [&](double t) {
        const cmatrix m = eye * (1.0 + opts.shift_tol) - ccs / (t * t);
        Eigen::LLT<cmatrix> llt(m);
        return llt.info() == Eigen::Success;
    };

    const double dmax = g.diagonal().cwiseAbs().maxCoeff();
    const double dmin = g.diagonal().cwiseAbs().minCoeff();
    double hi         = wmax * std::max(1.0, dmax / dmin); // max|w| sqrt(cond K_P)
    double lo         = 0.0;
    int guard         = 0;
    while (!feasible(hi))
    {
        lo = hi;
        hi *= 2.0;
        if (++guard > 200)
        {
            throw numeric_error("multiplier_norm: no feasible upper bound");
        }
    }
    while (hi - lo > opts.abs_tol)
    {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
        {
            break;
        }
        (feasible(mid) ? hi : lo) = mid;
        ++out.iterations;
    }
    out.value = hi;
    out.lower = lo;
    return out;
}

inline double multiplier_norm(const diagonal_kernel& k, const std::vector<complex>& nodes,
                              const std::vector<complex>& targets,
                              const multiplier_norm_options& opts = {})
{
    return multiplier_norm_detailed(k, nodes, targets, opts).value;
}

//
// Two-point solvability with |target_z| = t: positive only when the second
// target equals the first, since the determinant is -|k(z,w)|^2 |t - lambda|^2
// up to a positive factor.
//
inline bool max_modulus_check(const diagonal_kernel& k, complex z, complex target_z,
                              complex w, complex lambda, double t = 1.0,
                              double tol = eps_psd)
{
    if (std::abs(std::abs(target_z) - t) > 1e-12 * std::max(1.0, t))
    {
        throw domain_error("max_modulus_check: |target(z)| must equal the bound");
    }
    return pick_solvable(pick_problem(k, {z, w}, {target_z, lambda}, t), tol);
}

struct cyclicity_result
{
    enum class status
    {
        cyclic,
        unknown,
    };
    status outcome = status::unknown;
    std::string reason;

    bool cyclic() const noexcept
    {
        return outcome == status::cyclic;
    }
};

//
// Certificate checker for cyclicity of 1 - psi: psi vanishes at the base
// point x0 (so psi is not the constant 1) and the sampled data admit a
// contractive multiplier. The norm part is only the necessary condition
// visible on the nodes; the caller vouches for the global bound.
//
inline cyclicity_result cyclicity_certificate(const diagonal_kernel& k,
                                              const std::vector<complex>& nodes,
                                              const std::vector<complex>& psi_values,
                                              complex x0 = 0.0, double eps = 1e-9)
{
    if (nodes.size() != psi_values.size() || nodes.empty())
    {
        throw domain_error("cyclicity_certificate: need matching, nonempty data");
    }
    cyclicity_result res;
    const auto at = std::find(nodes.begin(), nodes.end(), x0);
    if (at == nodes.end())
    {
        res.reason = "base point is not among the nodes";
        return res;
    }
    const complex psi0 = psi_values[static_cast<std::size_t>(at - nodes.begin())];
    if (std::abs(psi0) > 1e-12)
    {
        res.reason = "psi does not vanish at the base point";
        return res;
    }
    const double norm = multiplier_norm(k, nodes, psi_values);
    if (norm > 1.0 + eps)
    {
        res.reason = "sampled multiplier norm of psi exceeds 1";
        return res;
    }
    res.outcome = cyclicity_result::status::cyclic;
    res.reason  = "psi(x0) = 0 and ||psi|| <= 1 on the nodes; a contractive "
                 "multiplier other than 1 leaves 1 - psi with dense range";
    return res;
}

struct gleason_pair
{
    complex z, w;
    double d          = 0; // closed form sqrt(1 - |k(z,w)|^2 / (k(z,z) k(w,w)))
    double d_extremal = 0; // sup{|lambda| : (z -> 0, w -> lambda) solvable at t = 1}
    double char_dist  = 0; // 2 a with a = (1 - sqrt(1 - d^2)) / d
};

/// 2 a with a = (1 - sqrt(1 - d^2))/d, written as d / (1 + sqrt(1 - d^2)).
inline double character_distance(double d)
{
    if (d <= 0)
    {
        return 0.0;
    }
    return 2.0 * d / (1.0 + std::sqrt(std::max(0.0, 1.0 - d * d)));
}

inline gleason_pair make_gleason_pair(const diagonal_kernel& k, complex z, complex w)
{
    if (k.complete_pick_checked_to() < k.max_degree())
    {
        throw domain_error("gleason_pair: kernel is not complete Pick to its stored degree");
    }
    gleason_pair out{z, w};
    if (z == w)
    {
        return out;
    }
    const complex kzw = kernel_eval(k, z, w);
    const double kzz  = kernel_eval(k, z, z).real();
    const double kww  = kernel_eval(k, w, w).real();
    if (std::abs(kzw) == 0.0)
    {
        throw domain_error("gleason_pair: kernel vanishes at (z, w)");
    }
    out.d         = std::sqrt(std::max(0.0, 1.0 - std::norm(kzw) / (kzz * kww)));
    out.char_dist = character_distance(out.d);
    // (z -> 0, w -> lambda) is solvable at bound 1 iff (z -> 0, w -> 1) is
    // solvable at bound 1/|lambda|.
    const double t = multiplier_norm(k, {z, w}, {0.0, 1.0});
    out.d_extremal = t > 0 ? 1.0 / t : 0.0;
    return out;
}

inline bool same_gleason_part(const diagonal_kernel& k, complex z, complex w,
                              double eps = eps_part)
{
    return make_gleason_pair(k, z, w).char_dist < 2.0 - eps;
}

} // namespace picklab

#endif /* PICKLAB_PICK_HPP */
