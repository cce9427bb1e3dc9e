///
/// \file numerics.hpp
///
/// Dense Hermitian linear algebra: smallest eigenvalues, PSD tests, pivoted
/// Cholesky factorization and the contraction that carries one family of
/// vectors onto another with the same Gram matrix.
///

#ifndef PICKLAB_NUMERICS_HPP
#define PICKLAB_NUMERICS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <picklab/errors.hpp>

namespace picklab
{

using cmatrix = Eigen::MatrixXcd;
using cvector = Eigen::VectorXcd;
using index_t = Eigen::Index;

namespace detail
{

inline bool all_finite(const cmatrix& m)
{
    return m.allFinite();
}

inline double max_abs(const cmatrix& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

} // namespace detail

//
// Hermitian matrix stored densely; the constructor mirrors the lower triangle
// so that M = M^* holds exactly and the diagonal is real.
//
class hermitian_matrix
{
public:
    hermitian_matrix() = default;

    explicit hermitian_matrix(const cmatrix& lower) : m_dense(lower)
    {
        if (lower.rows() != lower.cols())
        {
            throw domain_error("Hermitian matrix must be square");
        }
        const index_t n = lower.rows();
        for (index_t j = 0; j < n; ++j)
        {
            m_dense(j, j) = std::complex<double>(lower(j, j).real(), 0.0);
            for (index_t i = j + 1; i < n; ++i)
            {
                m_dense(j, i) = std::conj(lower(i, j));
            }
        }
    }

    /// Builds M from entry(i, j), called for i >= j only.
    template <typename Entry>
    static hermitian_matrix generate(index_t n, Entry&& entry)
    {
        cmatrix lower = cmatrix::Zero(n, n);
        for (index_t j = 0; j < n; ++j)
        {
            for (index_t i = j; i < n; ++i)
            {
                lower(i, j) = entry(i, j);
            }
        }
        return hermitian_matrix(lower);
    }

    const cmatrix& dense() const noexcept
    {
        return m_dense;
    }

    index_t order() const noexcept
    {
        return m_dense.rows();
    }

    std::complex<double> operator()(index_t i, index_t j) const
    {
        return m_dense(i, j);
    }

    double max_abs() const
    {
        return detail::max_abs(m_dense);
    }

private:
    cmatrix m_dense;
};

inline double min_eigenvalue(const hermitian_matrix& m)
{
    if (m.order() < 1)
    {
        throw domain_error("min_eigenvalue of an empty matrix");
    }
    if (!detail::all_finite(m.dense()))
    {
        throw numeric_error("matrix has non-finite entries");
    }
    Eigen::SelfAdjointEigenSolver<cmatrix> es(m.dense(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
    {
        throw numeric_error("Hermitian eigensolver did not converge");
    }
    return es.eigenvalues()(0);
}

/// min_eigenvalue(M) >= -tol * max(1, ||M||_max).
inline bool psd_check(const hermitian_matrix& m, double tol)
{
    return min_eigenvalue(m) >= -tol * std::max(1.0, m.max_abs());
}

struct factorization_result
{
    cmatrix g;                   // n x rank, M ~ G G^*
    index_t rank = 0;
    double residual = 0;         // ||M - G G^*||_max
    std::vector<index_t> pivots; // pivot order
};

//
// Diagonally pivoted Cholesky factorization M ~ G G^*. A pivot is accepted
// while the largest remaining diagonal exceeds tol * max_i M_ii; ties go to
// the lowest index. Fails when the remaining Schur complement is clearly
// indefinite.
//
inline factorization_result pivoted_cholesky_psd(const hermitian_matrix& m, double tol)
{
    const index_t n = m.order();
    if (!detail::all_finite(m.dense()))
    {
        throw numeric_error("matrix has non-finite entries");
    }
    const cmatrix& a = m.dense();
    std::vector<double> d(static_cast<std::size_t>(n));
    double scale = 0;
    for (index_t i = 0; i < n; ++i)
    {
        d[i]  = a(i, i).real();
        scale = std::max(scale, d[i]);
    }
    const double threshold = tol * scale;

    factorization_result out;
    cmatrix g = cmatrix::Zero(n, n);
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    index_t k = 0;
    for (; k < n; ++k)
    {
        index_t p  = -1;
        double best = -std::numeric_limits<double>::infinity();
        for (index_t i = 0; i < n; ++i)
        {
            if (!used[i] && d[i] > best)
            {
                best = d[i];
                p    = i;
            }
        }
        if (best <= threshold)
        {
            if (best < -threshold)
            {
                throw not_psd_error("pivoted Cholesky: pivot " + std::to_string(best) +
                                    " below -tol");
            }
            break;
        }
        used[p]           = true;
        const double root = std::sqrt(best);
        for (index_t i = 0; i < n; ++i)
        {
            if (used[i] && i != p)
            {
                continue;
            }
            std::complex<double> s = a(i, p);
            for (index_t j = 0; j < k; ++j)
            {
                s -= g(i, j) * std::conj(g(p, j));
            }
            g(i, k) = s / root;
        }
        g(p, k) = root;
        for (index_t i = 0; i < n; ++i)
        {
            if (!used[i])
            {
                d[i] -= std::norm(g(i, k));
            }
        }
        out.pivots.push_back(p);
    }
    out.rank     = k;
    out.g        = g.leftCols(k);
    out.residual = detail::max_abs(a - out.g * out.g.adjoint());
    const double eps = std::numeric_limits<double>::epsilon();
    if (out.residual > 2 * threshold + 64 * static_cast<double>(n) * eps * scale)
    {
        throw not_psd_error("pivoted Cholesky: residual " + std::to_string(out.residual) +
                            " indicates an indefinite matrix");
    }
    return out;
}

inline double operator_norm(const cmatrix& m)
{
    if (m.size() == 0)
    {
        return 0.0;
    }
    Eigen::JacobiSVD<cmatrix> svd(m);
    return svd.singularValues()(0);
}

struct span_contraction_result
{
    cmatrix v;                 // q x p
    index_t rank = 0;          // numerical rank of span{x_i}
    double gram_defect = 0;    // ||X^*X - Y^*Y||_max
    double clipped_excess = 0; // excess of ||T|| over one before orthonormalization
    double residual = 0;       // max_i ||V x_i - y_i|| / (1 + ||y_i||)
};

/// Interpolation accuracy demanded of span_contraction.
inline constexpr double contraction_residual_tolerance = 1e-8;

//
// Contraction V with V x_i = y_i (columns of X and Y) that vanishes on the
// orthogonal complement of span{x_i}. Requires X^*X = Y^*Y to within
// gram_tol * max(1, max_i ||x_i||^2). The map is read off a rank-revealing
// SVD of X and is a partial isometry: T = Y W_r Sigma_r^{-1} is replaced by
// its Q factor, so noise in a weak direction stays in that direction.
//
inline span_contraction_result span_contraction(const cmatrix& x, const cmatrix& y,
                                                double gram_tol,
                                                double rank_tol = 1e-13)
{
    if (x.cols() != y.cols())
    {
        throw domain_error("span_contraction: X and Y need the same number of columns");
    }
    if (!detail::all_finite(x) || !detail::all_finite(y))
    {
        throw numeric_error("span_contraction: non-finite input");
    }
    span_contraction_result out;
    const cmatrix gx  = x.adjoint() * x;
    const double scale = std::max(1.0, gx.diagonal().real().maxCoeff());
    out.gram_defect   = detail::max_abs(gx - y.adjoint() * y);
    if (out.gram_defect > gram_tol * scale)
    {
        throw contract_violation("span_contraction: Gram mismatch " +
                                 std::to_string(out.gram_defect) + " exceeds tolerance");
    }

    Eigen::JacobiSVD<cmatrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    index_t r         = 0;
    const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
    while (r < sigma.size() && sigma(r) > rank_tol * smax && sigma(r) > 0)
    {
        ++r;
    }
    out.rank = r;
    if (r == 0)
    {
        out.v = cmatrix::Zero(y.rows(), x.rows());
    }
    else
    {
        const cmatrix u = svd.matrixU().leftCols(r);
        // T = Y W_r Sigma_r^{-1}; V = T U_r^*
        cmatrix t = y * svd.matrixV().leftCols(r);
        for (index_t j = 0; j < r; ++j)
        {
            t.col(j) /= sigma(j);
        }
        if (t.rows() < r)
        {
            throw contract_violation("span_contraction: span{y_i} is too small for span{x_i}");
        }
        out.clipped_excess = std::max(0.0, operator_norm(t) - 1.0);
        // isometric part of T, orthonormalized in order of decreasing sigma
        const Eigen::HouseholderQR<cmatrix> qr(t);
        cmatrix iso = qr.householderQ() * cmatrix::Identity(t.rows(), r);
        const cmatrix& packed = qr.matrixQR();
        for (index_t j = 0; j < r; ++j)
        {
            const std::complex<double> d = packed(j, j);
            if (std::abs(d) > 0)
            {
                iso.col(j) *= d / std::abs(d);
            }
        }
        out.v = iso * u.adjoint();
    }

    for (index_t i = 0; i < x.cols(); ++i)
    {
        const double err = (out.v * x.col(i) - y.col(i)).norm() / (1.0 + y.col(i).norm());
        out.residual     = std::max(out.residual, err);
    }
    if (out.residual > contraction_residual_tolerance)
    {
        throw contract_violation("span_contraction: interpolation residual " +
                                 std::to_string(out.residual));
    }
    return out;
}

} // namespace picklab

#endif /* PICKLAB_NUMERICS_HPP */
