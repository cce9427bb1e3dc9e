///
/// \file series_kernel.hpp
///
/// Diagonal kernels k(z,w) = sum_n a_n (z conj(w))^n on the unit disc: weight
/// sequences, the coefficients of 1 - 1/k, complete Pick tests, kernel
/// evaluation with tail bounds and the norm of the associated weighted Hardy
/// space.
///

#ifndef PICKLAB_SERIES_KERNEL_HPP
#define PICKLAB_SERIES_KERNEL_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <picklab/errors.hpp>

namespace picklab
{

using complex = std::complex<double>;

/// Default truncation degree of stored weight sequences.
inline constexpr std::size_t default_max_degree = 2048;

/// Tolerance on negativity of embedding coefficients c_n.
inline constexpr double eps_complete_pick = 1e-10;

/// Tolerance on monotonicity of the ratios a_n / a_{n+1}.
inline constexpr double eps_monotone = 1e-12;

enum class weight_family
{
    szego,
    hs,
    explicit_values,
    shift_weights,
};

//
// Description of how a weight sequence was produced. Kept alongside the
// numbers so that kernels can be serialized by reference and rebuilt.
//
struct weight_spec
{
    weight_family family = weight_family::szego;
    double s             = 0; // exponent of the H_s family
    // explicit: a_0..a_N; shift_weights: w_0..w_{N-1}
    std::vector<double> values;
    std::size_t max_degree = default_max_degree;
};

//
// Normalized positive weights a_0 = 1, a_n > 0 (n = 0..N). The space has
// ||z^n||^2 = 1 / a_n.
//
class weight_sequence
{
public:
    weight_sequence(std::vector<double> a, weight_spec origin)
        : m_a(std::move(a)), m_origin(std::move(origin))
    {
        if (m_a.size() < 2)
        {
            throw length_error("weight sequence needs at least two terms");
        }
        if (m_a[0] != 1.0)
        {
            throw domain_error("weight sequence must satisfy a_0 = 1");
        }
        for (std::size_t n = 0; n < m_a.size(); ++n)
        {
            if (!std::isfinite(m_a[n]) || !(m_a[n] > 0))
            {
                throw domain_error("weight a_" + std::to_string(n) +
                                   " is not a positive finite number");
            }
        }
        m_origin.max_degree = m_a.size() - 1;
    }

    std::span<const double> coefficients() const noexcept
    {
        return m_a;
    }

    double operator[](std::size_t n) const
    {
        return m_a.at(n);
    }

    std::size_t size() const noexcept
    {
        return m_a.size();
    }

    std::size_t max_degree() const noexcept
    {
        return m_a.size() - 1;
    }

    /// beta(n) = a_n^{-1/2}, the norm of z^n.
    double beta(std::size_t n) const
    {
        return 1.0 / std::sqrt(m_a.at(n));
    }

    const weight_spec& origin() const noexcept
    {
        return m_origin;
    }

private:
    std::vector<double> m_a;
    weight_spec m_origin;
};

inline weight_sequence szego_weights(std::size_t max_degree = default_max_degree)
{
    weight_spec spec;
    spec.family     = weight_family::szego;
    spec.max_degree = max_degree;
    return weight_sequence(std::vector<double>(max_degree + 1, 1.0), spec);
}

/// a_n = (n+1)^s.
inline weight_sequence hs_weights(double s, std::size_t max_degree = default_max_degree)
{
    if (!std::isfinite(s))
    {
        throw domain_error("hs exponent must be finite");
    }
    weight_spec spec;
    spec.family     = weight_family::hs;
    spec.s          = s;
    spec.max_degree = max_degree;
    std::vector<double> a(max_degree + 1);
    for (std::size_t n = 0; n <= max_degree; ++n)
    {
        a[n] = std::pow(static_cast<double>(n + 1), s);
    }
    return weight_sequence(std::move(a), spec);
}

inline weight_sequence explicit_weights(std::vector<double> a)
{
    weight_spec spec;
    spec.family = weight_family::explicit_values;
    spec.values = a;
    return weight_sequence(std::move(a), spec);
}

//
// Weighted shift weights w_0..w_{L-1} to a_0..a_L via beta(n) = prod_{j<n} w_j
// and a_n = beta(n)^{-2}, so that a_n / a_{n+1} = w_n^2.
//
inline weight_sequence shift_weights(std::vector<double> w)
{
    if (w.empty())
    {
        throw length_error("shift weights need at least one term");
    }
    std::vector<double> a(w.size() + 1);
    a[0] = 1.0;
    for (std::size_t n = 0; n < w.size(); ++n)
    {
        if (!std::isfinite(w[n]) || !(w[n] > 0))
        {
            throw domain_error("shift weight w_" + std::to_string(n) +
                               " is not a positive finite number");
        }
        a[n + 1] = a[n] / (w[n] * w[n]);
    }
    weight_spec spec;
    spec.family = weight_family::shift_weights;
    spec.values = std::move(w);
    return weight_sequence(std::move(a), spec);
}

/// Builds the weight sequence described by \p spec.
inline weight_sequence make_weights(const weight_spec& spec)
{
    switch (spec.family)
    {
    case weight_family::szego:
        return szego_weights(spec.max_degree);
    case weight_family::hs:
        return hs_weights(spec.s, spec.max_degree);
    case weight_family::explicit_values:
        return explicit_weights(spec.values);
    case weight_family::shift_weights:
        return shift_weights(spec.values);
    }
    throw domain_error("unknown weight family");
}

//
// Coefficients of the formal power series 1 - 1/(sum_n a_n t^n) up to degree n.
// The returned vector has length n + 1 and c[0] = 0, so c[m] is the
// coefficient of t^m. Works for any field type T (double, exact rationals).
//
template <typename T>
std::vector<T> reciprocal_coefficients(std::span<const T> a, std::size_t n)
{
    if (a.empty() || a[0] != T(1))
    {
        throw domain_error("reciprocal coefficients need a_0 = 1");
    }
    if (n >= a.size())
    {
        throw length_error("requested degree " + std::to_string(n) +
                           " exceeds stored weights (max degree " +
                           std::to_string(a.size() - 1) + ")");
    }
    std::vector<T> c(n + 1, T(0));
    for (std::size_t m = 1; m <= n; ++m)
    {
        T acc = a[m];
        for (std::size_t j = 1; j < m; ++j)
        {
            acc -= c[j] * a[m - j];
        }
        c[m] = acc;
    }
    return c;
}

inline std::vector<double> reciprocal_coefficients(const weight_sequence& a, std::size_t n)
{
    return reciprocal_coefficients<double>(a.coefficients(), n);
}

//
// Validated diagonal kernel with cached embedding coefficients c_n. Copies
// share the immutable payload.
//
class diagonal_kernel
{
public:
    explicit diagonal_kernel(weight_sequence weights,
                             double eps_cp = eps_complete_pick)
        : m_data(std::make_shared<const data>(std::move(weights), eps_cp))
    {
    }

    const weight_sequence& weights() const noexcept
    {
        return m_data->weights;
    }

    /// c[0] = 0, c[1..max_degree()].
    std::span<const double> embedding_coefficients() const noexcept
    {
        return m_data->c;
    }

    std::size_t max_degree() const noexcept
    {
        return m_data->weights.max_degree();
    }

    /// Largest N with c_n >= -eps_cp for all n <= N (0 if c_1 already fails).
    std::size_t complete_pick_checked_to() const noexcept
    {
        return m_data->checked_to;
    }

    double eps_cp() const noexcept
    {
        return m_data->eps_cp;
    }

    /// Supremum of a_{m+1}/a_m over m >= n, with the last stored ratio
    /// standing in for the unstored tail.
    double ratio_sup(std::size_t n) const
    {
        return m_data->ratio_sup[std::min(n, m_data->ratio_sup.size() - 1)];
    }

private:
    struct data
    {
        data(weight_sequence w, double eps)
            : weights(std::move(w)), eps_cp(eps)
        {
            const std::size_t nmax = weights.max_degree();
            c                      = reciprocal_coefficients(weights, nmax);
            checked_to             = nmax;
            for (std::size_t m = 1; m <= nmax; ++m)
            {
                if (c[m] < -eps)
                {
                    checked_to = m - 1;
                    break;
                }
            }
            auto a = weights.coefficients();
            ratio_sup.assign(nmax + 1, 0.0);
            double sup       = a[nmax] / a[nmax - 1];
            ratio_sup[nmax]  = sup;
            for (std::size_t m = nmax; m-- > 0;)
            {
                sup          = std::max(sup, a[m + 1] / a[m]);
                ratio_sup[m] = sup;
            }
        }

        weight_sequence weights;
        double eps_cp;
        std::vector<double> c;
        std::size_t checked_to = 0;
        std::vector<double> ratio_sup;
    };

    std::shared_ptr<const data> m_data;
};

struct complete_pick_result
{
    enum class verdict
    {
        pass_to_n,
        fail,
    };

    verdict outcome = verdict::pass_to_n;
    std::size_t checked_to = 0;
    std::optional<std::size_t> witness; // least n with c_n < -eps_cp

    bool passed() const noexcept
    {
        return outcome == verdict::pass_to_n;
    }
};

/// Bounded-degree complete Pick certificate: c_n >= -eps_cp for n <= N.
inline complete_pick_result is_complete_pick(const diagonal_kernel& k, std::size_t n)
{
    if (n > k.max_degree())
    {
        throw length_error("complete Pick check to degree " + std::to_string(n) +
                           " exceeds stored weights");
    }
    complete_pick_result res;
    res.checked_to = n;
    if (k.complete_pick_checked_to() < n)
    {
        res.outcome = complete_pick_result::verdict::fail;
        res.witness = k.complete_pick_checked_to() + 1;
    }
    return res;
}

//
// Kaluza's sufficient condition: the ratios a_n / a_{n+1} (n < N) are
// nonincreasing, and (when require_limit_one) bounded below by one.
//
inline bool kaluza_test(const weight_sequence& a, std::size_t n,
                        bool require_limit_one = true,
                        double eps_mono        = eps_monotone)
{
    if (n + 1 > a.size())
    {
        throw length_error("Kaluza test to degree " + std::to_string(n) +
                           " exceeds stored weights");
    }
    auto coef = a.coefficients();
    for (std::size_t m = 0; m < n; ++m)
    {
        const double ratio = coef[m] / coef[m + 1];
        if (require_limit_one && ratio < 1.0 - eps_mono)
        {
            return false;
        }
        if (m + 2 <= n)
        {
            const double next = coef[m + 1] / coef[m + 2];
            if (ratio < next - eps_mono)
            {
                return false;
            }
        }
    }
    return true;
}

struct kernel_value
{
    complex value;
    double tail_bound = 0; // bound on the omitted part of the series
    std::size_t terms = 0; // number of summed terms
};

/// Default relative accuracy demanded of kernel_eval.
inline constexpr double default_eval_tolerance = 1e-12;

//
// Partial sum of sum_n a_n (z conj(w))^n. Summation stops once the geometric
// tail bound, built from the suffix supremum of a_{m+1}/a_m, drops below
// rounding level; beyond the stored degree the last ratio is extrapolated.
// Throws evaluation_error when the bound exceeds rel_tol * |value|.
//
inline kernel_value kernel_eval_bounded(const diagonal_kernel& k, complex z, complex w,
                                        double rel_tol = default_eval_tolerance)
{
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) ||
        !std::isfinite(w.real()) || !std::isfinite(w.imag()))
    {
        throw numeric_error("kernel evaluated at a non-finite point");
    }
    const complex x   = z * std::conj(w);
    const double absx = std::abs(x);
    auto a            = k.weights().coefficients();
    const std::size_t nmax = k.max_degree();

    kernel_value out;
    out.value   = complex(1.0, 0.0);
    out.terms   = 1;
    if (absx == 0.0)
    {
        return out;
    }
    complex power(1.0, 0.0);
    double tail = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n <= nmax; ++n)
    {
        power *= x;
        const complex term = a[n] * power;
        out.value += term;
        out.terms = n + 1;
        const double q = k.ratio_sup(n) * absx;
        tail           = q < 1.0 ? std::abs(term) * q / (1.0 - q)
                                 : std::numeric_limits<double>::infinity();
        if (tail <= 0x1.0p-60 * std::abs(out.value))
        {
            break;
        }
    }
    out.tail_bound = tail;
    if (!(tail <= rel_tol * std::abs(out.value)))
    {
        throw evaluation_error("kernel series not converged at degree " +
                                   std::to_string(nmax) + " (tail bound " +
                                   std::to_string(tail) + ")",
                               tail);
    }
    return out;
}

inline complex kernel_eval(const diagonal_kernel& k, complex z, complex w,
                           double rel_tol = default_eval_tolerance)
{
    return kernel_eval_bounded(k, z, w, rel_tol).value;
}

//
// Taylor coefficients of a function f(z) = sum_n fhat[n] z^n.
//
class function_coefficients
{
public:
    function_coefficients() = default;

    explicit function_coefficients(std::vector<complex> fhat) : m_fhat(std::move(fhat))
    {
        for (const auto& c : m_fhat)
        {
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            {
                throw numeric_error("non-finite Taylor coefficient");
            }
        }
    }

    static function_coefficients monomial(std::size_t n, complex c = 1.0)
    {
        std::vector<complex> f(n + 1, complex(0.0));
        f[n] = c;
        return function_coefficients(std::move(f));
    }

    std::span<const complex> coefficients() const noexcept
    {
        return m_fhat;
    }

    std::size_t size() const noexcept
    {
        return m_fhat.size();
    }

    /// Horner evaluation.
    complex operator()(complex z) const
    {
        complex acc(0.0);
        for (std::size_t n = m_fhat.size(); n-- > 0;)
        {
            acc = acc * z + m_fhat[n];
        }
        return acc;
    }

    function_coefficients scaled(complex s) const
    {
        std::vector<complex> f(m_fhat);
        for (auto& c : f)
        {
            c *= s;
        }
        return function_coefficients(std::move(f));
    }

private:
    std::vector<complex> m_fhat;
};

/// ||f||_H = sqrt(sum_n |fhat(n)|^2 / a_n).
inline double space_norm(const function_coefficients& f, const weight_sequence& a)
{
    if (f.size() > a.size())
    {
        throw length_error("function degree exceeds stored weights");
    }
    auto coef = f.coefficients();
    double s  = 0;
    for (std::size_t n = 0; n < coef.size(); ++n)
    {
        s += std::norm(coef[n]) / a[n];
    }
    return std::sqrt(s);
}

} // namespace picklab

#endif /* PICKLAB_SERIES_KERNEL_HPP */
