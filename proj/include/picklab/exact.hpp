///
/// \file exact.hpp
///
/// Exact rational path for weight families with rational coefficients.
///

#ifndef PICKLAB_EXACT_HPP
#define PICKLAB_EXACT_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include <picklab/errors.hpp>
#include <picklab/series_kernel.hpp>

namespace picklab
{

using rational = boost::multiprecision::cpp_rational;
using bigint   = boost::multiprecision::cpp_int;

//
// Parses a decimal literal ("-12.5e-3", "0.125", "7") into an exact rational.
//
inline rational parse_rational(std::string_view text)
{
    std::size_t pos = 0;
    bool negative   = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-'))
    {
        negative = text[pos] == '-';
        ++pos;
    }
    bigint mantissa = 0;
    long long exponent = 0;
    bool any_digit     = false;
    bool seen_point    = false;
    for (; pos < text.size(); ++pos)
    {
        const char ch = text[pos];
        if (ch >= '0' && ch <= '9')
        {
            mantissa = mantissa * 10 + (ch - '0');
            any_digit = true;
            if (seen_point)
            {
                --exponent;
            }
        }
        else if (ch == '.' && !seen_point)
        {
            seen_point = true;
        }
        else
        {
            break;
        }
    }
    if (!any_digit)
    {
        throw domain_error("not a decimal number: '" + std::string(text) + "'");
    }
    if (pos < text.size())
    {
        if (text[pos] != 'e' && text[pos] != 'E')
        {
            throw domain_error("not a decimal number: '" + std::string(text) + "'");
        }
        ++pos;
        bool exp_negative = false;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-'))
        {
            exp_negative = text[pos] == '-';
            ++pos;
        }
        long long e = 0;
        bool exp_digit = false;
        for (; pos < text.size(); ++pos)
        {
            const char ch = text[pos];
            if (ch < '0' || ch > '9' || e > 100000)
            {
                throw domain_error("not a decimal number: '" + std::string(text) + "'");
            }
            e = e * 10 + (ch - '0');
            exp_digit = true;
        }
        if (!exp_digit)
        {
            throw domain_error("not a decimal number: '" + std::string(text) + "'");
        }
        exponent += exp_negative ? -e : e;
    }
    bigint scale = boost::multiprecision::pow(bigint(10),
                                              static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
    rational value = exponent < 0 ? rational(mantissa, scale) : rational(mantissa * scale);
    return negative ? rational(-value) : value;
}

/// a_n = (n+1)^s exactly, integer s.
inline std::vector<rational> exact_hs_weights(int s, std::size_t max_degree)
{
    std::vector<rational> a(max_degree + 1);
    for (std::size_t n = 0; n <= max_degree; ++n)
    {
        bigint p = boost::multiprecision::pow(bigint(n + 1), static_cast<unsigned>(s < 0 ? -s : s));
        a[n]     = s < 0 ? rational(bigint(1), p) : rational(p);
    }
    return a;
}

/// a_n = prod_{j<n} w_j^{-2} exactly.
inline std::vector<rational> exact_shift_weights(const std::vector<rational>& w)
{
    std::vector<rational> a(w.size() + 1);
    a[0] = 1;
    for (std::size_t n = 0; n < w.size(); ++n)
    {
        if (w[n] <= 0)
        {
            throw domain_error("shift weight w_" + std::to_string(n) + " is not positive");
        }
        a[n + 1] = a[n] / (w[n] * w[n]);
    }
    return a;
}

inline std::vector<rational> exact_reciprocal_coefficients(const std::vector<rational>& a,
                                                           std::size_t n)
{
    return reciprocal_coefficients<rational>(std::span<const rational>(a), n);
}

} // namespace picklab

#endif /* PICKLAB_EXACT_HPP */
