///
/// \file decimal.hpp
///
/// Locale-independent decimal formatting and the portable random source used
/// for seeded grids.
///

#ifndef PICKLAB_DECIMAL_HPP
#define PICKLAB_DECIMAL_HPP

#include <charconv>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <system_error>

#include <picklab/errors.hpp>

namespace picklab
{

/// Shortest decimal string that parses back to exactly \p x.
inline std::string format_exact(double x)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

/// Decimal string with \p digits significant digits (general format).
inline std::string format_significant(double x, int digits = 12)
{
    char buf[64];
    auto res =
        std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, digits);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text)
{
    // from_chars rejects a leading '+'
    if (!text.empty() && text.front() == '+')
    {
        text.remove_prefix(1);
    }
    double value = 0;
    auto res     = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    {
        throw domain_error("not a decimal number: '" + std::string(text) + "'");
    }
    return value;
}

//
// Seeded generator for randomized grids. The engine is std::mt19937_64, whose
// output sequence is fixed by the standard; doubles are built from the top 53
// bits so that draws are identical on every platform (std::*_distribution is
// implementation-defined and therefore avoided).
//
class seeded_rng
{
public:
    explicit seeded_rng(std::uint64_t seed) : m_engine(seed) {}

    /// Uniform double in [0, 1).
    double uniform()
    {
        return static_cast<double>(m_engine() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi)
    {
        return lo + (hi - lo) * uniform();
    }

    std::uint64_t next()
    {
        return m_engine();
    }

private:
    std::mt19937_64 m_engine;
};

} // namespace picklab

#endif /* PICKLAB_DECIMAL_HPP */
