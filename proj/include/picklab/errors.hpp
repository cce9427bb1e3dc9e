///
/// \file errors.hpp
///
/// Exception types thrown by picklab.
///

#ifndef PICKLAB_ERRORS_HPP
#define PICKLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace picklab
{

/// Base class of every error raised by the library.
class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A requested index or degree exceeds the stored data.
class length_error : public error
{
public:
    using error::error;
};

/// An argument lies outside the domain of the operation.
class domain_error : public error
{
public:
    using error::error;
};

/// Non-finite input or a numerically meaningless computation.
class numeric_error : public error
{
public:
    using error::error;
};

/// A caller-guaranteed precondition turned out to be false.
class contract_violation : public error
{
public:
    using error::error;
};

/// Kernel series could not be summed to the requested accuracy.
class evaluation_error : public numeric_error
{
public:
    evaluation_error(const std::string& what, double tail_bound)
        : numeric_error(what), m_tail_bound(tail_bound)
    {
    }

    double tail_bound() const noexcept
    {
        return m_tail_bound;
    }

private:
    double m_tail_bound;
};

/// Some embedding coefficient c_n is negative.
class not_complete_pick_error : public domain_error
{
public:
    not_complete_pick_error(const std::string& what, std::size_t witness)
        : domain_error(what), m_witness(witness)
    {
    }

    std::size_t witness() const noexcept
    {
        return m_witness;
    }

private:
    std::size_t m_witness;
};

/// The matrix handed to a factorization is not positive semidefinite.
class not_psd_error : public numeric_error
{
public:
    using numeric_error::numeric_error;
};

} // namespace picklab

#endif /* PICKLAB_ERRORS_HPP */
