// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file photoion/error.hpp
//! Error types shared by every module.
//---------------------------------------------------------------------------//
#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace photoion
{
//---------------------------------------------------------------------------//
/*!
 * Broad error category. The numeric values are the CLI exit codes.
 */
enum class ErrorKind
{
    validation = 1,  //!< bad input: domain, parse, config
    computation = 2,  //!< non-convergence, perturbation breakdown
    io = 3,
};

//---------------------------------------------------------------------------//
/*!
 * Base error carrying a machine-readable code next to the message.
 */
class Error : public std::runtime_error
{
  public:
    Error(ErrorKind kind, std::string code, std::string const& message)
        : std::runtime_error(message), kind_(kind), code_(std::move(code))
    {
    }

    ErrorKind kind() const noexcept { return kind_; }
    std::string const& code() const noexcept { return code_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

  private:
    ErrorKind kind_;
    std::string code_;
};

//! Input outside the domain of a formula.
class DomainError : public Error
{
  public:
    explicit DomainError(std::string const& message,
                         std::string code = "domain")
        : Error(ErrorKind::validation, std::move(code), message)
    {
    }
};

//! First-order perturbation theory no longer applies (P > 1, W_eff ~ W).
class PerturbationBreakdown : public Error
{
  public:
    explicit PerturbationBreakdown(std::string const& message)
        : Error(ErrorKind::computation, "perturbation_breakdown", message)
    {
    }
};

//! Iterative or integration procedure failed.
class ComputationError : public Error
{
  public:
    ComputationError(std::string code, std::string const& message)
        : Error(ErrorKind::computation, std::move(code), message)
    {
    }
};

//! Malformed file or configuration, with optional 1-based row number.
class ParseError : public Error
{
  public:
    ParseError(std::string const& message, long row = 0)
        : Error(ErrorKind::validation, "parse", message), row_(row)
    {
    }
    long row() const noexcept { return row_; }

  private:
    long row_;
};

class IoError : public Error
{
  public:
    explicit IoError(std::string const& message)
        : Error(ErrorKind::io, "io", message)
    {
    }
};

}  // namespace photoion
