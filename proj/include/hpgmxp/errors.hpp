// SPDX-FileCopyrightText: 2026 The hpgmxp authors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef HPGMXP_ERRORS_HPP_
#define HPGMXP_ERRORS_HPP_

#include <stdexcept>
#include <string>


namespace hpgmxp {


/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};


/// A local grid dimension cannot be halved any further.
class CoarseningError : public Error {
public:
    CoarseningError(char axis, int extent)
        : Error(std::string("cannot coarsen odd extent ") +
                std::to_string(extent) + " along axis " + axis),
          axis_{axis}
    {}

    char axis() const noexcept { return axis_; }

private:
    char axis_;
};


/// An off-rank column is not owned by any neighboring rank.
class TopologyError : public Error {
public:
    using Error::Error;
};


/// Mismatched collective epochs, message counts or an aborted rank world.
/// These indicate a bug and are not recoverable.
class ProtocolError : public Error {
public:
    using Error::Error;
};


class SingularDiagonal : public Error {
public:
    explicit SingularDiagonal(long row)
        : Error("zero diagonal in row " + std::to_string(row)), row_{row}
    {}

    long row() const noexcept { return row_; }

private:
    long row_;
};


/// Givens rotation with a vanishing norm (lucky breakdown).
class BreakdownError : public Error {
public:
    explicit BreakdownError(int step)
        : Error("GMRES breakdown at step " + std::to_string(step)), step_{step}
    {}

    int step() const noexcept { return step_; }

private:
    int step_;
};


class ValidationError : public Error {
public:
    using Error::Error;
};


class ConfigError : public Error {
public:
    using Error::Error;
};


}  // namespace hpgmxp

#endif  // HPGMXP_ERRORS_HPP_
