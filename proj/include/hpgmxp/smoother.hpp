// SPDX-FileCopyrightText: 2026 The hpgmxp authors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef HPGMXP_SMOOTHER_HPP_
#define HPGMXP_SMOOTHER_HPP_

#include <span>

#include "hpgmxp/coloring.hpp"
#include "hpgmxp/comm.hpp"
#include "hpgmxp/ell_matrix.hpp"
#include "hpgmxp/metrics.hpp"


namespace hpgmxp {


/// Sweep counts of the multigrid smoother; all must be at least one.
struct SmootherSweeps {
    int pre = 1;
    int post = 1;
    int coarse = 1;

    void validate() const;
};


/// How a collective sweep refreshes the halo of the iterate.
enum class HaloMode {
    /// Halo already valid (or known zero); no communication.
    skip,
    blocking,
    /// Color-0 interior rows are updated while the exchange is in flight.
    overlapped,
};


/**
 * One forward Gauss-Seidel sweep in relaxation form on a color-permuted
 * matrix, using the current halo values of `z`.
 *
 * Colors are processed in order; within a color every row is independent:
 * z_i <- (r_i - sum_{j != i} a_ij z_j) / a_ii.
 * Throws SingularDiagonal on a zero diagonal entry.
 */
template <typename T>
void forward_gs_sweep(const EllMatrix<T>& A, const Coloring& coloring,
                      std::span<const T> r, std::span<T> z,
                      OpCounter* ops = nullptr);

/// Collective sweep: refreshes the halo of `z` per `mode`, then sweeps.
/// Off-rank couplings use the exchanged values for the whole sweep.
template <typename T>
void forward_gs_sweep(Comm& comm, const HaloPlan& plan, const EllMatrix<T>& A,
                      const Coloring& coloring, std::span<const T> r,
                      std::span<T> z, HaloMode mode, OpCounter* ops = nullptr);


}  // namespace hpgmxp

#endif  // HPGMXP_SMOOTHER_HPP_
