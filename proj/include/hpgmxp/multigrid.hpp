// SPDX-FileCopyrightText: 2026 The hpgmxp authors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef HPGMXP_MULTIGRID_HPP_
#define HPGMXP_MULTIGRID_HPP_

#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

#include "hpgmxp/coloring.hpp"
#include "hpgmxp/comm.hpp"
#include "hpgmxp/ell_matrix.hpp"
#include "hpgmxp/geometry.hpp"
#include "hpgmxp/metrics.hpp"
#include "hpgmxp/smoother.hpp"


namespace hpgmxp {


struct MgOptions {
    int levels = 4;
    SmootherSweeps sweeps;
    ColoringStrategy coloring = ColoringStrategy::greedy;
    std::uint64_t seed = 0;
    bool overlap = true;
};


/**
 * One grid of the hierarchy, fully set up for one rank: the color-permuted
 * matrix in both precisions, its coloring and halo plan, and workspaces.
 */
struct MgLevel {
    LocalDomain domain;
    EllMatrix<double> A_hi;
    EllMatrix<float> A_lo;
    Coloring coloring;
    HaloPlan plan;
    /// Row of this level coinciding with each row of the next coarser level,
    /// in permuted orderings on both sides. Empty on the coarsest level.
    std::vector<local_index> f2c;
    /// Nonzeros of the rows listed in f2c.
    std::int64_t f2c_nnz = 0;

    std::vector<double> r_hi, z_hi;
    std::vector<float> r_lo, z_lo;

    local_index n_rows() const noexcept { return A_hi.n_rows(); }
    local_index n_cols() const noexcept { return A_hi.n_cols(); }

    template <typename T>
    const EllMatrix<T>& matrix() const
    {
        if constexpr (std::is_same_v<T, double>) {
            return A_hi;
        } else {
            return A_lo;
        }
    }

    template <typename T>
    std::vector<T>& r()
    {
        if constexpr (std::is_same_v<T, double>) {
            return r_hi;
        } else {
            return r_lo;
        }
    }

    template <typename T>
    std::vector<T>& z()
    {
        if constexpr (std::is_same_v<T, double>) {
            return z_hi;
        } else {
            return z_lo;
        }
    }
};


struct MgHierarchy {
    std::vector<MgLevel> levels;
    MgOptions options;
};


/// Generates, distributes, colors and permutes one level's matrix.
MgLevel build_level(const LocalDomain& domain, const MgOptions& options);

/**
 * Builds `options.levels` grids by repeated halving of `fine`.
 * Throws CoarseningError when a local extent is not divisible by
 * 2^(levels-1).
 */
MgHierarchy build_hierarchy(const LocalDomain& fine, const MgOptions& options);

/// Injection map from `coarse` rows to `fine` rows (even fine points).
std::vector<local_index> injection_map(const MgLevel& fine,
                                       const MgLevel& coarse);


/// coarse[i] = fine[f2c[i]].
template <typename T>
void restrict_inject(std::span<const T> fine, std::span<const local_index> f2c,
                     std::span<T> coarse);

/// r_c[i] = b[f2c[i]] - (A x)[f2c[i]], evaluated only at injected rows.
/// The halo of x must be current.
template <typename T>
void fused_residual_restrict(const EllMatrix<T>& A, std::span<const T> b,
                             std::span<const T> x,
                             std::span<const local_index> f2c,
                             std::span<T> r_c, OpCounter* ops = nullptr);

/// fine[f2c[i]] += coarse[i]: the transpose of injection.
template <typename T>
void prolong_add(std::span<T> fine, std::span<const T> coarse,
                 std::span<const local_index> f2c, OpCounter* ops = nullptr);


/**
 * Applies one V-cycle starting from a zero guess: z = M^-1 r on `level`.
 *
 * Pre-smoothing, fused residual restriction, recursion (smoothing only on
 * the coarsest grid), prolongation and post-smoothing all run in precision
 * T on the matching matrix copy. `z` must span the level's columns; `r` its
 * rows. Work is charged to `tally` when given.
 */
template <typename T>
void mg_vcycle(Comm& comm, MgHierarchy& mg, int level, std::span<const T> r,
               std::span<T> z, MotifTally* tally = nullptr);


}  // namespace hpgmxp

#endif  // HPGMXP_MULTIGRID_HPP_
