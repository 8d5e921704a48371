// SPDX-FileCopyrightText: 2026 The hpgmxp authors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef HPGMXP_GEOMETRY_HPP_
#define HPGMXP_GEOMETRY_HPP_

#include <cstdint>


namespace hpgmxp {


using global_index = std::int64_t;
using local_index = std::int32_t;


/// Number of points (or ranks) along each axis of a Cartesian box.
struct Extent3 {
    int x = 1;
    int y = 1;
    int z = 1;

    constexpr std::int64_t volume() const noexcept
    {
        return std::int64_t{x} * y * z;
    }

    friend constexpr bool operator==(const Extent3&, const Extent3&) = default;
};


/// Integer coordinates of a point or of a rank in the rank grid.
struct Index3 {
    int x = 0;
    int y = 0;
    int z = 0;

    friend constexpr bool operator==(const Index3&, const Index3&) = default;
};


/**
 * Global grid uniformly divided among a 3D grid of ranks.
 *
 * The global extent is always the product of the rank grid and the local
 * extent, so every rank owns a box of identical shape.
 */
struct GlobalProblem {
    Extent3 global;
    Extent3 ranks;
    Extent3 local;

    /// Builds the problem for `rank_count` ranks, each owning `local` points.
    static GlobalProblem make(Extent3 local, int rank_count);

    int rank_count() const noexcept
    {
        return static_cast<int>(ranks.volume());
    }

    /// Throws CoarseningError unless `levels - 1` halvings are possible.
    void check_levels(int levels) const;
};


/// The box owned by one rank on one multigrid level (0 = finest).
struct LocalDomain {
    int rank = 0;
    Index3 rank_coords;
    Index3 offset;
    Extent3 local;
    Extent3 global;
    Extent3 ranks;
    int level = 0;

    local_index n_rows() const noexcept
    {
        return static_cast<local_index>(local.volume());
    }

    global_index global_rows() const noexcept { return global.volume(); }
};


/**
 * Factors `p` ranks into a 3D grid with the smallest max/min axis ratio.
 *
 * Ties are broken towards npx <= npy <= npz; a prime count gives (1, 1, p).
 */
Extent3 factor_ranks(int p);

int rank_of(const Extent3& ranks, const Index3& coords);

Index3 rank_coords_of(const Extent3& ranks, int rank);

LocalDomain make_local_domain(const GlobalProblem& problem, int rank);

/// Lexicographic x-fastest local row index of a local point.
local_index local_row(const LocalDomain& domain, int i, int j, int k);

/// Global row index (x-fastest lexicographic) of a local point.
global_index local_to_global(const LocalDomain& domain, int i, int j, int k);

/// Inverse of local_to_global for a point owned by `domain`.
Index3 global_to_local(const LocalDomain& domain, global_index row);

Index3 global_coords(const LocalDomain& domain, global_index row);

global_index global_row(const LocalDomain& domain, const Index3& point);

/// Rank owning the global grid point.
int owner_of(const LocalDomain& domain, const Index3& global_point);

/// Halves the local box; throws CoarseningError naming the first odd axis.
LocalDomain coarsen(const LocalDomain& domain);


}  // namespace hpgmxp

#endif  // HPGMXP_GEOMETRY_HPP_
