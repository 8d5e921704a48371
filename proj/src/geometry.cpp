// SPDX-FileCopyrightText: 2026 The hpgmxp authors
//
// SPDX-License-Identifier: Apache-2.0

#include "hpgmxp/geometry.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "hpgmxp/errors.hpp"


namespace hpgmxp {


Extent3 factor_ranks(int p)
{
    if (p < 1) {
        throw ConfigError("rank count must be positive, got " +
                          std::to_string(p));
    }
    Extent3 best{1, 1, p};
    // compare max/min ratios as fractions to avoid floating point ties
    auto better = [](const Extent3& a, const Extent3& b) {
        const auto [amin, amax] = std::minmax({a.x, a.y, a.z});
        const auto [bmin, bmax] = std::minmax({b.x, b.y, b.z});
        return std::int64_t{amax} * bmin < std::int64_t{bmax} * amin;
    };
    for (int x = 1; x <= p; ++x) {
        if (p % x != 0) {
            continue;
        }
        for (int y = x; y <= p / x; ++y) {
            if ((p / x) % y != 0) {
                continue;
            }
            const int z = p / x / y;
            if (z < y) {
                continue;
            }
            const Extent3 candidate{x, y, z};
            if (better(candidate, best)) {
                best = candidate;
            }
        }
    }
    return best;
}


GlobalProblem GlobalProblem::make(Extent3 local, int rank_count)
{
    if (local.x < 1 || local.y < 1 || local.z < 1) {
        throw ConfigError("local extents must be positive");
    }
    const auto ranks = factor_ranks(rank_count);
    return GlobalProblem{
        Extent3{ranks.x * local.x, ranks.y * local.y, ranks.z * local.z},
        ranks, local};
}


void GlobalProblem::check_levels(int levels) const
{
    if (levels < 1) {
        throw ConfigError("at least one multigrid level is required");
    }
    const int factor = 1 << (levels - 1);
    const int extents[] = {local.x, local.y, local.z};
    const char axes[] = {'x', 'y', 'z'};
    for (int a = 0; a < 3; ++a) {
        if (extents[a] % factor != 0) {
            // report the axis and extent at which halving fails
            int e = extents[a];
            while (e % 2 == 0) {
                e /= 2;
            }
            throw CoarseningError(axes[a], e);
        }
    }
}


int rank_of(const Extent3& ranks, const Index3& c)
{
    return c.x + ranks.x * (c.y + ranks.y * c.z);
}


Index3 rank_coords_of(const Extent3& ranks, int rank)
{
    return Index3{rank % ranks.x, (rank / ranks.x) % ranks.y,
                  rank / (ranks.x * ranks.y)};
}


LocalDomain make_local_domain(const GlobalProblem& problem, int rank)
{
    if (rank < 0 || rank >= problem.rank_count()) {
        throw ConfigError("rank " + std::to_string(rank) + " out of range");
    }
    LocalDomain d;
    d.rank = rank;
    d.rank_coords = rank_coords_of(problem.ranks, rank);
    d.local = problem.local;
    d.global = problem.global;
    d.ranks = problem.ranks;
    d.offset = Index3{d.rank_coords.x * d.local.x, d.rank_coords.y * d.local.y,
                      d.rank_coords.z * d.local.z};
    d.level = 0;
    return d;
}


local_index local_row(const LocalDomain& d, int i, int j, int k)
{
    if (i < 0 || i >= d.local.x || j < 0 || j >= d.local.y || k < 0 ||
        k >= d.local.z) {
        throw std::out_of_range("local coordinates (" + std::to_string(i) +
                                "," + std::to_string(j) + "," +
                                std::to_string(k) + ") outside the domain");
    }
    return static_cast<local_index>(i + d.local.x * (j + d.local.y * k));
}


global_index global_row(const LocalDomain& d, const Index3& p)
{
    return global_index{p.x} +
           global_index{d.global.x} *
               (global_index{p.y} + global_index{d.global.y} * p.z);
}


global_index local_to_global(const LocalDomain& d, int i, int j, int k)
{
    local_row(d, i, j, k);  // range check
    return global_row(d, Index3{d.offset.x + i, d.offset.y + j,
                                d.offset.z + k});
}


Index3 global_coords(const LocalDomain& d, global_index row)
{
    const global_index plane = global_index{d.global.x} * d.global.y;
    return Index3{static_cast<int>(row % d.global.x),
                  static_cast<int>((row / d.global.x) % d.global.y),
                  static_cast<int>(row / plane)};
}


Index3 global_to_local(const LocalDomain& d, global_index row)
{
    if (row < 0 || row >= d.global_rows()) {
        throw std::out_of_range("global row outside the grid");
    }
    const auto g = global_coords(d, row);
    const Index3 l{g.x - d.offset.x, g.y - d.offset.y, g.z - d.offset.z};
    if (l.x < 0 || l.x >= d.local.x || l.y < 0 || l.y >= d.local.y ||
        l.z < 0 || l.z >= d.local.z) {
        throw std::out_of_range("global row " + std::to_string(row) +
                                " is not owned by rank " +
                                std::to_string(d.rank));
    }
    return l;
}


int owner_of(const LocalDomain& d, const Index3& g)
{
    return rank_of(d.ranks,
                   Index3{g.x / d.local.x, g.y / d.local.y, g.z / d.local.z});
}


LocalDomain coarsen(const LocalDomain& d)
{
    if (d.local.x % 2 != 0) {
        throw CoarseningError('x', d.local.x);
    }
    if (d.local.y % 2 != 0) {
        throw CoarseningError('y', d.local.y);
    }
    if (d.local.z % 2 != 0) {
        throw CoarseningError('z', d.local.z);
    }
    LocalDomain c = d;
    c.local = Extent3{d.local.x / 2, d.local.y / 2, d.local.z / 2};
    c.global = Extent3{d.global.x / 2, d.global.y / 2, d.global.z / 2};
    c.offset = Index3{d.offset.x / 2, d.offset.y / 2, d.offset.z / 2};
    c.level = d.level + 1;
    return c;
}


}  // namespace hpgmxp
