// SPDX-FileCopyrightText: 2026 The hpgmxp authors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef HPGMXP_COLORING_HPP_
#define HPGMXP_COLORING_HPP_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hpgmxp/ell_matrix.hpp"


namespace hpgmxp {


enum class ColoringStrategy { greedy, jpl };

ColoringStrategy coloring_strategy_from_string(std::string_view name);


/**
 * Independent-set ordering of a rank's local rows.
 *
 * `perm[old] = new` orders rows by (color, original index); `iperm` is its
 * inverse. Rows of color c occupy `[color_offsets[c], color_offsets[c + 1])`
 * after permutation.
 */
struct Coloring {
    std::vector<int> color;
    int num_colors = 0;
    std::vector<local_index> color_offsets;
    std::vector<local_index> perm;
    std::vector<local_index> iperm;
};


/**
 * Colors the local coupling graph of `A`; halo columns are ignored.
 *
 * greedy: first-fit in ascending row order, `seed` unused.
 * jpl: Jones-Plassmann-Luby rounds with random weights drawn from `seed`;
 * every round's independent set gets the smallest colors free among its
 * colored neighbors.
 */
Coloring color_matrix(const EllStructure& A, ColoringStrategy strategy,
                      std::uint64_t seed = 0);

/// Builds offsets and permutations from per-row colors.
Coloring make_coloring(std::vector<int> colors);

/// True iff no two coupled local rows share a color.
bool is_valid_coloring(const EllStructure& A, std::span<const int> color);


/// Returns P A P^T on the local rows and columns; halo columns are kept.
template <typename T>
EllMatrix<T> permute_matrix(const EllMatrix<T>& A,
                            std::span<const local_index> perm);

/// out[perm[i]] = in[i] for owned entries; halo entries are copied as is.
template <typename T>
std::vector<T> permute_vector(std::span<const T> in,
                              std::span<const local_index> perm);


}  // namespace hpgmxp

#endif  // HPGMXP_COLORING_HPP_
