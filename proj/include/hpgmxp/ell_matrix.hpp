// SPDX-FileCopyrightText: 2026 The hpgmxp authors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef HPGMXP_ELL_MATRIX_HPP_
#define HPGMXP_ELL_MATRIX_HPP_

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "hpgmxp/geometry.hpp"


namespace hpgmxp {


/// Column index of a padding slot.
inline constexpr local_index padding_column = -1;

/// Column index of an off-rank coupling whose halo slot is not yet assigned.
inline constexpr local_index unresolved_column = -2;


/**
 * Sparsity structure of a padded ELLPACK matrix.
 *
 * Rows are stored row-major with `width` slots each. The first
 * `row_nnz[i]` slots of row i hold the nonzeros, sorted by ascending global
 * column; the remaining slots are padding (column `padding_column`, value
 * zero). Columns `< n_rows` are owned rows, columns in
 * `[n_rows, n_cols)` are halo slots.
 *
 * The structure is immutable once built and shared between the matrix copies
 * of different precisions.
 */
struct EllStructure {
    static constexpr int width = 27;

    local_index n_rows = 0;
    local_index n_cols = 0;
    std::int64_t nnz = 0;
    std::vector<local_index> col_idx;
    std::vector<global_index> global_col;
    std::vector<std::uint8_t> row_nnz;
    std::vector<std::uint8_t> diag_pos;
    /// Global id of each local row in the current row ordering.
    std::vector<global_index> row_global;

    std::size_t slot(local_index row, int k) const noexcept
    {
        return static_cast<std::size_t>(row) * width + k;
    }

    local_index halo_size() const noexcept { return n_cols - n_rows; }

    std::span<const local_index> row_cols(local_index row) const noexcept
    {
        return {col_idx.data() + slot(row, 0), row_nnz[row]};
    }
};


template <typename T>
struct EllMatrix {
    using value_type = T;
    static constexpr int width = EllStructure::width;

    std::shared_ptr<const EllStructure> structure;
    std::vector<T> values;

    const EllStructure& shape() const noexcept { return *structure; }
    local_index n_rows() const noexcept { return structure->n_rows; }
    local_index n_cols() const noexcept { return structure->n_cols; }
    std::int64_t nnz() const noexcept { return structure->nnz; }

    std::span<const T> row_values(local_index row) const noexcept
    {
        return {values.data() + structure->slot(row, 0),
                structure->row_nnz[row]};
    }

    T diagonal(local_index row) const noexcept
    {
        return values[structure->slot(row, structure->diag_pos[row])];
    }
};


}  // namespace hpgmxp

#endif  // HPGMXP_ELL_MATRIX_HPP_
