// SPDX-FileCopyrightText: 2026 The hpgmxp authors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef HPGMXP_PROBLEM_HPP_
#define HPGMXP_PROBLEM_HPP_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "hpgmxp/ell_matrix.hpp"
#include "hpgmxp/geometry.hpp"


namespace hpgmxp {


inline constexpr double stencil_diagonal = 26.0;
inline constexpr double stencil_offdiagonal = -1.0;


/**
 * Assembles the rows owned by `domain` of the 27-point stencil matrix.
 *
 * Each point couples to every point of its 3x3x3 neighborhood inside the
 * global grid. On-rank couplings carry local column indices; off-rank ones
 * are marked `unresolved_column` with their global id kept in `global_col`,
 * and are resolved by build_halo_plan.
 */
EllMatrix<double> generate_matrix(const LocalDomain& domain);


struct ProblemVectors {
    std::vector<double> b;
    std::vector<double> x_exact;
    std::vector<double> x;
};

/// b = A * 1, x_exact = 1, x = 0. Vectors x and x_exact span all columns.
ProblemVectors generate_rhs(const EllMatrix<double>& A);

/// Rounds the values to single precision; the structure is shared.
EllMatrix<float> to_low_precision(const EllMatrix<double>& A);

/// FNV-1a hash of the sparsity structure (columns, counts, diagonal slots).
std::uint64_t structure_hash(const EllStructure& s);

/// Writes the entries of `A` as MatrixMarket coordinate lines with 1-based
/// global indices, so several ranks' rows can follow a single header.
void write_matrix_market_rows(std::ostream& os, const EllMatrix<double>& A);

void write_matrix_market_header(std::ostream& os, global_index n_rows,
                                std::int64_t nnz);


}  // namespace hpgmxp

#endif  // HPGMXP_PROBLEM_HPP_
