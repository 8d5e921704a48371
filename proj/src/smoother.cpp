// SPDX-FileCopyrightText: 2026 The hpgmxp authors
//
// SPDX-License-Identifier: Apache-2.0

#include "hpgmxp/smoother.hpp"

#include <algorithm>

#include "hpgmxp/errors.hpp"


namespace hpgmxp {
namespace {


template <typename T>
inline void relax_row(const EllMatrix<T>& A, std::span<const T> r,
                      std::span<T> z, local_index row)
{
    const auto& s = A.shape();
    const auto base = s.slot(row, 0);
    const int nnz = s.row_nnz[row];
    const int diag = s.diag_pos[row];
    T sum = r[row];
    for (int k = 0; k < nnz; ++k) {
        if (k != diag) {
            sum -= A.values[base + k] * z[s.col_idx[base + k]];
        }
    }
    const T d = A.values[base + diag];
    if (d == T{0}) {
        throw SingularDiagonal(row);
    }
    z[row] = sum / d;
}


template <typename T>
void count_rows(const EllMatrix<T>& A, local_index begin, local_index end,
                OpCounter* ops)
{
    if (!ops) {
        return;
    }
    for (local_index i = begin; i < end; ++i) {
        ops->flops += 2 * std::int64_t{A.shape().row_nnz[i]} + 1;
    }
}


}  // namespace


void SmootherSweeps::validate() const
{
    if (pre < 1 || post < 1 || coarse < 1) {
        throw ConfigError("smoother sweep counts must be at least one");
    }
}


template <typename T>
void forward_gs_sweep(const EllMatrix<T>& A, const Coloring& coloring,
                      std::span<const T> r, std::span<T> z, OpCounter* ops)
{
    for (int c = 0; c < coloring.num_colors; ++c) {
        for (auto i = coloring.color_offsets[c];
             i < coloring.color_offsets[c + 1]; ++i) {
            relax_row(A, r, z, i);
        }
    }
    count_rows(A, 0, A.n_rows(), ops);
}


template <typename T>
void forward_gs_sweep(Comm& comm, const HaloPlan& plan, const EllMatrix<T>& A,
                      const Coloring& coloring, std::span<const T> r,
                      std::span<T> z, HaloMode mode, OpCounter* ops)
{
    switch (mode) {
    case HaloMode::skip:
        forward_gs_sweep(A, coloring, r, z, ops);
        return;
    case HaloMode::blocking:
        exchange(comm, plan, z);
        forward_gs_sweep(A, coloring, r, z, ops);
        return;
    case HaloMode::overlapped:
        break;
    }

    // Color-0 rows only read other colors and the halo, so their interior
    // part can run once the boundary values have been packed.
    const local_index color0_end =
        coloring.num_colors > 0 ? coloring.color_offsets[1] : 0;
    const auto& interior = plan.interior_rows;
    const auto& boundary = plan.boundary_rows;
    const auto interior0 = std::lower_bound(interior.begin(), interior.end(),
                                            color0_end);
    const auto boundary0 = std::lower_bound(boundary.begin(), boundary.end(),
                                            color0_end);
    exchange_overlapped(comm, plan, z, [&] {
        for (auto it = interior.begin(); it != interior0; ++it) {
            relax_row(A, r, z, *it);
        }
    });
    for (auto it = boundary.begin(); it != boundary0; ++it) {
        relax_row(A, r, z, *it);
    }
    for (int c = 1; c < coloring.num_colors; ++c) {
        for (auto i = coloring.color_offsets[c];
             i < coloring.color_offsets[c + 1]; ++i) {
            relax_row(A, r, z, i);
        }
    }
    count_rows(A, 0, A.n_rows(), ops);
}


template void forward_gs_sweep(const EllMatrix<double>&, const Coloring&,
                               std::span<const double>, std::span<double>,
                               OpCounter*);
template void forward_gs_sweep(const EllMatrix<float>&, const Coloring&,
                               std::span<const float>, std::span<float>,
                               OpCounter*);
template void forward_gs_sweep(Comm&, const HaloPlan&, const EllMatrix<double>&,
                               const Coloring&, std::span<const double>,
                               std::span<double>, HaloMode, OpCounter*);
template void forward_gs_sweep(Comm&, const HaloPlan&, const EllMatrix<float>&,
                               const Coloring&, std::span<const float>,
                               std::span<float>, HaloMode, OpCounter*);


}  // namespace hpgmxp
