// SPDX-FileCopyrightText: 2026 The hpgmxp authors
//
// SPDX-License-Identifier: Apache-2.0

#include "hpgmxp/problem.hpp"

#include <ostream>


namespace hpgmxp {


EllMatrix<double> generate_matrix(const LocalDomain& d)
{
    const local_index n = d.n_rows();
    constexpr int w = EllStructure::width;

    auto s = std::make_shared<EllStructure>();
    s->n_rows = n;
    s->n_cols = n;
    s->col_idx.assign(std::size_t(n) * w, padding_column);
    s->global_col.assign(std::size_t(n) * w, -1);
    s->row_nnz.assign(n, 0);
    s->diag_pos.assign(n, 0);
    s->row_global.resize(n);
    std::vector<double> values(std::size_t(n) * w, 0.0);

    for (int k = 0; k < d.local.z; ++k) {
        for (int j = 0; j < d.local.y; ++j) {
            for (int i = 0; i < d.local.x; ++i) {
                const local_index row = local_row(d, i, j, k);
                const Index3 g{d.offset.x + i, d.offset.y + j, d.offset.z + k};
                s->row_global[row] = global_row(d, g);
                int nz = 0;
                // z-outer, x-inner visits neighbors in ascending global id
                for (int dz = -1; dz <= 1; ++dz) {
                    for (int dy = -1; dy <= 1; ++dy) {
                        for (int dx = -1; dx <= 1; ++dx) {
                            const Index3 p{g.x + dx, g.y + dy, g.z + dz};
                            if (p.x < 0 || p.x >= d.global.x || p.y < 0 ||
                                p.y >= d.global.y || p.z < 0 ||
                                p.z >= d.global.z) {
                                continue;
                            }
                            const auto slot = s->slot(row, nz);
                            s->global_col[slot] = global_row(d, p);
                            const Index3 l{p.x - d.offset.x, p.y - d.offset.y,
                                           p.z - d.offset.z};
                            const bool owned =
                                l.x >= 0 && l.x < d.local.x && l.y >= 0 &&
                                l.y < d.local.y && l.z >= 0 && l.z < d.local.z;
                            s->col_idx[slot] =
                                owned ? local_row(d, l.x, l.y, l.z)
                                      : unresolved_column;
                            if (dx == 0 && dy == 0 && dz == 0) {
                                values[slot] = stencil_diagonal;
                                s->diag_pos[row] = static_cast<std::uint8_t>(nz);
                            } else {
                                values[slot] = stencil_offdiagonal;
                            }
                            ++nz;
                        }
                    }
                }
                s->row_nnz[row] = static_cast<std::uint8_t>(nz);
                s->nnz += nz;
            }
        }
    }
    return EllMatrix<double>{std::move(s), std::move(values)};
}


ProblemVectors generate_rhs(const EllMatrix<double>& A)
{
    const auto& s = A.shape();
    ProblemVectors v;
    v.b.assign(s.n_rows, 0.0);
    v.x_exact.assign(s.n_cols, 1.0);
    v.x.assign(s.n_cols, 0.0);
    for (local_index i = 0; i < s.n_rows; ++i) {
        double sum = 0.0;
        for (const double a : A.row_values(i)) {
            sum += a;
        }
        v.b[i] = sum;
    }
    return v;
}


EllMatrix<float> to_low_precision(const EllMatrix<double>& A)
{
    EllMatrix<float> low;
    low.structure = A.structure;
    low.values.reserve(A.values.size());
    for (const double v : A.values) {
        low.values.push_back(static_cast<float>(v));
    }
    return low;
}


namespace {


struct Fnv1a {
    std::uint64_t h = 1469598103934665603ull;

    template <typename T>
    void add(const std::vector<T>& data)
    {
        const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
        for (std::size_t i = 0; i < data.size() * sizeof(T); ++i) {
            h ^= bytes[i];
            h *= 1099511628211ull;
        }
    }
};


}  // namespace


std::uint64_t structure_hash(const EllStructure& s)
{
    Fnv1a f;
    f.add(std::vector<std::int64_t>{s.n_rows, s.n_cols, s.nnz});
    f.add(s.col_idx);
    f.add(s.global_col);
    f.add(s.row_nnz);
    f.add(s.diag_pos);
    f.add(s.row_global);
    return f.h;
}


void write_matrix_market_header(std::ostream& os, global_index n_rows,
                                std::int64_t nnz)
{
    os << "%%MatrixMarket matrix coordinate real general\n"
       << n_rows << ' ' << n_rows << ' ' << nnz << '\n';
}


void write_matrix_market_rows(std::ostream& os, const EllMatrix<double>& A)
{
    const auto& s = A.shape();
    for (local_index i = 0; i < s.n_rows; ++i) {
        for (int k = 0; k < s.row_nnz[i]; ++k) {
            const auto slot = s.slot(i, k);
            // stencil values are small integers, printed exactly
            os << s.row_global[i] + 1 << ' ' << s.global_col[slot] + 1 << ' '
               << static_cast<long long>(A.values[slot]) << '\n';
        }
    }
}


}  // namespace hpgmxp
