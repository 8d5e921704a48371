// SPDX-FileCopyrightText: 2026 The hpgmxp authors
//
// SPDX-License-Identifier: Apache-2.0

#include "hpgmxp/coloring.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "hpgmxp/errors.hpp"


namespace hpgmxp {
namespace {


bool is_local_coupling(local_index row, local_index col, local_index n_rows)
{
    return col >= 0 && col < n_rows && col != row;
}


int smallest_free_color(const EllStructure& A, local_index row,
                        const std::vector<int>& color,
                        std::vector<char>& used)
{
    std::fill(used.begin(), used.end(), 0);
    for (const auto col : A.row_cols(row)) {
        if (is_local_coupling(row, col, A.n_rows) && color[col] >= 0) {
            used[color[col]] = 1;
        }
    }
    return static_cast<int>(std::find(used.begin(), used.end(), 0) -
                            used.begin());
}


std::vector<int> greedy_colors(const EllStructure& A)
{
    std::vector<int> color(A.n_rows, -1);
    std::vector<char> used(EllStructure::width + 1);
    for (local_index i = 0; i < A.n_rows; ++i) {
        color[i] = smallest_free_color(A, i, color, used);
    }
    return color;
}


std::vector<int> jpl_colors(const EllStructure& A, std::uint64_t seed)
{
    const local_index n = A.n_rows;
    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> weight(n);
    for (auto& w : weight) {
        w = rng();
    }
    // strict total order: weight, then row index
    auto beats = [&](local_index a, local_index b) {
        return weight[a] != weight[b] ? weight[a] > weight[b] : a > b;
    };

    std::vector<int> color(n, -1);
    std::vector<char> used(EllStructure::width + 1);
    std::vector<local_index> winners;
    local_index remaining = n;
    while (remaining > 0) {
        winners.clear();
        for (local_index i = 0; i < n; ++i) {
            if (color[i] >= 0) {
                continue;
            }
            bool local_max = true;
            for (const auto col : A.row_cols(i)) {
                if (is_local_coupling(i, col, n) && color[col] < 0 &&
                    beats(col, i)) {
                    local_max = false;
                    break;
                }
            }
            if (local_max) {
                winners.push_back(i);
            }
        }
        // winners are pairwise uncoupled, so their colors are independent
        for (const auto i : winners) {
            color[i] = smallest_free_color(A, i, color, used);
        }
        remaining -= static_cast<local_index>(winners.size());
    }
    return color;
}


}  // namespace


ColoringStrategy coloring_strategy_from_string(std::string_view name)
{
    if (name == "greedy") {
        return ColoringStrategy::greedy;
    }
    if (name == "jpl") {
        return ColoringStrategy::jpl;
    }
    throw ConfigError("unknown coloring strategy '" + std::string(name) + "'");
}


Coloring make_coloring(std::vector<int> colors)
{
    Coloring c;
    const auto n = static_cast<local_index>(colors.size());
    c.num_colors =
        n == 0 ? 0 : *std::max_element(colors.begin(), colors.end()) + 1;
    c.color_offsets.assign(c.num_colors + 1, 0);
    for (const int k : colors) {
        ++c.color_offsets[k + 1];
    }
    std::partial_sum(c.color_offsets.begin(), c.color_offsets.end(),
                     c.color_offsets.begin());
    c.perm.resize(n);
    c.iperm.resize(n);
    auto next = c.color_offsets;
    for (local_index i = 0; i < n; ++i) {
        const local_index dst = next[colors[i]]++;
        c.perm[i] = dst;
        c.iperm[dst] = i;
    }
    c.color = std::move(colors);
    return c;
}


Coloring color_matrix(const EllStructure& A, ColoringStrategy strategy,
                      std::uint64_t seed)
{
    return make_coloring(strategy == ColoringStrategy::greedy
                             ? greedy_colors(A)
                             : jpl_colors(A, seed));
}


bool is_valid_coloring(const EllStructure& A, std::span<const int> color)
{
    if (color.size() != static_cast<std::size_t>(A.n_rows)) {
        return false;
    }
    for (local_index i = 0; i < A.n_rows; ++i) {
        for (const auto col : A.row_cols(i)) {
            if (is_local_coupling(i, col, A.n_rows) && color[i] == color[col]) {
                return false;
            }
        }
    }
    return true;
}


template <typename T>
EllMatrix<T> permute_matrix(const EllMatrix<T>& A,
                            std::span<const local_index> perm)
{
    const auto& src = A.shape();
    constexpr int w = EllStructure::width;
    auto dst = std::make_shared<EllStructure>(src);
    std::vector<T> values(A.values.size());
    for (local_index i = 0; i < src.n_rows; ++i) {
        const local_index p = perm[i];
        const auto from = src.slot(i, 0);
        const auto to = dst->slot(p, 0);
        // entry order is by global column, which relabeling does not change
        for (int k = 0; k < w; ++k) {
            const local_index col = src.col_idx[from + k];
            dst->col_idx[to + k] =
                (col >= 0 && col < src.n_rows) ? perm[col] : col;
            dst->global_col[to + k] = src.global_col[from + k];
            values[to + k] = A.values[from + k];
        }
        dst->row_nnz[p] = src.row_nnz[i];
        dst->diag_pos[p] = src.diag_pos[i];
        dst->row_global[p] = src.row_global[i];
    }
    return EllMatrix<T>{std::move(dst), std::move(values)};
}


template <typename T>
std::vector<T> permute_vector(std::span<const T> in,
                              std::span<const local_index> perm)
{
    std::vector<T> out(in.begin(), in.end());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        out[perm[i]] = in[i];
    }
    return out;
}


template EllMatrix<double> permute_matrix(const EllMatrix<double>&,
                                          std::span<const local_index>);
template EllMatrix<float> permute_matrix(const EllMatrix<float>&,
                                         std::span<const local_index>);
template std::vector<double> permute_vector(std::span<const double>,
                                            std::span<const local_index>);
template std::vector<float> permute_vector(std::span<const float>,
                                           std::span<const local_index>);


}  // namespace hpgmxp
