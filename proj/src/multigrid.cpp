// SPDX-FileCopyrightText: 2026 The hpgmxp authors
//
// SPDX-License-Identifier: Apache-2.0

#include "hpgmxp/multigrid.hpp"

#include <algorithm>

#include "hpgmxp/errors.hpp"
#include "hpgmxp/problem.hpp"


namespace hpgmxp {
namespace {


std::uint64_t level_seed(std::uint64_t seed, const LocalDomain& d)
{
    return seed + 0x9e3779b97f4a7c15ull *
                      (std::uint64_t(d.rank) * 64 + std::uint64_t(d.level) + 1);
}


}  // namespace


MgLevel build_level(const LocalDomain& domain, const MgOptions& options)
{
    MgLevel lev;
    lev.domain = domain;
    auto A = generate_matrix(domain);
    const auto plan = build_halo_plan(domain, A);
    lev.coloring = color_matrix(A.shape(), options.coloring,
                                level_seed(options.seed, domain));
    lev.A_hi = permute_matrix(A, lev.coloring.perm);
    lev.plan = permute_plan(plan, lev.coloring.perm);
    lev.A_lo = to_low_precision(lev.A_hi);
    lev.r_hi.assign(lev.n_rows(), 0.0);
    lev.z_hi.assign(lev.n_cols(), 0.0);
    lev.r_lo.assign(lev.n_rows(), 0.0f);
    lev.z_lo.assign(lev.n_cols(), 0.0f);
    return lev;
}


std::vector<local_index> injection_map(const MgLevel& fine,
                                       const MgLevel& coarse)
{
    const auto& cd = coarse.domain;
    std::vector<local_index> f2c(coarse.n_rows());
    for (local_index p = 0; p < coarse.n_rows(); ++p) {
        const local_index c = coarse.coloring.iperm[p];
        const int x = c % cd.local.x;
        const int y = (c / cd.local.x) % cd.local.y;
        const int z = c / (cd.local.x * cd.local.y);
        const local_index f = local_row(fine.domain, 2 * x, 2 * y, 2 * z);
        f2c[p] = fine.coloring.perm[f];
    }
    return f2c;
}


MgHierarchy build_hierarchy(const LocalDomain& fine, const MgOptions& options)
{
    options.sweeps.validate();
    if (options.levels < 1) {
        throw ConfigError("at least one multigrid level is required");
    }
    // fail before any assembly if the chain cannot be built
    auto domain = fine;
    for (int l = 1; l < options.levels; ++l) {
        domain = coarsen(domain);
    }

    MgHierarchy mg;
    mg.options = options;
    domain = fine;
    for (int l = 0; l < options.levels; ++l) {
        if (l > 0) {
            domain = coarsen(domain);
        }
        mg.levels.push_back(build_level(domain, options));
    }
    for (int l = 0; l + 1 < options.levels; ++l) {
        auto& lev = mg.levels[l];
        lev.f2c = injection_map(lev, mg.levels[l + 1]);
        lev.f2c_nnz = 0;
        for (const auto row : lev.f2c) {
            lev.f2c_nnz += lev.A_hi.shape().row_nnz[row];
        }
    }
    return mg;
}


template <typename T>
void restrict_inject(std::span<const T> fine, std::span<const local_index> f2c,
                     std::span<T> coarse)
{
    for (std::size_t i = 0; i < f2c.size(); ++i) {
        coarse[i] = fine[f2c[i]];
    }
}


template <typename T>
void fused_residual_restrict(const EllMatrix<T>& A, std::span<const T> b,
                             std::span<const T> x,
                             std::span<const local_index> f2c,
                             std::span<T> r_c, OpCounter* ops)
{
    const auto& s = A.shape();
    for (std::size_t i = 0; i < f2c.size(); ++i) {
        const local_index row = f2c[i];
        const auto base = s.slot(row, 0);
        const int nnz = s.row_nnz[row];
        T ax{0};
        for (int k = 0; k < nnz; ++k) {
            ax += A.values[base + k] * x[s.col_idx[base + k]];
        }
        r_c[i] = b[row] - ax;
        if (ops) {
            ops->flops += 2 * std::int64_t{nnz} + 1;
        }
    }
}


template <typename T>
void prolong_add(std::span<T> fine, std::span<const T> coarse,
                 std::span<const local_index> f2c, OpCounter* ops)
{
    for (std::size_t i = 0; i < f2c.size(); ++i) {
        fine[f2c[i]] += coarse[i];
    }
    if (ops) {
        ops->flops += static_cast<std::int64_t>(f2c.size());
    }
}


template <typename T>
void mg_vcycle(Comm& comm, MgHierarchy& mg, int level, std::span<const T> r,
               std::span<T> z, MotifTally* tally)
{
    auto& lev = mg.levels.at(level);
    const auto& A = lev.matrix<T>();
    const auto& sweeps = mg.options.sweeps;
    const auto mode =
        mg.options.overlap ? HaloMode::overlapped : HaloMode::blocking;
    const bool coarsest = level + 1 == static_cast<int>(mg.levels.size());
    const KernelSize gs_size{A.n_rows(), A.nnz(), 0};
    constexpr int width = sizeof(T);

    auto smooth = [&](int count, bool zero_guess) {
        for (int s = 0; s < count; ++s) {
            ScopedTimer timer(tally, Motif::gs);
            // the halo of a zero iterate is zero, so the first exchange is
            // skipped
            forward_gs_sweep(comm, lev.plan, A, lev.coloring, r, z,
                             (zero_guess && s == 0) ? HaloMode::skip : mode);
            if (tally) {
                tally->count(Motif::gs, Kernel::gs_sweep, gs_size, width);
            }
        }
    };

    std::fill(z.begin(), z.begin() + lev.n_cols(), T{0});
    if (coarsest) {
        smooth(sweeps.coarse, true);
        return;
    }
    smooth(sweeps.pre, true);

    auto& next = mg.levels[level + 1];
    auto& r_c = next.r<T>();
    auto& z_c = next.z<T>();
    {
        ScopedTimer timer(tally, Motif::restriction);
        exchange(comm, lev.plan, z);
        fused_residual_restrict<T>(A, r, z, lev.f2c, r_c);
        if (tally) {
            tally->count(Motif::restriction, Kernel::fused_restrict,
                         {next.n_rows(), lev.f2c_nnz, 0}, width);
        }
    }
    mg_vcycle<T>(comm, mg, level + 1, r_c, z_c, tally);
    {
        ScopedTimer timer(tally, Motif::prolongation);
        prolong_add<T>(z, z_c, lev.f2c);
        if (tally) {
            tally->count(Motif::prolongation, Kernel::prolong,
                         {next.n_rows(), 0, 0}, width);
        }
    }
    smooth(sweeps.post, false);
}


template void restrict_inject(std::span<const double>,
                              std::span<const local_index>, std::span<double>);
template void restrict_inject(std::span<const float>,
                              std::span<const local_index>, std::span<float>);
template void fused_residual_restrict(const EllMatrix<double>&,
                                      std::span<const double>,
                                      std::span<const double>,
                                      std::span<const local_index>,
                                      std::span<double>, OpCounter*);
template void fused_residual_restrict(const EllMatrix<float>&,
                                      std::span<const float>,
                                      std::span<const float>,
                                      std::span<const local_index>,
                                      std::span<float>, OpCounter*);
template void prolong_add(std::span<double>, std::span<const double>,
                          std::span<const local_index>, OpCounter*);
template void prolong_add(std::span<float>, std::span<const float>,
                          std::span<const local_index>, OpCounter*);
template void mg_vcycle(Comm&, MgHierarchy&, int, std::span<const double>,
                        std::span<double>, MotifTally*);
template void mg_vcycle(Comm&, MgHierarchy&, int, std::span<const float>,
                        std::span<float>, MotifTally*);


}  // namespace hpgmxp
