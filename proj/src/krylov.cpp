// SPDX-FileCopyrightText: 2026 The hpgmxp authors
//
// SPDX-License-Identifier: Apache-2.0

#include "hpgmxp/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <type_traits>

#include "hpgmxp/errors.hpp"


namespace hpgmxp {
namespace {


template <typename T>
inline T row_product(const EllStructure& s, const std::vector<T>& values,
                     std::span<const T> x, local_index row)
{
    const auto base = s.slot(row, 0);
    const int nnz = s.row_nnz[row];
    // smooth single precision inputs cancel heavily; sum in double
    double sum{0};
    for (int k = 0; k < nnz; ++k) {
        sum += double(values[base + k]) * double(x[s.col_idx[base + k]]);
    }
    return static_cast<T>(sum);
}


}  // namespace


template <typename T>
void spmv_rows(const EllMatrix<T>& A, std::span<const T> x, std::span<T> y,
               std::span<const local_index> rows, OpCounter* ops)
{
    const auto& s = A.shape();
    for (const auto row : rows) {
        y[row] = row_product(s, A.values, x, row);
        if (ops) {
            ops->flops += 2 * std::int64_t{s.row_nnz[row]};
        }
    }
}


template <typename T>
void spmv(const EllMatrix<T>& A, std::span<const T> x, std::span<T> y,
          OpCounter* ops)
{
    const auto& s = A.shape();
    for (local_index row = 0; row < s.n_rows; ++row) {
        y[row] = row_product(s, A.values, x, row);
    }
    if (ops) {
        ops->flops += 2 * s.nnz;
    }
}


template <typename T>
void spmv(Comm& comm, const HaloPlan& plan, const EllMatrix<T>& A,
          std::span<T> x, std::span<T> y, HaloMode mode, OpCounter* ops)
{
    const std::span<const T> xc(x.data(), x.size());
    switch (mode) {
    case HaloMode::skip:
        spmv(A, xc, y, ops);
        return;
    case HaloMode::blocking:
        exchange(comm, plan, x);
        spmv(A, xc, y, ops);
        return;
    case HaloMode::overlapped:
        exchange_overlapped(comm, plan, x, [&] {
            spmv_rows(A, xc, y, std::span<const local_index>(plan.interior_rows),
                      ops);
        });
        spmv_rows(A, xc, y, std::span<const local_index>(plan.boundary_rows),
                  ops);
        return;
    }
}


void residual(const EllMatrix<double>& A, std::span<const double> b,
              std::span<const double> x, std::span<double> r, OpCounter* ops)
{
    const auto& s = A.shape();
    for (local_index row = 0; row < s.n_rows; ++row) {
        r[row] = b[row] - row_product(s, A.values, x, row);
    }
    if (ops) {
        ops->flops += 2 * s.nnz + s.n_rows;
    }
}


template <typename T>
double local_dot(std::span<const T> a, std::span<const T> b, OpCounter* ops)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += double(a[i]) * double(b[i]);
    }
    if (ops) {
        ops->flops += 2 * static_cast<std::int64_t>(a.size());
    }
    return sum;
}


template <typename T>
double global_norm(Comm& comm, std::span<const T> v, OpCounter* ops)
{
    return std::sqrt(comm.all_reduce_sum(local_dot(v, v, ops)));
}


template <typename T>
void cgs2_orthogonalize(Comm& comm, std::span<const T> Q, local_index n, int k,
                        std::span<T> w, std::span<T> h, OpCounter* ops)
{
    std::vector<double> proj(k);
    std::fill(h.begin(), h.begin() + k, T{0});
    for (int pass = 0; pass < 2; ++pass) {
        // GEMVT
        for (int j = 0; j < k; ++j) {
            const T* q = Q.data() + std::size_t(j) * n;
            double sum = 0.0;
            for (local_index i = 0; i < n; ++i) {
                sum += double(q[i]) * double(w[i]);
            }
            proj[j] = sum;
        }
        comm.all_reduce_sum(std::span<double>(proj));
        // GEMV update
        for (int j = 0; j < k; ++j) {
            const T* q = Q.data() + std::size_t(j) * n;
            const T coef = static_cast<T>(proj[j]);
            for (local_index i = 0; i < n; ++i) {
                w[i] -= q[i] * coef;
            }
            h[j] += coef;
        }
        if (ops) {
            ops->flops += count_flops(Kernel::gemvt, {n, 0, k}) +
                          count_flops(Kernel::gemv_update, {n, 0, k});
        }
    }
}


template <typename T>
double givens_update(std::span<T> H, int ld, std::span<T> t, std::span<T> c,
                     std::span<T> s, int k)
{
    T* col = H.data() + std::size_t(k) * ld;
    for (int j = 0; j < k; ++j) {
        const double cj = c[j];
        const double sj = s[j];
        const double upper = col[j];
        const double lower = col[j + 1];
        col[j] = static_cast<T>(cj * upper + sj * lower);
        col[j + 1] = static_cast<T>(-sj * upper + cj * lower);
    }
    const double diag = col[k];
    const double sub = col[k + 1];
    const double mu = std::hypot(diag, sub);
    if (mu == 0.0) {
        throw BreakdownError(k + 1);
    }
    const double ck = diag / mu;
    const double sk = sub / mu;
    c[k] = static_cast<T>(ck);
    s[k] = static_cast<T>(sk);
    col[k] = static_cast<T>(mu);
    col[k + 1] = T{0};
    const double tk = t[k];
    t[k + 1] = static_cast<T>(-sk * tk);
    t[k] = static_cast<T>(ck * tk);
    return std::abs(double(t[k + 1]));
}


std::string_view precision_mode_name(PrecisionMode mode)
{
    return mode == PrecisionMode::mixed ? "mixed" : "double";
}


namespace {


/// Per-solve storage in the working precision T.
template <typename T>
struct GmresWorkspace {
    GmresWorkspace(int m, local_index n, local_index n_cols)
        : restart{m},
          n{n},
          Q(std::size_t(n) * (m + 1)),
          H(std::size_t(m + 1) * m),
          t(m + 1),
          c(m + 1),
          s(m + 1),
          z(n_cols),
          w(n)
    {}

    int restart;
    local_index n;
    std::vector<T> Q;
    std::vector<T> H;
    std::vector<T> t, c, s;
    std::vector<T> z, w;

    std::span<T> column(int j)
    {
        return {Q.data() + std::size_t(j) * n, std::size_t(n)};
    }
    T& h(int row, int col) { return H[std::size_t(col) * (restart + 1) + row]; }
};


template <typename T>
void check_replicas(Comm& comm, GmresWorkspace<T>& ws, int k)
{
    std::vector<double> local;
    const int ld = ws.restart + 1;
    for (int i = 0; i <= k + 1; ++i) {
        local.push_back(ws.H[std::size_t(k) * ld + i]);
        local.push_back(ws.t[i]);
    }
    for (int i = 0; i <= k; ++i) {
        local.push_back(ws.c[i]);
        local.push_back(ws.s[i]);
    }
    const auto all = comm.all_gather(local);
    const std::size_t len = local.size() * sizeof(double);
    for (int r = 1; r < comm.size(); ++r) {
        if (std::memcmp(all.data(), all.data() + r * local.size(), len) != 0) {
            throw ProtocolError("Hessenberg replicas diverged on rank " +
                                std::to_string(r));
        }
    }
}


template <typename T>
double orthogonality_error(Comm& comm, GmresWorkspace<T>& ws, int columns)
{
    std::vector<double> gram;
    for (int i = 0; i < columns; ++i) {
        for (int j = 0; j <= i; ++j) {
            gram.push_back(local_dot<T>(ws.column(i), ws.column(j)));
        }
    }
    comm.all_reduce_sum(std::span<double>(gram));
    double worst = 0.0;
    std::size_t idx = 0;
    for (int i = 0; i < columns; ++i) {
        for (int j = 0; j <= i; ++j) {
            worst = std::max(worst, std::abs(gram[idx++] - (i == j ? 1.0 : 0.0)));
        }
    }
    return worst;
}


template <typename T>
SolveResult gmres_ir(Comm& comm, MgHierarchy& mg, std::span<const double> b,
                     std::span<double> x, const GmresOptions& opt)
{
    if (opt.restart < 1) {
        throw ConfigError("restart length must be at least one");
    }
    auto& fine = mg.levels.front();
    const auto& A_hi = fine.A_hi;
    const auto& A_work = fine.matrix<T>();
    const local_index n = fine.n_rows();
    const int m = opt.restart;
    constexpr int width = sizeof(T);
    const auto halo_mode = opt.overlap ? HaloMode::overlapped : HaloMode::blocking;

    double cycle_reduction = opt.cycle_reduction;
    if (cycle_reduction < 0.0) {
        cycle_reduction = std::is_same_v<T, double>
                              ? 0.0
                              : 16.0 * std::numeric_limits<T>::epsilon() / 2;
    }

    SolveResult result;
    MotifTally* tally = &result.tally;
    GmresWorkspace<T> ws(m, n, fine.n_cols());
    std::vector<double> r(n);

    double rho0 = 0.0;
    {
        ScopedTimer timer(tally, Motif::vector_ops);
        rho0 = global_norm<double>(comm, b.first(n));
        tally->count(Motif::vector_ops, Kernel::norm, {n, 0, 0}, 8);
    }
    if (rho0 == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        result.converged = true;
        return result;
    }

    bool broke_down = false;
    while (true) {
        double rho = 0.0;
        {
            ScopedTimer timer(tally, Motif::spmv);
            exchange(comm, fine.plan, x);
            residual(A_hi, b, x, r);
            tally->count(Motif::spmv, Kernel::residual, {n, A_hi.nnz(), 0}, 8);
        }
        {
            ScopedTimer timer(tally, Motif::vector_ops);
            rho = global_norm<double>(comm, r);
            tally->count(Motif::vector_ops, Kernel::norm, {n, 0, 0}, 8);
        }
        if (!result.cycles.empty()) {
            result.cycles.back().true_residual = rho;
        }
        result.relative_residual = rho / rho0;
        if (result.relative_residual < opt.tolerance) {
            result.converged = true;
            break;
        }
        if (result.iterations >= opt.max_iterations || broke_down) {
            result.breakdown = broke_down;
            break;
        }

        {
            ScopedTimer timer(tally, Motif::vector_ops);
            auto q0 = ws.column(0);
            for (local_index i = 0; i < n; ++i) {
                q0[i] = static_cast<T>(r[i] / rho);
            }
            tally->count(Motif::vector_ops, Kernel::scale, {n, 0, 0}, width);
        }
        std::fill(ws.H.begin(), ws.H.end(), T{0});
        std::fill(ws.t.begin(), ws.t.end(), T{0});
        ws.t[0] = static_cast<T>(rho);

        double rho_inner = rho;
        int k = 0;
        bool last_normalized = true;
        while (k < m) {
            if (rho_inner / rho0 < opt.tolerance ||
                rho_inner < cycle_reduction * rho ||
                result.iterations >= opt.max_iterations) {
                break;
            }
            mg_vcycle<T>(comm, mg, 0, ws.column(k), ws.z, tally);
            {
                ScopedTimer timer(tally, Motif::spmv);
                spmv<T>(comm, fine.plan, A_work, ws.z, ws.w, halo_mode);
                tally->count(Motif::spmv, Kernel::spmv, {n, A_work.nnz(), 0},
                             width);
            }
            std::vector<T> h(k + 1);
            double beta = 0.0;
            {
                ScopedTimer timer(tally, Motif::ortho);
                cgs2_orthogonalize<T>(comm, ws.Q, n, k + 1, ws.w, h);
                beta = global_norm<T>(comm, ws.w);
                tally->count(Motif::ortho, Kernel::gemvt, {n, 0, k + 1}, width);
                tally->count(Motif::ortho, Kernel::gemv_update, {n, 0, k + 1},
                             width);
                tally->count(Motif::ortho, Kernel::gemvt, {n, 0, k + 1}, width);
                tally->count(Motif::ortho, Kernel::gemv_update, {n, 0, k + 1},
                             width);
                tally->count(Motif::ortho, Kernel::norm, {n, 0, 0}, width);
                for (int j = 0; j <= k; ++j) {
                    ws.h(j, k) = h[j];
                }
                ws.h(k + 1, k) = static_cast<T>(beta);
                last_normalized = beta != 0.0;
                if (last_normalized) {
                    auto next = ws.column(k + 1);
                    const T inv = static_cast<T>(1.0 / beta);
                    for (local_index i = 0; i < n; ++i) {
                        next[i] = ws.w[i] * inv;
                    }
                    tally->count(Motif::ortho, Kernel::scale, {n, 0, 0}, width);
                }
            }
            try {
                rho_inner = givens_update<T>(ws.H, m + 1, ws.t, ws.c, ws.s, k);
            } catch (const BreakdownError&) {
                broke_down = true;
                last_normalized = false;
                break;
            }
            if (opt.check_replicas) {
                check_replicas(comm, ws, k);
                ++result.replica_checks;
            }
            ++k;
            ++result.iterations;
            if (!last_normalized) {
                break;
            }
        }

        CycleRecord cycle;
        cycle.steps = k;
        cycle.recurrence_residual = rho_inner;
        if (opt.measure_orthogonality && k > 0) {
            cycle.orthogonality_error =
                orthogonality_error(comm, ws, last_normalized ? k + 1 : k);
        }
        if (k > 0) {
            // t <- H^-1 t by back substitution, redundantly on every rank
            std::vector<double> y(k);
            for (int i = k - 1; i >= 0; --i) {
                double sum = ws.t[i];
                for (int j = i + 1; j < k; ++j) {
                    sum -= double(ws.h(i, j)) * y[j];
                }
                y[i] = sum / double(ws.h(i, i));
            }
            auto& update = mg.levels.front().r<T>();
            {
                ScopedTimer timer(tally, Motif::vector_ops);
                std::fill(update.begin(), update.end(), T{0});
                for (int j = 0; j < k; ++j) {
                    const auto q = ws.column(j);
                    const T yj = static_cast<T>(y[j]);
                    for (local_index i = 0; i < n; ++i) {
                        update[i] += q[i] * yj;
                    }
                }
                tally->count(Motif::vector_ops, Kernel::gemv, {n, 0, k}, width);
            }
            mg_vcycle<T>(comm, mg, 0, update, ws.z, tally);
            {
                ScopedTimer timer(tally, Motif::vector_ops);
                for (local_index i = 0; i < n; ++i) {
                    x[i] += double(ws.z[i]);
                }
                tally->count(Motif::vector_ops, Kernel::axpy, {n, 0, 0}, 8);
            }
        }
        result.cycles.push_back(cycle);
        ++result.restarts;
    }
    return result;
}


}  // namespace


SolveResult gmres_solve(Comm& comm, MgHierarchy& mg, std::span<const double> b,
                        std::span<double> x, const GmresOptions& options)
{
    if (mg.levels.empty()) {
        throw ConfigError("GMRES needs a multigrid hierarchy");
    }
    const auto& fine = mg.levels.front();
    if (b.size() < static_cast<std::size_t>(fine.n_rows()) ||
        x.size() < static_cast<std::size_t>(fine.n_cols())) {
        throw ConfigError("GMRES vectors do not match the fine grid");
    }
    if (options.mode == PrecisionMode::mixed) {
        return gmres_ir<float>(comm, mg, b, x, options);
    }
    return gmres_ir<double>(comm, mg, b, x, options);
}


template void spmv_rows(const EllMatrix<double>&, std::span<const double>,
                        std::span<double>, std::span<const local_index>,
                        OpCounter*);
template void spmv_rows(const EllMatrix<float>&, std::span<const float>,
                        std::span<float>, std::span<const local_index>,
                        OpCounter*);
template void spmv(const EllMatrix<double>&, std::span<const double>,
                   std::span<double>, OpCounter*);
template void spmv(const EllMatrix<float>&, std::span<const float>,
                   std::span<float>, OpCounter*);
template void spmv(Comm&, const HaloPlan&, const EllMatrix<double>&,
                   std::span<double>, std::span<double>, HaloMode, OpCounter*);
template void spmv(Comm&, const HaloPlan&, const EllMatrix<float>&,
                   std::span<float>, std::span<float>, HaloMode, OpCounter*);
template double local_dot(std::span<const double>, std::span<const double>,
                          OpCounter*);
template double local_dot(std::span<const float>, std::span<const float>,
                          OpCounter*);
template double global_norm(Comm&, std::span<const double>, OpCounter*);
template double global_norm(Comm&, std::span<const float>, OpCounter*);
template void cgs2_orthogonalize(Comm&, std::span<const double>, local_index,
                                 int, std::span<double>, std::span<double>,
                                 OpCounter*);
template void cgs2_orthogonalize(Comm&, std::span<const float>, local_index, int,
                                 std::span<float>, std::span<float>,
                                 OpCounter*);
template double givens_update(std::span<double>, int, std::span<double>,
                              std::span<double>, std::span<double>, int);
template double givens_update(std::span<float>, int, std::span<float>,
                              std::span<float>, std::span<float>, int);


}  // namespace hpgmxp
