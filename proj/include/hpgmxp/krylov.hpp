// SPDX-FileCopyrightText: 2026 The hpgmxp authors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef HPGMXP_KRYLOV_HPP_
#define HPGMXP_KRYLOV_HPP_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hpgmxp/comm.hpp"
#include "hpgmxp/ell_matrix.hpp"
#include "hpgmxp/metrics.hpp"
#include "hpgmxp/multigrid.hpp"
#include "hpgmxp/smoother.hpp"


namespace hpgmxp {


/// y = A x over the given rows. Each row is accumulated in double in stored
/// (global column) order and rounded to T once.
template <typename T>
void spmv_rows(const EllMatrix<T>& A, std::span<const T> x, std::span<T> y,
               std::span<const local_index> rows, OpCounter* ops = nullptr);

/// y = A x for every owned row; the halo of x must be current.
template <typename T>
void spmv(const EllMatrix<T>& A, std::span<const T> x, std::span<T> y,
          OpCounter* ops = nullptr);

/// Collective y = A x. Refreshes the halo of x; with HaloMode::overlapped the
/// interior rows are computed while the exchange is in flight.
template <typename T>
void spmv(Comm& comm, const HaloPlan& plan, const EllMatrix<T>& A,
          std::span<T> x, std::span<T> y, HaloMode mode,
          OpCounter* ops = nullptr);

/// r = b - A x over owned rows (halo of x must be current).
void residual(const EllMatrix<double>& A, std::span<const double> b,
              std::span<const double> x, std::span<double> r,
              OpCounter* ops = nullptr);

/// Local part of a dot product, accumulated in double.
template <typename T>
double local_dot(std::span<const T> a, std::span<const T> b,
                 OpCounter* ops = nullptr);

/// Global 2-norm through a fixed-order all-reduce.
template <typename T>
double global_norm(Comm& comm, std::span<const T> v, OpCounter* ops = nullptr);


/**
 * Two passes of classical Gram-Schmidt against the first `k` columns of the
 * column-major basis `Q` (leading dimension `n`).
 *
 * Each pass computes h = Q^T w with one batched all-reduce, then
 * w <- w - Q h. The sum of both passes' coefficients is stored in h[0, k).
 * Projections are accumulated in double and rounded to T.
 */
template <typename T>
void cgs2_orthogonalize(Comm& comm, std::span<const T> Q, local_index n, int k,
                        std::span<T> w, std::span<T> h,
                        OpCounter* ops = nullptr);


/**
 * Applies the previous rotations to column `k` (0-based) of the column-major
 * (m+1) x m Hessenberg matrix `H`, then builds the rotation that zeroes
 * H(k+1, k) and updates the projected right-hand side `t`.
 *
 * The arithmetic is done in double on promoted values and stored back in T.
 * Returns the residual estimate |t(k+1)|. Throws BreakdownError when both
 * H(k, k) and H(k+1, k) vanish.
 */
template <typename T>
double givens_update(std::span<T> H, int ld, std::span<T> t, std::span<T> c,
                     std::span<T> s, int k);


enum class PrecisionMode { double_precision, mixed };

std::string_view precision_mode_name(PrecisionMode mode);


struct GmresOptions {
    int restart = 30;
    double tolerance = 1e-9;
    std::int64_t max_iterations = 300;
    PrecisionMode mode = PrecisionMode::double_precision;
    /// A restart cycle also ends once its Givens estimate has dropped by
    /// this factor relative to the residual the cycle started from; 0
    /// disables the test. Negative selects the default for the mode: 0 in
    /// double, 16 unit roundoffs of single precision in mixed mode, the
    /// accuracy limit of a single precision correction.
    double cycle_reduction = -1.0;
    bool overlap = true;
    /// Verify after every rotation that H, t, c and s match across ranks.
    bool check_replicas = false;
    /// Record max |Q^T Q - I| of every restart cycle's basis.
    bool measure_orthogonality = false;
};


/// Bookkeeping of one restart cycle.
struct CycleRecord {
    int steps = 0;
    /// Givens estimate of the residual norm at the end of the cycle.
    double recurrence_residual = 0.0;
    /// ||b - A x|| after the cycle's update; -1 when never evaluated.
    double true_residual = -1.0;
    /// max |Q^T Q - I|; -1 unless measured.
    double orthogonality_error = -1.0;
};


struct SolveResult {
    std::int64_t iterations = 0;
    int restarts = 0;
    double relative_residual = 0.0;
    bool converged = false;
    bool breakdown = false;
    std::vector<CycleRecord> cycles;
    MotifTally tally;
    std::int64_t replica_checks = 0;
};


/**
 * Right-preconditioned restarted GMRES with iterative refinement.
 *
 * The true residual b - A x and the solution update are always computed in
 * double. In mixed mode the preconditioner, SpMV, Krylov basis, Hessenberg
 * matrix and rotations use the single precision matrix and storage; in
 * double mode the same code runs in double throughout.
 *
 * Convergence is declared when ||b - A x|| / ||b|| < tolerance. The inner
 * loop stops early when the Givens estimate meets the same test or the
 * cycle reduction. At most `max_iterations` inner steps are taken in total.
 */
SolveResult gmres_solve(Comm& comm, MgHierarchy& mg, std::span<const double> b,
                        std::span<double> x, const GmresOptions& options);


}  // namespace hpgmxp

#endif  // HPGMXP_KRYLOV_HPP_
