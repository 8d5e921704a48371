// SPDX-FileCopyrightText: 2026 The hpgmxp authors
//
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <gtest/gtest.h>

#include "hpgmxp/bench.hpp"
#include "hpgmxp/errors.hpp"
#include "hpgmxp/krylov.hpp"
#include "hpgmxp/problem.hpp"
#include "oracles.hpp"


namespace {


using namespace hpgmxp;


LocalDomain single(Extent3 local)
{
    return make_local_domain(GlobalProblem::make(local, 1), 0);
}


SolveResult solve(Extent3 local, int ranks, GmresOptions opts,
                  int levels = 4, std::vector<double>* x_out = nullptr)
{
    const auto problem = GlobalProblem::make(local, ranks);
    MgOptions mo;
    mo.levels = levels;
    SolveResult out;
    RankWorld world(ranks);
    run_ranks(world, [&](Comm& comm) {
        auto sys = setup_rank_system(problem, comm.rank(), mo);
        auto res = gmres_solve(comm, sys.mg, sys.b, sys.x, opts);
        if (comm.rank() == 0) {
            out = std::move(res);
            if (x_out) {
                *x_out = sys.x;
            }
        }
    });
    return out;
}


GmresOptions options(PrecisionMode mode, double tol = 1e-9)
{
    GmresOptions o;
    o.mode = mode;
    o.tolerance = tol;
    return o;
}


TEST(Spmv, MatchesDenseOracleOnIntegers)
{
    const Extent3 g{4, 4, 4};
    const auto A = generate_matrix(single(g));
    const auto n = std::size_t(g.volume());
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = double(int(i * 37 % 19) - 9);
    }
    std::vector<double> y(n);
    OpCounter ops;
    spmv<double>(A, x, y, &ops);
    EXPECT_EQ(y, oracle::matvec(oracle::dense_stencil(g), n, n, x));
    EXPECT_EQ(ops.flops, count_flops(Kernel::spmv, {A.n_rows(), A.nnz(), 0}));

    const auto L = to_low_precision(A);
    std::vector<float> xf(x.begin(), x.end()), yf(n);
    spmv<float>(L, xf, yf);
    EXPECT_EQ(std::vector<double>(yf.begin(), yf.end()), y);
}


TEST(Spmv, OnesGiveRhsAndZerosGiveZero)
{
    const auto A = generate_matrix(single({5, 3, 4}));
    const auto v = generate_rhs(A);
    std::vector<double> y(A.n_rows());
    spmv<double>(A, v.x_exact, y);
    EXPECT_EQ(y, v.b);
    spmv<double>(A, v.x, y);
    EXPECT_EQ(y, std::vector<double>(y.size(), 0.0));
}


TEST(Residual, CountsResidualKernel)
{
    const auto A = generate_matrix(single({4, 4, 4}));
    const auto v = generate_rhs(A);
    std::vector<double> r(A.n_rows());
    OpCounter ops;
    residual(A, v.b, v.x_exact, r, &ops);
    EXPECT_EQ(r, std::vector<double>(r.size(), 0.0));
    EXPECT_EQ(ops.flops,
              count_flops(Kernel::residual, {A.n_rows(), A.nnz(), 0}));
}


TEST(Dot, AccumulatesInDouble)
{
    // 2^24 + 1 is not representable in single precision
    const std::vector<float> a{16777216.0f, 1.0f};
    const std::vector<float> b{1.0f, 1.0f};
    OpCounter ops;
    EXPECT_EQ(local_dot<float>(a, b, &ops), 16777217.0);
    EXPECT_EQ(ops.flops, count_flops(Kernel::dot, {2, 0, 0}));
}


TEST(Dot, GlobalNormOverRanks)
{
    RankWorld world(4);
    run_ranks(world, [](Comm& comm) {
        const std::vector<double> v{double(comm.rank()), 1.0};
        // 0 + 1 + 4 + 9 + 4 * 1
        EXPECT_EQ(global_norm<double>(comm, v), std::sqrt(18.0));
    });
}


std::vector<double> unit_vector(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> v(n);
    double s = 0.0;
    for (auto& e : v) {
        e = g(rng);
        s += e * e;
    }
    for (auto& e : v) {
        e /= std::sqrt(s);
    }
    return v;
}


TEST(Cgs2, OrthogonalInputUntouched)
{
    RankWorld world(1);
    run_ranks(world, [](Comm& comm) {
        const std::vector<double> Q{1, 0, 0, 0};
        std::vector<double> w{0, 2, -1, 3};
        const auto w0 = w;
        std::vector<double> h(1, 5.0);
        cgs2_orthogonalize<double>(comm, Q, 4, 1, w, h);
        EXPECT_EQ(h[0], 0.0);
        EXPECT_EQ(w, w0);
    });
}


TEST(Cgs2, ParallelInputDeflated)
{
    RankWorld world(1);
    run_ranks(world, [](Comm& comm) {
        const auto q = unit_vector(500, 3);
        auto w = q;
        std::vector<double> h(1);
        OpCounter ops;
        cgs2_orthogonalize<double>(comm, q, 500, 1, w, h, &ops);
        EXPECT_NEAR(h[0], 1.0, 1e-14);
        EXPECT_LE(oracle::norm2(w, w.size()), 1e-14);
        EXPECT_EQ(ops.flops, 2 * (count_flops(Kernel::gemvt, {500, 0, 1}) +
                                  count_flops(Kernel::gemv_update,
                                              {500, 0, 1})));
    });
}


TEST(Cgs2, DistributedMatchesSerialCoefficients)
{
    // three basis columns split over two ranks
    const std::size_t n = 40;
    std::vector<double> Q;
    for (int j = 0; j < 3; ++j) {
        const auto q = unit_vector(n, 10 + j);
        Q.insert(Q.end(), q.begin(), q.end());
    }
    const auto w_full = unit_vector(n, 99);
    std::vector<double> h_serial(3);
    {
        RankWorld world(1);
        run_ranks(world, [&](Comm& comm) {
            auto w = w_full;
            cgs2_orthogonalize<double>(comm, Q, n, 3, w, h_serial);
        });
    }
    RankWorld world(2);
    run_ranks(world, [&](Comm& comm) {
        const std::size_t half = n / 2;
        const std::size_t lo = comm.rank() * half;
        std::vector<double> Ql;
        for (int j = 0; j < 3; ++j) {
            Ql.insert(Ql.end(), Q.begin() + j * n + lo,
                      Q.begin() + j * n + lo + half);
        }
        std::vector<double> w(w_full.begin() + lo, w_full.begin() + lo + half);
        std::vector<double> h(3);
        cgs2_orthogonalize<double>(comm, Ql, half, 3, w, h);
        for (int j = 0; j < 3; ++j) {
            EXPECT_NEAR(h[j], h_serial[j], 1e-15);
        }
    });
}


TEST(Givens, ThreeFourFive)
{
    const int ld = 3;
    std::vector<double> H(ld * 2, 0.0);
    H[0] = 3.0;
    H[1] = 4.0;
    const double rho0 = 2.0;
    std::vector<double> t{rho0, 0.0, 0.0}, c(3), s(3);
    const double rho = givens_update<double>(H, ld, t, c, s, 0);
    EXPECT_DOUBLE_EQ(H[0], 5.0);
    EXPECT_EQ(H[1], 0.0);
    EXPECT_DOUBLE_EQ(c[0], 0.6);
    EXPECT_DOUBLE_EQ(s[0], 0.8);
    EXPECT_DOUBLE_EQ(t[1], -rho0 * 0.8);
    EXPECT_DOUBLE_EQ(t[0], rho0 * 0.6);
    EXPECT_DOUBLE_EQ(rho, rho0 * 0.8);
}


TEST(Givens, TriangularColumnGivesIdentity)
{
    const int ld = 2;
    std::vector<double> H{2.5, 0.0};
    std::vector<double> t{-7.0, 0.0}, c(2), s(2);
    const double rho = givens_update<double>(H, ld, t, c, s, 0);
    EXPECT_EQ(c[0], 1.0);
    EXPECT_EQ(s[0], 0.0);
    EXPECT_EQ(t[0], -7.0);
    EXPECT_EQ(rho, 0.0);
}


TEST(Givens, EarlierRotationsApplied)
{
    // two steps of a random Hessenberg matrix against a QR oracle
    const int ld = 3;
    std::vector<double> H{1.0, 2.0, 0.0, 3.0, -1.0, 0.5};
    const std::vector<double> H0 = H;
    std::vector<double> t{1.0, 0.0, 0.0}, c(3), s(3);
    givens_update<double>(H, ld, t, c, s, 0);
    const double rho = givens_update<double>(H, ld, t, c, s, 1);
    EXPECT_EQ(H[1], 0.0);
    EXPECT_EQ(H[5], 0.0);
    // least-squares residual of min ||e1 - H0 y|| computed directly
    const double a = H0[0], b = H0[1], d = H0[3], e = H0[4], f = H0[5];
    // normal equations of the 3x2 problem
    const double m11 = a * a + b * b, m12 = a * d + b * e;
    const double m22 = d * d + e * e + f * f;
    const double det = m11 * m22 - m12 * m12;
    const double y1 = (m22 * a - m12 * d) / det;
    const double y2 = (m11 * d - m12 * a) / det;
    const double r0 = 1.0 - (a * y1 + d * y2);
    const double r1 = -(b * y1 + e * y2);
    const double r2 = -(f * y2);
    EXPECT_NEAR(rho, std::sqrt(r0 * r0 + r1 * r1 + r2 * r2), 1e-14);
}


TEST(Givens, ZeroColumnBreaksDown)
{
    std::vector<double> H{0.0, 0.0};
    std::vector<double> t{1.0, 0.0}, c(2), s(2);
    EXPECT_THROW(givens_update<double>(H, 2, t, c, s, 0), BreakdownError);
}


TEST(Gmres, ZeroRightHandSide)
{
    auto mg = build_hierarchy(single({4, 4, 4}), MgOptions{.levels = 3});
    std::vector<double> b(64, 0.0), x(mg.levels[0].n_cols(), 3.0);
    RankWorld world(1);
    run_ranks(world, [&](Comm& comm) {
        for (const auto mode :
             {PrecisionMode::double_precision, PrecisionMode::mixed}) {
            const auto res = gmres_solve(comm, mg, b, x, options(mode));
            EXPECT_TRUE(res.converged);
            EXPECT_EQ(res.iterations, 0);
            EXPECT_EQ(res.relative_residual, 0.0);
            EXPECT_EQ(x, std::vector<double>(x.size(), 0.0));
        }
    });
}


TEST(Gmres, DoubleDeskProblem)
{
    auto opts = options(PrecisionMode::double_precision);
    opts.measure_orthogonality = true;
    std::vector<double> x;
    const auto res = solve({16, 16, 16}, 1, opts, 4, &x);
    ASSERT_TRUE(res.converged);
    EXPECT_LT(res.relative_residual, 1e-9);
    // regression fixture
    EXPECT_EQ(res.iterations, 16);
    for (const auto& c : res.cycles) {
        EXPECT_LE(std::abs(c.recurrence_residual - c.true_residual) /
                      c.true_residual,
                  1e-6);
        EXPECT_LE(c.orthogonality_error, 1e-8);
    }
    double err = 0.0;
    for (local_index i = 0; i < 4096; ++i) {
        err = std::max(err, std::abs(x[i] - 1.0));
    }
    EXPECT_LT(err, 1e-6);
}


TEST(Gmres, MixedDeskProblem)
{
    const auto res = solve({16, 16, 16}, 1, options(PrecisionMode::mixed));
    ASSERT_TRUE(res.converged);
    EXPECT_LT(res.relative_residual, 1e-9);
    // regression fixture, within 15% of the double count
    EXPECT_EQ(res.iterations, 18);
    // near the single precision floor the recurrence and the true residual
    // differ by a small multiple of the unit roundoff times ||b||
    const double rho0 = std::sqrt(
        [] {
            const auto A = generate_matrix(single({16, 16, 16}));
            const auto b = generate_rhs(A).b;
            double s = 0.0;
            for (const auto v : b) {
                s += v * v;
            }
            return s;
        }());
    for (const auto& c : res.cycles) {
        EXPECT_LE(std::abs(c.recurrence_residual - c.true_residual) / rho0,
                  1e-5);
    }
}


TEST(Gmres, RecurrenceIsMonotoneWithinCycle)
{
    double previous = 1e300;
    for (int k = 1; k <= 12; ++k) {
        auto opts = options(PrecisionMode::double_precision, 0.0);
        opts.max_iterations = k;
        const auto res = solve({8, 8, 8}, 1, opts);
        ASSERT_EQ(res.cycles.size(), 1u);
        EXPECT_EQ(res.cycles[0].steps, k);
        EXPECT_LE(res.cycles[0].recurrence_residual, previous);
        previous = res.cycles[0].recurrence_residual;
    }
}


TEST(Gmres, FullRestartLengthSolvesTinySystem)
{
    auto opts = options(PrecisionMode::double_precision, 1e-12);
    opts.restart = 8;
    const auto res = solve({2, 2, 2}, 1, opts, 1);
    EXPECT_TRUE(res.converged);
    EXPECT_LE(res.iterations, 8);
}


TEST(Gmres, IterationCapReported)
{
    auto opts = options(PrecisionMode::double_precision, 1e-14);
    opts.max_iterations = 5;
    opts.restart = 3;
    const auto res = solve({8, 8, 8}, 1, opts);
    EXPECT_FALSE(res.converged);
    EXPECT_EQ(res.iterations, 5);
    EXPECT_EQ(res.restarts, 2);
    EXPECT_GT(res.relative_residual, 1e-14);
}


TEST(Gmres, FullCycleOrthogonality)
{
    for (const auto mode :
         {PrecisionMode::double_precision, PrecisionMode::mixed}) {
        auto opts = options(mode, 0.0);
        opts.max_iterations = 30;
        opts.cycle_reduction = 0.0;
        opts.measure_orthogonality = true;
        const auto res = solve({16, 16, 16}, 1, opts);
        ASSERT_EQ(res.cycles.size(), 1u);
        EXPECT_EQ(res.cycles[0].steps, 30);
        EXPECT_LE(res.cycles[0].orthogonality_error,
                  mode == PrecisionMode::mixed ? 1e-3 : 1e-8);
    }
}


TEST(Gmres, ReplicasStayIdenticalOnEightRanks)
{
    for (const auto mode :
         {PrecisionMode::double_precision, PrecisionMode::mixed}) {
        auto opts = options(mode);
        opts.check_replicas = true;
        const auto res = solve({4, 4, 4}, 8, opts, 3);
        EXPECT_TRUE(res.converged);
        EXPECT_EQ(res.replica_checks, res.iterations);
    }
}


TEST(Gmres, EightRanksConverge)
{
    for (const auto mode :
         {PrecisionMode::double_precision, PrecisionMode::mixed}) {
        const auto res = solve({16, 16, 16}, 8, options(mode));
        EXPECT_TRUE(res.converged);
        EXPECT_LT(res.relative_residual, 1e-9);
    }
}


TEST(Gmres, OverlapDoesNotChangeIterates)
{
    auto on = options(PrecisionMode::mixed);
    auto off = on;
    off.overlap = false;
    std::vector<double> x_on, x_off;
    const auto a = solve({8, 8, 8}, 8, on, 4, &x_on);
    const auto b = solve({8, 8, 8}, 8, off, 4, &x_off);
    EXPECT_EQ(a.iterations, b.iterations);
    EXPECT_EQ(x_on, x_off);
}


/// Unpreconditioned restarted GMRES with modified Gram-Schmidt on the
/// stencil of grid g; returns the number of iterations to reach `tol`.
int plain_gmres_iterations(const Extent3& g, int m, double tol, int cap)
{
    const auto n = std::size_t(g.volume());
    auto apply = [&](const std::vector<double>& v) {
        std::vector<double> y(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto p = oracle::unlex(g, std::int64_t(i));
            for (int dz = -1; dz <= 1; ++dz) {
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const Index3 q{p.x + dx, p.y + dy, p.z + dz};
                        if (q.x < 0 || q.y < 0 || q.z < 0 || q.x >= g.x ||
                            q.y >= g.y || q.z >= g.z) {
                            continue;
                        }
                        y[i] += oracle::stencil_entry(p, q) *
                                v[oracle::lex(g, q.x, q.y, q.z)];
                    }
                }
            }
        }
        return y;
    };
    auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s += a[i] * b[i];
        }
        return s;
    };
    const auto b = apply(std::vector<double>(n, 1.0));
    const double bnorm = std::sqrt(dot(b, b));
    std::vector<double> x(n, 0.0);
    int its = 0;
    while (its < cap) {
        auto Ax = apply(x);
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = b[i] - Ax[i];
        }
        const double beta = std::sqrt(dot(r, r));
        if (beta / bnorm < tol) {
            return its;
        }
        std::vector<std::vector<double>> V{r};
        for (auto& e : V[0]) {
            e /= beta;
        }
        std::vector<std::vector<double>> H(m + 1, std::vector<double>(m, 0.0));
        std::vector<double> cs(m), sn(m), t(m + 1, 0.0);
        t[0] = beta;
        int k = 0;
        for (; k < m && its < cap; ++k) {
            auto w = apply(V[k]);
            for (int j = 0; j <= k; ++j) {
                H[j][k] = dot(w, V[j]);
                for (std::size_t i = 0; i < n; ++i) {
                    w[i] -= H[j][k] * V[j][i];
                }
            }
            H[k + 1][k] = std::sqrt(dot(w, w));
            for (auto& e : w) {
                e /= H[k + 1][k];
            }
            V.push_back(w);
            for (int j = 0; j < k; ++j) {
                const double u = cs[j] * H[j][k] + sn[j] * H[j + 1][k];
                H[j + 1][k] = -sn[j] * H[j][k] + cs[j] * H[j + 1][k];
                H[j][k] = u;
            }
            const double mu = std::hypot(H[k][k], H[k + 1][k]);
            cs[k] = H[k][k] / mu;
            sn[k] = H[k + 1][k] / mu;
            H[k][k] = mu;
            t[k + 1] = -sn[k] * t[k];
            t[k] *= cs[k];
            ++its;
            if (std::abs(t[k + 1]) / bnorm < tol) {
                ++k;
                break;
            }
        }
        std::vector<double> y(k);
        for (int i = k - 1; i >= 0; --i) {
            double s = t[i];
            for (int j = i + 1; j < k; ++j) {
                s -= H[i][j] * y[j];
            }
            y[i] = s / H[i][i];
        }
        for (int j = 0; j < k; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += y[j] * V[j][i];
            }
        }
    }
    return its;
}


TEST(Gmres, PreconditionerReducesIterations)
{
    const int plain = plain_gmres_iterations({16, 16, 16}, 30, 1e-9, 2000);
    const auto res =
        solve({16, 16, 16}, 1, options(PrecisionMode::double_precision));
    EXPECT_LT(res.iterations, plain);
}


TEST(Gmres, RejectsMismatchedVectors)
{
    auto mg = build_hierarchy(single({4, 4, 4}), MgOptions{.levels = 3});
    std::vector<double> b(10, 1.0), x(10, 0.0);
    RankWorld world(1);
    EXPECT_THROW(run_ranks(world,
                           [&](Comm& comm) {
                               gmres_solve(comm, mg, b, x, GmresOptions{});
                           }),
                 ConfigError);
}


}  // namespace
