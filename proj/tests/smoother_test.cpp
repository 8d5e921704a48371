// SPDX-FileCopyrightText: 2026 The hpgmxp authors
//
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "hpgmxp/errors.hpp"
#include "hpgmxp/problem.hpp"
#include "hpgmxp/smoother.hpp"
#include "oracles.hpp"


namespace {


using namespace hpgmxp;


struct Permuted {
    Coloring coloring;
    EllMatrix<double> A;
    std::vector<double> b;
};


Permuted permuted_system(Extent3 g, ColoringStrategy strategy,
                         std::uint64_t seed = 0)
{
    const auto d = make_local_domain(GlobalProblem::make(g, 1), 0);
    const auto A = generate_matrix(d);
    Permuted p;
    p.coloring = color_matrix(A.shape(), strategy, seed);
    p.A = permute_matrix(A, p.coloring.perm);
    p.b = permute_vector<double>(generate_rhs(A).b, p.coloring.perm);
    return p;
}


template <typename T>
double residual_norm(const EllMatrix<T>& A, const std::vector<T>& r,
                     const std::vector<T>& z)
{
    const auto n = std::size_t(A.n_rows());
    const auto D = oracle::to_dense(A);
    const auto Az =
        oracle::matvec(D, n, n, std::vector<double>(z.begin(), z.end()));
    std::vector<double> res(n);
    for (std::size_t i = 0; i < n; ++i) {
        res[i] = double(r[i]) - Az[i];
    }
    return oracle::norm2(res, n);
}


TEST(GaussSeidel, DiagonalMatrixSolvedInOneSweep)
{
    auto s = std::make_shared<EllStructure>();
    s->n_rows = s->n_cols = 5;
    s->col_idx.assign(5 * EllStructure::width, padding_column);
    s->global_col.assign(5 * EllStructure::width, padding_column);
    s->row_nnz.assign(5, 1);
    s->diag_pos.assign(5, 0);
    s->nnz = 5;
    EllMatrix<double> A{s, std::vector<double>(5 * EllStructure::width, 0.0)};
    for (int i = 0; i < 5; ++i) {
        s->col_idx[s->slot(i, 0)] = i;
        s->global_col[s->slot(i, 0)] = i;
        s->row_global.push_back(i);
        A.values[s->slot(i, 0)] = 2.0 + i;
    }
    const auto c = make_coloring(std::vector<int>(5, 0));
    EXPECT_EQ(c.num_colors, 1);
    const std::vector<double> r{1, 2, 3, 4, 5};
    std::vector<double> z(5, 0.0);
    forward_gs_sweep<double>(A, c, r, z);
    for (int i = 0; i < 5; ++i) {
        EXPECT_EQ(z[i], r[i] / (2.0 + i));
    }
}


template <typename T>
void check_sequential_oracle(ColoringStrategy strategy, std::uint64_t seed)
{
    const Extent3 g{4, 4, 4};
    const auto p = permuted_system(g, strategy, seed);
    const auto A = [&] {
        if constexpr (std::is_same_v<T, double>) {
            return p.A;
        } else {
            return to_low_precision(p.A);
        }
    }();
    const auto n = std::size_t(g.volume());
    const auto D = oracle::to_dense(A);
    const auto order = oracle::original_order(p.coloring);
    // integer right-hand side and start vector
    std::vector<T> r(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = T(int(i % 7) - 3);
        z[i] = T(int(i % 5) - 2);
    }
    auto expected = z;
    for (int sweep = 0; sweep < 3; ++sweep) {
        forward_gs_sweep<T>(A, p.coloring, r, z);
        oracle::gauss_seidel<T>(D, n, order, r, expected);
        ASSERT_EQ(z, expected) << "sweep " << sweep;
    }
}


TEST(GaussSeidel, MatchesSequentialOracleBitwise)
{
    check_sequential_oracle<double>(ColoringStrategy::greedy, 0);
    check_sequential_oracle<float>(ColoringStrategy::greedy, 0);
    check_sequential_oracle<double>(ColoringStrategy::jpl, 5);
    check_sequential_oracle<float>(ColoringStrategy::jpl, 9);
}


TEST(GaussSeidel, SweepReducesResidual)
{
    const auto p = permuted_system({6, 6, 6}, ColoringStrategy::greedy);
    std::vector<double> z(p.b.size(), 0.0);
    double before = residual_norm(p.A, p.b, z);
    for (int sweep = 0; sweep < 5; ++sweep) {
        forward_gs_sweep<double>(p.A, p.coloring, p.b, z);
        const double after = residual_norm(p.A, p.b, z);
        EXPECT_LT(after, before);
        before = after;
    }
}


TEST(GaussSeidel, StationaryIterationConverges)
{
    const auto p = permuted_system({8, 8, 8}, ColoringStrategy::greedy);
    std::vector<double> z(p.b.size(), 0.0);
    const double r0 = residual_norm(p.A, p.b, z);
    int sweeps = 0;
    while (residual_norm(p.A, p.b, z) / r0 >= 1e-6 && sweeps < 1000) {
        forward_gs_sweep<double>(p.A, p.coloring, p.b, z);
        ++sweeps;
    }
    EXPECT_LT(residual_norm(p.A, p.b, z) / r0, 1e-6);
    // regression fixture measured on the greedy 8-color ordering
    EXPECT_EQ(sweeps, 52);
}


TEST(GaussSeidel, SinglePrecisionTracksDouble)
{
    const auto p = permuted_system({16, 16, 16}, ColoringStrategy::greedy);
    const auto L = to_low_precision(p.A);
    const auto n = p.b.size();
    std::vector<double> zd(n, 0.0);
    std::vector<float> zf(n, 0.0f);
    std::vector<float> bf(p.b.begin(), p.b.end());
    forward_gs_sweep<double>(p.A, p.coloring, p.b, zd);
    forward_gs_sweep<float>(L, p.coloring, bf, zf);
    double worst = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(double(zf[i]) - zd[i]));
        scale = std::max(scale, std::abs(zd[i]));
    }
    EXPECT_LE(worst / scale, 1e-5);
}


TEST(GaussSeidel, CounterChargesTwoPerNonzeroPlusDivide)
{
    const auto p = permuted_system({4, 4, 4}, ColoringStrategy::greedy);
    std::vector<double> z(p.b.size(), 0.0);
    OpCounter ops;
    forward_gs_sweep<double>(p.A, p.coloring, p.b, z, &ops);
    EXPECT_EQ(ops.flops, count_flops(Kernel::gs_sweep,
                                     {p.A.n_rows(), p.A.nnz(), 0}));
}


TEST(GaussSeidel, ZeroDiagonalRejected)
{
    auto p = permuted_system({2, 2, 2}, ColoringStrategy::greedy);
    const auto& s = p.A.shape();
    p.A.values[s.slot(3, s.diag_pos[3])] = 0.0;
    std::vector<double> z(p.b.size(), 0.0);
    EXPECT_THROW(forward_gs_sweep<double>(p.A, p.coloring, p.b, z),
                 SingularDiagonal);
}


TEST(SmootherSweeps, CountsMustBePositive)
{
    EXPECT_NO_THROW(SmootherSweeps{}.validate());
    EXPECT_THROW((SmootherSweeps{0, 1, 1}.validate()), ConfigError);
    EXPECT_THROW((SmootherSweeps{1, 1, 0}.validate()), ConfigError);
}


}  // namespace
