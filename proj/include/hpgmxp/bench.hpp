// SPDX-FileCopyrightText: 2026 The hpgmxp authors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef HPGMXP_BENCH_HPP_
#define HPGMXP_BENCH_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hpgmxp/coloring.hpp"
#include "hpgmxp/comm.hpp"
#include "hpgmxp/geometry.hpp"
#include "hpgmxp/krylov.hpp"
#include "hpgmxp/metrics.hpp"
#include "hpgmxp/multigrid.hpp"


namespace hpgmxp {


enum class ValidationMode { standard, fullscale };

std::string_view validation_mode_name(ValidationMode mode);

ValidationMode validation_mode_from_string(std::string_view name);


struct BenchConfig {
    Extent3 local{16, 16, 16};
    int ranks = 1;
    int levels = 4;
    int restart = 30;
    /// Relative residual reduction required during validation.
    double tolerance = 1e-9;
    /// Inner iterations per benchmark solve.
    std::int64_t max_iterations = 300;
    ValidationMode validation = ValidationMode::standard;
    /// Iteration cap of each validation solve.
    std::int64_t validation_cap = 10000;
    /// Ranks used by standard validation.
    int validation_ranks = 1;
    /// Wall time the mixed benchmark phase repeats solves for.
    double target_seconds = 5.0;
    ColoringStrategy coloring = ColoringStrategy::greedy;
    std::uint64_t seed = 0;
    bool overlap = true;
    bool check_replicas = false;

    /// Throws ConfigError or CoarseningError for an unusable configuration.
    void validate() const;

    MgOptions multigrid_options() const;

    std::map<std::string, std::string> echo() const;
};


struct ValidationResult {
    ValidationMode mode = ValidationMode::standard;
    std::int64_t n_d = 0;
    std::int64_t n_ir = 0;
    /// Tolerance the mixed solver had to reach.
    double tolerance = 0.0;
    double double_residual = 0.0;
    double mixed_residual = 0.0;

    double ratio() const { return double(n_d) / double(n_ir); }
};


/// One rank's share of the benchmark system, in permuted fine ordering.
struct RankSystem {
    MgHierarchy mg;
    std::vector<double> b;
    std::vector<double> x;
};

RankSystem setup_rank_system(const GlobalProblem& problem, int rank,
                             const MgOptions& options);


/**
 * Runs the double solver and then the mixed solver from zero guesses.
 *
 * standard: on `validation_ranks` ranks, both to `tolerance`.
 * fullscale: on all ranks; the double solve stops at `tolerance` or
 * `validation_cap` iterations, and the mixed solve must reach the relative
 * residual it achieved. When the double solve hit the cap the mixed solve
 * gets twice the cap.
 * Throws ValidationError if a required solve does not converge.
 */
ValidationResult run_validation(const BenchConfig& config);


/// Aggregated output of one benchmark phase.
struct PhaseResult {
    MotifTally tally;
    double wall_seconds = 0.0;
    int repetitions = 0;
    std::int64_t iterations = 0;
};


/**
 * Repeats mixed GMRES-IR solves of `max_iterations` from zero until
 * `target_seconds` have elapsed (at least once), then runs the same number of
 * double solves, and assembles the penalized report.
 */
BenchReport run_benchmark(const BenchConfig& config,
                          const ValidationResult& validation);

/// Validation followed by the benchmark phases.
BenchReport run_all(const BenchConfig& config);


}  // namespace hpgmxp

#endif  // HPGMXP_BENCH_HPP_
