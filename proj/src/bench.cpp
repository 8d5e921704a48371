// SPDX-FileCopyrightText: 2026 The hpgmxp authors
//
// SPDX-License-Identifier: Apache-2.0

#include "hpgmxp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "hpgmxp/errors.hpp"
#include "hpgmxp/problem.hpp"


namespace hpgmxp {


std::string_view validation_mode_name(ValidationMode mode)
{
    return mode == ValidationMode::fullscale ? "fullscale" : "standard";
}


ValidationMode validation_mode_from_string(std::string_view name)
{
    if (name == "standard") {
        return ValidationMode::standard;
    }
    if (name == "fullscale") {
        return ValidationMode::fullscale;
    }
    throw ConfigError("unknown validation mode '" + std::string(name) + "'");
}


void BenchConfig::validate() const
{
    if (ranks < 1 || validation_ranks < 1) {
        throw ConfigError("rank counts must be positive");
    }
    if (restart < 1) {
        throw ConfigError("restart length must be positive");
    }
    if (!(tolerance >= 0.0) || !(tolerance < 1.0)) {
        throw ConfigError("tolerance must lie in [0, 1)");
    }
    if (max_iterations < 1 || validation_cap < 1) {
        throw ConfigError("iteration limits must be positive");
    }
    if (!(target_seconds >= 0.0)) {
        throw ConfigError("target time must be non-negative");
    }
    GlobalProblem::make(local, ranks).check_levels(levels);
}


MgOptions BenchConfig::multigrid_options() const
{
    MgOptions o;
    o.levels = levels;
    o.coloring = coloring;
    o.seed = seed;
    o.overlap = overlap;
    return o;
}


std::map<std::string, std::string> BenchConfig::echo() const
{
    auto str = [](auto v) {
        std::ostringstream os;
        os << v;
        return os.str();
    };
    const auto problem = GlobalProblem::make(local, ranks);
    return {
        {"local", str(local.x) + "x" + str(local.y) + "x" + str(local.z)},
        {"global", str(problem.global.x) + "x" + str(problem.global.y) + "x" +
                       str(problem.global.z)},
        {"ranks", str(ranks)},
        {"levels", str(levels)},
        {"restart", str(restart)},
        {"tolerance", str(tolerance)},
        {"max_iterations", str(max_iterations)},
        {"validation", std::string(validation_mode_name(validation))},
        {"validation_cap", str(validation_cap)},
        {"validation_ranks", str(validation_ranks)},
        {"target_seconds", str(target_seconds)},
        {"coloring", coloring == ColoringStrategy::jpl ? "jpl" : "greedy"},
        {"seed", str(seed)},
        {"overlap", overlap ? "true" : "false"},
    };
}


RankSystem setup_rank_system(const GlobalProblem& problem, int rank,
                             const MgOptions& options)
{
    RankSystem sys;
    sys.mg = build_hierarchy(make_local_domain(problem, rank), options);
    auto vecs = generate_rhs(sys.mg.levels.front().A_hi);
    sys.b = std::move(vecs.b);
    sys.x = std::move(vecs.x);
    return sys;
}


namespace {


void reset_guess(std::vector<double>& x)
{
    std::fill(x.begin(), x.end(), 0.0);
}


GmresOptions solver_options(const BenchConfig& c, PrecisionMode mode,
                            double tolerance, std::int64_t max_iterations)
{
    GmresOptions o;
    o.restart = c.restart;
    o.tolerance = tolerance;
    o.max_iterations = max_iterations;
    o.mode = mode;
    o.overlap = c.overlap;
    o.check_replicas = c.check_replicas;
    return o;
}


/// Sums flops over ranks and takes the slowest rank's seconds per motif.
MotifTally reduce_tally(Comm& comm, const MotifTally& local)
{
    MotifTally out;
    std::vector<double> flops;
    std::vector<double> bytes;
    for (const auto m : all_motifs) {
        flops.push_back(double(local[m].flops));
        bytes.push_back(double(local[m].bytes));
    }
    comm.all_reduce_sum(std::span<double>(flops));
    comm.all_reduce_sum(std::span<double>(bytes));
    for (std::size_t i = 0; i < all_motifs.size(); ++i) {
        auto& s = out[all_motifs[i]];
        s.flops = static_cast<std::int64_t>(flops[i]);
        s.bytes = static_cast<std::int64_t>(bytes[i]);
        s.seconds = comm.all_reduce_max(local[all_motifs[i]].seconds);
    }
    return out;
}


double since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
}


}  // namespace


ValidationResult run_validation(const BenchConfig& config)
{
    config.validate();
    const bool standard = config.validation == ValidationMode::standard;
    const int ranks = standard ? config.validation_ranks : config.ranks;
    const auto problem = GlobalProblem::make(config.local, ranks);
    problem.check_levels(config.levels);

    ValidationResult out;
    out.mode = config.validation;
    RankWorld world(ranks);
    run_ranks(world, [&](Comm& comm) {
        auto sys =
            setup_rank_system(problem, comm.rank(), config.multigrid_options());

        reset_guess(sys.x);
        const auto dbl = gmres_solve(
            comm, sys.mg, sys.b, sys.x,
            solver_options(config, PrecisionMode::double_precision,
                           config.tolerance, config.validation_cap));
        if (standard && !dbl.converged) {
            throw ValidationError(
                "double precision GMRES did not reach the tolerance within " +
                std::to_string(config.validation_cap) + " iterations");
        }
        const double target =
            dbl.converged ? config.tolerance : dbl.relative_residual;

        // a capped double run leaves a target the mixed solver may need
        // more iterations for; allow it twice the cap
        const auto mixed_cap =
            dbl.converged ? config.validation_cap : 2 * config.validation_cap;
        reset_guess(sys.x);
        const auto mxp = gmres_solve(
            comm, sys.mg, sys.b, sys.x,
            solver_options(config, PrecisionMode::mixed, target, mixed_cap));
        if (!mxp.converged) {
            throw ValidationError(
                "mixed precision GMRES-IR did not reach relative residual " +
                std::to_string(target));
        }
        if (comm.rank() == 0) {
            out.n_d = std::max<std::int64_t>(dbl.iterations, 1);
            out.n_ir = std::max<std::int64_t>(mxp.iterations, 1);
            out.tolerance = target;
            out.double_residual = dbl.relative_residual;
            out.mixed_residual = mxp.relative_residual;
        }
    });
    return out;
}


BenchReport run_benchmark(const BenchConfig& config,
                          const ValidationResult& validation)
{
    config.validate();
    const auto problem = GlobalProblem::make(config.local, config.ranks);
    PhaseResult mxp_phase;
    PhaseResult dbl_phase;

    RankWorld world(config.ranks);
    run_ranks(world, [&](Comm& comm) {
        auto sys =
            setup_rank_system(problem, comm.rank(), config.multigrid_options());

        // benchmark solves run a fixed iteration count
        auto run_phase = [&](PrecisionMode mode, int fixed_repetitions) {
            PhaseResult local;
            auto opts =
                solver_options(config, mode, 0.0, config.max_iterations);
            // full restart cycles so both phases do the same work
            opts.cycle_reduction = 0.0;
            const auto start = std::chrono::steady_clock::now();
            double elapsed = 0.0;
            while (true) {
                reset_guess(sys.x);
                const auto res = gmres_solve(comm, sys.mg, sys.b, sys.x, opts);
                local.tally += res.tally;
                local.iterations += res.iterations;
                ++local.repetitions;
                elapsed = comm.all_reduce_max(since(start));
                if (fixed_repetitions > 0
                        ? local.repetitions >= fixed_repetitions
                        : elapsed >= config.target_seconds) {
                    break;
                }
            }
            PhaseResult global;
            global.tally = reduce_tally(comm, local.tally);
            global.wall_seconds = elapsed;
            global.repetitions = local.repetitions;
            global.iterations = local.iterations;
            return global;
        };

        const auto mxp = run_phase(PrecisionMode::mixed, 0);
        const auto dbl =
            run_phase(PrecisionMode::double_precision, mxp.repetitions);
        if (comm.rank() == 0) {
            mxp_phase = mxp;
            dbl_phase = dbl;
        }
    });

    BenchReport report;
    report.config = config.echo();
    report.validation.mode = std::string(validation_mode_name(validation.mode));
    report.validation.n_d = validation.n_d;
    report.validation.n_ir = validation.n_ir;
    report.validation.ratio = validation.ratio();
    report.validation.residual = validation.tolerance;
    report.mxp = make_phase_report(mxp_phase.tally, mxp_phase.wall_seconds,
                                   mxp_phase.repetitions, mxp_phase.iterations);
    report.reference =
        make_phase_report(dbl_phase.tally, dbl_phase.wall_seconds,
                          dbl_phase.repetitions, dbl_phase.iterations);
    report.summary =
        summarize(report.mxp, report.reference,
                  penalty_factor(validation.n_d, validation.n_ir));
    return report;
}


BenchReport run_all(const BenchConfig& config)
{
    return run_benchmark(config, run_validation(config));
}


}  // namespace hpgmxp
