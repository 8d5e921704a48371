// SPDX-FileCopyrightText: 2026 The hpgmxp authors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef HPGMXP_METRICS_HPP_
#define HPGMXP_METRICS_HPP_

#include <array>
#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>


namespace hpgmxp {


/// Kernel classes that timings and flop counts are reported for.
enum class Motif { gs, spmv, ortho, restriction, prolongation, vector_ops };

inline constexpr int motif_count = 6;

inline constexpr std::array<Motif, motif_count> all_motifs{
    Motif::gs,          Motif::spmv,         Motif::ortho,
    Motif::restriction, Motif::prolongation, Motif::vector_ops};

std::string_view motif_name(Motif motif);

/// Throws ConfigError for an unknown name.
Motif motif_from_string(std::string_view name);


/// Individual kernels of the flop and byte model.
enum class Kernel {
    spmv,
    gs_sweep,
    fused_restrict,
    prolong,
    residual,
    dot,
    norm,
    scale,
    axpy,
    waxpby,
    gemvt,
    gemv,
    gemv_update,
};

std::string_view kernel_name(Kernel kernel);

/// Throws ConfigError for an unknown name.
Kernel kernel_from_string(std::string_view name);


/**
 * Problem sizes a kernel's cost depends on.
 *
 * `rows` is the number of rows written (coarse rows for fused_restrict and
 * prolong), `nnz` the nonzeros visited and `basis` the number of Krylov
 * vectors touched by gemvt, gemv and gemv_update.
 */
struct KernelSize {
    std::int64_t rows = 0;
    std::int64_t nnz = 0;
    std::int64_t basis = 0;
};


/**
 * Frozen flop model. Operations of every precision count the same.
 *
 *   spmv            2 nnz
 *   gs_sweep        2 nnz + rows        (one divide per row)
 *   fused_restrict  2 nnz + rows        (nnz of the injected fine rows)
 *   residual        2 nnz + rows
 *   prolong         rows
 *   dot, norm       2 rows
 *   scale           rows
 *   axpy            2 rows
 *   waxpby          3 rows
 *   gemvt, gemv     2 rows basis
 *   gemv_update     2 rows basis + rows
 */
std::int64_t count_flops(Kernel kernel, const KernelSize& size);

/// Modeled memory traffic: values at `value_bytes`, indices at 4 bytes,
/// each array touched once.
std::int64_t count_bytes(Kernel kernel, const KernelSize& size,
                         int value_bytes);


/// Debug counter that instrumented kernels increment as they execute.
struct OpCounter {
    std::int64_t flops = 0;
};


struct MotifStats {
    double seconds = 0.0;
    std::int64_t flops = 0;
    std::int64_t bytes = 0;

    MotifStats& operator+=(const MotifStats& other)
    {
        seconds += other.seconds;
        flops += other.flops;
        bytes += other.bytes;
        return *this;
    }
};


class MotifTally {
public:
    MotifStats& operator[](Motif m) { return stats_[static_cast<int>(m)]; }
    const MotifStats& operator[](Motif m) const
    {
        return stats_[static_cast<int>(m)];
    }

    void count(Motif motif, Kernel kernel, const KernelSize& size,
               int value_bytes)
    {
        auto& s = (*this)[motif];
        s.flops += count_flops(kernel, size);
        s.bytes += count_bytes(kernel, size, value_bytes);
    }

    MotifStats total() const;

    MotifTally& operator+=(const MotifTally& other);

    void reset() { stats_ = {}; }

private:
    std::array<MotifStats, motif_count> stats_{};
};


/// Adds the elapsed wall time to a motif when it goes out of scope.
class ScopedTimer {
public:
    ScopedTimer(MotifTally* tally, Motif motif)
        : tally_{tally}, motif_{motif}, start_{std::chrono::steady_clock::now()}
    {}

    ScopedTimer(const ScopedTimer&) = delete;
    ScopedTimer& operator=(const ScopedTimer&) = delete;

    ~ScopedTimer()
    {
        if (tally_) {
            (*tally_)[motif_].seconds +=
                std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start_)
                    .count();
        }
    }

private:
    MotifTally* tally_;
    Motif motif_;
    std::chrono::steady_clock::time_point start_;
};


/// min(1, n_d / n_ir); throws ConfigError for counts below one.
double penalty_factor(std::int64_t n_d, std::int64_t n_ir);

/// flops / seconds / 1e9; throws ConfigError for non-positive time.
double gflops(double flops, double seconds);


struct MotifReport {
    double seconds = 0.0;
    std::int64_t flops = 0;
    double gflops = 0.0;

    friend bool operator==(const MotifReport&, const MotifReport&) = default;
};

/// One solver phase. `motifs` is keyed by motif name plus "total".
struct PhaseReport {
    std::map<std::string, MotifReport> motifs;
    int repetitions = 0;
    std::int64_t iterations = 0;

    friend bool operator==(const PhaseReport&, const PhaseReport&) = default;
};

struct ValidationReport {
    std::string mode;
    std::int64_t n_d = 0;
    std::int64_t n_ir = 0;
    double ratio = 0.0;
    double residual = 0.0;

    friend bool operator==(const ValidationReport&,
                           const ValidationReport&) = default;
};

struct SummaryReport {
    double raw_gflops = 0.0;
    double penalty = 1.0;
    double penalized_gflops = 0.0;
    /// Penalized mixed over double GFLOP/s, per motif and "total".
    std::map<std::string, double> speedup;

    friend bool operator==(const SummaryReport&, const SummaryReport&) = default;
};

struct BenchReport {
    std::map<std::string, std::string> config;
    ValidationReport validation;
    PhaseReport mxp;
    PhaseReport reference;
    SummaryReport summary;

    friend bool operator==(const BenchReport&, const BenchReport&) = default;
};


/// Phase report from summed flops and per-motif seconds. A motif with no
/// measured time reports zero GFLOP/s.
PhaseReport make_phase_report(const MotifTally& tally, double wall_seconds,
                              int repetitions, std::int64_t iterations);

SummaryReport summarize(const PhaseReport& mxp, const PhaseReport& reference,
                        double penalty);

/**
 * Serializes a report as one JSON document with the fields
 * `config`, `validation.{mode,n_d,n_ir,ratio,residual}`,
 * `mxp.{motif}.{seconds,flops,gflops}`, `double.{motif}.{...}` and
 * `summary.{raw_gflops,penalty,penalized_gflops,speedup}`.
 */
std::string emit_report(const BenchReport& report);

BenchReport parse_report(std::string_view text);

/// The report with every wall-clock dependent field zeroed.
BenchReport strip_timings(BenchReport report);


}  // namespace hpgmxp

#endif  // HPGMXP_METRICS_HPP_
