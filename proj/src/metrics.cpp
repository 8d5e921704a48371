// SPDX-FileCopyrightText: 2026 The hpgmxp authors
//
// SPDX-License-Identifier: Apache-2.0

#include "hpgmxp/metrics.hpp"

#include <algorithm>
#include <string>

#include <json.hpp>

#include "hpgmxp/errors.hpp"


namespace hpgmxp {
namespace {


constexpr std::array<std::string_view, motif_count> motif_names{
    "gs", "spmv", "ortho", "restriction", "prolongation", "vector_ops"};

constexpr std::array<std::pair<Kernel, std::string_view>, 13> kernel_names{{
    {Kernel::spmv, "spmv"},
    {Kernel::gs_sweep, "gs_sweep"},
    {Kernel::fused_restrict, "fused_restrict"},
    {Kernel::prolong, "prolong"},
    {Kernel::residual, "residual"},
    {Kernel::dot, "dot"},
    {Kernel::norm, "norm"},
    {Kernel::scale, "scale"},
    {Kernel::axpy, "axpy"},
    {Kernel::waxpby, "waxpby"},
    {Kernel::gemvt, "gemvt"},
    {Kernel::gemv, "gemv"},
    {Kernel::gemv_update, "gemv_update"},
}};

constexpr std::int64_t index_bytes = 4;


}  // namespace


std::string_view motif_name(Motif motif)
{
    const auto i = static_cast<std::size_t>(motif);
    if (i >= motif_names.size()) {
        throw ConfigError("unknown motif");
    }
    return motif_names[i];
}


Motif motif_from_string(std::string_view name)
{
    for (const auto m : all_motifs) {
        if (motif_name(m) == name) {
            return m;
        }
    }
    throw ConfigError("unknown motif '" + std::string(name) + "'");
}


std::string_view kernel_name(Kernel kernel)
{
    for (const auto& [k, name] : kernel_names) {
        if (k == kernel) {
            return name;
        }
    }
    throw ConfigError("unknown kernel");
}


Kernel kernel_from_string(std::string_view name)
{
    for (const auto& [k, n] : kernel_names) {
        if (n == name) {
            return k;
        }
    }
    throw ConfigError("unknown kernel '" + std::string(name) + "'");
}


std::int64_t count_flops(Kernel kernel, const KernelSize& s)
{
    switch (kernel) {
    case Kernel::spmv:
        return 2 * s.nnz;
    case Kernel::gs_sweep:
    case Kernel::fused_restrict:
    case Kernel::residual:
        return 2 * s.nnz + s.rows;
    case Kernel::prolong:
    case Kernel::scale:
        return s.rows;
    case Kernel::dot:
    case Kernel::norm:
    case Kernel::axpy:
        return 2 * s.rows;
    case Kernel::waxpby:
        return 3 * s.rows;
    case Kernel::gemvt:
    case Kernel::gemv:
        return 2 * s.rows * s.basis;
    case Kernel::gemv_update:
        return 2 * s.rows * s.basis + s.rows;
    }
    throw ConfigError("unknown kernel");
}


std::int64_t count_bytes(Kernel kernel, const KernelSize& s, int value_bytes)
{
    const std::int64_t w = value_bytes;
    const std::int64_t matrix = s.nnz * (w + index_bytes);
    switch (kernel) {
    case Kernel::spmv:
    case Kernel::gs_sweep:
        return matrix + 2 * s.rows * w;
    case Kernel::fused_restrict:
        return matrix + 2 * s.rows * w + s.rows * index_bytes;
    case Kernel::residual:
        return matrix + 3 * s.rows * w;
    case Kernel::prolong:
        return 3 * s.rows * w + s.rows * index_bytes;
    case Kernel::norm:
        return s.rows * w;
    case Kernel::dot:
    case Kernel::scale:
        return 2 * s.rows * w;
    case Kernel::axpy:
    case Kernel::waxpby:
        return 3 * s.rows * w;
    case Kernel::gemvt:
    case Kernel::gemv:
        return s.rows * s.basis * w + s.rows * w;
    case Kernel::gemv_update:
        return s.rows * s.basis * w + 2 * s.rows * w;
    }
    throw ConfigError("unknown kernel");
}


MotifStats MotifTally::total() const
{
    MotifStats t;
    for (const auto& s : stats_) {
        t += s;
    }
    return t;
}


MotifTally& MotifTally::operator+=(const MotifTally& other)
{
    for (std::size_t i = 0; i < stats_.size(); ++i) {
        stats_[i] += other.stats_[i];
    }
    return *this;
}


double penalty_factor(std::int64_t n_d, std::int64_t n_ir)
{
    if (n_d < 1 || n_ir < 1) {
        throw ConfigError("iteration counts must be at least one");
    }
    if (n_d >= n_ir) {
        return 1.0;
    }
    return static_cast<double>(n_d) / static_cast<double>(n_ir);
}


double gflops(double flops, double seconds)
{
    if (!(seconds > 0.0)) {
        throw ConfigError("elapsed time must be positive");
    }
    return flops / seconds / 1e9;
}


PhaseReport make_phase_report(const MotifTally& tally, double wall_seconds,
                              int repetitions, std::int64_t iterations)
{
    auto entry = [](double seconds, std::int64_t flops) {
        return MotifReport{seconds, flops,
                           seconds > 0.0 ? gflops(double(flops), seconds)
                                         : 0.0};
    };
    PhaseReport p;
    for (const auto m : all_motifs) {
        p.motifs[std::string(motif_name(m))] =
            entry(tally[m].seconds, tally[m].flops);
    }
    p.motifs["total"] = entry(wall_seconds, tally.total().flops);
    p.repetitions = repetitions;
    p.iterations = iterations;
    return p;
}


SummaryReport summarize(const PhaseReport& mxp, const PhaseReport& reference,
                        double penalty)
{
    SummaryReport s;
    s.raw_gflops = mxp.motifs.at("total").gflops;
    s.penalty = penalty;
    s.penalized_gflops = s.raw_gflops * penalty;
    for (const auto& [name, m] : mxp.motifs) {
        const double ref = reference.motifs.at(name).gflops;
        s.speedup[name] = ref > 0.0 ? m.gflops * penalty / ref : 0.0;
    }
    return s;
}


namespace {


using nlohmann::json;


json phase_to_json(const PhaseReport& p)
{
    json j;
    for (const auto& [name, m] : p.motifs) {
        j[name] = {{"seconds", m.seconds},
                   {"flops", m.flops},
                   {"gflops", m.gflops}};
    }
    j["repetitions"] = p.repetitions;
    j["iterations"] = p.iterations;
    return j;
}


PhaseReport phase_from_json(const json& j)
{
    PhaseReport p;
    for (const auto& [name, value] : j.items()) {
        if (name == "repetitions" || name == "iterations") {
            continue;
        }
        p.motifs[name] = MotifReport{value.at("seconds").get<double>(),
                                     value.at("flops").get<std::int64_t>(),
                                     value.at("gflops").get<double>()};
    }
    p.repetitions = j.at("repetitions").get<int>();
    p.iterations = j.at("iterations").get<std::int64_t>();
    return p;
}


}  // namespace


std::string emit_report(const BenchReport& r)
{
    json j;
    j["config"] = r.config;
    j["validation"] = {{"mode", r.validation.mode},
                       {"n_d", r.validation.n_d},
                       {"n_ir", r.validation.n_ir},
                       {"ratio", r.validation.ratio},
                       {"residual", r.validation.residual}};
    j["mxp"] = phase_to_json(r.mxp);
    j["double"] = phase_to_json(r.reference);
    j["summary"] = {{"raw_gflops", r.summary.raw_gflops},
                    {"penalty", r.summary.penalty},
                    {"penalized_gflops", r.summary.penalized_gflops},
                    {"speedup", r.summary.speedup}};
    return j.dump(2) + "\n";
}


BenchReport parse_report(std::string_view text)
{
    try {
        const auto j = json::parse(text);
        BenchReport r;
        r.config = j.at("config").get<std::map<std::string, std::string>>();
        const auto& v = j.at("validation");
        r.validation.mode = v.at("mode").get<std::string>();
        r.validation.n_d = v.at("n_d").get<std::int64_t>();
        r.validation.n_ir = v.at("n_ir").get<std::int64_t>();
        r.validation.ratio = v.at("ratio").get<double>();
        r.validation.residual = v.at("residual").get<double>();
        r.mxp = phase_from_json(j.at("mxp"));
        r.reference = phase_from_json(j.at("double"));
        const auto& s = j.at("summary");
        r.summary.raw_gflops = s.at("raw_gflops").get<double>();
        r.summary.penalty = s.at("penalty").get<double>();
        r.summary.penalized_gflops = s.at("penalized_gflops").get<double>();
        r.summary.speedup =
            s.at("speedup").get<std::map<std::string, double>>();
        return r;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed report: ") + e.what());
    }
}


BenchReport strip_timings(BenchReport r)
{
    for (auto* phase : {&r.mxp, &r.reference}) {
        for (auto& [name, m] : phase->motifs) {
            m.seconds = 0.0;
            m.gflops = 0.0;
        }
    }
    r.summary.raw_gflops = 0.0;
    r.summary.penalized_gflops = 0.0;
    for (auto& [name, s] : r.summary.speedup) {
        s = 0.0;
    }
    return r;
}


}  // namespace hpgmxp
