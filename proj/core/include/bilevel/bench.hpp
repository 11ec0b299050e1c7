#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bilevel/instances.hpp"

namespace bilevel::bench {

struct ManifestEntry {
    std::string id;
    std::string file;  // relative to the manifest directory
    QKind q_kind = QKind::custom;
    std::size_t n_y = 0;
    Sense sense = Sense::optimistic;
    std::string digest;  // fnv1a-64 of the file bytes, hex
};

struct Manifest {
    std::uint64_t base_seed = 0;
    std::string scale;  // "paper" (600) or "desk" (60)
    std::filesystem::path dir;
    std::vector<ManifestEntry> entries;
};

std::string fnv1a_digest(const std::filesystem::path& file);

struct GenOptions {
    std::uint64_t seed = 0;
    std::filesystem::path out_dir;
    std::string scale = "desk";
};

// Writes one instance file per testbed member plus manifest.txt; returns
// the manifest. Deterministic: same seed, same bytes, same digests.
Manifest cmd_gen(const GenOptions& opts);

Manifest read_manifest(const std::filesystem::path& manifest_path);
void write_manifest(const Manifest& manifest, const std::filesystem::path& manifest_path);

// One result row per instance; rows with a nonempty error field mark
// per-instance failures that did not stop the run.
struct SolveRow {
    std::string id;
    QKind q_kind = QKind::custom;
    std::size_t n_y = 0;
    Sense sense = Sense::optimistic;
    std::string mode;    // exact | approx
    std::string status;  // optimal | incumbent_timeout | infeasible | error
    double time_s = 0.0;
    double frv_time_s = 0.0;       // approx split
    double follower_time_s = 0.0;  // approx split
    double leader_obj = 0.0;
    double ex_ante = 0.0;
    double ex_post = 0.0;
    double linear_case = 0.0;
    std::string error;
};

struct SolveOptions {
    std::string mode = "approx";  // exact | approx
    double time_limit_s = 120.0;
    unsigned workers = 1;
};

std::vector<SolveRow> run_solve(const Manifest& manifest, const SolveOptions& opts);
void write_solve_csv(const std::vector<SolveRow>& rows, const std::filesystem::path& path);
std::vector<SolveRow> read_solve_csv(const std::filesystem::path& path);

// Joined view of one instance across the exact and approximate runs.
struct BenchRecord {
    std::string id;
    QKind q_kind = QKind::custom;
    std::size_t n_y = 0;
    Sense sense = Sense::optimistic;
    double exact_time_s = 0.0;
    std::string exact_status;
    double approx_frv_time_s = 0.0;
    double approx_follower_time_s = 0.0;
    double f_exact = 0.0;
    double f_approx = 0.0;
    double delta_f = 0.0;
    double ex_ante_bound = 0.0;
    double ex_post_bound = 0.0;
    bool bound_satisfied = false;
};

struct ReportSummary {
    std::size_t joined = 0;
    std::size_t exact_optimal = 0;
    double frac_delta0 = 0.0;
    double frac_delta_le5 = 0.0;
    double frac_delta_ge10 = 0.0;
    double bound_satisfaction_rate = 0.0;
    double approx_faster_fraction = 0.0;  // non-diagonal instances
};

std::vector<BenchRecord> join_records(const std::vector<SolveRow>& exact_rows,
                                      const std::vector<SolveRow>& approx_rows);

// Emits records.csv, profile.csv (timing profile, diagonal kind excluded),
// histogram.csv (integer delta-f bins, all kinds), summary.csv with the
// reference percentages alongside the measured ones, and static SVG
// renders of the profile and the histogram.
ReportSummary cmd_report(const std::vector<SolveRow>& exact_rows,
                         const std::vector<SolveRow>& approx_rows,
                         const std::filesystem::path& out_dir);

}  // namespace bilevel::bench
