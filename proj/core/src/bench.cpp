#include "bilevel/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "bilevel/exact.hpp"
#include "bilevel/foresight.hpp"

namespace bilevel::bench {

namespace {

constexpr int kCsvSchemaVersion = 1;

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

double now_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::string fnv1a_digest(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("fnv1a_digest: cannot open " + file.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Manifest cmd_gen(const GenOptions& opts) {
    std::size_t per_set = 0;
    if (opts.scale == "paper") {
        per_set = 50;
    } else if (opts.scale == "desk") {
        per_set = 5;
    } else {
        throw ParseError("cmd_gen: scale must be 'paper' or 'desk', got '" + opts.scale + "'");
    }
    std::error_code ec;
    std::filesystem::create_directories(opts.out_dir, ec);
    if (ec) throw IoError("cmd_gen: cannot create " + opts.out_dir.string());

    Manifest manifest;
    manifest.base_seed = opts.seed;
    manifest.scale = opts.scale;
    manifest.dir = opts.out_dir;

    for (const StoredInstance& stored : gen_testbed(opts.seed, per_set)) {
        const std::string file = stored.id + ".inst";
        write_instance(stored, opts.out_dir / file);
        ManifestEntry entry;
        entry.id = stored.id;
        entry.file = file;
        entry.q_kind = stored.q_kind;
        entry.n_y = stored.inst.n_y;
        entry.sense = stored.inst.sense;
        entry.digest = fnv1a_digest(opts.out_dir / file);
        manifest.entries.push_back(std::move(entry));
    }
    write_manifest(manifest, opts.out_dir / "manifest.txt");
    return manifest;
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& manifest_path) {
    std::ofstream out(manifest_path);
    if (!out) throw IoError("write_manifest: cannot open " + manifest_path.string());
    out << "bilevel-manifest v1\n";
    out << "base_seed " << manifest.base_seed << '\n';
    out << "scale " << manifest.scale << '\n';
    out << "count " << manifest.entries.size() << '\n';
    for (const ManifestEntry& e : manifest.entries) {
        out << "instance " << e.id << ' ' << e.file << ' ' << to_string(e.q_kind) << ' ' << e.n_y
            << ' ' << to_string(e.sense) << ' ' << e.digest << '\n';
    }
    if (!out) throw IoError("write_manifest: write failed");
}

Manifest read_manifest(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw IoError("read_manifest: cannot open " + manifest_path.string());
    Manifest manifest;
    manifest.dir = manifest_path.parent_path();
    std::string line;
    int line_no = 0;
    std::size_t declared = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (line_no == 1) {
            std::string version;
            ls >> version;
            if (key != "bilevel-manifest" || version != "v1")
                throw ParseError("read_manifest: unrecognized header (line 1)");
            continue;
        }
        if (key == "base_seed") {
            ls >> manifest.base_seed;
        } else if (key == "scale") {
            ls >> manifest.scale;
        } else if (key == "count") {
            ls >> declared;
        } else if (key == "instance") {
            ManifestEntry e;
            std::string kind, sense;
            if (!(ls >> e.id >> e.file >> kind >> e.n_y >> sense >> e.digest))
                throw ParseError("read_manifest: malformed instance line " + std::to_string(line_no));
            e.q_kind = q_kind_from_string(kind);
            e.sense = sense == "pessimistic" ? Sense::pessimistic : Sense::optimistic;
            manifest.entries.push_back(std::move(e));
        } else {
            throw ParseError("read_manifest: unknown key '" + key + "' (line " +
                             std::to_string(line_no) + ")");
        }
    }
    if (declared != manifest.entries.size())
        throw ParseError("read_manifest: count field disagrees with instance lines");
    return manifest;
}

namespace {

SolveRow solve_one(const ManifestEntry& entry, const std::filesystem::path& dir,
                   const SolveOptions& opts) {
    SolveRow row;
    row.id = entry.id;
    row.q_kind = entry.q_kind;
    row.n_y = entry.n_y;
    row.sense = entry.sense;
    row.mode = opts.mode;
    try {
        const StoredInstance stored = read_instance(dir / entry.file);
        if (opts.mode == "exact") {
            ExactConfig cfg;
            cfg.time_limit_s = opts.time_limit_s;
            const auto t0 = std::chrono::steady_clock::now();
            const BilevelSolution sol = solve_exact_quad(stored.inst, cfg);
            row.time_s = now_seconds(t0);
            row.status = to_string(sol.status);
            row.leader_obj = sol.leader_obj;
        } else {
            const ApproxResult res = relaxed_foresight_quad(stored.inst);
            row.frv_time_s = res.frv_seconds;
            row.follower_time_s = res.follower_seconds;
            row.time_s = res.frv_seconds + res.follower_seconds;
            row.status = to_string(res.solution.status);
            row.leader_obj = res.solution.leader_obj;
            row.ex_ante = res.certificate.ex_ante;
            row.ex_post = res.certificate.ex_post;
            row.linear_case = res.certificate.has_linear_case ? res.certificate.linear_case : 0.0;
        }
    } catch (const std::exception& ex) {
        row.status = "error";
        row.error = sanitize(ex.what());
    }
    return row;
}

}  // namespace

std::vector<SolveRow> run_solve(const Manifest& manifest, const SolveOptions& opts) {
    if (opts.mode != "exact" && opts.mode != "approx")
        throw ParseError("run_solve: mode must be 'exact' or 'approx', got '" + opts.mode + "'");
    std::vector<SolveRow> rows(manifest.entries.size());
    const unsigned workers = std::max(1u, opts.workers);
    if (workers == 1) {
        for (std::size_t i = 0; i < manifest.entries.size(); ++i)
            rows[i] = solve_one(manifest.entries[i], manifest.dir, opts);
        return rows;
    }
    // Results land in the slot of their instance, so the merge order is
    // deterministic regardless of scheduling.
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= manifest.entries.size()) return;
            rows[i] = solve_one(manifest.entries[i], manifest.dir, opts);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    return rows;
}

void write_solve_csv(const std::vector<SolveRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("write_solve_csv: cannot open " + path.string());
    out << "schema_version,mode,instance_id,q_kind,n_y,sense,status,time_s,frv_time_s,"
           "follower_time_s,leader_obj,ex_ante,ex_post,linear_case,error\n";
    for (const SolveRow& r : rows) {
        out << kCsvSchemaVersion << ',' << r.mode << ',' << r.id << ',' << to_string(r.q_kind)
            << ',' << r.n_y << ',' << to_string(r.sense) << ',' << r.status << ','
            << format_number(r.time_s) << ',' << format_number(r.frv_time_s) << ','
            << format_number(r.follower_time_s) << ',' << format_number(r.leader_obj) << ','
            << format_number(r.ex_ante) << ',' << format_number(r.ex_post) << ','
            << format_number(r.linear_case) << ',' << r.error << '\n';
    }
    if (!out) throw IoError("write_solve_csv: write failed");
}

std::vector<SolveRow> read_solve_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("read_solve_csv: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError("read_solve_csv: empty file " + path.string());
    std::vector<SolveRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        while (cells.size() < 15) cells.emplace_back();
        if (cells[0] != std::to_string(kCsvSchemaVersion))
            throw ParseError("read_solve_csv: unsupported schema version at line " +
                             std::to_string(line_no));
        SolveRow r;
        r.mode = cells[1];
        r.id = cells[2];
        r.q_kind = q_kind_from_string(cells[3]);
        r.n_y = static_cast<std::size_t>(std::stoul(cells[4]));
        r.sense = cells[5] == "pessimistic" ? Sense::pessimistic : Sense::optimistic;
        r.status = cells[6];
        r.time_s = std::stod(cells[7]);
        r.frv_time_s = std::stod(cells[8]);
        r.follower_time_s = std::stod(cells[9]);
        r.leader_obj = std::stod(cells[10]);
        r.ex_ante = std::stod(cells[11]);
        r.ex_post = std::stod(cells[12]);
        r.linear_case = std::stod(cells[13]);
        r.error = cells[14];
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<BenchRecord> join_records(const std::vector<SolveRow>& exact_rows,
                                      const std::vector<SolveRow>& approx_rows) {
    std::map<std::string, const SolveRow*> approx_by_id;
    for (const SolveRow& r : approx_rows) approx_by_id[r.id] = &r;
    if (approx_by_id.size() != exact_rows.size())
        throw MismatchedManifests("join_records: the two result sets cover different instances");

    std::vector<BenchRecord> out;
    out.reserve(exact_rows.size());
    for (const SolveRow& ex : exact_rows) {
        const auto it = approx_by_id.find(ex.id);
        if (it == approx_by_id.end())
            throw MismatchedManifests("join_records: no approx row for instance " + ex.id);
        const SolveRow& ap = *it->second;
        BenchRecord rec;
        rec.id = ex.id;
        rec.q_kind = ex.q_kind;
        rec.n_y = ex.n_y;
        rec.sense = ex.sense;
        rec.exact_time_s = ex.time_s;
        rec.exact_status = ex.status;
        rec.approx_frv_time_s = ap.frv_time_s;
        rec.approx_follower_time_s = ap.follower_time_s;
        rec.f_exact = ex.leader_obj;
        rec.f_approx = ap.leader_obj;
        rec.delta_f = ap.leader_obj - ex.leader_obj;
        rec.ex_ante_bound = ap.ex_ante;
        rec.ex_post_bound = ap.ex_post;
        rec.bound_satisfied = rec.delta_f <= rec.ex_post_bound + 1e-6;
        out.push_back(std::move(rec));
    }
    return out;
}

namespace {

const double kProfileBudgets[] = {0.0001, 0.0002, 0.0005, 0.001, 0.002, 0.005, 0.01, 0.02,
                                  0.05,   0.1,    0.2,    0.5,   1.0,   2.0,   5.0,  10.0,
                                  20.0,   50.0,   100.0,  200.0, 500.0};

void write_profile_svg(const std::filesystem::path& path, const std::vector<double>& exact_frac,
                       const std::vector<double>& approx_frac) {
    const int w = 640, h = 420, ml = 60, mb = 50, mt = 20, mr = 20;
    const int pw = w - ml - mr, ph = h - mt - mb;
    const std::size_t nb = std::size(kProfileBudgets);
    auto xpos = [&](std::size_t i) { return ml + static_cast<double>(i) * pw / (nb - 1); };
    auto ypos = [&](double f) { return mt + (1.0 - f) * ph; };

    std::ofstream out(path);
    if (!out) throw IoError("write_profile_svg: cannot open " + path.string());
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<line x1='" << ml << "' y1='" << mt + ph << "' x2='" << ml + pw << "' y2='" << mt + ph
        << "' stroke='black'/>\n";
    out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << mt + ph
        << "' stroke='black'/>\n";
    for (double f : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        out << "<text x='" << ml - 8 << "' y='" << ypos(f) + 4
            << "' font-size='11' text-anchor='end'>" << f << "</text>\n";
        out << "<line x1='" << ml << "' y1='" << ypos(f) << "' x2='" << ml + pw << "' y2='"
            << ypos(f) << "' stroke='#dddddd'/>\n";
    }
    for (std::size_t i = 0; i < nb; i += 4) {
        out << "<text x='" << xpos(i) << "' y='" << mt + ph + 16
            << "' font-size='10' text-anchor='middle'>" << kProfileBudgets[i] << "</text>\n";
    }
    out << "<text x='" << ml + pw / 2 << "' y='" << h - 8
        << "' font-size='12' text-anchor='middle'>time budget (s, log-spaced)</text>\n";
    auto polyline = [&](const std::vector<double>& frac, const char* color) {
        out << "<polyline fill='none' stroke='" << color << "' stroke-width='2' points='";
        for (std::size_t i = 0; i < nb; ++i) out << xpos(i) << ',' << ypos(frac[i]) << ' ';
        out << "'/>\n";
    };
    polyline(exact_frac, "#d62728");
    polyline(approx_frac, "#1f77b4");
    out << "<text x='" << ml + 10 << "' y='" << mt + 16
        << "' font-size='12' fill='#d62728'>exact</text>\n";
    out << "<text x='" << ml + 10 << "' y='" << mt + 32
        << "' font-size='12' fill='#1f77b4'>approx</text>\n";
    out << "</svg>\n";
}

void write_histogram_svg(const std::filesystem::path& path,
                         const std::map<long long, std::size_t>& bins) {
    const int w = 640, h = 420, ml = 60, mb = 50, mt = 20, mr = 20;
    const int pw = w - ml - mr, ph = h - mt - mb;
    std::ofstream out(path);
    if (!out) throw IoError("write_histogram_svg: cannot open " + path.string());
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<line x1='" << ml << "' y1='" << mt + ph << "' x2='" << ml + pw << "' y2='" << mt + ph
        << "' stroke='black'/>\n";
    if (!bins.empty()) {
        const long long lo = bins.begin()->first;
        const long long hi = bins.rbegin()->first;
        const long long span = std::max<long long>(1, hi - lo + 1);
        std::size_t peak = 1;
        for (const auto& [bin, count] : bins) peak = std::max(peak, count);
        const double bw = static_cast<double>(pw) / static_cast<double>(span);
        for (const auto& [bin, count] : bins) {
            const double x = ml + static_cast<double>(bin - lo) * bw;
            const double bh = static_cast<double>(count) / static_cast<double>(peak) * ph;
            out << "<rect x='" << x + 1 << "' y='" << mt + ph - bh << "' width='"
                << std::max(1.0, bw - 2) << "' height='" << bh << "' fill='#1f77b4'/>\n";
            out << "<text x='" << x + bw / 2 << "' y='" << mt + ph - bh - 4
                << "' font-size='10' text-anchor='middle'>" << count << "</text>\n";
            if (span <= 40) {
                out << "<text x='" << x + bw / 2 << "' y='" << mt + ph + 14
                    << "' font-size='10' text-anchor='middle'>" << bin << "</text>\n";
            }
        }
    }
    out << "<text x='" << ml + pw / 2 << "' y='" << h - 8
        << "' font-size='12' text-anchor='middle'>delta f (leader objective gap)</text>\n";
    out << "</svg>\n";
}

}  // namespace

ReportSummary cmd_report(const std::vector<SolveRow>& exact_rows,
                         const std::vector<SolveRow>& approx_rows,
                         const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cmd_report: cannot create " + out_dir.string());

    const std::vector<BenchRecord> records = join_records(exact_rows, approx_rows);

    {
        std::ofstream out(out_dir / "records.csv");
        if (!out) throw IoError("cmd_report: cannot open records.csv");
        out << "schema_version,instance_id,q_kind,n_y,sense,exact_time_s,exact_status,"
               "approx_frv_time_s,approx_follower_time_s,f_exact,f_approx,delta_f,"
               "ex_ante_bound,ex_post_bound,bound_satisfied\n";
        for (const BenchRecord& r : records) {
            out << kCsvSchemaVersion << ',' << r.id << ',' << to_string(r.q_kind) << ',' << r.n_y
                << ',' << to_string(r.sense) << ',' << format_number(r.exact_time_s) << ','
                << r.exact_status << ',' << format_number(r.approx_frv_time_s) << ','
                << format_number(r.approx_follower_time_s) << ',' << format_number(r.f_exact)
                << ',' << format_number(r.f_approx) << ',' << format_number(r.delta_f) << ','
                << format_number(r.ex_ante_bound) << ',' << format_number(r.ex_post_bound) << ','
                << (r.bound_satisfied ? 1 : 0) << '\n';
        }
    }

    // Timing profile over the non-diagonal instances.
    const std::size_t nb = std::size(kProfileBudgets);
    std::vector<double> exact_frac(nb, 0.0), approx_frac(nb, 0.0);
    std::size_t timed = 0;
    for (const BenchRecord& r : records) {
        if (r.q_kind == QKind::diagonal) continue;
        ++timed;
        const double approx_total = r.approx_frv_time_s + r.approx_follower_time_s;
        for (std::size_t i = 0; i < nb; ++i) {
            if (r.exact_status == "optimal" && r.exact_time_s <= kProfileBudgets[i])
                exact_frac[i] += 1.0;
            if (approx_total <= kProfileBudgets[i]) approx_frac[i] += 1.0;
        }
    }
    if (timed > 0) {
        for (std::size_t i = 0; i < nb; ++i) {
            exact_frac[i] /= static_cast<double>(timed);
            approx_frac[i] /= static_cast<double>(timed);
        }
    }
    {
        std::ofstream out(out_dir / "profile.csv");
        if (!out) throw IoError("cmd_report: cannot open profile.csv");
        out << "schema_version,budget_s,exact_fraction,approx_fraction\n";
        for (std::size_t i = 0; i < nb; ++i)
            out << kCsvSchemaVersion << ',' << format_number(kProfileBudgets[i]) << ','
                << format_number(exact_frac[i]) << ',' << format_number(approx_frac[i]) << '\n';
    }
    write_profile_svg(out_dir / "profile.svg", exact_frac, approx_frac);

    // Quality histogram over instances solved to optimality, all kinds.
    std::map<long long, std::size_t> bins;
    ReportSummary summary;
    summary.joined = records.size();
    std::size_t satisfied = 0, d0 = 0, dle5 = 0, dge10 = 0;
    std::size_t faster = 0, faster_base = 0;
    for (const BenchRecord& r : records) {
        if (r.exact_status == "optimal") {
            ++summary.exact_optimal;
            bins[std::llround(r.delta_f)] += 1;
            if (r.bound_satisfied) ++satisfied;
            if (std::abs(r.delta_f) <= 1e-6) ++d0;
            if (r.delta_f <= 5.0 + 1e-6) ++dle5;
            if (r.delta_f >= 10.0 - 1e-6) ++dge10;
        }
        if (r.q_kind != QKind::diagonal) {
            ++faster_base;
            if (r.approx_frv_time_s + r.approx_follower_time_s < r.exact_time_s) ++faster;
        }
    }
    {
        std::ofstream out(out_dir / "histogram.csv");
        if (!out) throw IoError("cmd_report: cannot open histogram.csv");
        out << "schema_version,delta_f_bin,count\n";
        for (const auto& [bin, count] : bins)
            out << kCsvSchemaVersion << ',' << bin << ',' << count << '\n';
    }
    write_histogram_svg(out_dir / "histogram.svg", bins);

    if (summary.exact_optimal > 0) {
        const double denom = static_cast<double>(summary.exact_optimal);
        summary.frac_delta0 = static_cast<double>(d0) / denom;
        summary.frac_delta_le5 = static_cast<double>(dle5) / denom;
        summary.frac_delta_ge10 = static_cast<double>(dge10) / denom;
        summary.bound_satisfaction_rate = static_cast<double>(satisfied) / denom;
    }
    summary.approx_faster_fraction =
        faster_base > 0 ? static_cast<double>(faster) / static_cast<double>(faster_base) : 0.0;

    {
        std::ofstream out(out_dir / "summary.csv");
        if (!out) throw IoError("cmd_report: cannot open summary.csv");
        out << "key,measured,reference\n";
        out << "instances_joined," << summary.joined << ",\n";
        out << "exact_optimal," << summary.exact_optimal << ",\n";
        out << "frac_delta_f_zero," << format_number(summary.frac_delta0) << ",0.77\n";
        out << "frac_delta_f_le_5," << format_number(summary.frac_delta_le5) << ",0.91\n";
        out << "frac_delta_f_ge_10," << format_number(summary.frac_delta_ge10) << ",0.025\n";
        out << "bound_satisfaction_rate," << format_number(summary.bound_satisfaction_rate)
            << ",1.0\n";
        out << "approx_faster_fraction," << format_number(summary.approx_faster_fraction) << ",\n";
    }
    return summary;
}

}  // namespace bilevel::bench
