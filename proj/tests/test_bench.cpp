#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "bilevel/bench.hpp"

using namespace bilevel;
using namespace bilevel::bench;

namespace {

std::filesystem::path temp_dir(const char* name) {
    const auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

Manifest tiny_manifest(const std::filesystem::path& dir, std::uint64_t seed) {
    // A 4-instance manifest: one optimistic/pessimistic pair per small kind.
    Manifest manifest;
    manifest.base_seed = seed;
    manifest.scale = "desk";
    manifest.dir = dir;
    const auto bed = gen_testbed(seed, 1);
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& s = bed[i];
        const std::string file = s.id + ".inst";
        write_instance(s, dir / file);
        manifest.entries.push_back(
            {s.id, file, s.q_kind, s.inst.n_y, s.inst.sense, fnv1a_digest(dir / file)});
    }
    return manifest;
}

}  // namespace

TEST_CASE("cmd_gen writes a digest-stable testbed") {
    const auto dir1 = temp_dir("bilevel_gen1");
    const auto dir2 = temp_dir("bilevel_gen2");
    const Manifest m1 = cmd_gen({9001, dir1, "desk"});
    const Manifest m2 = cmd_gen({9001, dir2, "desk"});
    CHECK(m1.entries.size() == 60);
    REQUIRE(m1.entries.size() == m2.entries.size());
    for (std::size_t i = 0; i < m1.entries.size(); ++i) {
        CHECK(m1.entries[i].id == m2.entries[i].id);
        CHECK(m1.entries[i].digest == m2.entries[i].digest);
    }
    const Manifest loaded = read_manifest(dir1 / "manifest.txt");
    CHECK(loaded.entries.size() == m1.entries.size());
    CHECK(loaded.base_seed == 9001);
    CHECK(loaded.scale == "desk");
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
}

TEST_CASE("cmd_gen rejects unknown scales") {
    CHECK_THROWS_AS(cmd_gen({1, std::filesystem::temp_directory_path(), "huge"}), ParseError);
}

TEST_CASE("run_solve produces deterministic objective columns") {
    const auto dir = temp_dir("bilevel_solve");
    const Manifest manifest = tiny_manifest(dir, 555);

    SolveOptions approx;
    approx.mode = "approx";
    const auto rows1 = run_solve(manifest, approx);
    const auto rows2 = run_solve(manifest, approx);
    approx.workers = 2;
    const auto rows3 = run_solve(manifest, approx);
    REQUIRE(rows1.size() == 4);
    for (std::size_t i = 0; i < rows1.size(); ++i) {
        CHECK(rows1[i].status == "optimal");
        CHECK(rows1[i].leader_obj == rows2[i].leader_obj);
        CHECK(rows1[i].leader_obj == rows3[i].leader_obj);
        CHECK(rows1[i].ex_ante == rows2[i].ex_ante);
    }

    SolveOptions exact;
    exact.mode = "exact";
    const auto ex1 = run_solve(manifest, exact);
    const auto ex2 = run_solve(manifest, exact);
    for (std::size_t i = 0; i < ex1.size(); ++i) {
        CHECK(ex1[i].status == "optimal");
        CHECK(ex1[i].leader_obj == ex2[i].leader_obj);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("approx mode reproduces the worked pessimistic example from a file") {
    const auto dir = temp_dir("bilevel_example1");
    StoredInstance stored;
    stored.id = "example1-pes";
    stored.q_kind = QKind::custom;
    stored.inst.n_x = 2;
    stored.inst.n_y = 1;
    stored.inst.h_x = {-100.0, 100.0};
    stored.inst.d_x = {1.0};
    stored.inst.A = Matrix(1, 2);
    stored.inst.A(0, 1) = -1.0;
    stored.inst.b = {-1.0};
    stored.inst.Q_y = Matrix::diagonal({2.0});
    stored.inst.C_y = Matrix(1, 2);
    stored.inst.C_y(0, 0) = -1.0;
    stored.inst.d_y = {0.0};
    stored.inst.sense = Sense::pessimistic;
    write_instance(stored, dir / "example1.inst");

    Manifest manifest;
    manifest.dir = dir;
    manifest.scale = "desk";
    manifest.entries.push_back({stored.id, "example1.inst", QKind::custom, 1, Sense::pessimistic,
                                fnv1a_digest(dir / "example1.inst")});
    const auto rows = run_solve(manifest, {"approx", 120.0, 1});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].status == "optimal");
    CHECK(rows[0].leader_obj == doctest::Approx(1.0));
    std::filesystem::remove_all(dir);
}

TEST_CASE("forced timeout is recorded per row and the run continues") {
    const auto dir = temp_dir("bilevel_timeout");
    const Manifest manifest = tiny_manifest(dir, 556);
    SolveOptions exact;
    exact.mode = "exact";
    exact.time_limit_s = 1e-6;
    const auto rows = run_solve(manifest, exact);
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows)
        CHECK((r.status == "incumbent_timeout" || r.status == "infeasible" || r.status == "optimal"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("solve csv round-trips") {
    const auto dir = temp_dir("bilevel_csv");
    const Manifest manifest = tiny_manifest(dir, 557);
    const auto rows = run_solve(manifest, {"approx", 120.0, 1});
    const auto path = dir / "approx.csv";
    write_solve_csv(rows, path);
    const auto back = read_solve_csv(path);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].id == rows[i].id);
        CHECK(back[i].leader_obj == rows[i].leader_obj);
        CHECK(back[i].ex_post == rows[i].ex_post);
        CHECK(back[i].status == rows[i].status);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("cmd_report ingredients") {
    const auto dir = temp_dir("bilevel_report");
    const Manifest manifest = tiny_manifest(dir, 558);
    const auto exact_rows = run_solve(manifest, {"exact", 120.0, 1});
    const auto approx_rows = run_solve(manifest, {"approx", 120.0, 1});
    const auto summary = cmd_report(exact_rows, approx_rows, dir / "report");
    CHECK(summary.joined == 4);
    CHECK(summary.exact_optimal == 4);
    CHECK(summary.bound_satisfaction_rate == doctest::Approx(1.0));
    CHECK(std::filesystem::exists(dir / "report" / "records.csv"));
    CHECK(std::filesystem::exists(dir / "report" / "profile.csv"));
    CHECK(std::filesystem::exists(dir / "report" / "histogram.csv"));
    CHECK(std::filesystem::exists(dir / "report" / "summary.csv"));
    CHECK(std::filesystem::exists(dir / "report" / "profile.svg"));
    CHECK(std::filesystem::exists(dir / "report" / "histogram.svg"));

    // Profile fractions are monotone nondecreasing in the budget.
    std::ifstream in(dir / "report" / "profile.csv");
    std::string line;
    std::getline(in, line);  // header
    double prev_exact = 0.0, prev_approx = 0.0;
    while (std::getline(in, line)) {
        double budget, ef, af;
        int version;
        REQUIRE(std::sscanf(line.c_str(), "%d,%lf,%lf,%lf", &version, &budget, &ef, &af) == 4);
        CHECK(ef >= prev_exact);
        CHECK(af >= prev_approx);
        prev_exact = ef;
        prev_approx = af;
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("cmd_report with synthetic all-zero gaps puts the histogram mass in bin 0") {
    std::vector<SolveRow> exact_rows, approx_rows;
    for (int i = 0; i < 6; ++i) {
        SolveRow e;
        e.id = "inst" + std::to_string(i);
        e.q_kind = QKind::cholesky_based;
        e.n_y = 10;
        e.mode = "exact";
        e.status = "optimal";
        e.time_s = 1.0;
        e.leader_obj = 3.0;
        exact_rows.push_back(e);
        SolveRow a = e;
        a.mode = "approx";
        a.frv_time_s = 0.01;
        a.follower_time_s = 0.01;
        a.leader_obj = 3.0;
        a.ex_post = 1.0;
        a.ex_ante = 2.0;
        approx_rows.push_back(a);
    }
    const auto dir = temp_dir("bilevel_report_synth");
    const auto summary = cmd_report(exact_rows, approx_rows, dir);
    CHECK(summary.frac_delta0 == doctest::Approx(1.0));
    CHECK(summary.frac_delta_ge10 == doctest::Approx(0.0));
    std::ifstream in(dir / "histogram.csv");
    std::string line;
    std::getline(in, line);
    int bins = 0;
    while (std::getline(in, line)) ++bins;
    CHECK(bins == 1);

    // The summary renders the reference percentages next to the measured ones.
    std::ifstream sum(dir / "summary.csv");
    std::string text((std::istreambuf_iterator<char>(sum)), std::istreambuf_iterator<char>());
    CHECK(text.find("0.77") != std::string::npos);
    CHECK(text.find("0.91") != std::string::npos);
    CHECK(text.find("0.025") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("mismatched result sets are rejected") {
    std::vector<SolveRow> exact_rows(1), approx_rows(1);
    exact_rows[0].id = "a";
    approx_rows[0].id = "b";
    CHECK_THROWS_AS(join_records(exact_rows, approx_rows), MismatchedManifests);
}
