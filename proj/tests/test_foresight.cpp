#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bilevel/exact.hpp"
#include "bilevel/foresight.hpp"
#include "bilevel/instances.hpp"
#include "bilevel/rng.hpp"

#include "support.hpp"

using namespace bilevel;
using testsupport::example2;

namespace {

LinBilevelInstance two_case_lin() {
    // Leader min x + y; follower max y s.t. 2y <= 3 + x; x binary.
    LinBilevelInstance inst;
    inst.n_x = 1;
    inst.n_y = 1;
    inst.h_x = {1.0};
    inst.d = {1.0};
    inst.A = Matrix(0, 1);
    inst.b = {};
    inst.C_x = Matrix(1, 1);
    inst.C_x(0, 0) = -1.0;
    inst.b_y = {-3.0};
    inst.D_y = Matrix(1, 1);
    inst.D_y(0, 0) = 2.0;
    inst.y_lo = {0.0};
    inst.y_hi = {10.0};
    return inst;
}

}  // namespace

TEST_CASE("relaxed foresight on the two squared-target instances") {
    {
        const auto r = relaxed_foresight_quad(example2(2.0));
        REQUIRE(r.solution.status == SolveStatus::optimal);
        CHECK(r.solution.x == IntVector{0});
        CHECK(r.frv_follower_cont[0] == doctest::Approx(2.0 / 3.0));
        CHECK(r.solution.y == IntVector{1});
        CHECK(r.solution.leader_obj == doctest::Approx(1.0));
    }
    {
        const auto r = relaxed_foresight_quad(example2(1.0));
        REQUIRE(r.solution.status == SolveStatus::optimal);
        CHECK(r.solution.x == IntVector{0});
        CHECK(r.frv_follower_cont[0] == doctest::Approx(1.0 / 3.0));
        CHECK(r.solution.y == IntVector{0});
        CHECK(r.solution.leader_obj == doctest::Approx(0.0));
    }
}

TEST_CASE("frv value is neither a lower nor an upper bound on the true optimum") {
    // First instance: relaxed leader value 2/3 < integer outcome 1.
    // Second: relaxed 1/3 > integer outcome 0.
    const auto a = relaxed_foresight_quad(example2(2.0));
    const auto b = relaxed_foresight_quad(example2(1.0));
    const double frv_a = a.frv_follower_cont[0];
    const double frv_b = b.frv_follower_cont[0];
    CHECK(frv_a < a.solution.leader_obj);
    CHECK(frv_b > b.solution.leader_obj);
}

TEST_CASE("unperturbed centered quadratic gives a zero ex-post gap term") {
    QuadBilevelInstance inst;
    inst.n_x = 2;
    inst.n_y = 2;
    inst.h_x = {1.0, -1.0};
    inst.d_x = {3.0, -2.0};
    inst.A = Matrix(0, 2);
    inst.Q_y = Matrix::diagonal({2.0, 5.0});
    inst.C_y = Matrix(2, 2);  // zero coupling
    inst.d_y = {0.0, 0.0};
    inst.sense = Sense::pessimistic;
    const auto r = relaxed_foresight_quad(inst);
    REQUIRE(r.solution.status == SolveStatus::optimal);
    CHECK(r.solution.y == IntVector{0, 0});
    CHECK(r.frv_follower_cont[0] == doctest::Approx(0.0));
    CHECK(r.frv_follower_cont[1] == doctest::Approx(0.0));
    CHECK(r.certificate.ex_post ==
          doctest::Approx(r.certificate.L2 * r.certificate.prox_used));
}

TEST_CASE("infeasible leader polyhedron") {
    auto inst = example2(2.0);
    inst.A = Matrix(2, 1);
    inst.A(0, 0) = 1.0;
    inst.A(1, 0) = -1.0;
    inst.b = {-0.5, -0.5};
    const auto r = relaxed_foresight_quad(inst);
    CHECK(r.solution.status == SolveStatus::infeasible);
}

TEST_CASE("certify_ex_ante") {
    CHECK(certify_ex_ante(1.0, 0.5) == doctest::Approx(1.0));
    CHECK(certify_ex_ante(3.0, 0.0) == doctest::Approx(0.0));
    // Diagonal family, n_y = 4: 2 * L2 * sqrt(4)/2 = 2.
    CHECK(certify_ex_ante(1.0, prox_diagonal(4)) == doctest::Approx(2.0));
}

TEST_CASE("certify_linear_case") {
    CHECK(certify_linear_case(Matrix::identity(1), {1.0}) ==
          doctest::Approx(2.0 / (4.0 * std::sqrt(2.0))));
    CHECK(certify_linear_case(Matrix::identity(2), {1.0, 0.0}) == doctest::Approx(2.0));
}

TEST_CASE("linear-case certificate never exceeds the trivial ex-ante bound") {
    rng::Xoshiro256pp gen(61);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(gen.uniform_int(0, 2));
        Matrix r(n, n);
        for (double& v : r.data()) v = gen.gaussian();
        Matrix q = r.transposed() * r;
        for (std::size_t i = 0; i < n; ++i) q(i, i) += 0.5;
        Vector d(n);
        for (auto& v : d) v = gen.gaussian() + 0.05;
        const double tight = certify_linear_case(q, d);
        const double trivial = certify_ex_ante(linalg::norm2(d), prox_bound_quad(q));
        CHECK(tight <= trivial + 1e-9);
    }
}

TEST_CASE("compose_apx_bound") {
    CHECK(compose_apx_bound(7.0, 1.0, 0.0, 2.0, 0.25) ==
          doctest::Approx(7.0 + certify_ex_ante(2.0, 0.25)));
    CHECK(compose_apx_bound(10.0, 2.0, 1.0, 1.0, 1.0) == doctest::Approx(24.0));
    CHECK(compose_apx_bound(5.0, 1.0, 0.0, 3.0, 0.0) == doctest::Approx(5.0));
    CHECK_THROWS_AS(compose_apx_bound(1.0, 0.5, 0.0, 1.0, 1.0), DimensionMismatch);
}

TEST_CASE("relaxed foresight for the linear family: two-case instance") {
    const auto r = relaxed_foresight_lin(two_case_lin());
    REQUIRE(r.solution.status == SolveStatus::optimal);
    CHECK(r.solution.x == IntVector{0});
    CHECK(r.frv_follower_cont[0] == doctest::Approx(1.5));
    CHECK(r.solution.y == IntVector{1});
    CHECK(r.solution.leader_obj == doctest::Approx(1.0));
    CHECK(r.certificate.lin_l_inf == doctest::Approx(2.0 * 1.0 * 1.0 * 2.0));
    CHECK(r.certificate.lin_l1 == doctest::Approx(2.0 * 1.0 * 1.0 * 5.0));
}

TEST_CASE("totally unimodular follower keeps the relaxed response integral") {
    LinBilevelInstance inst = two_case_lin();
    inst.D_y(0, 0) = 1.0;  // y <= 3 + x: interval polyhedron, integral vertices
    const auto r = relaxed_foresight_lin(inst);
    REQUIRE(r.solution.status == SolveStatus::optimal);
    CHECK(r.frv_follower_cont[0] == doctest::Approx(std::nearbyint(r.frv_follower_cont[0])));
    CHECK(static_cast<double>(r.solution.y[0]) == doctest::Approx(r.frv_follower_cont[0]));
}

TEST_CASE("linear family with empty leader polyhedron") {
    auto inst = two_case_lin();
    inst.A = Matrix(2, 1);
    inst.A(0, 0) = 1.0;
    inst.A(1, 0) = -1.0;
    inst.b = {-0.5, -0.5};
    CHECK(relaxed_foresight_lin(inst).solution.status == SolveStatus::infeasible);
}

TEST_CASE("gap certificates dominate realized gaps on random instances") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        GenConfig cfg;
        cfg.seed = 1000 + seed;
        cfg.n_x = 6;
        cfg.n_y = 6;
        cfg.m_x = 3;
        cfg.q_kind = seed % 3 == 0   ? QKind::diagonal
                     : seed % 3 == 1 ? QKind::cholesky_based
                                     : QKind::bounded_eigenvalues;
        cfg.sense = seed % 2 == 0 ? Sense::optimistic : Sense::pessimistic;
        const auto inst = gen_quad(cfg);
        const auto approx = relaxed_foresight_quad(inst);
        const auto exact = solve_exact_quad(inst, {});
        REQUIRE(approx.solution.status == SolveStatus::optimal);
        REQUIRE(exact.status == SolveStatus::optimal);
        const double gap = approx.solution.leader_obj - exact.leader_obj;
        CHECK(gap >= -1e-9);
        CHECK(gap <= approx.certificate.ex_post + 1e-6);
        CHECK(gap <= approx.certificate.ex_ante + 1e-6);
        CHECK(approx.certificate.ex_post <= approx.certificate.ex_ante + 1e-9);
    }
}

TEST_CASE("linear-family gaps respect both proximity bounds") {
    rng::Xoshiro256pp gen(67);
    int checked = 0;
    for (int trial = 0; trial < 80 && checked < 30; ++trial) {
        LinBilevelInstance inst;
        inst.n_x = 2;
        inst.n_y = 1 + static_cast<std::size_t>(gen.uniform_int(0, 1));
        const std::size_t m = 1 + static_cast<std::size_t>(gen.uniform_int(0, 1));
        inst.h_x = {static_cast<double>(gen.uniform_int(-3, 3)),
                    static_cast<double>(gen.uniform_int(-3, 3))};
        inst.d.resize(inst.n_y);
        for (auto& v : inst.d) v = static_cast<double>(gen.uniform_int(-2, 2));
        inst.A = Matrix(0, 2);
        inst.C_x = Matrix(m, 2);
        for (double& v : inst.C_x.data()) v = static_cast<double>(gen.uniform_int(-2, 2));
        inst.b_y.resize(m);
        for (auto& v : inst.b_y) v = static_cast<double>(gen.uniform_int(-4, 0));
        inst.D_y = Matrix(m, inst.n_y);
        for (double& v : inst.D_y.data()) v = static_cast<double>(gen.uniform_int(-2, 2));
        inst.y_lo.assign(inst.n_y, -5.0);
        inst.y_hi.assign(inst.n_y, 5.0);
        if (!validate(inst).empty()) continue;
        const auto approx = relaxed_foresight_lin(inst);
        const auto exact = solve_exact_lin(inst, {});
        if (approx.solution.status != SolveStatus::optimal) continue;
        REQUIRE(exact.status == SolveStatus::optimal);
        ++checked;
        const double gap = approx.solution.leader_obj - exact.leader_obj;
        CHECK(gap >= -1e-9);
        CHECK(gap <= std::min(approx.certificate.lin_l_inf, approx.certificate.lin_l1) + 1e-6);
    }
    CHECK(checked >= 30);
}

TEST_CASE("misalignment: every follower optimum gives the same leader value") {
    rng::Xoshiro256pp gen(71);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2;
        Matrix d_y(1, n);
        d_y(0, 0) = static_cast<double>(gen.uniform_int(1, 2));
        d_y(0, 1) = static_cast<double>(gen.uniform_int(1, 2));
        const Vector obj = {1.0, static_cast<double>(gen.uniform_int(-2, 2))};
        const Vector rhs = {static_cast<double>(gen.uniform_int(2, 6))};
        const VarBounds bounds{Vector(n, -3.0), Vector(n, 3.0)};
        const auto best = solve_ilp(obj, OptDirection::maximize, d_y, rhs, bounds);
        if (best.status != LpStatus::optimal) continue;
        // Exhaust the lattice: all optima share the objective value, which is
        // exactly the leader's follower term.
        for (long long y0 = -3; y0 <= 3; ++y0)
            for (long long y1 = -3; y1 <= 3; ++y1) {
                const double lhs = d_y(0, 0) * static_cast<double>(y0) +
                                   d_y(0, 1) * static_cast<double>(y1);
                if (lhs > rhs[0] + 1e-9) continue;
                const double val = obj[0] * static_cast<double>(y0) + obj[1] * static_cast<double>(y1);
                CHECK(val <= best.value + 1e-9);
            }
    }
}
