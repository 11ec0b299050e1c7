#include "bilevel/instances.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "bilevel/rng.hpp"

namespace bilevel {

using rng::Xoshiro256pp;

const char* to_string(QKind k) {
    switch (k) {
        case QKind::diagonal: return "diagonal";
        case QKind::cholesky_based: return "cholesky_based";
        case QKind::bounded_eigenvalues: return "bounded_eigenvalues";
        default: return "custom";
    }
}

QKind q_kind_from_string(const std::string& s) {
    if (s == "diagonal") return QKind::diagonal;
    if (s == "cholesky_based") return QKind::cholesky_based;
    if (s == "bounded_eigenvalues") return QKind::bounded_eigenvalues;
    if (s == "custom") return QKind::custom;
    throw ParseError("unknown q_kind tag: " + s);
}

namespace {

double round_15(double x) {
    // Entries of the orthogonally-generated Q are stored to fifteen
    // decimal places.
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15f", x);
    return std::strtod(buf, nullptr);
}

Matrix gen_q_matrix(QKind kind, std::size_t n_y, Xoshiro256pp& gen) {
    switch (kind) {
        case QKind::diagonal: {
            Matrix q(n_y, n_y);
            for (std::size_t i = 0; i < n_y; ++i)
                q(i, i) = static_cast<double>(gen.uniform_int(1, 9));
            return q;
        }
        case QKind::cholesky_based: {
            Matrix r(n_y, n_y);
            for (std::size_t i = 0; i < n_y; ++i)
                for (std::size_t j = 0; j < n_y; ++j)
                    r(i, j) = static_cast<double>(gen.uniform_int(-1, 1));
            Matrix q = r.transposed() * r;
            for (std::size_t i = 0; i < n_y; ++i) q(i, i) += 1.0;
            return q;
        }
        case QKind::bounded_eigenvalues: {
            Vector diag(n_y);
            for (std::size_t i = 0; i < n_y; ++i)
                diag[i] = static_cast<double>(gen.uniform_int(1, 9));
            const Matrix u = linalg::haar_orthogonal(n_y, gen.next());
            Matrix q = u * Matrix::diagonal(diag) * u.transposed();
            // Symmetrize exactly, then truncate.
            for (std::size_t i = 0; i < n_y; ++i)
                for (std::size_t j = i + 1; j < n_y; ++j) {
                    const double avg = 0.5 * (q(i, j) + q(j, i));
                    q(i, j) = q(j, i) = avg;
                }
            for (double& x : q.data()) x = round_15(x);
            return q;
        }
        default:
            throw ParseError("gen_quad: q_kind custom is not generatable");
    }
}

}  // namespace

QuadBilevelInstance gen_quad(const GenConfig& cfg) {
    if (cfg.n_x == 0 || cfg.n_y == 0) throw DimensionMismatch("gen_quad: dimensions must be >= 1");
    Xoshiro256pp gen(cfg.seed);

    QuadBilevelInstance inst;
    inst.n_x = cfg.n_x;
    inst.n_y = cfg.n_y;
    inst.sense = cfg.sense;

    inst.h_x.resize(cfg.n_x);
    for (auto& v : inst.h_x) v = static_cast<double>(gen.uniform_int(-5, 5));
    inst.d_x.resize(cfg.n_y);
    for (auto& v : inst.d_x) v = static_cast<double>(gen.uniform_int(-5, 5));

    inst.A = Matrix(cfg.m_x, cfg.n_x);
    for (double& v : inst.A.data()) v = static_cast<double>(gen.uniform_int(-1, 1));
    Vector xbar(cfg.n_x);
    for (auto& v : xbar) v = static_cast<double>(gen.uniform_int(0, 1));
    inst.b = inst.A * xbar;

    inst.C_y = Matrix(cfg.n_y, cfg.n_x);
    for (double& v : inst.C_y.data()) v = static_cast<double>(gen.uniform_int(-9, 9));
    inst.d_y.resize(cfg.n_y);
    for (auto& v : inst.d_y) v = static_cast<double>(gen.uniform_int(-9, 9));

    inst.Q_y = gen_q_matrix(cfg.q_kind, cfg.n_y, gen);
    return inst;
}

std::vector<StoredInstance> gen_testbed(std::uint64_t base_seed, std::size_t per_set) {
    std::vector<StoredInstance> out;
    const QKind kinds[] = {QKind::diagonal, QKind::cholesky_based, QKind::bounded_eigenvalues};
    const std::size_t sizes[] = {10, 20};
    for (QKind kind : kinds) {
        for (std::size_t n_y : sizes) {
            for (std::size_t index = 0; index < per_set; ++index) {
                // One numeric stream per parameter set; the optimistic and
                // pessimistic variants share it byte for byte.
                GenConfig cfg;
                cfg.seed = rng::derive_stream(
                    base_seed, {static_cast<std::uint64_t>(kind), n_y, index});
                cfg.n_y = n_y;
                cfg.q_kind = kind;
                cfg.sense = Sense::optimistic;
                QuadBilevelInstance inst = gen_quad(cfg);
                for (Sense sense : {Sense::optimistic, Sense::pessimistic}) {
                    StoredInstance stored;
                    stored.q_kind = kind;
                    char id[96];
                    std::snprintf(id, sizeof(id), "%s-ny%02zu-i%03zu-%s", to_string(kind), n_y,
                                  index, sense == Sense::optimistic ? "opt" : "pes");
                    stored.id = id;
                    stored.inst = inst;
                    stored.inst.sense = sense;
                    out.push_back(std::move(stored));
                }
            }
        }
    }
    return out;
}

long long SsiInstance::sum_q() const {
    long long s = 0;
    for (long long v : q) s += v;
    return s;
}

long long SsiInstance::big_b() const { return R + (1LL << r) - 1 + r * sum_q(); }

double SsiInstance::penalty_m() const {
    const double base = static_cast<double>(big_b() + sum_q() + (1LL << r) + 1);
    return base * base;
}

QuadBilevelInstance reduce_ssi(const SsiInstance& ssi) {
    const std::size_t k = ssi.q.size();
    const long long r = ssi.r;
    if (k == 0 || r < 1 || static_cast<std::size_t>(r) > k)
        throw DimensionMismatch("reduce_ssi: need 1 <= r <= k");
    for (long long qi : ssi.q)
        if (qi < 1) throw DimensionMismatch("reduce_ssi: q entries must be positive");
    if (ssi.R < 1) throw DimensionMismatch("reduce_ssi: R must be positive");

    // The construction assumes R is itself a subset sum of q; the trivial
    // complementary case is excluded.
    {
        std::vector<char> reachable(static_cast<std::size_t>(ssi.sum_q()) + 1, 0);
        reachable[0] = 1;
        for (long long qi : ssi.q)
            for (long long s = ssi.sum_q(); s >= qi; --s)
                if (reachable[static_cast<std::size_t>(s - qi)]) reachable[static_cast<std::size_t>(s)] = 1;
        if (ssi.R > ssi.sum_q() || !reachable[static_cast<std::size_t>(ssi.R)])
            throw RNotRepresentable("reduce_ssi: R is not a subset sum of q");
    }

    const std::size_t n_follower = static_cast<std::size_t>(4 * r) + 2 * k + 1;
    if (n_follower > 24) throw TooLarge("reduce_ssi: follower dimension exceeds the IQP guard");
    const std::size_t n_leader = static_cast<std::size_t>(2 * r);

    // Follower variable layout:
    //   [0, r)            y^p
    //   [r, 2r)           y^d
    //   [2r, 2r+k)        y^o
    //   2r+k              y_s
    //   [2r+k+1, 3r+k+1)  z^p
    //   [3r+k+1, 4r+k+1)  z^d
    //   [4r+k+1, 4r+2k+1) z^o
    const std::size_t yp0 = 0;
    const std::size_t yd0 = static_cast<std::size_t>(r);
    const std::size_t yo0 = static_cast<std::size_t>(2 * r);
    const std::size_t ys = yo0 + k;
    const std::size_t zp0 = ys + 1;
    const std::size_t zd0 = zp0 + static_cast<std::size_t>(r);

    const double m_pen = ssi.penalty_m();
    const double m_sq = m_pen * m_pen;
    const long long big_q = ssi.sum_q();
    const long long big_b = ssi.big_b();

    // Weight vector a of the squared sum term (a^T w - B)^2.
    Vector a(n_follower, 0.0);
    for (long long i = 0; i < r; ++i) {
        a[yp0 + static_cast<std::size_t>(i)] = static_cast<double>(big_q + (1LL << i));
        a[yd0 + static_cast<std::size_t>(i)] = static_cast<double>(big_q);
    }
    for (std::size_t i = 0; i < k; ++i) a[yo0 + i] = static_cast<double>(ssi.q[i]);
    a[ys] = 1.0;

    QuadBilevelInstance inst;
    inst.n_x = n_leader;
    inst.n_y = n_follower;
    inst.sense = Sense::pessimistic;

    // Leader: objective is the y^p / y^d / y^o weights; no own-cost term.
    inst.h_x.assign(n_leader, 0.0);
    inst.d_x.assign(n_follower, 0.0);
    for (long long i = 0; i < r; ++i) {
        inst.d_x[yp0 + static_cast<std::size_t>(i)] = static_cast<double>(big_q + (1LL << i));
        inst.d_x[yd0 + static_cast<std::size_t>(i)] = static_cast<double>(big_q);
    }
    for (std::size_t i = 0; i < k; ++i) inst.d_x[yo0 + i] = static_cast<double>(ssi.q[i]);

    // Single leader constraint: sum of all x <= r.
    inst.A = Matrix(1, n_leader, 1.0);
    inst.b = {static_cast<double>(r)};

    // Follower quadratic: f_binary + (a^T w - B)^2 + M sum (x^p + y^p - z^p)^2
    // + M sum (x^d + y^d - z^d)^2, expanded into 1/2 w^T Q w + (C x)^T w + d^T w
    // (constants dropped; they do not move the argmin).
    Matrix q(n_follower, n_follower);
    Vector d_y(n_follower, 0.0);
    Matrix c_y(n_follower, n_leader);

    // f_binary: M^2 (w_j^2 - w_j) on every follower variable.
    for (std::size_t j = 0; j < n_follower; ++j) {
        q(j, j) += 2.0 * m_sq;
        d_y[j] += -m_sq;
    }
    // (a^T w - B)^2 -> Hessian 2 a a^T, linear -2 B a.
    for (std::size_t i = 0; i < n_follower; ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; j < n_follower; ++j) q(i, j) += 2.0 * a[i] * a[j];
        d_y[i] += -2.0 * static_cast<double>(big_b) * a[i];
    }
    // Penalty groups: M (x_i + y_i - z_i)^2 for the p and d blocks.
    auto add_penalty = [&](std::size_t y_base, std::size_t z_base, std::size_t x_base) {
        for (long long i = 0; i < r; ++i) {
            const std::size_t yj = y_base + static_cast<std::size_t>(i);
            const std::size_t zj = z_base + static_cast<std::size_t>(i);
            const std::size_t xj = x_base + static_cast<std::size_t>(i);
            q(yj, yj) += 2.0 * m_pen;
            q(zj, zj) += 2.0 * m_pen;
            q(yj, zj) += -2.0 * m_pen;
            q(zj, yj) += -2.0 * m_pen;
            c_y(yj, xj) += 2.0 * m_pen;
            c_y(zj, xj) += -2.0 * m_pen;
        }
    };
    add_penalty(yp0, zp0, 0);
    add_penalty(yd0, zd0, static_cast<std::size_t>(r));

    inst.Q_y = std::move(q);
    inst.C_y = std::move(c_y);
    inst.d_y = std::move(d_y);

    linalg::cholesky(inst.Q_y);  // SPD sanity gate
    return inst;
}

}  // namespace bilevel
