#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bilevel/model.hpp"

namespace bilevel {

enum class QKind { diagonal, cholesky_based, bounded_eigenvalues, custom };

const char* to_string(QKind k);
QKind q_kind_from_string(const std::string& s);

struct GenConfig {
    std::uint64_t seed = 0;
    std::size_t n_x = 10;
    std::size_t n_y = 10;
    QKind q_kind = QKind::diagonal;
    std::size_t m_x = 5;
    Sense sense = Sense::optimistic;
};

// Instance plus the metadata the benchmark pipeline carries around.
struct StoredInstance {
    std::string id;
    QKind q_kind = QKind::custom;
    QuadBilevelInstance inst;
};

// Deterministic draw of one instance; the same seed always produces the
// same bytes. Leader coefficients are uniform integers in [-5,5], follower
// coupling in [-9,9], A entries in {-1,0,1} with b = A xbar for a random
// binary xbar, and Q_y built by the requested method.
QuadBilevelInstance gen_quad(const GenConfig& cfg);

// Full testbed: `per_set` instances per (q_kind x n_y in {10,20}) cell,
// each emitted optimistic and pessimistic with identical numeric data.
// per_set = 50 reproduces the 600-instance layout; 5 gives the desk scale.
std::vector<StoredInstance> gen_testbed(std::uint64_t base_seed, std::size_t per_set = 50);

// Subset-Sum-Interval data: positive integers q_1..q_k, an interval base R
// of width 2^r, and the derived constants Q = sum q_i,
// B = R + 2^r - 1 + r Q.
struct SsiInstance {
    std::vector<long long> q;
    long long R = 0;
    long long r = 0;

    long long sum_q() const;
    long long big_b() const;
    // Penalty magnitude (B + Q + 2^r + 1)^2; dominates every unpenalized term.
    double penalty_m() const;
};

// Reduces Subset-Sum-Interval to a pessimistic quadratic bilevel instance
// with 4r+2k+1 follower variables and binary-enforcement penalty terms.
// Requires R to be representable as a subset sum of q (the non-trivial
// case) and a follower dimension within the IQP guard.
QuadBilevelInstance reduce_ssi(const SsiInstance& ssi);

void write_instance(const StoredInstance& stored, const std::filesystem::path& path);
StoredInstance read_instance(const std::filesystem::path& path);

}  // namespace bilevel
