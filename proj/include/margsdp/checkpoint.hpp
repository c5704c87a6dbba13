#pragma once
// Binary checkpoint format, version 1. All integers are little-endian u64
// unless noted, all reals little-endian IEEE-754 binary64.
//
//   magic        8 bytes  "MSDPCKPT"
//   version      u32
//   solver kind  u32      0 = general, 1 = translation invariant
//   fingerprint  u64      problem_fingerprint of the problem solved
//   iteration    i64
//   n_matrices   u64, then per matrix: rows, cols, rows*cols reals (row-major)
//   n_records    u64, then per record: iter (i64), energy_per_site,
//                energy_delta, feas_error, wall_ms
//   checksum     u64      FNV-1a over every preceding byte
//
// Matrix order, general: rho_i (M), rho_ij, aux_ij, Lambda_ij, Lambda^(1)_ij,
// Lambda^(2)_ij (each in pair order), X. Translation invariant: rho_0, then
// rho_0d, aux_0d, Lambda_0d, Lambda^(1)_0d, Lambda^(2)_0d for d = 1..M-1,
// then X_0d for d = 0..M-1.

#include <cstdint>
#include <string>

#include "margsdp/solver_ti.hpp"

namespace margsdp {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// FNV-1a hash of everything that defines the optimization problem.
std::uint64_t problem_fingerprint(const ClusterProblem& problem);

void save_checkpoint(const std::string& path, const ClusterProblem& problem, const SolverState& state);
void save_checkpoint(const std::string& path, const ClusterProblem& problem, const TiState& state);

/// Throw ErrorKind::Checkpoint on a missing, truncated or corrupted file, a
/// version or solver-kind mismatch, or a fingerprint that differs from
/// `problem`.
SolverState load_checkpoint(const std::string& path, const ClusterProblem& problem);
TiState load_checkpoint_ti(const std::string& path, const ClusterProblem& problem);

}  // namespace margsdp
