#pragma once
// Reference ground-state energies for a ClusterProblem.
//
// The global space is Q_0 (x) ... (x) Q_{M-1} with cluster 0 as the most
// significant factor. For fermionic problems a pair term coefficient of
// E_pq (x) E_rs on clusters g < d is lifted as
//   P^{t} (x) E_pq (x) P^{par(rs)} (x) E_rs (x) I,
// with P the parity of the clusters before g (first slot) and between g and
// d (third slot), t the total parity of the term. That is the Jordan-Wigner
// image of the same fermionic operator under the global cluster order.

#include <cstdint>
#include <string>

#include "margsdp/sdp_core.hpp"

namespace margsdp {

inline constexpr int kDenseDimCap = 1 << 12;
/// oracle_energy switches from dense to Lanczos above this dimension.
inline constexpr int kDenseAutoDim = 1 << 10;
inline constexpr long kLanczosDimCap = 1L << 22;

class GlobalHamiltonian {
 public:
  explicit GlobalHamiltonian(const ClusterProblem& problem);

  long dim() const { return dim_; }
  /// y = H x
  void apply(const Vec& x, Vec& y) const;
  Mat dense() const;

 private:
  struct Term {
    int g = -1;
    int d = -1;  // -1 for a single-cluster term
    struct Entry {
      int row, col;
      double value;
      bool odd_total, odd_right;
    };
    std::vector<Entry> entries;
  };
  template <typename Fn>
  void visit(const Term& t, Fn&& fn) const;

  int n_clusters_ = 0;
  int local_dim_ = 0;
  bool fermionic_ = false;
  long dim_ = 1;
  std::vector<Term> terms_;
};

struct GroundState {
  double energy = 0.0;
  Vec vector;
};

/// Full eigendecomposition; refuses spaces above kDenseDimCap.
GroundState ground_energy_dense(const ClusterProblem& problem);

struct LanczosResult {
  double energy = 0.0;
  double residual = 0.0;
  int matvecs = 0;
  bool converged = false;
  Vec vector;
};

/// Restarted Lanczos with full reorthogonalization. Each cycle builds a
/// Krylov basis of up to `krylov_dim` vectors and restarts from the current
/// Ritz vector until ||H v - E v|| < tol or `max_restarts` is exhausted, in
/// which case the best estimate is returned with converged = false.
LanczosResult ground_energy_lanczos(const ClusterProblem& problem, int krylov_dim = 80, double tol = 1e-9,
                                    int max_restarts = 50, std::uint64_t seed = 1);

/// Reduced marginals of a normalized global vector, in PairIndex order.
MarginalSet exact_marginals(const Vec& v, const ClusterProblem& problem);

/// Sum of the negative eigenvalues of the one-body hopping matrix with -1 on
/// every bond of the lattice.
double free_fermion_energy(const Lattice& lattice);

struct OracleEstimate {
  double energy_per_site = 0.0;
  std::string method;
  double residual = 0.0;
  bool converged = true;
};

/// Ground energy per site, dense up to kDenseAutoDim and Lanczos beyond.
OracleEstimate oracle_energy(const ClusterProblem& problem);

}  // namespace margsdp
