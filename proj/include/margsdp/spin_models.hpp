#pragma once

#include "margsdp/problem.hpp"

namespace margsdp {

namespace pauli {
Mat x();
Mat z();
/// sigma^+ = [[0,1],[0,0]] and sigma^- = [[0,0],[1,0]]; both real.
Mat raising();
Mat lowering();
/// sigma^x sigma^x + sigma^y sigma^y + sigma^z sigma^z as a real 4x4 matrix.
Mat heisenberg_bond();
}  // namespace pauli

/// Places a 2x2 site operator at `position` among `n_sites` spin-1/2 factors.
Mat lift_site(const Mat& op, int position, int n_sites);

/// Places a two-site operator (4x4, factors ordered a then b) on positions
/// (pos_a, pos_b) of an n_sites chain of spin-1/2 factors. pos_a != pos_b.
Mat lift_two_site(const Mat& op, int pos_a, int pos_b, int n_sites);

/// -h sum_i sigma^x_i - sum_{i~j} sigma^z_i sigma^z_j
ClusterProblem build_tfi(const Lattice& lattice, double h, const ClusterDecomposition& clustering);

/// sum_{i~j} (sigma^x sigma^x + sigma^y sigma^y + sigma^z sigma^z)
ClusterProblem build_afh(const Lattice& lattice, const ClusterDecomposition& clustering);

/// Assembles a spin model from a per-site field operator and a two-site bond
/// operator, distributing terms between the single-cluster and cluster-pair
/// Hamiltonians.
ClusterProblem build_spin_model(std::string name, const Lattice& lattice, const ClusterDecomposition& clustering,
                                const Mat& site_term, const Mat& bond_term);

}  // namespace margsdp
