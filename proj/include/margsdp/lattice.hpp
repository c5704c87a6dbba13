#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace margsdp {

/// Hypercubic lattice. Sites are numbered by the row-major flattening of
/// their coordinates (last axis fastest), so a "20x1" lattice numbers its
/// sites along the first axis.
class Lattice {
 public:
  Lattice(std::vector<int> dims, bool periodic = true);

  const std::vector<int>& dims() const { return dims_; }
  bool periodic() const { return periodic_; }
  int n_sites() const { return n_sites_; }
  int rank() const { return static_cast<int>(dims_.size()); }

  std::vector<int> coords(int site) const;
  int index(const std::vector<int>& coords) const;

  /// Nearest-neighbour bonds (i, j) with i < j, each unordered pair once.
  const std::vector<std::pair<int, int>>& bonds() const { return bonds_; }

  /// Euclidean distance; minimum image along periodic axes.
  double distance(int a, int b) const;

 private:
  std::vector<int> dims_;
  bool periodic_;
  int n_sites_ = 0;
  std::vector<int> strides_;
  std::vector<std::pair<int, int>> bonds_;
};

/// Parses "20x1" / "4x4" style extents.
std::vector<int> parse_dims(std::string_view text);
std::string format_dims(const std::vector<int>& dims);

/// Partition of a lattice into congruent rectangular clusters.
///
/// Clusters are numbered row-major over the cluster grid, and the sites
/// inside a cluster are listed row-major over the cluster rectangle; that
/// list is the cluster's tensor-factor order (first site = most significant
/// factor).
class ClusterDecomposition {
 public:
  ClusterDecomposition(const Lattice& lattice, std::vector<int> cluster_shape);

  int n_clusters() const { return static_cast<int>(clusters_.size()); }
  int sites_per_cluster() const { return sites_per_cluster_; }
  const std::vector<int>& cluster_shape() const { return shape_; }
  const std::vector<int>& grid() const { return grid_; }

  const std::vector<int>& sites(int cluster) const { return clusters_[cluster]; }
  int cluster_of(int site) const { return owner_[site]; }
  int position_in_cluster(int site) const { return position_[site]; }

  /// Cluster index reached from `from` by the grid displacement `disp`
  /// (a flat cluster index interpreted as a grid vector), wrapping around.
  int translate(int from, int disp) const;
  /// Flat grid displacement from cluster a to cluster b (mod grid).
  int displacement(int a, int b) const;

 private:
  std::vector<int> shape_;
  std::vector<int> grid_;
  int sites_per_cluster_ = 0;
  std::vector<std::vector<int>> clusters_;
  std::vector<int> owner_;
  std::vector<int> position_;
};

}  // namespace margsdp
