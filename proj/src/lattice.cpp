#include "margsdp/lattice.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "margsdp/error.hpp"

namespace margsdp {

namespace {

std::vector<int> grid_coords(int index, const std::vector<int>& extents) {
  std::vector<int> c(extents.size());
  for (int a = static_cast<int>(extents.size()) - 1; a >= 0; --a) {
    c[a] = index % extents[a];
    index /= extents[a];
  }
  return c;
}

int grid_index(const std::vector<int>& c, const std::vector<int>& extents) {
  int idx = 0;
  for (size_t a = 0; a < extents.size(); ++a) idx = idx * extents[a] + c[a];
  return idx;
}

}  // namespace

Lattice::Lattice(std::vector<int> dims, bool periodic) : dims_(std::move(dims)), periodic_(periodic) {
  if (dims_.empty()) throw Error(ErrorKind::InvalidConfig, "lattice needs at least one axis");
  n_sites_ = 1;
  for (int d : dims_) {
    if (d <= 0) throw Error(ErrorKind::InvalidConfig, "lattice extents must be positive");
    n_sites_ *= d;
  }
  std::set<std::pair<int, int>> seen;
  for (int i = 0; i < n_sites_; ++i) {
    auto c = coords(i);
    for (int a = 0; a < rank(); ++a) {
      if (dims_[a] == 1) continue;
      auto n = c;
      n[a] += 1;
      if (n[a] == dims_[a]) {
        if (!periodic_) continue;
        n[a] = 0;
      }
      int j = index(n);
      if (j == i) continue;
      auto key = std::minmax(i, j);
      if (seen.insert(key).second) bonds_.push_back(key);
    }
  }
}

std::vector<int> Lattice::coords(int site) const { return grid_coords(site, dims_); }

int Lattice::index(const std::vector<int>& c) const { return grid_index(c, dims_); }

double Lattice::distance(int a, int b) const {
  auto ca = coords(a), cb = coords(b);
  double d2 = 0.0;
  for (int ax = 0; ax < rank(); ++ax) {
    int d = std::abs(ca[ax] - cb[ax]);
    if (periodic_) d = std::min(d, dims_[ax] - d);
    d2 += static_cast<double>(d) * d;
  }
  return std::sqrt(d2);
}

std::vector<int> parse_dims(std::string_view text) {
  std::vector<int> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('x', start);
    if (end == std::string_view::npos) end = text.size();
    auto part = text.substr(start, end - start);
    int v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size() || v <= 0) {
      throw Error(ErrorKind::InvalidConfig, "cannot parse extents '" + std::string(text) + "'");
    }
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

std::string format_dims(const std::vector<int>& dims) {
  std::string s;
  for (size_t i = 0; i < dims.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(dims[i]);
  }
  return s;
}

ClusterDecomposition::ClusterDecomposition(const Lattice& lattice, std::vector<int> cluster_shape)
    : shape_(std::move(cluster_shape)) {
  const auto& dims = lattice.dims();
  if (shape_.size() != dims.size()) {
    throw Error(ErrorKind::InvalidConfig, "cluster shape " + format_dims(shape_) + " has a different rank than lattice " +
                                              format_dims(dims));
  }
  sites_per_cluster_ = 1;
  grid_.resize(dims.size());
  for (size_t a = 0; a < dims.size(); ++a) {
    if (shape_[a] <= 0 || dims[a] % shape_[a] != 0) {
      throw Error(ErrorKind::InvalidConfig,
                  "cluster shape " + format_dims(shape_) + " does not divide lattice " + format_dims(dims));
    }
    grid_[a] = dims[a] / shape_[a];
    sites_per_cluster_ *= shape_[a];
  }
  int n_clusters = 1;
  for (int g : grid_) n_clusters *= g;
  clusters_.assign(n_clusters, {});
  owner_.assign(lattice.n_sites(), -1);
  position_.assign(lattice.n_sites(), -1);
  for (int c = 0; c < n_clusters; ++c) {
    auto origin = grid_coords(c, grid_);
    for (int local = 0; local < sites_per_cluster_; ++local) {
      auto off = grid_coords(local, shape_);
      std::vector<int> site(dims.size());
      for (size_t a = 0; a < dims.size(); ++a) site[a] = origin[a] * shape_[a] + off[a];
      int s = lattice.index(site);
      clusters_[c].push_back(s);
      owner_[s] = c;
      position_[s] = local;
    }
  }
}

int ClusterDecomposition::translate(int from, int disp) const {
  auto a = grid_coords(from, grid_);
  auto d = grid_coords(disp, grid_);
  for (size_t ax = 0; ax < grid_.size(); ++ax) a[ax] = (a[ax] + d[ax]) % grid_[ax];
  return grid_index(a, grid_);
}

int ClusterDecomposition::displacement(int from, int to) const {
  auto a = grid_coords(from, grid_);
  auto b = grid_coords(to, grid_);
  for (size_t ax = 0; ax < grid_.size(); ++ax) b[ax] = ((b[ax] - a[ax]) % grid_[ax] + grid_[ax]) % grid_[ax];
  return grid_index(b, grid_);
}

}  // namespace margsdp
