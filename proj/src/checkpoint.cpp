#include "margsdp/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "margsdp/error.hpp"

namespace margsdp {

namespace {

constexpr char kMagic[8] = {'M', 'S', 'D', 'P', 'C', 'K', 'P', 'T'};

class Fnv {
 public:
  void bytes(const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 8);
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u64(s.size());
    bytes(s.data(), s.size());
  }
  void mat(const Mat& a) {
    u64(a.rows());
    u64(a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) f64(a(i, j));
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(const char* p, size_t n) { buf_.insert(buf_.end(), p, p + n); }
  void mat(const Mat& a) {
    u64(a.rows());
    u64(a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) f64(a(i, j));
  }
  std::vector<char>& buffer() { return buf_; }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  Reader(const std::vector<char>& buf, size_t end) : buf_(buf), end_(end) {}
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  void expect_magic() {
    need(8);
    if (std::memcmp(buf_.data() + pos_, kMagic, 8) != 0) throw Error(ErrorKind::Checkpoint, "not a checkpoint file");
    pos_ += 8;
  }
  Mat mat() {
    const auto r = u64(), c = u64();
    if (r > (1u << 20) || c > (1u << 20) || r * c * 8 > end_ - pos_) {
      throw Error(ErrorKind::Checkpoint, "matrix header out of range");
    }
    Mat a(r, c);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = f64();
    return a;
  }
  bool done() const { return pos_ == end_; }

 private:
  void need(size_t n) const {
    if (pos_ + n > end_) throw Error(ErrorKind::Checkpoint, "checkpoint truncated");
  }
  const std::vector<char>& buf_;
  size_t end_;
  size_t pos_ = 0;
};

struct Snapshot {
  std::uint32_t kind = 0;
  long iteration = 0;
  std::vector<Mat> mats;
  std::vector<ConvergenceRecord> history;
};

void write_snapshot(const std::string& path, const ClusterProblem& problem, const Snapshot& s) {
  Writer w;
  w.raw(kMagic, 8);
  w.u32(kCheckpointVersion);
  w.u32(s.kind);
  w.u64(problem_fingerprint(problem));
  w.u64(static_cast<std::uint64_t>(s.iteration));
  w.u64(s.mats.size());
  for (const auto& m : s.mats) w.mat(m);
  w.u64(s.history.size());
  for (const auto& r : s.history) {
    w.u64(static_cast<std::uint64_t>(r.iter));
    w.f64(r.energy_per_site);
    w.f64(r.energy_delta);
    w.f64(r.feas_error);
    w.f64(r.wall_ms);
  }
  Fnv sum;
  sum.bytes(w.buffer().data(), w.buffer().size());
  w.u64(sum.value());

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Checkpoint, "cannot write " + tmp);
    out.write(w.buffer().data(), static_cast<std::streamsize>(w.buffer().size()));
    if (!out) throw Error(ErrorKind::Checkpoint, "write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Checkpoint, "cannot move checkpoint into place: " + ec.message());
}

Snapshot read_snapshot(const std::string& path, const ClusterProblem& problem, std::uint32_t kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Checkpoint, "cannot open checkpoint " + path);
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 8 + 4 + 4 + 8 + 8 + 8) throw Error(ErrorKind::Checkpoint, "checkpoint truncated: " + path);
  const size_t body = buf.size() - 8;
  Fnv sum;
  sum.bytes(buf.data(), body);
  std::uint64_t stored = 0;
  for (int i = 0; i < 8; ++i) stored |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[body + i])) << (8 * i);
  Reader r(buf, body);
  r.expect_magic();
  if (stored != sum.value()) throw Error(ErrorKind::Checkpoint, "checksum mismatch (truncated or corrupted file)");
  const auto version = r.u32();
  if (version != kCheckpointVersion) {
    throw Error(ErrorKind::Checkpoint, "unsupported checkpoint version " + std::to_string(version));
  }
  Snapshot s;
  s.kind = r.u32();
  if (s.kind != kind) throw Error(ErrorKind::Checkpoint, "checkpoint was written by the other solver");
  if (r.u64() != problem_fingerprint(problem)) {
    throw Error(ErrorKind::Checkpoint, "checkpoint belongs to a different problem (fingerprint mismatch)");
  }
  s.iteration = static_cast<long>(r.u64());
  const auto n_mats = r.u64();
  if (n_mats > buf.size()) throw Error(ErrorKind::Checkpoint, "matrix count out of range");
  for (std::uint64_t k = 0; k < n_mats; ++k) s.mats.push_back(r.mat());
  const auto n_hist = r.u64();
  if (n_hist > buf.size()) throw Error(ErrorKind::Checkpoint, "history length out of range");
  for (std::uint64_t k = 0; k < n_hist; ++k) {
    ConvergenceRecord rec;
    rec.iter = static_cast<long>(r.u64());
    rec.energy_per_site = r.f64();
    rec.energy_delta = r.f64();
    rec.feas_error = r.f64();
    rec.wall_ms = r.f64();
    s.history.push_back(rec);
  }
  if (!r.done()) throw Error(ErrorKind::Checkpoint, "trailing bytes in checkpoint");
  return s;
}

void expect_count(const Snapshot& s, size_t n) {
  if (s.mats.size() != n) throw Error(ErrorKind::Checkpoint, "checkpoint holds the wrong number of blocks");
}

}  // namespace

std::uint64_t problem_fingerprint(const ClusterProblem& problem) {
  Fnv h;
  h.str(problem.model);
  for (int e : problem.lattice.dims()) h.u64(static_cast<std::uint64_t>(e));
  h.u64(problem.lattice.periodic());
  for (int e : problem.clusters.cluster_shape()) h.u64(static_cast<std::uint64_t>(e));
  h.u64(static_cast<std::uint64_t>(problem.local_dim));
  h.u64(problem.fermionic);
  h.u64(static_cast<std::uint64_t>(problem.basis.size()));
  h.u64(problem.basis.parity_graded);
  for (const auto& m : problem.h_single) h.mat(m);
  for (const auto& [key, m] : problem.h_pair) {
    h.u64(static_cast<std::uint64_t>(key.first));
    h.u64(static_cast<std::uint64_t>(key.second));
    h.mat(m);
  }
  return h.value();
}

void save_checkpoint(const std::string& path, const ClusterProblem& problem, const SolverState& state) {
  Snapshot s;
  s.kind = 0;
  s.iteration = state.iteration;
  s.mats = state.marginals.single;
  for (const auto* v : {&state.marginals.pair, &state.aux, &state.lambda_pair, &state.lambda_left, &state.lambda_right})
    s.mats.insert(s.mats.end(), v->begin(), v->end());
  s.mats.push_back(state.x);
  s.history = state.history;
  write_snapshot(path, problem, s);
}

void save_checkpoint(const std::string& path, const ClusterProblem& problem, const TiState& state) {
  Snapshot s;
  s.kind = 1;
  s.iteration = state.iteration;
  s.mats.push_back(state.rho0);
  for (const auto* v : {&state.rho_pair, &state.aux, &state.lambda_pair, &state.lambda_left, &state.lambda_right})
    s.mats.insert(s.mats.end(), v->begin() + 1, v->end());
  s.mats.insert(s.mats.end(), state.x_row.begin(), state.x_row.end());
  s.history = state.history;
  write_snapshot(path, problem, s);
}

SolverState load_checkpoint(const std::string& path, const ClusterProblem& problem) {
  Snapshot s = read_snapshot(path, problem, 0);
  const size_t M = problem.n_clusters;
  const size_t P = M * (M - 1) / 2;
  expect_count(s, M + 5 * P + 1);
  SolverState st;
  auto it = s.mats.begin();
  auto take = [&](std::vector<Mat>& dst, size_t n) {
    dst.assign(std::make_move_iterator(it), std::make_move_iterator(it + n));
    it += n;
  };
  take(st.marginals.single, M);
  take(st.marginals.pair, P);
  take(st.aux, P);
  take(st.lambda_pair, P);
  take(st.lambda_left, P);
  take(st.lambda_right, P);
  st.x = std::move(*it);
  st.iteration = s.iteration;
  st.history = std::move(s.history);
  return st;
}

TiState load_checkpoint_ti(const std::string& path, const ClusterProblem& problem) {
  Snapshot s = read_snapshot(path, problem, 1);
  const size_t N = problem.n_clusters;
  expect_count(s, 1 + 5 * (N - 1) + N);
  TiState st;
  auto it = s.mats.begin();
  st.rho0 = std::move(*it++);
  for (auto* v : {&st.rho_pair, &st.aux, &st.lambda_pair, &st.lambda_left, &st.lambda_right}) {
    v->assign(1, Mat());
    v->insert(v->end(), std::make_move_iterator(it), std::make_move_iterator(it + (N - 1)));
    it += N - 1;
  }
  st.x_row.assign(std::make_move_iterator(it), std::make_move_iterator(s.mats.end()));
  st.iteration = s.iteration;
  st.history = std::move(s.history);
  return st;
}

}  // namespace margsdp
