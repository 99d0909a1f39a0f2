#include <cstdint>
#include <cstring>
#include <fstream>

#include "oldb/solver.hpp"

namespace oldb {

namespace {

constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& o, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  o.write(b, 4);
}

void put_f64(std::ostream& o, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  o.write(b, 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::uint64_t(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void write_checkpoint(const SimState& s, const std::string& path) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw RuntimeFailure("cannot open checkpoint for writing: " + path);
  const Gridd& g = s.grid();
  o.write("OLDB", 4);
  put_u32(o, kVersion);
  put_u32(o, static_cast<std::uint32_t>(g.dim()));
  put_u32(o, static_cast<std::uint32_t>(g.n()));
  for (double v : {g.length(), s.t, s.params.nu, s.params.a, s.params.mu, s.params.b}) put_f64(o, v);
  for (const auto& c : s.u.c)
    for (Index i = 0; i < c.v.size(); ++i) put_f64(o, c.v(i));
  for (const auto& e : s.tau.e)
    for (Index i = 0; i < e.v.size(); ++i) put_f64(o, e.v(i));
  if (!o) throw RuntimeFailure("checkpoint write failed: " + path);
}

SimState read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeFailure("cannot open checkpoint: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "OLDB", 4) != 0) throw RuntimeFailure("not a checkpoint file: " + path);
  const std::uint32_t version = get_u32(in);
  if (version != kVersion) throw RuntimeFailure("unsupported checkpoint version " + std::to_string(version));
  const int d = static_cast<int>(get_u32(in));
  const int N = static_cast<int>(get_u32(in));
  const double L = get_f64(in);
  SimState s;
  s.t = get_f64(in);
  s.params.nu = get_f64(in);
  s.params.a = get_f64(in);
  s.params.mu = get_f64(in);
  s.params.b = get_f64(in);
  if (!in) throw RuntimeFailure("truncated checkpoint header: " + path);
  const Gridd g(d, N, L);
  s.u = VectorFieldd(g);
  s.tau = TensorFieldd(g);
  for (auto& c : s.u.c)
    for (Index i = 0; i < c.v.size(); ++i) c.v(i) = get_f64(in);
  for (auto& e : s.tau.e)
    for (Index i = 0; i < e.v.size(); ++i) e.v(i) = get_f64(in);
  if (!in) throw RuntimeFailure("truncated checkpoint data: " + path);
  s.u.divergence_free = true;
  s.tau.symmetric = true;
  return s;
}

}  // namespace oldb
