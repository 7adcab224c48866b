// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

// Offline artifact container: little-endian binary, self-describing through
// explicit dimension fields.  Layout documented in docs/artifact-format.md.
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "vicert/errors.hpp"
#include "vicert/reduction.hpp"

static_assert(std::endian::native == std::endian::little,
              "artifact files are little-endian; serialization assumes a little-endian host");

namespace vicert {

namespace {

constexpr char kMagic[8] = {'V', 'I', 'C', 'E', 'R', 'T', 'R', 'B'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path)
      : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
  }
  void bytes(const void* data, std::size_t size) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out_) throw IoError("write failed");
  }
  template <class T>
  void pod(T value) {
    bytes(&value, sizeof(T));
  }
  void matrix(const Matrix& m) {
    pod<std::uint64_t>(static_cast<std::uint64_t>(m.rows()));
    pod<std::uint64_t>(static_cast<std::uint64_t>(m.cols()));
    bytes(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
  }
  void vector(const Vector& v) {
    pod<std::uint64_t>(static_cast<std::uint64_t>(v.size()));
    bytes(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
  }
  void int_list(const std::vector<int>& v) {
    pod<std::uint64_t>(v.size());
    bytes(v.data(), sizeof(int) * v.size());
  }
  void double_list(const std::vector<double>& v) {
    pod<std::uint64_t>(v.size());
    bytes(v.data(), sizeof(double) * v.size());
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open " + path.string() + " for reading");
  }
  void bytes(void* data, std::size_t size) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
    if (static_cast<std::size_t>(in_.gcount()) != size) {
      throw IoError("truncated artifact file");
    }
  }
  template <class T>
  T pod() {
    T value;
    bytes(&value, sizeof(T));
    return value;
  }
  std::uint64_t count() {
    const std::uint64_t n = pod<std::uint64_t>();
    if (n > (1ull << 32)) throw IoError("corrupt artifact: implausible element count");
    return n;
  }
  Matrix matrix() {
    const auto rows = count();
    const auto cols = count();
    Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
    bytes(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
    return m;
  }
  Vector vector() {
    const auto n = count();
    Vector v(static_cast<Index>(n));
    bytes(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
    return v;
  }
  std::vector<int> int_list() {
    const auto n = count();
    std::vector<int> v(n);
    bytes(v.data(), sizeof(int) * v.size());
    return v;
  }
  std::vector<double> double_list() {
    const auto n = count();
    std::vector<double> v(n);
    bytes(v.data(), sizeof(double) * v.size());
    return v;
  }

 private:
  std::ifstream in_;
};

void write_gramian(Writer& w, const ResidualGramian& g) {
  w.matrix(g.hi);
  w.matrix(g.lo);
  w.pod<std::int32_t>(g.nf);
  w.pod<std::int32_t>(g.ng);
  w.pod<std::int32_t>(g.nzeta);
  w.pod<std::int32_t>(g.nphi);
  w.pod<std::int32_t>(g.npsi);
}

ResidualGramian read_gramian(Reader& r) {
  ResidualGramian g;
  g.hi = r.matrix();
  g.lo = r.matrix();
  g.nf = r.pod<std::int32_t>();
  g.ng = r.pod<std::int32_t>();
  g.nzeta = r.pod<std::int32_t>();
  g.nphi = r.pod<std::int32_t>();
  g.npsi = r.pod<std::int32_t>();
  return g;
}

}  // namespace

void save_offline(const OfflineArtifact& artifact, const std::filesystem::path& path) {
  if (artifact.spec.model != 1 && artifact.spec.model != 2) {
    throw ValidationError("only the built-in models can be persisted");
  }
  Writer w(path);
  w.bytes(kMagic, sizeof(kMagic));
  w.pod<std::uint32_t>(kVersion);
  w.pod<std::int32_t>(artifact.spec.model);
  w.pod<std::int32_t>(artifact.spec.effective_resolution());
  w.pod<double>(artifact.parameter_box[0]);
  w.pod<double>(artifact.parameter_box[1]);
  w.double_list(artifact.snapshot_parameters);

  w.matrix(artifact.primal.phi);
  w.matrix(artifact.primal.psi);
  w.pod<std::int32_t>(artifact.primal.supremizer_count);
  w.int_list(artifact.primal.phi_source);
  w.int_list(artifact.primal.psi_source);
  w.matrix(artifact.dual.zeta);
  w.int_list(artifact.dual.source);

  const ReducedOperators& ops = artifact.ops;
  w.pod<std::uint32_t>(static_cast<std::uint32_t>(ops.A_n.size()));
  for (const auto& m : ops.A_n) w.matrix(m);
  w.matrix(ops.B_n);
  w.pod<std::uint32_t>(static_cast<std::uint32_t>(ops.f_n.size()));
  for (const auto& v : ops.f_n) w.vector(v);
  w.pod<std::uint32_t>(static_cast<std::uint32_t>(ops.g_n.size()));
  for (const auto& v : ops.g_n) w.vector(v);
  w.pod<std::uint32_t>(static_cast<std::uint32_t>(ops.Atilde_n.size()));
  for (const auto& m : ops.Atilde_n) w.matrix(m);
  w.pod<std::uint32_t>(static_cast<std::uint32_t>(ops.ftilde_n.size()));
  for (const auto& v : ops.ftilde_n) w.vector(v);
  w.matrix(ops.pairing);

  write_gramian(w, artifact.cert.primal_dual);
  write_gramian(w, artifact.cert.primal_only);
  w.pod<double>(artifact.cert.beta);
  w.pod<std::uint8_t>(artifact.cert.stability.exact ? 1 : 0);
  w.pod<double>(artifact.cert.stability.alpha_fallback);
  w.pod<double>(artifact.cert.stability.gamma_fallback);
  w.pod<std::uint8_t>(artifact.cert.stability.certified ? 1 : 0);
}

OfflineArtifact load_offline(const std::filesystem::path& path) {
  Reader r(path);
  char magic[8];
  r.bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError("not a vicert artifact file: " + path.string());
  }
  const auto version = r.pod<std::uint32_t>();
  if (version != kVersion) {
    throw IoError("unsupported artifact version " + std::to_string(version) + " (expected " +
                  std::to_string(kVersion) + ")");
  }
  OfflineArtifact artifact;
  artifact.spec.model = r.pod<std::int32_t>();
  artifact.spec.resolution = r.pod<std::int32_t>();
  artifact.parameter_box[0] = r.pod<double>();
  artifact.parameter_box[1] = r.pod<double>();
  artifact.spec.parameter_box = artifact.parameter_box;
  artifact.snapshot_parameters = r.double_list();

  artifact.primal.phi = r.matrix();
  artifact.primal.psi = r.matrix();
  artifact.primal.supremizer_count = r.pod<std::int32_t>();
  artifact.primal.phi_source = r.int_list();
  artifact.primal.psi_source = r.int_list();
  artifact.dual.zeta = r.matrix();
  artifact.dual.source = r.int_list();

  ReducedOperators& ops = artifact.ops;
  for (std::uint32_t q = r.pod<std::uint32_t>(); q > 0; --q) ops.A_n.push_back(r.matrix());
  ops.B_n = r.matrix();
  for (std::uint32_t q = r.pod<std::uint32_t>(); q > 0; --q) ops.f_n.push_back(r.vector());
  for (std::uint32_t q = r.pod<std::uint32_t>(); q > 0; --q) ops.g_n.push_back(r.vector());
  for (std::uint32_t q = r.pod<std::uint32_t>(); q > 0; --q) ops.Atilde_n.push_back(r.matrix());
  for (std::uint32_t q = r.pod<std::uint32_t>(); q > 0; --q) ops.ftilde_n.push_back(r.vector());
  ops.pairing = r.matrix();

  artifact.cert.primal_dual = read_gramian(r);
  artifact.cert.primal_only = read_gramian(r);
  artifact.cert.beta = r.pod<double>();
  artifact.cert.stability.exact = r.pod<std::uint8_t>() != 0;
  artifact.cert.stability.alpha_fallback = r.pod<double>();
  artifact.cert.stability.gamma_fallback = r.pod<double>();
  artifact.cert.stability.certified = r.pod<std::uint8_t>() != 0;
  return artifact;
}

}  // namespace vicert
