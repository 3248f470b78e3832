#include "ctns/snapshot.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "ctns/error.hpp"

namespace ctns {
namespace {

constexpr std::array<char, 8> kMagic{'C', 'T', 'N', 'S', 'F', 'L', 'D', '1'};

static_assert(std::endian::native == std::endian::little,
              "snapshot IO assumes a little-endian host");

void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

void write_impl(const std::filesystem::path& path, const Grid& grid, bool is_vector,
                const std::vector<const std::vector<double>*>& comps) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open snapshot for writing: " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, static_cast<std::uint32_t>(grid.dim()));
  for (int a = 0; a < 3; ++a)
    put_u32(out, static_cast<std::uint32_t>(a < grid.dim() ? grid.n(a) : 1));
  put_u32(out, is_vector ? 1u : 0u);
  put_u32(out, 0u);
  for (const auto* c : comps)
    out.write(reinterpret_cast<const char*>(c->data()),
              static_cast<std::streamsize>(c->size() * sizeof(double)));
  if (!out) throw std::runtime_error("failed writing snapshot: " + path.string());
}

void check_shape(const Snapshot& snap, const Grid& grid) {
  if (snap.dim != grid.dim() || snap.n_per_axis != grid.n_per_axis())
    throw InvalidArgument("snapshot shape does not match the grid");
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const ScalarField& s) {
  write_impl(path, s.grid(), false, {&s.values()});
}

void write_snapshot(const std::filesystem::path& path, const VectorField& v) {
  std::vector<const std::vector<double>*> comps;
  for (int a = 0; a < v.dim(); ++a) comps.push_back(&v[a].values());
  write_impl(path, v.grid(), true, comps);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open snapshot: " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw InvalidArgument("not a field snapshot: " + path.string());
  Snapshot snap;
  snap.dim = static_cast<int>(get_u32(in));
  if (snap.dim != 2 && snap.dim != 3) throw InvalidArgument("snapshot has invalid dimension");
  std::array<std::uint32_t, 3> n{};
  for (auto& v : n) v = get_u32(in);
  const std::uint32_t kind = get_u32(in);
  get_u32(in);
  if (!in || kind > 1) throw InvalidArgument("corrupt snapshot header");
  snap.is_vector = kind == 1;
  std::size_t count = 1;
  for (int a = 0; a < snap.dim; ++a) {
    snap.n_per_axis.push_back(static_cast<int>(n[a]));
    count *= n[a];
  }
  const int ncomp = snap.is_vector ? snap.dim : 1;
  for (int c = 0; c < ncomp; ++c) {
    std::vector<double> data(count);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw InvalidArgument("truncated snapshot: " + path.string());
    snap.components.push_back(std::move(data));
  }
  return snap;
}

ScalarField to_scalar_field(const Snapshot& snap, const Grid& grid) {
  check_shape(snap, grid);
  if (snap.is_vector) throw InvalidArgument("snapshot holds a vector field");
  return ScalarField(grid, snap.components[0]);
}

VectorField to_vector_field(const Snapshot& snap, const Grid& grid) {
  check_shape(snap, grid);
  if (!snap.is_vector) throw InvalidArgument("snapshot holds a scalar field");
  std::vector<ScalarField> comps;
  for (const auto& c : snap.components) comps.emplace_back(grid, c);
  return VectorField(grid, std::move(comps));
}

}  // namespace ctns
