#pragma once

#include <filesystem>
#include <vector>

#include "ctns/grid.hpp"

namespace ctns {

// Field snapshot layout (all integers and floats little-endian):
//   bytes  0..7   magic "CTNSFLD1"
//   bytes  8..11  uint32 dim
//   bytes 12..23  uint32 points per axis (unused axes hold 1)
//   bytes 24..27  uint32 kind: 0 scalar, 1 vector
//   bytes 28..31  uint32 reserved, 0
// followed by the components one after another, each row-major float64.

struct Snapshot {
  int dim = 0;
  std::vector<int> n_per_axis;
  bool is_vector = false;
  std::vector<std::vector<double>> components;
};

void write_snapshot(const std::filesystem::path& path, const ScalarField& s);
void write_snapshot(const std::filesystem::path& path, const VectorField& v);
Snapshot read_snapshot(const std::filesystem::path& path);

/// Rebuild a field on `grid`; the snapshot's shape must match.
ScalarField to_scalar_field(const Snapshot& snap, const Grid& grid);
VectorField to_vector_field(const Snapshot& snap, const Grid& grid);

}  // namespace ctns
