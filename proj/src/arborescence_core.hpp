// Plain edge-list minimum arborescence shared by the public solver and the
// matching-forest bound.

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace pwalloc::detail {

struct Arc {
  int tail;
  int head;
  double weight;
};

/// Indices into `arcs` forming a minimum arborescence over nodes
/// [0, node_count) rooted at `root`. Ties break on (weight, tail, head).
/// Returns nullopt and sets `unreachable` to the lowest unreachable node
/// when no arborescence exists.
std::optional<std::vector<std::size_t>> min_arborescence(int node_count, int root,
                                                         const std::vector<Arc>& arcs,
                                                         int* unreachable = nullptr);

}  // namespace pwalloc::detail
