#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace plumbcalc {

// Persistence pairing of a filtered chain complex over the two-element field.
// Cells are dense ids 0..M-1; order lists them in filtration order (every
// face of a cell strictly earlier or equal in level, and earlier in order).
// pairs holds (birth cell, death cell); essential cells generate the
// homology of the whole complex.
struct PersistencePairs {
  std::vector<std::pair<long long, long long>> pairs;
  std::vector<long long> essential;
};

// Standard column reduction, processed one dimension at a time from the top
// so that columns of already-paired cells can be skipped (the twist
// shortcut). faces(id, out) must fill out with the boundary cell ids of id,
// one entry per odd-incidence face.
PersistencePairs persistence_pairs(
    const std::vector<long long>& order, const std::vector<int>& dim,
    const std::function<void(long long, std::vector<long long>&)>& faces);

// Rank over the two-element field of a matrix given by columns of strictly
// increasing row indices.
long long f2_rank(std::vector<std::vector<long long>> cols);

}  // namespace plumbcalc
