#include "plumbcalc/f2_reduction.hpp"

#include "plumbcalc/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <limits>
#include <unordered_map>

namespace plumbcalc {

namespace {

void symmetric_difference(std::vector<std::int32_t>& col, const std::vector<std::int32_t>& other,
                          std::vector<std::int32_t>& tmp) {
  tmp.clear();
  std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                std::back_inserter(tmp));
  col.swap(tmp);
}

}  // namespace

PersistencePairs persistence_pairs(
    const std::vector<long long>& order, const std::vector<int>& dim,
    const std::function<void(long long, std::vector<long long>&)>& faces) {
  const std::size_t m = order.size();
  if (m != dim.size()) throw InternalError("filtration order and dimension table disagree");
  if (m > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max()))
    throw InternalError("complex too large for the reduction index type");

  std::vector<std::int32_t> pos(m);
  for (std::size_t p = 0; p < m; ++p) {
    const long long id = order[p];
    if (id < 0 || static_cast<std::size_t>(id) >= m)
      throw InternalError("filtration order mentions an unknown cell");
    pos[static_cast<std::size_t>(id)] = static_cast<std::int32_t>(p);
  }

  int maxdim = 0;
  for (int d : dim) maxdim = std::max(maxdim, d);

  std::vector<bool> paired(m, false);
  // owner maps a row position to the column position whose reduced low it is
  std::vector<std::int32_t> owner(m, -1);
  std::vector<std::vector<std::int32_t>> reduced(m);
  std::vector<long long> face_ids;
  std::vector<std::int32_t> col, tmp;

  PersistencePairs out;
  for (int d = maxdim; d >= 1; --d) {
    for (std::size_t p = 0; p < m; ++p) {
      const long long id = order[p];
      if (dim[static_cast<std::size_t>(id)] != d) continue;
      if (paired[static_cast<std::size_t>(id)]) continue;  // cleared: known zero column
      face_ids.clear();
      faces(id, face_ids);
      col.clear();
      for (long long f : face_ids) {
        if (f < 0 || static_cast<std::size_t>(f) >= m)
          throw InternalError("boundary mentions an unknown cell");
        col.push_back(pos[static_cast<std::size_t>(f)]);
      }
      std::sort(col.begin(), col.end());
      while (!col.empty()) {
        const std::int32_t low = col.back();
        if (owner[static_cast<std::size_t>(low)] < 0) {
          owner[static_cast<std::size_t>(low)] = static_cast<std::int32_t>(p);
          const long long birth = order[static_cast<std::size_t>(low)];
          out.pairs.emplace_back(birth, id);
          paired[static_cast<std::size_t>(birth)] = true;
          paired[static_cast<std::size_t>(id)] = true;
          reduced[p] = col;
          break;
        }
        symmetric_difference(col, reduced[static_cast<std::size_t>(owner[static_cast<std::size_t>(low)])], tmp);
      }
    }
  }
  for (std::size_t p = 0; p < m; ++p) {
    const long long id = order[p];
    if (!paired[static_cast<std::size_t>(id)]) out.essential.push_back(id);
  }
  return out;
}

long long f2_rank(std::vector<std::vector<long long>> cols) {
  std::unordered_map<long long, std::size_t> owner;
  long long rank = 0;
  std::vector<long long> tmp;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    auto& col = cols[j];
    std::sort(col.begin(), col.end());
    while (!col.empty()) {
      const long long low = col.back();
      const auto it = owner.find(low);
      if (it == owner.end()) {
        owner.emplace(low, j);
        ++rank;
        break;
      }
      tmp.clear();
      const auto& other = cols[it->second];
      std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                    std::back_inserter(tmp));
      col.swap(tmp);
    }
  }
  return rank;
}

}  // namespace plumbcalc
