#include "storypath/embedding.hpp"

#include <algorithm>
#include <string>

#include "storypath/error.hpp"

namespace storypath {

void EmbeddingSet::check() const {
  if (ids.empty() || n == 0) throw IncompleteSetError("embedding set is empty");
  if (dims() == 0) throw IncompleteSetError("embedding set has zero dimensions");
  const auto expected = static_cast<Eigen::Index>(ids.size() * n);
  if (vectors.rows() != expected) {
    throw IncompleteSetError("embedding set has " + std::to_string(vectors.rows()) + " rows, expected " +
                             std::to_string(expected));
  }
  for (std::size_t i = 1; i < ids.size(); ++i) {
    if (!(ids[i - 1] < ids[i])) throw DataError("narrative ids not unique and sorted at '" + ids[i] + "'");
  }
  if (!vectors.allFinite()) throw NonFiniteError("embedding set contains non-finite values");
}

}  // namespace storypath
