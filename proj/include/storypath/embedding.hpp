#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace storypath {

/// Paragraph vectors P_ij for N narratives of n paragraphs each.
///
/// Row `i * n + (j - 1)` of `vectors` holds narrative `ids[i]`, paragraph j
/// (1-based). Narratives are kept sorted by id.
struct EmbeddingSet {
  std::vector<std::string> ids;
  std::size_t n = 0;
  Eigen::MatrixXd vectors;

  std::size_t narrative_count() const { return ids.size(); }
  std::size_t dims() const { return static_cast<std::size_t>(vectors.cols()); }
  std::size_t row_index(std::size_t narrative, std::size_t paragraph) const {
    return narrative * n + (paragraph - 1);
  }
  auto vector(std::size_t narrative, std::size_t paragraph) const {
    return vectors.row(static_cast<Eigen::Index>(row_index(narrative, paragraph)));
  }

  /// Throws IncompleteSetError / NonFiniteError / DataError when the set is
  /// empty, has the wrong row count, duplicate ids or non-finite entries.
  void check() const;
};

}  // namespace storypath
