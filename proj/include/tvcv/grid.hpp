#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace tvcv {

/// Which total-variation penalty is attached to a problem.
enum class TVVariant { isotropic, anisotropic, square };

inline const char* to_string(TVVariant v) {
  switch (v) {
    case TVVariant::isotropic: return "isotropic";
    case TVVariant::anisotropic: return "anisotropic";
    case TVVariant::square: return "square";
  }
  return "?";
}

inline TVVariant parse_variant(const std::string& s) {
  if (s == "isotropic") return TVVariant::isotropic;
  if (s == "anisotropic") return TVVariant::anisotropic;
  if (s == "square") return TVVariant::square;
  throw std::invalid_argument("unknown TV variant: " + s);
}

/// Pixel lattice in row-major order. Each pixel's neighbor list holds the
/// right and down pixels; the bottom row has only the right neighbor, the
/// rightmost column only the down neighbor, and the bottom-right corner has
/// none and carries no TV term.
struct GridGraph {
  int rows = 0;
  int cols = 0;
  std::vector<std::vector<int>> neighbors;  // per pixel, (right, down) order
  std::vector<int> tv_terms;                // pixels with a non-empty neighbor list

  int size() const { return rows * cols; }
  int index(int r, int c) const { return r * cols + c; }
};

inline GridGraph build_grid(int rows, int cols) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("build_grid: rows and cols must be >= 1");
  const std::int64_t n64 = static_cast<std::int64_t>(rows) * cols;
  if (n64 > std::numeric_limits<int>::max())
    throw std::invalid_argument("build_grid: rows*cols overflows the pixel index type");

  GridGraph g;
  g.rows = rows;
  g.cols = cols;
  g.neighbors.resize(static_cast<std::size_t>(n64));
  g.tv_terms.reserve(static_cast<std::size_t>(n64));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int i = g.index(r, c);
      auto& nb = g.neighbors[i];
      if (c + 1 < cols) nb.push_back(g.index(r, c + 1));
      if (r + 1 < rows) nb.push_back(g.index(r + 1, c));
      if (!nb.empty()) g.tv_terms.push_back(i);
    }
  }
  return g;
}

}  // namespace tvcv
