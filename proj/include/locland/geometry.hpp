#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "locland/errors.hpp"

namespace locland {

using Index = Eigen::Index;

/// Index space a landscape lives on: a 1D chain or a periodic square torus
/// in row-major order. Distance is |i-j| on the chain and Chebyshev with
/// wrap-around on the torus, so unit-distance adjacency means 2 neighbours
/// on the chain and 8 on the torus.
class GridGeometry {
public:
  enum class Kind { Chain, Torus2D };

  GridGeometry() : kind_(Kind::Chain), size_(1), side_(1) {}

  static GridGeometry chain(Index n) {
    if (n < 1) throw InvalidInputError("geometry: chain size must be >= 1");
    GridGeometry g;
    g.kind_ = Kind::Chain;
    g.size_ = n;
    g.side_ = n;
    return g;
  }

  static GridGeometry torus(Index side) {
    if (side < 1) throw InvalidInputError("geometry: torus side must be >= 1");
    GridGeometry g;
    g.kind_ = Kind::Torus2D;
    g.size_ = side * side;
    g.side_ = side;
    return g;
  }

  Kind kind() const { return kind_; }
  Index size() const { return size_; }
  Index side() const { return side_; }
  int dimension() const { return kind_ == Kind::Chain ? 1 : 2; }

  int distance(Index i, Index j) const {
    check_index(i);
    check_index(j);
    if (kind_ == Kind::Chain) return static_cast<int>(std::abs(i - j));
    const auto a = coords(i);
    const auto b = coords(j);
    return std::max(wrap_distance(a[0], b[0]), wrap_distance(a[1], b[1]));
  }

  /// Distance from index m to the ball(center, radius), as a set.
  int ball_distance(Index m, Index center, int radius) const {
    return std::max(0, distance(m, center) - radius);
  }

  /// Indices within distance <= radius of center, ascending.
  std::vector<Index> ball(Index center, int radius) const {
    check_index(center);
    if (radius < 0) throw InvalidInputError("geometry: negative ball radius");
    std::vector<Index> out;
    if (kind_ == Kind::Chain) {
      const Index lo = std::max<Index>(0, center - radius);
      const Index hi = std::min<Index>(size_ - 1, center + radius);
      out.reserve(hi - lo + 1);
      for (Index i = lo; i <= hi; ++i) out.push_back(i);
      return out;
    }
    const auto c = coords(center);
    std::vector<char> hit(size_, 0);
    const int r = static_cast<int>(std::min<Index>(radius, side_));
    for (int dr = -r; dr <= r; ++dr)
      for (int dc = -r; dc <= r; ++dc) {
        const Index row = wrap(c[0] + dr);
        const Index col = wrap(c[1] + dc);
        hit[row * side_ + col] = 1;
      }
    for (Index i = 0; i < size_; ++i)
      if (hit[i]) out.push_back(i);
    return out;
  }

  /// Unit-distance neighbours of i, ascending, i excluded.
  std::vector<Index> neighbors(Index i) const {
    std::vector<Index> out = ball(i, 1);
    out.erase(std::find(out.begin(), out.end(), i));
    return out;
  }

  /// Chain: {i, 0}. Torus: {row, col}.
  std::array<Index, 2> coords(Index i) const {
    check_index(i);
    if (kind_ == Kind::Chain) return {i, 0};
    return {i / side_, i % side_};
  }

  Index index_of(Index row, Index col) const {
    if (kind_ == Kind::Chain) return row;
    return wrap(row) * side_ + wrap(col);
  }

  /// Default peak window: max(1, round(n^(1/d) / 30)).
  int default_window() const {
    const double extent = kind_ == Kind::Chain
                              ? static_cast<double>(size_)
                              : static_cast<double>(side_);
    return std::max(1, static_cast<int>(std::lround(extent / 30.0)));
  }

  std::string describe() const {
    if (kind_ == Kind::Chain) return "chain:" + std::to_string(size_);
    return "torus:" + std::to_string(side_);
  }

  /// Parses "chain:N" or "torus:S".
  static GridGeometry parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
      throw InvalidInputError("geometry: expected chain:N or torus:S, got '" +
                              text + "'");
    const std::string head = text.substr(0, colon);
    const long value = std::atol(text.c_str() + colon + 1);
    if (value < 1)
      throw InvalidInputError("geometry: bad extent in '" + text + "'");
    if (head == "chain") return chain(value);
    if (head == "torus") return torus(value);
    throw InvalidInputError("geometry: unknown kind '" + head + "'");
  }

  bool operator==(const GridGeometry& other) const {
    return kind_ == other.kind_ && size_ == other.size_;
  }

private:
  void check_index(Index i) const {
    if (i < 0 || i >= size_)
      throw InvalidInputError("geometry: index " + std::to_string(i) +
                              " out of range [0, " + std::to_string(size_) +
                              ")");
  }

  Index wrap(Index v) const {
    v %= side_;
    return v < 0 ? v + side_ : v;
  }

  int wrap_distance(Index a, Index b) const {
    Index d = std::abs(a - b);
    return static_cast<int>(std::min(d, side_ - d));
  }

  Kind kind_;
  Index size_;
  Index side_;
};

}  // namespace locland
