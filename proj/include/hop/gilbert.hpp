#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <vector>

#include "hop/error.hpp"

namespace hop {

// Grid extents: number of cells along each axis (n_i + 1 in the usual
// zero-based indexing of an n_1 x ... x n_k data rectangle/cuboid).
struct GridDims {
  std::array<int, 3> ext{1, 1, 1};
  int k = 2;

  static GridDims d2(int w, int h) {
    GridDims g;
    g.ext = {w, h, 1};
    g.k = 2;
    g.validate();
    return g;
  }

  static GridDims d3(int w, int h, int d) {
    GridDims g;
    g.ext = {w, h, d};
    g.k = 3;
    g.validate();
    return g;
  }

  void validate() const {
    if (k != 2 && k != 3)
      throw Error(errc::invalid_dimension, "grid dimension k must be 2 or 3");
    for (int i = 0; i < k; ++i)
      if (ext[i] < 1)
        throw Error(errc::invalid_dimension,
                    "grid extent " + std::to_string(i) + " must be >= 1, got " +
                        std::to_string(ext[i]));
  }

  std::int64_t cardinality() const {
    std::int64_t c = 1;
    for (int i = 0; i < k; ++i) c *= ext[i];
    return c;
  }

  bool operator==(const GridDims& o) const { return k == o.k && ext == o.ext; }
};

// Row-major linear index, last axis fastest.
inline std::int64_t linear_index(const std::array<int, 3>& c, const GridDims& dims) {
  std::int64_t idx = c[0];
  for (int i = 1; i < dims.k; ++i) idx = idx * dims.ext[i] + c[i];
  return idx;
}

// An enumeration of all grid cells; valid paths visit every cell exactly
// once and move by unit steps only.
struct CurvePath {
  GridDims dims;
  std::vector<std::array<int, 3>> coords;

  std::size_t size() const { return coords.size(); }
};

namespace detail {

// Axis-aligned span vector. Exactly one component is nonzero; its magnitude
// is the extent of the block along that axis.
struct Vec {
  int x = 0, y = 0, z = 0;

  Vec operator+(Vec o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec operator-(Vec o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec operator-() const { return {-x, -y, -z}; }
  Vec operator*(int s) const { return {x * s, y * s, z * s}; }
  int len() const { return std::abs(x + y + z); }
  Vec unit() const {
    auto s = [](int v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); };
    return {s(x), s(y), s(z)};
  }
};

// Blocks are emitted as paths that enter at the block's base corner and exit
// at the far end of the first ("major") axis, staying on the near edge of the
// other axes. On the bipartite grid graph such a corner-to-corner path exists
// iff the major extent is even or all other extents are odd; the split rules
// below keep every sub-block on the feasible side of that constraint.
inline bool feasible2(int w, int h) { return h == 1 || (w % 2 == 0) || (h % 2 == 1); }

inline int flip_parity(int len, int full) { return len + 1 <= full - 1 ? len + 1 : len - 1; }

inline void emit(Vec p, std::vector<std::array<int, 3>>& out) {
  out.push_back({p.x, p.y, p.z});
}

inline void gen2d(Vec p, Vec a, Vec b, std::vector<std::array<int, 3>>& out) {
  const int w = a.len();
  const int h = b.len();
  const Vec da = a.unit();
  const Vec db = b.unit();

  if (h == 1) {
    for (int i = 0; i < w; ++i, p = p + da) emit(p, out);
    return;
  }
  if (w == 1) {
    for (int i = 0; i < h; ++i, p = p + db) emit(p, out);
    return;
  }

  int w1 = w / 2;
  int h1 = h / 2;

  if (2 * w > 3 * h) {
    if (h % 2 == 0) {
      // h even forces w even; both halves must stay even
      w1 += w1 % 2;
    } else if ((w1 % 2) && w > 2) {
      ++w1;  // prefer even steps
    }
    const Vec a1 = da * w1;
    // long case: split along the major axis only
    gen2d(p, a1, b, out);
    gen2d(p + a1, a - a1, b, out);
  } else {
    // an even near-half keeps all three blocks' exit corners feasible
    if ((h1 % 2) && h > 2) ++h1;
    const Vec a1 = da * w1;
    const Vec b1 = db * h1;
    // standard case: one step sideways, one long forward, one step back
    gen2d(p, b1, a1, out);
    gen2d(p + b1, a, b - b1, out);
    gen2d(p + (a - da) + (b1 - db), -b1, -(a - a1), out);
  }
}

inline void gen3d(Vec p, Vec a, Vec b, Vec c, std::vector<std::array<int, 3>>& out) {
  const int w = a.len();
  const int h = b.len();
  const int d = c.len();
  const Vec da = a.unit();
  const Vec db = b.unit();
  const Vec dc = c.unit();

  if (h == 1 && d == 1) {
    for (int i = 0; i < w; ++i, p = p + da) emit(p, out);
    return;
  }
  if (w == 1 && d == 1) {
    for (int i = 0; i < h; ++i, p = p + db) emit(p, out);
    return;
  }
  if (w == 1 && h == 1) {
    for (int i = 0; i < d; ++i, p = p + dc) emit(p, out);
    return;
  }

  int w1 = w / 2;
  int h1 = h / 2;
  int d1 = d / 2;

  const bool wide = (2 * w > 3 * h) && (2 * w > 3 * d);
  // The five-block split needs an even extent on the major or the depth
  // axis; all-odd cuboids go through a three-block split instead.
  bool split3_b = !wide && 3 * h > 4 * d;
  bool split3_c = !wide && !split3_b && 3 * d > 4 * h;
  if (!wide && !split3_b && !split3_c && (w % 2) && (d % 2)) {
    if (h >= d)
      split3_b = true;
    else
      split3_c = true;
  }

  if (wide) {
    if (!((h % 2) && (d % 2))) {
      // w is even here; both halves must stay even
      w1 += w1 % 2;
    } else if ((w1 % 2) && w > 2) {
      ++w1;  // prefer even steps
    }
    const Vec a1 = da * w1;
    gen3d(p, a1, b, c, out);
    gen3d(p + a1, a - a1, b, c, out);
  } else if (split3_b) {
    if ((h1 % 2) && h > 2) ++h1;
    if ((w1 % 2) && w > 2) ++w1;  // prefer even steps
    const Vec a1 = da * w1;
    const Vec b1 = db * h1;
    gen3d(p, b1, c, a1, out);
    gen3d(p + b1, a, b - b1, c, out);
    gen3d(p + (a - da) + (b1 - db), -b1, c, -(a - a1), out);
  } else if (split3_c) {
    if ((d1 % 2) && d > 2) ++d1;
    if ((w1 % 2) && w > 2) ++w1;  // prefer even steps
    const Vec a1 = da * w1;
    const Vec c1 = dc * d1;
    gen3d(p, c1, a1, b, out);
    gen3d(p + c1, a, b, c - c1, out);
    gen3d(p + (a - da) + (c1 - dc), -c1, -(a - a1), b, out);
  } else {
    if ((h1 % 2) && h > 2) ++h1;
    if ((d1 % 2) && d > 2) ++d1;
    if ((w1 % 2) && w > 2) ++w1;  // prefer even steps
    if (d % 2) {
      // odd depth: an odd major half (and, with h even, odd b/c halves)
      // keeps every block's corner-exit parity satisfiable
      if (w1 % 2 == 0) w1 = flip_parity(w1, w);
      if (h % 2 == 0) {
        if (h1 % 2 == 0) h1 = flip_parity(h1, h);
        if (d1 % 2 == 0) d1 = flip_parity(d1, d);
      }
    }
    const Vec a1 = da * w1;
    const Vec b1 = db * h1;
    const Vec c1 = dc * d1;
    gen3d(p, b1, c1, a1, out);
    gen3d(p + b1, c, a1, b - b1, out);
    gen3d(p + (b1 - db) + (c - dc), a, -b1, -(c - c1), out);
    gen3d(p + (a - da) + b1 + (c - dc), -c, -(a - a1), b - b1, out);
    gen3d(p + (a - da) + (b1 - db), -b1, c1, -(a - a1), out);
  }
}

}  // namespace detail

// Generalized Hilbert curve over a width x height rectangle, starting at the
// origin. Output is a Hamiltonian path on the grid graph: every cell exactly
// once, consecutive cells adjacent.
inline CurvePath gilbert2d(int width, int height) {
  CurvePath path;
  path.dims = GridDims::d2(width, height);
  path.coords.reserve(static_cast<std::size_t>(path.dims.cardinality()));
  const detail::Vec aw{width, 0, 0}, ah{0, height, 0};
  bool major_w = width >= height;
  // swap the major axis when its corner-exit parity is infeasible
  if (major_w && !detail::feasible2(width, height)) major_w = false;
  if (!major_w && !detail::feasible2(height, width)) major_w = true;
  if (major_w)
    detail::gen2d({0, 0, 0}, aw, ah, path.coords);
  else
    detail::gen2d({0, 0, 0}, ah, aw, path.coords);
  return path;
}

// 3D generalized Hilbert curve over a width x height x depth cuboid. Cuboids
// with a unit extent reduce to the planar curve embedded in 3D.
inline CurvePath gilbert3d(int width, int height, int depth) {
  GridDims dims = GridDims::d3(width, height, depth);
  const std::array<int, 3> e = {width, height, depth};

  for (int flat = 0; flat < 3; ++flat) {
    if (e[flat] != 1) continue;
    const int u = flat == 0 ? 1 : 0;
    const int v = flat == 2 ? 1 : 2;
    CurvePath plane = gilbert2d(e[u], e[v]);
    CurvePath path;
    path.dims = dims;
    path.coords.reserve(plane.coords.size());
    for (const auto& c : plane.coords) {
      std::array<int, 3> q{0, 0, 0};
      q[u] = c[0];
      q[v] = c[1];
      path.coords.push_back(q);
    }
    return path;
  }

  CurvePath path;
  path.dims = dims;
  path.coords.reserve(static_cast<std::size_t>(dims.cardinality()));

  // major axis: the longest one, preferring an even extent when the longest
  // is odd and not all extents are odd (corner-exit parity)
  const bool all_odd = (width % 2) && (height % 2) && (depth % 2);
  int major = 0;
  for (int i = 1; i < 3; ++i)
    if (e[i] > e[major]) major = i;
  if (!all_odd && (e[major] % 2)) {
    int best = -1;
    for (int i = 0; i < 3; ++i)
      if (e[i] % 2 == 0 && (best < 0 || e[i] > e[best])) best = i;
    major = best;
  }

  std::array<detail::Vec, 3> axes{};
  axes[0] = {width, 0, 0};
  axes[1] = {0, height, 0};
  axes[2] = {0, 0, depth};
  const int o1 = major == 0 ? 1 : 0;
  const int o2 = major == 2 ? 1 : 2;
  detail::gen3d({0, 0, 0}, axes[major], axes[o1], axes[o2], path.coords);
  return path;
}

inline CurvePath gilbert_curve(const GridDims& dims) {
  return dims.k == 2 ? gilbert2d(dims.ext[0], dims.ext[1])
                     : gilbert3d(dims.ext[0], dims.ext[1], dims.ext[2]);
}

// Checks both path invariants: bijectivity (every cell visited exactly once)
// and unit-step adjacency. Returns false instead of throwing.
inline bool verify_path(const CurvePath& path, const GridDims& dims) {
  const std::int64_t card = dims.cardinality();
  if (static_cast<std::int64_t>(path.coords.size()) != card) return false;
  std::vector<bool> seen(static_cast<std::size_t>(card), false);
  for (std::size_t t = 0; t < path.coords.size(); ++t) {
    const auto& c = path.coords[t];
    for (int i = 0; i < dims.k; ++i)
      if (c[i] < 0 || c[i] >= dims.ext[i]) return false;
    for (int i = dims.k; i < 3; ++i)
      if (c[i] != 0) return false;
    const auto idx = static_cast<std::size_t>(linear_index(c, dims));
    if (seen[idx]) return false;
    seen[idx] = true;
    if (t > 0) {
      int step = 0;
      for (int i = 0; i < dims.k; ++i) step += std::abs(c[i] - path.coords[t - 1][i]);
      if (step != 1) return false;
    }
  }
  return true;
}

}  // namespace hop
