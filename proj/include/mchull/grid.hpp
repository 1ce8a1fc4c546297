#pragma once

// Voxel grids and discrete sets of finite perimeter.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mchull/error.hpp"

namespace mchull {

using Index3 = std::array<int, 3>;

// Rectangular voxel grid with uniform spacing. Cell v has its center at
// origin + (v + 1/2) * spacing, i.e. `origin` is the lower corner of cell 0.
struct GridSpec {
  int dim = 2;
  Index3 shape{4, 4, 1};
  double spacing = 1.0;
  std::array<double, 3> origin{0.0, 0.0, 0.0};

  std::size_t size() const {
    return static_cast<std::size_t>(shape[0]) * shape[1] * shape[2];
  }

  // Linear offsets for a unit step along each axis (first axis fastest).
  std::array<std::ptrdiff_t, 3> strides() const {
    return {1, shape[0], static_cast<std::ptrdiff_t>(shape[0]) * shape[1]};
  }

  std::size_t index(const Index3& v) const {
    return static_cast<std::size_t>(v[0]) +
           static_cast<std::size_t>(shape[0]) *
               (static_cast<std::size_t>(v[1]) +
                static_cast<std::size_t>(shape[1]) * v[2]);
  }

  Index3 coords(std::size_t idx) const {
    Index3 v{0, 0, 0};
    v[0] = static_cast<int>(idx % shape[0]);
    idx /= shape[0];
    v[1] = static_cast<int>(idx % shape[1]);
    v[2] = static_cast<int>(idx / shape[1]);
    return v;
  }

  bool in_bounds(const Index3& v) const {
    for (int a = 0; a < 3; ++a) {
      if (v[a] < 0 || v[a] >= shape[a]) return false;
    }
    return true;
  }

  // Outermost 1-cell layer; never part of any set.
  bool on_frame(const Index3& v) const {
    for (int a = 0; a < dim; ++a) {
      if (v[a] == 0 || v[a] == shape[a] - 1) return true;
    }
    return false;
  }
  bool on_frame(std::size_t idx) const { return on_frame(coords(idx)); }

  // Number of cells between v and the frame (0 on the frame itself).
  int frame_distance(const Index3& v) const {
    int d = shape[0];
    for (int a = 0; a < dim; ++a) {
      d = std::min({d, v[a], shape[a] - 1 - v[a]});
    }
    return d;
  }

  std::array<double, 3> center(const Index3& v) const {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) x[a] = origin[a] + (v[a] + 0.5) * spacing;
    return x;
  }
  std::array<double, 3> center(std::size_t idx) const {
    return center(coords(idx));
  }

  // Physical measure of a single cell, spacing^dim.
  double cell_volume() const { return std::pow(spacing, dim); }

  void validate() const {
    if (dim != 2 && dim != 3) throw PreconditionError("grid dim must be 2 or 3");
    for (int a = 0; a < dim; ++a) {
      if (shape[a] < 4) throw PreconditionError("grid shape entries must be >= 4");
    }
    if (dim == 2 && shape[2] != 1) throw PreconditionError("2D grid must have shape[2] == 1");
    if (!(spacing > 0.0) || !std::isfinite(spacing)) {
      throw PreconditionError("grid spacing must be positive");
    }
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Cubic grid of n cells per axis covering [-half_width, half_width]^dim.
inline GridSpec centered_grid(int dim, int n, double half_width = 1.0) {
  GridSpec g;
  g.dim = dim;
  g.shape = {n, n, dim == 3 ? n : 1};
  g.spacing = 2.0 * half_width / n;
  g.origin = {-half_width, -half_width, dim == 3 ? -half_width : 0.0};
  g.validate();
  return g;
}

inline void require_same_spec(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw PreconditionError("grid spec mismatch");
}

// A finite set of grid cells. Storage is one byte per cell; frame cells are
// never members.
class VoxelSet {
 public:
  VoxelSet() = default;
  explicit VoxelSet(const GridSpec& spec) : spec_(spec), bits_(spec.size(), 0) {
    spec_.validate();
  }

  // Every non-frame cell.
  static VoxelSet interior(const GridSpec& spec) {
    VoxelSet s(spec);
    for (std::size_t i = 0; i < s.bits_.size(); ++i) {
      s.bits_[i] = spec.on_frame(i) ? 0 : 1;
    }
    return s;
  }

  // Cell-center rasterization of {x : inside(x)}; frame cells are skipped.
  template <class Pred>
  static VoxelSet rasterize(const GridSpec& spec, Pred&& inside) {
    VoxelSet s(spec);
    for (std::size_t i = 0; i < s.bits_.size(); ++i) {
      const Index3 v = spec.coords(i);
      if (!spec.on_frame(v) && inside(spec.center(v))) s.bits_[i] = 1;
    }
    return s;
  }

  const GridSpec& spec() const { return spec_; }
  std::size_t size() const { return bits_.size(); }

  bool contains(std::size_t i) const { return bits_[i] != 0; }
  bool contains(const Index3& v) const {
    return spec_.in_bounds(v) && bits_[spec_.index(v)] != 0;
  }

  void insert(std::size_t i) {
    if (spec_.on_frame(i)) throw PreconditionError("frame cells cannot be set members");
    bits_[i] = 1;
  }
  void insert(const Index3& v) {
    if (!spec_.in_bounds(v)) throw PreconditionError("cell index out of range");
    insert(spec_.index(v));
  }
  void erase(std::size_t i) { bits_[i] = 0; }

  std::size_t count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
  }
  bool empty() const {
    return std::none_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; });
  }

  const std::vector<std::uint8_t>& data() const { return bits_; }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (bits_[i]) f(i);
    }
  }

  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    for_each([&](std::size_t i) { out.push_back(i); });
    return out;
  }

  // Apply op(a, b) cell-wise; the result never contains frame cells because
  // neither operand does and op(0, 0) == 0 for every op used here.
  template <class Op>
  static VoxelSet combine(const VoxelSet& a, const VoxelSet& b, Op op) {
    require_same_spec(a.spec_, b.spec_);
    VoxelSet r(a.spec_);
    for (std::size_t i = 0; i < r.bits_.size(); ++i) {
      r.bits_[i] = static_cast<std::uint8_t>(op(a.bits_[i] != 0, b.bits_[i] != 0) ? 1 : 0);
    }
    return r;
  }

  friend bool operator==(const VoxelSet& a, const VoxelSet& b) {
    return a.spec_ == b.spec_ && a.bits_ == b.bits_;
  }

 private:
  GridSpec spec_;
  std::vector<std::uint8_t> bits_;
};

inline VoxelSet set_union(const VoxelSet& a, const VoxelSet& b) {
  return VoxelSet::combine(a, b, [](bool x, bool y) { return x || y; });
}
inline VoxelSet set_intersection(const VoxelSet& a, const VoxelSet& b) {
  return VoxelSet::combine(a, b, [](bool x, bool y) { return x && y; });
}
inline VoxelSet set_difference(const VoxelSet& a, const VoxelSet& b) {
  return VoxelSet::combine(a, b, [](bool x, bool y) { return x && !y; });
}
inline VoxelSet set_xor(const VoxelSet& a, const VoxelSet& b) {
  return VoxelSet::combine(a, b, [](bool x, bool y) { return x != y; });
}
// Complement relative to the non-frame cells.
inline VoxelSet complement_in_interior(const VoxelSet& a) {
  return set_difference(VoxelSet::interior(a.spec()), a);
}

inline double measure(const VoxelSet& e) {
  return static_cast<double>(e.count()) * e.spec().cell_volume();
}

inline double symdiff_measure(const VoxelSet& e, const VoxelSet& f) {
  require_same_spec(e.spec(), f.spec());
  std::size_t n = 0;
  for (std::size_t i = 0; i < e.size(); ++i) n += (e.contains(i) != f.contains(i));
  return static_cast<double>(n) * e.spec().cell_volume();
}

inline bool subset(const VoxelSet& e, const VoxelSet& f) {
  require_same_spec(e.spec(), f.spec());
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e.contains(i) && !f.contains(i)) return false;
  }
  return true;
}

// Unit face-neighbor displacements (2*dim of them).
inline std::vector<Index3> face_offsets(int dim) {
  std::vector<Index3> out;
  for (int a = 0; a < dim; ++a) {
    Index3 p{0, 0, 0};
    p[a] = 1;
    out.push_back(p);
    p[a] = -1;
    out.push_back(p);
  }
  return out;
}

// Members with at least one face-adjacent non-member.
inline std::vector<std::size_t> boundary_cells(const VoxelSet& e) {
  const GridSpec& g = e.spec();
  const auto faces = face_offsets(g.dim);
  std::vector<std::size_t> out;
  e.for_each([&](std::size_t i) {
    const Index3 v = g.coords(i);
    for (const auto& f : faces) {
      const Index3 w{v[0] + f[0], v[1] + f[1], v[2] + f[2]};
      if (!e.contains(w)) {
        out.push_back(i);
        return;
      }
    }
  });
  return out;
}

// Translate by an integer lattice vector; cells pushed onto or past the
// frame are an error.
inline VoxelSet translate(const VoxelSet& e, const Index3& shift) {
  const GridSpec& g = e.spec();
  VoxelSet out(g);
  e.for_each([&](std::size_t i) {
    const Index3 v = g.coords(i);
    const Index3 w{v[0] + shift[0], v[1] + shift[1], v[2] + shift[2]};
    if (!g.in_bounds(w) || g.on_frame(w)) throw PreconditionError("translation leaves the interior");
    out.insert(w);
  });
  return out;
}

namespace detail {

inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  double x = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FormatError("bad number '" + s + "'");
  }
  return x;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

// MCHV volume format:
//   "MCHV1\n"
//   "dim=<d> shape=<n1,...,nd> spacing=<f> origin=<f,...,f>\n"
//   membership bits, 8 per byte, first axis fastest, LSB first, zero padded.
inline void write_mchv(std::ostream& os, const VoxelSet& e) {
  const GridSpec& g = e.spec();
  std::string header = "MCHV1\ndim=" + std::to_string(g.dim) + " shape=";
  for (int a = 0; a < g.dim; ++a) {
    if (a) header += ',';
    header += std::to_string(g.shape[a]);
  }
  header += " spacing=" + detail::format_double(g.spacing) + " origin=";
  for (int a = 0; a < g.dim; ++a) {
    if (a) header += ',';
    header += detail::format_double(g.origin[a]);
  }
  header += '\n';
  os.write(header.data(), static_cast<std::streamsize>(header.size()));

  std::vector<char> packed((e.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e.contains(i)) packed[i / 8] = static_cast<char>(packed[i / 8] | (1u << (i % 8)));
  }
  os.write(packed.data(), static_cast<std::streamsize>(packed.size()));
}

inline VoxelSet read_mchv(std::istream& is) {
  std::string magic, header;
  if (!std::getline(is, magic) || magic != "MCHV1") throw FormatError("not an MCHV1 volume");
  if (!std::getline(is, header)) throw FormatError("missing MCHV header line");

  GridSpec g;
  bool have_dim = false, have_shape = false, have_spacing = false, have_origin = false;
  std::vector<std::string> shape_tok, origin_tok;
  for (const auto& field : detail::split(header, ' ')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw FormatError("bad header field '" + field + "'");
    const std::string key = field.substr(0, eq), val = field.substr(eq + 1);
    if (key == "dim") {
      g.dim = static_cast<int>(detail::parse_double(val));
      have_dim = true;
    } else if (key == "shape") {
      shape_tok = detail::split(val, ',');
      have_shape = true;
    } else if (key == "spacing") {
      g.spacing = detail::parse_double(val);
      have_spacing = true;
    } else if (key == "origin") {
      origin_tok = detail::split(val, ',');
      have_origin = true;
    } else {
      throw FormatError("unknown header key '" + key + "'");
    }
  }
  if (!(have_dim && have_shape && have_spacing && have_origin)) {
    throw FormatError("incomplete MCHV header");
  }
  if (g.dim != 2 && g.dim != 3) throw FormatError("MCHV dim must be 2 or 3");
  if (static_cast<int>(shape_tok.size()) != g.dim || static_cast<int>(origin_tok.size()) != g.dim) {
    throw FormatError("MCHV shape/origin arity does not match dim");
  }
  g.shape = {1, 1, 1};
  g.origin = {0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim; ++a) {
    g.shape[a] = static_cast<int>(detail::parse_double(shape_tok[a]));
    g.origin[a] = detail::parse_double(origin_tok[a]);
  }
  try {
    g.validate();
  } catch (const PreconditionError& ex) {
    throw FormatError(ex.what());
  }

  std::vector<char> packed((g.size() + 7) / 8);
  is.read(packed.data(), static_cast<std::streamsize>(packed.size()));
  if (static_cast<std::size_t>(is.gcount()) != packed.size()) throw FormatError("truncated MCHV payload");

  VoxelSet e(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if ((static_cast<unsigned char>(packed[i / 8]) >> (i % 8)) & 1u) {
      if (g.on_frame(i)) throw FormatError("MCHV volume has a member on the grid frame");
      e.insert(i);
    }
  }
  return e;
}

// Binary PGM (P5, maxval 255, member = 255). For 3D sets, exports the
// z-slice `slice`.
inline void write_pgm(std::ostream& os, const VoxelSet& e, int slice = -1) {
  const GridSpec& g = e.spec();
  int k = 0;
  if (g.dim == 3) {
    k = slice < 0 ? g.shape[2] / 2 : slice;
    if (k >= g.shape[2]) throw PreconditionError("PGM slice out of range");
  }
  const int w = g.shape[0], h = g.shape[1];
  const std::string header = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  os.write(header.data(), static_cast<std::streamsize>(header.size()));
  std::vector<char> row(static_cast<std::size_t>(w));
  // Top row of the image is the largest y.
  for (int y = h - 1; y >= 0; --y) {
    for (int x = 0; x < w; ++x) row[x] = e.contains(Index3{x, y, k}) ? static_cast<char>(255) : 0;
    os.write(row.data(), w);
  }
}

}  // namespace mchull
