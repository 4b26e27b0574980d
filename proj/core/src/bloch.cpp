#include "blochdeck/bloch.hpp"

#include <cmath>
#include <cstring>
#include <ostream>

namespace blochdeck {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

long support_copy_radius(const CoveringGraph& g, const CoveringFunction& f) {
  long r = 0;
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    if (f.values[v] != Complex(0, 0)) r = std::max(r, word_norm(g.copy_of(v)));
  return r;
}

Flags band_flag(const CoveringGraph& g, const DualGrid& grid,
                const CoveringFunction& f) {
  Flags flags;
  if (!g.group().is_finite() &&
      support_copy_radius(g, f) > grid.exact_support_radius())
    flags.band_exceeded = true;
  return flags;
}

}  // namespace

GroupFunction orbit_section(const CoveringGraph& g, const CoveringFunction& f,
                            VertexId y) {
  require(y >= 0 && y < g.vertex_count(), "orbit base vertex out of range");
  GroupFunction fy(g.group());
  const GroupElement& c = g.copy_of(y);
  long b = g.base_of(y);
  // f_y(s) = f(s^-1 . y); s = c w^-1 runs over the elements keeping the
  // orbit inside the window.
  for (long w = 0; w < g.copy_count(); ++w) {
    GroupElement s = multiply(c, inverse(g.window()[w]));
    fy.set(s, f.values[g.vertex(w, b)]);
  }
  return fy;
}

BlochField bloch_transform(const CoveringGraph& g, const DualGrid& grid,
                           const CoveringFunction& f) {
  require(grid.spec() == g.group(), "dual grid belongs to a different group");
  require(f.values.size() == g.vertex_count(), "function does not match the graph");
  BlochField out;
  out.flags = f.flags;
  out.flags |= band_flag(g, grid, f);
  out.node_values.resize(grid.size());
  long D = g.base_count();
  for (std::size_t ni = 0; ni < grid.size(); ++ni) {
    const Irrep& irrep = grid.node(ni).irrep;
    int d = irrep.dim();
    CMatrix stack = CMatrix::Zero(D * d, d);
    for (long w = 0; w < g.copy_count(); ++w) {
      CMatrix coeff = irrep(g.window()[w]).adjoint();
      for (long b = 0; b < D; ++b) {
        Complex z = f.values[g.vertex(w, b)];
        if (z != Complex(0, 0)) stack.block(b * d, 0, d, d) += z * coeff;
      }
    }
    out.node_values[ni] = std::move(stack);
  }
  return out;
}

CoveringFunction inverse_bloch(const CoveringGraph& g, const DualGrid& grid,
                               const BlochField& field) {
  require(field.node_values.size() == grid.size(),
          "Bloch field does not match the dual grid");
  CoveringFunction f = zero_function(g);
  f.flags = field.flags;
  long D = g.base_count();
  for (std::size_t ni = 0; ni < grid.size(); ++ni) {
    const DualNode& node = grid.node(ni);
    int d = node.irrep.dim();
    for (long w = 0; w < g.copy_count(); ++w) {
      CMatrix rep = node.irrep(g.window()[w]);
      for (long b = 0; b < D; ++b)
        f.values[g.vertex(w, b)] +=
            node.weight * (rep * field.block(ni, b, d)).trace();
    }
  }
  return f;
}

double field_norm_sq(const CoveringGraph& g, const DualGrid& grid,
                     const BlochField& field) {
  double acc = 0;
  for (std::size_t ni = 0; ni < grid.size(); ++ni)
    acc += grid.node(ni).weight * field.node_values[ni].squaredNorm();
  return acc * g.node_measure();
}

std::uint64_t hash_function_values(const CoveringFunction& f) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  auto mix = [&h](double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof(bits));
    for (int k = 0; k < 8; ++k) {
      h ^= (bits >> (8 * k)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  for (long i = 0; i < f.values.size(); ++i) {
    mix(f.values[i].real());
    mix(f.values[i].imag());
  }
  return h;
}

DefectReport unitarity_defect(const CoveringGraph& g, const DualGrid& grid,
                              const CoveringFunction& f) {
  BlochField field = bloch_transform(g, grid, f);
  DefectReport rep;
  rep.input_norm = std::sqrt(covering_norm_sq(g, f));
  rep.input_hash = hash_function_values(f);
  rep.flags = field.flags;
  rep.defect = std::abs(field_norm_sq(g, grid, field) - covering_norm_sq(g, f));
  return rep;
}

namespace {

DefectReport field_difference_defect(const CoveringGraph& g, const DualGrid& grid,
                                     const CoveringFunction& f,
                                     const CoveringFunction& transformed,
                                     const std::vector<CMatrix>& rhs_ops,
                                     bool operator_spreads) {
  BlochField lhs = bloch_transform(g, grid, transformed);
  BlochField rhs = bloch_transform(g, grid, f);
  DefectReport rep;
  rep.input_norm = std::sqrt(covering_norm_sq(g, f));
  rep.input_hash = hash_function_values(f);
  rep.flags = lhs.flags;
  rep.flags |= rhs.flags;
  // One-copy margin: H widens support by a single step and stays exact; a
  // nonlocal kernel spreads past the window boundary regardless.
  if (!g.group().is_finite() &&
      (operator_spreads ||
       support_copy_radius(g, f) > g.config().window_radius - 1))
    rep.flags.window_overflow = true;
  double acc = 0;
  for (std::size_t ni = 0; ni < grid.size(); ++ni) {
    CMatrix diff = lhs.node_values[ni] - rhs_ops[ni] * rhs.node_values[ni];
    acc += grid.node(ni).weight * diff.squaredNorm();
  }
  rep.defect = std::sqrt(acc * g.node_measure());
  return rep;
}

}  // namespace

DefectReport decomposition_defect(const InvariantHamiltonian& H,
                                  const std::vector<TwistedHamiltonian>& family,
                                  const DualGrid& grid, const CoveringFunction& f) {
  const CoveringGraph& g = H.graph();
  require(family.size() == grid.size(),
          "twisted family does not match the dual grid");
  CoveringFunction Hf{H.matrix() * f.values, f.flags};
  std::vector<CMatrix> ops;
  ops.reserve(family.size());
  for (const auto& HL : family) ops.push_back(HL.matrix());
  return field_difference_defect(g, grid, f, Hf, ops, /*operator_spreads=*/false);
}

DefectReport evolution_decomposition_defect(
    const InvariantKernel& K, const std::vector<EquivariantKernel>& family,
    const CoveringGraph& g, const DualGrid& grid, const CoveringFunction& f) {
  require(family.size() == grid.size(),
          "equivariant kernel family does not match the dual grid");
  CoveringFunction Kf{K.apply(f.values), f.flags};
  std::vector<CMatrix> ops;
  ops.reserve(family.size());
  for (const auto& KL : family)
    ops.push_back(KL.raw() * KL.mu());  // kernel blocks back to operator form
  return field_difference_defect(g, grid, f, Kf, ops, /*operator_spreads=*/true);
}

void write_defect_record(std::ostream& os, const std::string& name,
                         const DefectReport& report) {
  char buf[64];
  os << "defect name=" << name;
  std::snprintf(buf, sizeof(buf), "%.17g", report.defect);
  os << " value=" << buf;
  std::snprintf(buf, sizeof(buf), "%.17g", report.input_norm);
  os << " input_norm=" << buf;
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(report.input_hash));
  os << " input_hash=" << buf << " flags=" << report.flags.to_string() << "\n";
}

void write_field_csv(std::ostream& os, const CoveringGraph& g,
                     const DualGrid& grid, const BlochField& field) {
  os << "node,base,row,col,re,im\n";
  char buf[64];
  for (std::size_t ni = 0; ni < grid.size(); ++ni) {
    int d = grid.node(ni).irrep.dim();
    for (long b = 0; b < g.base_count(); ++b) {
      auto blk = field.block(ni, b, d);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
          os << ni << "," << b << "," << r << "," << c;
          std::snprintf(buf, sizeof(buf), "%.17g", blk(r, c).real());
          os << "," << buf;
          std::snprintf(buf, sizeof(buf), "%.17g", blk(r, c).imag());
          os << "," << buf << "\n";
        }
    }
  }
}

}  // namespace blochdeck
