#ifndef BLOCHDECK_COVERING_HPP
#define BLOCHDECK_COVERING_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "blochdeck/common.hpp"
#include "blochdeck/group.hpp"
#include "blochdeck/harmonic.hpp"

namespace blochdeck {

using VertexId = long;

struct DomainConfig {
  long m = 8;               // grid nodes per fundamental cell per axis
  double cell_length = 1.0; // L (the Klein-bottle cell is pinned to 1)
  long window_radius = 1;   // copy window W = ball(radius); ignored when finite
};

struct Edge {
  VertexId u, v;
  double weight;  // 1/h^2 on the flat built-ins
};

// Discretization of the covering as a weighted graph. Vertices are pairs
// (copy element, base node): vertex id = copy_index * |D| + base index, where
// the fundamental domain D is the identity copy. The group acts by left
// multiplication on the copy coordinate, hence exactly permutes vertices;
// the edge list carries the metric structure and is built from the global
// grid geometry of each model.
//
// Built-in models:
//   FiniteCyclic(n)  n-fold cover of the circle (cyclic graph of n*m nodes)
//   FreeAbelian(1)   line over the circle of length L
//   FreeAbelian(2)   plane over the torus
//   KleinBottle      unit-cell plane grid; b acts as (i,j) -> (-i, j+m)
class CoveringGraph {
 public:
  static CoveringGraph build(const GroupSpec& spec, const DomainConfig& cfg);

  const GroupSpec& group() const { return spec_; }
  const GroupAction& action() const { return action_; }
  const DomainConfig& config() const { return cfg_; }
  int dim() const { return dim_; }
  long base_count() const { return base_count_; }
  long copy_count() const { return static_cast<long>(window_.size()); }
  long vertex_count() const { return copy_count() * base_count_; }
  double spacing() const { return h_; }
  double node_measure() const { return mu_; }  // uniform h^dim

  const std::vector<GroupElement>& window() const { return window_; }
  long identity_copy() const { return identity_copy_; }
  std::optional<long> window_index(const GroupElement& s) const;

  VertexId vertex(long copy_idx, long base_idx) const {
    return copy_idx * base_count_ + base_idx;
  }
  long copy_index_of(VertexId v) const { return v / base_count_; }
  long base_of(VertexId v) const { return v % base_count_; }
  const GroupElement& copy_of(VertexId v) const { return window_[copy_index_of(v)]; }

  const std::vector<Edge>& edges() const { return edges_; }

  // act(s, v) = (s * copy(v), base(v)).
  std::optional<VertexId> try_act(const GroupElement& s, VertexId v) const;
  VertexId act(const GroupElement& s, VertexId v) const;  // WindowOverflowError

  std::vector<double> base_point(long base_idx) const;
  std::vector<double> vertex_point(VertexId v) const;

  bool is_interior(VertexId v, long margin) const;
  std::vector<VertexId> interior_vertices(long margin) const;

 private:
  CoveringGraph(GroupSpec spec, DomainConfig cfg);
  void build_edges();

  GroupSpec spec_;
  DomainConfig cfg_;
  GroupAction action_;
  int dim_;
  long base_count_;
  double h_, mu_;
  std::vector<GroupElement> window_;
  std::map<GroupElement, long> window_lookup_;
  long identity_copy_;
  std::vector<Edge> edges_;
};

// Complex function on the window vertices of a covering graph.
struct CoveringFunction {
  CVector values;  // size |V|
  Flags flags;
};

CoveringFunction zero_function(const CoveringGraph& g);

// l^2(mu) norm squared: sum_v mu |f(v)|^2.
double covering_norm_sq(const CoveringGraph& g, const CoveringFunction& f);
Complex covering_inner(const CoveringGraph& g, const CoveringFunction& f1,
                       const CoveringFunction& f2);

// (L_s^* f)(v) = f(s . v); reads that leave the window zero-fill and raise
// the window-overflow flag on the result.
CoveringFunction pullback(const CoveringGraph& g, const GroupElement& s,
                          const CoveringFunction& f);

// Values of a (possibly twisted) section on the fundamental domain; column y
// holds psi(y). A twisted section stands for its unique equivariant extension
// psi(s.y) = L(s) psi(y).
struct Section {
  CMatrix values;              // d x |D|
  std::optional<Irrep> twist;  // nullopt: scalar function on the quotient
  Flags flags;
};

// (Phi_L phi (x) v)(y) = sum_s phi(s.y) L(s^-1) v, summed over the window.
Section equivariant_lift(const CoveringGraph& g, const CoveringFunction& phi,
                         const CVector& v, const Irrep& irrep);

// <psi1, psi2> = sum_{y in D} mu(y) <psi1(y), psi2(y)>  (conjugate-linear in
// the first argument). Twist mismatch is a structural error.
Complex section_inner(const CoveringGraph& g, const Section& s1, const Section& s2);

// Value of the equivariant extension of a section at an arbitrary window
// vertex: psi(act(s, y)) = L(s) psi(y).
CVector section_value_at(const CoveringGraph& g, const Section& s, VertexId v);

// Deterministic pseudo-random function supported on the interior vertices
// (copy word-norm <= window_radius - margin), entries in [-1,1] + i[-1,1].
CoveringFunction random_interior(const CoveringGraph& g, long margin,
                                 std::uint64_t seed);

// CSV snapshot: vertex id, copy element, base index, coordinates, re, im.
void write_snapshot_csv(std::ostream& os, const CoveringGraph& g,
                        const CoveringFunction& f);
void write_section_csv(std::ostream& os, const CoveringGraph& g, const Section& s);

}  // namespace blochdeck

#endif
