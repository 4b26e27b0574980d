#include "blochdeck/covering.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <set>

namespace blochdeck {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

struct GlobalCoord {
  long x = 0, y = 0;
};

}  // namespace

CoveringGraph::CoveringGraph(GroupSpec spec, DomainConfig cfg)
    : spec_(std::move(spec)), cfg_(cfg), action_(spec_, cfg.cell_length) {
  switch (spec_.family()) {
    case GroupFamily::FiniteCyclic:
      dim_ = 1;
      break;
    case GroupFamily::FreeAbelian:
      require(spec_.params()[0] <= 2,
              "no built-in covering model for FreeAbelian rank 3");
      dim_ = static_cast<int>(spec_.params()[0]);
      break;
    case GroupFamily::KleinBottle:
      dim_ = 2;
      break;
    case GroupFamily::FiniteProduct:
      throw std::invalid_argument("no built-in covering model for finite products");
  }
  require(cfg_.m >= 1, "grid requires m >= 1 nodes per cell");
  require(cfg_.cell_length > 0, "grid requires a positive cell length");
  if (!spec_.is_finite())
    require(cfg_.window_radius >= 1, "infinite groups require window radius >= 1");

  base_count_ = 1;
  for (int k = 0; k < dim_; ++k) base_count_ *= cfg_.m;
  h_ = cfg_.cell_length / static_cast<double>(cfg_.m);
  mu_ = std::pow(h_, dim_);

  long radius = spec_.is_finite() ? spec_.params()[0] : cfg_.window_radius;
  window_ = enumerate_ball(spec_, radius);
  for (long i = 0; i < static_cast<long>(window_.size()); ++i)
    window_lookup_.emplace(window_[i], i);
  identity_copy_ = window_lookup_.at(spec_.identity());

  build_edges();
}

namespace {

// Global integer grid coordinates of a vertex, and the inverse decomposition
// into (copy element, base node). These encode the geometry of each model;
// the vertex action itself never needs them.
GlobalCoord to_global(const GroupSpec& spec, long m, const GroupElement& s,
                      long i, long j) {
  GlobalCoord g;
  switch (spec.family()) {
    case GroupFamily::FiniteCyclic:
      g.x = s.coords()[0] * m + i;
      break;
    case GroupFamily::FreeAbelian:
      g.x = s.coords()[0] * m + i;
      if (spec.params()[0] == 2) g.y = s.coords()[1] * m + j;
      break;
    case GroupFamily::KleinBottle: {
      long p = s.coords()[0], q = s.coords()[1];
      long sign = (floor_mod(q, 2) == 0) ? 1 : -1;
      g.x = sign * i + p * m;
      g.y = j + q * m;
      break;
    }
    case GroupFamily::FiniteProduct:
      break;
  }
  return g;
}

struct Decomposed {
  std::vector<long> copy_coords;
  long i = 0, j = 0;
};

Decomposed from_global(const GroupSpec& spec, long m, GlobalCoord g) {
  Decomposed d;
  switch (spec.family()) {
    case GroupFamily::FiniteCyclic: {
      long n = spec.params()[0];
      long x = floor_mod(g.x, n * m);
      d.copy_coords = {x / m};
      d.i = x % m;
      break;
    }
    case GroupFamily::FreeAbelian: {
      d.copy_coords = {floor_div(g.x, m)};
      d.i = floor_mod(g.x, m);
      if (spec.params()[0] == 2) {
        d.copy_coords.push_back(floor_div(g.y, m));
        d.j = floor_mod(g.y, m);
      }
      break;
    }
    case GroupFamily::KleinBottle: {
      long q = floor_div(g.y, m);
      d.j = g.y - q * m;
      long t = (floor_mod(q, 2) == 0) ? g.x : -g.x;  // (-1)^q gx
      d.i = floor_mod(t, m);
      long pp = (t - d.i) / m;
      long p = (floor_mod(q, 2) == 0) ? pp : -pp;
      d.copy_coords = {p, q};
      break;
    }
    case GroupFamily::FiniteProduct:
      break;
  }
  return d;
}

}  // namespace

void CoveringGraph::build_edges() {
  long m = cfg_.m;
  double w = 1.0 / (h_ * h_);
  std::set<std::pair<VertexId, VertexId>> pairs;
  for (long c = 0; c < copy_count(); ++c) {
    const GroupElement& elem = window_[c];
    for (long b = 0; b < base_count_; ++b) {
      long i = b % m, j = dim_ == 2 ? b / m : 0;
      GlobalCoord g = to_global(spec_, m, elem, i, j);
      for (int axis = 0; axis < dim_; ++axis) {
        GlobalCoord gn = g;
        (axis == 0 ? gn.x : gn.y) += 1;
        Decomposed dec = from_global(spec_, m, gn);
        auto cit = window_lookup_.find(GroupElement(spec_, dec.copy_coords));
        if (cit == window_lookup_.end()) continue;  // free truncation boundary
        VertexId u = vertex(c, b);
        VertexId v = vertex(cit->second, dim_ == 2 ? dec.j * m + dec.i : dec.i);
        if (u == v) continue;  // m = 1 circle degeneracies collapse
        pairs.emplace(std::min(u, v), std::max(u, v));
      }
    }
  }
  edges_.reserve(pairs.size());
  for (const auto& [u, v] : pairs) edges_.push_back({u, v, w});

  // Invariance audit: every in-window translate of an edge must be an edge.
  std::set<std::pair<VertexId, VertexId>> lookup(pairs);
  auto shells = enumerate_shells(spec_, 1);
  for (const auto& gen : shells.back()) {
    for (const auto& e : edges_) {
      auto tu = try_act(gen, e.u), tv = try_act(gen, e.v);
      if (!tu || !tv) continue;
      if (!lookup.count({std::min(*tu, *tv), std::max(*tu, *tv)}))
        throw std::runtime_error("grid/action incompatibility: the action of " +
                                 gen.to_string() +
                                 " does not preserve the edge set");
    }
  }
}

CoveringGraph CoveringGraph::build(const GroupSpec& spec, const DomainConfig& cfg) {
  return CoveringGraph(spec, cfg);
}

std::optional<long> CoveringGraph::window_index(const GroupElement& s) const {
  auto it = window_lookup_.find(s);
  if (it == window_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<VertexId> CoveringGraph::try_act(const GroupElement& s, VertexId v) const {
  auto idx = window_index(multiply(s, copy_of(v)));
  if (!idx) return std::nullopt;
  return vertex(*idx, base_of(v));
}

VertexId CoveringGraph::act(const GroupElement& s, VertexId v) const {
  GroupElement target = multiply(s, copy_of(v));
  auto idx = window_index(target);
  if (!idx)
    throw WindowOverflowError("vertex translate leaves the copy window",
                              target.to_string());
  return vertex(*idx, base_of(v));
}

std::vector<double> CoveringGraph::base_point(long base_idx) const {
  long m = cfg_.m;
  if (dim_ == 1) return {static_cast<double>(base_idx) * h_};
  return {static_cast<double>(base_idx % m) * h_, static_cast<double>(base_idx / m) * h_};
}

std::vector<double> CoveringGraph::vertex_point(VertexId v) const {
  return action_.act(copy_of(v), base_point(base_of(v)));
}

bool CoveringGraph::is_interior(VertexId v, long margin) const {
  if (spec_.is_finite()) return true;
  return word_norm(copy_of(v)) <= cfg_.window_radius - margin;
}

std::vector<VertexId> CoveringGraph::interior_vertices(long margin) const {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < vertex_count(); ++v)
    if (is_interior(v, margin)) out.push_back(v);
  return out;
}

CoveringFunction zero_function(const CoveringGraph& g) {
  return {CVector::Zero(g.vertex_count()), {}};
}

double covering_norm_sq(const CoveringGraph& g, const CoveringFunction& f) {
  return g.node_measure() * f.values.squaredNorm();
}

Complex covering_inner(const CoveringGraph& g, const CoveringFunction& f1,
                       const CoveringFunction& f2) {
  return g.node_measure() * f1.values.dot(f2.values);
}

CoveringFunction pullback(const CoveringGraph& g, const GroupElement& s,
                          const CoveringFunction& f) {
  CoveringFunction out = zero_function(g);
  out.flags = f.flags;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    auto tv = g.try_act(s, v);
    if (tv)
      out.values[v] = f.values[*tv];
    else
      out.flags.window_overflow = true;  // zero-fill
  }
  return out;
}

Section equivariant_lift(const CoveringGraph& g, const CoveringFunction& phi,
                         const CVector& v, const Irrep& irrep) {
  require(irrep.spec() == g.group(), "irrep belongs to a different group");
  require(v.size() == irrep.dim(), "vector dimension does not match the irrep");
  Section out;
  out.twist = irrep;
  out.flags = phi.flags;
  out.values = CMatrix::Zero(irrep.dim(), g.base_count());
  long R = g.config().window_radius;
  for (long c = 0; c < g.copy_count(); ++c) {
    const GroupElement& w = g.window()[c];
    CVector contrib = irrep(inverse(w)) * v;
    bool boundary = !g.group().is_finite() && word_norm(w) >= R;
    for (long b = 0; b < g.base_count(); ++b) {
      Complex z = phi.values[g.vertex(c, b)];
      if (z == Complex(0, 0)) continue;
      if (boundary) out.flags.window_overflow = true;
      out.values.col(b) += z * contrib;
    }
  }
  return out;
}

Complex section_inner(const CoveringGraph& g, const Section& s1, const Section& s2) {
  bool twist_match =
      (!s1.twist && !s2.twist) ||
      (s1.twist && s2.twist && *s1.twist == *s2.twist);
  if (!twist_match)
    throw std::invalid_argument("section_inner: twist mismatch");
  require(s1.values.cols() == g.base_count() && s2.values.cols() == g.base_count(),
          "section does not match the graph's fundamental domain");
  return g.node_measure() *
         (s1.values.conjugate().cwiseProduct(s2.values)).sum();
}

CVector section_value_at(const CoveringGraph& g, const Section& s, VertexId v) {
  const GroupElement& c = g.copy_of(v);
  CVector base = s.values.col(g.base_of(v));
  if (!s.twist) return base;
  return (*s.twist)(c)*base;
}

CoveringFunction random_interior(const CoveringGraph& g, long margin,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  CoveringFunction f = zero_function(g);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (!g.is_interior(v, margin)) continue;
    double re = dist(rng), im = dist(rng);
    f.values[v] = Complex(re, im);
  }
  return f;
}

namespace {

void write_value_row(std::ostream& os, const CoveringGraph& g, VertexId v,
                     Complex z) {
  char buf[64];
  os << v << ",\"" << g.copy_of(v).to_string() << "\"," << g.base_of(v);
  for (double c : g.vertex_point(v)) {
    std::snprintf(buf, sizeof(buf), "%.17g", c);
    os << "," << buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", z.real());
  os << "," << buf;
  std::snprintf(buf, sizeof(buf), "%.17g", z.imag());
  os << "," << buf << "\n";
}

}  // namespace

void write_snapshot_csv(std::ostream& os, const CoveringGraph& g,
                        const CoveringFunction& f) {
  os << "vertex,copy,base";
  os << (g.dim() == 1 ? ",x" : ",x,y");
  os << ",re,im\n";
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    write_value_row(os, g, v, f.values[v]);
}

void write_section_csv(std::ostream& os, const CoveringGraph& g, const Section& s) {
  os << "base,component";
  os << (g.dim() == 1 ? ",x" : ",x,y");
  os << ",re,im\n";
  char buf[64];
  for (long b = 0; b < g.base_count(); ++b) {
    for (int k = 0; k < s.values.rows(); ++k) {
      os << b << "," << k;
      for (double c : g.base_point(b)) {
        std::snprintf(buf, sizeof(buf), "%.17g", c);
        os << "," << buf;
      }
      std::snprintf(buf, sizeof(buf), "%.17g", s.values(k, b).real());
      os << "," << buf;
      std::snprintf(buf, sizeof(buf), "%.17g", s.values(k, b).imag());
      os << "," << buf << "\n";
    }
  }
}

}  // namespace blochdeck
