#include "blochdeck/schulman.hpp"

#include <cmath>

namespace blochdeck {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

ImageSummer::ImageSummer(const InvariantKernel& K, const CoveringGraph& g,
                         Irrep irrep, long ball_radius, double tail_epsilon)
    : kernel_(&K), graph_(&g), irrep_(std::move(irrep)),
      tail_epsilon_(tail_epsilon) {
  require(irrep_.spec() == g.group(), "irrep belongs to a different group");
  if (!g.group().is_finite() && K.kind() == KernelKind::Unitary &&
      K.exponent() != Complex(0, 0))
    throw std::domain_error(
        "image sums of pure real-time kernels diverge on infinite groups; use a "
        "heat kernel or a complex-time kernel (epsilon > 0), or work with the "
        "smeared pairings");
  auto shells = enumerate_shells(g.group(), ball_radius);
  for (const auto& shell : shells) {
    std::vector<CMatrix> mats;
    std::vector<double> norms;
    std::vector<long> copies;
    for (const GroupElement& s : shell) {
      GroupElement sinv = inverse(s);
      auto idx = g.window_index(sinv);
      if (!idx)
        throw WindowOverflowError("image-sum shell leaves the copy window",
                                  sinv.to_string());
      mats.push_back(irrep_(s));
      norms.push_back(mats.back().norm());
      copies.push_back(*idx);
    }
    shell_matrices_.push_back(std::move(mats));
    shell_matrix_norms_.push_back(std::move(norms));
    shell_copy_index_.push_back(std::move(copies));
  }
}

ImageSumResult ImageSummer::at(long x, long y) const {
  const CoveringGraph& g = *graph_;
  require(x >= 0 && x < g.base_count() && y >= 0 && y < g.base_count(),
          "image_sum arguments must be fundamental-domain nodes");
  VertexId vy = g.vertex(g.identity_copy(), y);
  int d = irrep_.dim();
  ImageSumResult out;
  out.value = CMatrix::Zero(d, d);
  long D = g.base_count();
  for (long r = 0; r < static_cast<long>(shell_matrices_.size()); ++r) {
    if (shell_matrices_[r].empty()) break;  // finite group saturated
    double shell_norm = 0;
    for (std::size_t k = 0; k < shell_matrices_[r].size(); ++k) {
      Complex kval = kernel_->at(shell_copy_index_[r][k] * D + x, vy);
      shell_norm = std::max(shell_norm,
                            std::abs(kval) * shell_matrix_norms_[r][k]);
      out.value += kval * shell_matrices_[r][k];
    }
    out.radius_used = r;
    out.tail = shell_norm;
    if (r >= 1 && shell_norm < tail_epsilon_ * out.value.norm()) break;
  }
  return out;
}

ImageSumResult image_sum(const InvariantKernel& K, const CoveringGraph& g,
                         const Irrep& irrep, long x, long y, long ball_radius,
                         double tail_epsilon) {
  return ImageSummer(K, g, irrep, ball_radius, tail_epsilon).at(x, y);
}

Complex reconstruct_invariant(const std::vector<EquivariantKernel>& family,
                              const DualGrid& grid, const GroupElement& s,
                              long x, long y) {
  require(family.size() == grid.size(),
          "equivariant kernel family does not match the dual grid");
  Complex acc = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const DualNode& node = grid.node(i);
    acc += node.weight *
           (node.irrep(s).adjoint() * family[i].block(x, y)).trace();
  }
  return acc;
}

GroupFunction smeared_F(const InvariantKernel& K, const CoveringGraph& g,
                        const CoveringFunction& phi1, const CoveringFunction& phi2,
                        long ball_radius) {
  double mu = g.node_measure();
  // u |-> (K phi2)(u) = sum_v mu K(u, v) phi2(v), using only the stored
  // kernel columns on the support of phi2.
  CVector Kphi2 = CVector::Zero(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    Complex z = phi2.values[v];
    if (z == Complex(0, 0)) continue;
    require(K.has_column(v), "kernel columns missing on the support of phi2");
    for (VertexId u = 0; u < g.vertex_count(); ++u)
      Kphi2[u] += mu * K.at(u, v) * z;
  }
  GroupFunction F(g.group());
  for (const GroupElement& s : enumerate_ball(g.group(), ball_radius)) {
    GroupElement sinv = inverse(s);
    Complex acc = 0;
    for (VertexId w = 0; w < g.vertex_count(); ++w) {
      Complex z = phi1.values[w];
      if (z == Complex(0, 0)) continue;
      auto u = g.try_act(sinv, w);  // phi1(s . u) = phi1(w) at u = s^-1 w
      if (!u) continue;             // translate fell off the window
      acc += mu * std::conj(z) * Kphi2[*u];
    }
    F.set(s, acc);
  }
  return F;
}

DualField smeared_G(const std::vector<EquivariantKernel>& family,
                    const CoveringGraph& g, const DualGrid& grid,
                    const CoveringFunction& phi1, const CoveringFunction& phi2) {
  require(family.size() == grid.size(),
          "equivariant kernel family does not match the dual grid");
  BlochField A = bloch_transform(g, grid, phi1);
  BlochField B = bloch_transform(g, grid, phi2);
  double mu2 = g.node_measure() * g.node_measure();
  DualField out;
  out.values.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    out.values.push_back(mu2 * (A.node_values[i].adjoint() * family[i].raw() *
                                B.node_values[i]));
  return out;
}

std::vector<CoveringFunction> split_by_copy(const CoveringGraph& g,
                                            const CoveringFunction& phi) {
  std::vector<CoveringFunction> pieces;
  for (long c = 0; c < g.copy_count(); ++c) {
    CoveringFunction piece = zero_function(g);
    piece.flags = phi.flags;
    bool nonzero = false;
    for (long b = 0; b < g.base_count(); ++b) {
      VertexId v = g.vertex(c, b);
      if (phi.values[v] != Complex(0, 0)) {
        piece.values[v] = phi.values[v];
        nonzero = true;
      }
    }
    if (nonzero) pieces.push_back(std::move(piece));
  }
  return pieces;
}

SmearedPairing make_smeared_pairing(const InvariantKernel& K,
                                    const std::vector<EquivariantKernel>& family,
                                    const CoveringGraph& g, const DualGrid& grid,
                                    const CoveringFunction& phi1,
                                    const CoveringFunction& phi2,
                                    long ball_radius) {
  SmearedPairing p{phi1, phi2, smeared_F(K, g, phi1, phi2, ball_radius),
                   smeared_G(family, g, grid, phi1, phi2)};
  return p;
}

std::pair<double, double> roundtrip_defect(
    const InvariantKernel& K, const std::vector<EquivariantKernel>& family,
    const CoveringGraph& g, const DualGrid& grid, const CoveringFunction& phi1,
    const CoveringFunction& phi2, long ball_radius) {
  SmearedPairing p = make_smeared_pairing(K, family, g, grid, phi1, phi2,
                                          ball_radius);

  std::vector<GroupElement> ball = enumerate_ball(g.group(), ball_radius);
  GroupFunction F_from_G = inverse_fourier(p.G, grid, ball);
  double d1 = 0;
  for (const GroupElement& s : ball) d1 += std::norm(p.F.at(s) - F_from_G.at(s));
  d1 = std::sqrt(d1);

  DualField G_from_F = fourier(p.F, grid);
  double d2 = 0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    d2 = std::max(d2, (p.G.values[i] - G_from_F.values[i]).norm());
  return {d1, d2};
}

CMatrix equivariant_extension_block(const CoveringGraph& g,
                                    const EquivariantKernel& K, VertexId u,
                                    long y) {
  return K.irrep()(g.copy_of(u)) * K.block(g.base_of(u), y);
}

}  // namespace blochdeck
