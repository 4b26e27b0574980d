#include <doctest.h>

#include <random>
#include <sstream>

#include "blochdeck/bloch.hpp"
#include "blochdeck/schulman.hpp"
#include "oracles.hpp"

using namespace blochdeck;

namespace {

std::vector<double> random_potential(long n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1, 1);
  std::vector<double> V(n);
  for (auto& x : V) x = dist(rng);
  return V;
}

struct Model {
  CoveringGraph graph;
  DualGrid grid;
};

Model finite_cyclic_model(long n, long m) {
  auto spec = GroupSpec::finite_cyclic(n);
  return {CoveringGraph::build(spec, {m, 1.0, 1}), DualGrid::build(spec, 1)};
}

}  // namespace

TEST_CASE("orbit sections and the shift law") {
  auto model = finite_cyclic_model(3, 2);
  const auto& g = model.graph;
  auto spec = g.group();

  // delta at (e, y0) gives delta_e.
  CoveringFunction f = zero_function(g);
  f.values[g.vertex(g.identity_copy(), 0)] = 1.0;
  GroupFunction fy = orbit_section(g, f, g.vertex(g.identity_copy(), 0));
  CHECK(std::abs(fy.at(spec.identity()) - Complex(1, 0)) < 1e-15);
  CHECK(fy.l2_norm_sq() == doctest::Approx(1.0));

  // Copy indicator of copy s0 seen from copy e: the delta sits at s0^-1.
  GroupElement s0 = spec.element({1});
  CoveringFunction ind = zero_function(g);
  for (long b = 0; b < g.base_count(); ++b)
    ind.values[g.vertex(*g.window_index(s0), b)] = 1.0;
  GroupFunction iy = orbit_section(g, ind, g.vertex(g.identity_copy(), 0));
  for (const auto& s : enumerate_ball(spec, 2)) {
    Complex expect = (s == inverse(s0)) ? 1.0 : 0.0;
    CHECK(std::abs(iy.at(s) - expect) < 1e-15);
  }

  // Shift law f_{s.y} = L_{s^-1}^* f_y on a random Z_4 model function.
  auto m4 = finite_cyclic_model(4, 2);
  auto rf = random_interior(m4.graph, 0, 9);
  VertexId y = m4.graph.vertex(m4.graph.identity_copy(), 1);
  for (const auto& s : enumerate_ball(m4.graph.group(), 2)) {
    GroupFunction lhs = orbit_section(m4.graph, rf, m4.graph.act(s, y));
    GroupFunction base = orbit_section(m4.graph, rf, y);
    for (const auto& r : enumerate_ball(m4.graph.group(), 2)) {
      // (L_{s^-1}^* f_y)(r) = f_y(s^-1 r)
      Complex expect = base.at(multiply(inverse(s), r));
      CHECK(std::abs(lhs.at(r) - expect) < 1e-15);
    }
  }
}

TEST_CASE("bloch transform on the micro model is the two-point DFT") {
  auto model = finite_cyclic_model(2, 1);
  const auto& g = model.graph;
  CoveringFunction f = zero_function(g);
  Complex f0(0.3, -0.1), f1(-0.7, 0.4);
  f.values[g.vertex(g.identity_copy(), 0)] = f0;
  f.values[1 - g.vertex(g.identity_copy(), 0) * 2 + g.vertex(g.identity_copy(), 0)] = f1;
  // identity copy is index 0 by construction; keep it readable:
  f.values[0] = f0;
  f.values[1] = f1;

  BlochField field = bloch_transform(g, model.grid, f);
  // Node k=0 is the trivial character, k=1 the sign character.
  CHECK(std::abs(field.node_values[0](0, 0) - (f0 + f1)) < 1e-14);
  CHECK(std::abs(field.node_values[1](0, 0) - (f0 - f1)) < 1e-14);

  double weighted = field_norm_sq(g, model.grid, field);
  CHECK(weighted == doctest::Approx(covering_norm_sq(g, f)).epsilon(1e-14));

  BlochField zero = bloch_transform(g, model.grid, zero_function(g));
  for (const auto& nv : zero.node_values) CHECK(nv.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bloch transform matches the equivariant lift pointwise") {
  auto g = CoveringGraph::build(GroupSpec::klein_bottle(), {3, 1.0, 2});
  auto grid = DualGrid::build(g.group(), 4);
  auto phi = random_interior(g, 1, 33);
  BlochField field = bloch_transform(g, grid, phi);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> dist(-1, 1);
  for (std::size_t ni = 0; ni < grid.size(); ni += 5) {
    const Irrep& rep = grid.node(ni).irrep;
    CVector v(rep.dim());
    for (int i = 0; i < rep.dim(); ++i) v[i] = Complex(dist(rng), dist(rng));
    Section lifted = equivariant_lift(g, phi, v, rep);
    for (long b = 0; b < g.base_count(); ++b) {
      CVector lhs = field.block(ni, b, rep.dim()) * v;
      CHECK((lhs - lifted.values.col(b)).cwiseAbs().maxCoeff() < 1e-13);
    }
  }
}

TEST_CASE("bloch field equivariance through the window interior") {
  auto g = CoveringGraph::build(GroupSpec::free_abelian(1), {8, 1.0, 4});
  auto grid = DualGrid::build(g.group(), 32);
  auto f = random_interior(g, 2, 55);
  // F[f_{w.y}](L) = L(w) F[f_y](L): orbit sections transform equivariantly.
  VertexId y = g.vertex(g.identity_copy(), 3);
  for (long k : {-2L, 1L, 2L}) {
    GroupElement w = g.group().element({k});
    for (std::size_t ni = 0; ni < grid.size(); ni += 7) {
      const Irrep& rep = grid.node(ni).irrep;
      DualField lhs = fourier(orbit_section(g, f, g.act(w, y)), grid);
      DualField rhs = fourier(orbit_section(g, f, y), grid);
      CHECK((lhs.values[ni] - rep(w) * rhs.values[ni]).cwiseAbs().maxCoeff() <
            1e-12);
    }
  }
}

TEST_CASE("inverse bloch round trips") {
  // Finite groups: exact.
  for (auto& model : {finite_cyclic_model(2, 1), finite_cyclic_model(4, 3)}) {
    auto f = random_interior(model.graph, 0, 71);
    auto back = inverse_bloch(model.graph, model.grid,
                              bloch_transform(model.graph, model.grid, f));
    CHECK((back.values - f.values).cwiseAbs().maxCoeff() < 1e-12);
  }

  // Zero field.
  auto model = finite_cyclic_model(3, 2);
  BlochField zf;
  zf.node_values.assign(model.grid.size(),
                        CMatrix::Zero(model.graph.base_count(), 1));
  auto z = inverse_bloch(model.graph, model.grid, zf);
  CHECK(z.values.cwiseAbs().maxCoeff() == 0.0);

  // Z circle within the exactness band, and the Klein bottle too.
  auto gz = CoveringGraph::build(GroupSpec::free_abelian(1), {8, 1.0, 4});
  auto gridz = DualGrid::build(gz.group(), 64);
  auto fz = random_interior(gz, 1, 13);
  auto backz = inverse_bloch(gz, gridz, bloch_transform(gz, gridz, fz));
  CHECK((backz.values - fz.values).cwiseAbs().maxCoeff() < 1e-12);

  auto gk = CoveringGraph::build(GroupSpec::klein_bottle(), {3, 1.0, 3});
  auto gridk = DualGrid::build(gk.group(), 16);
  auto fk = random_interior(gk, 1, 29);
  auto backk = inverse_bloch(gk, gridk, bloch_transform(gk, gridk, fk));
  CHECK((backk.values - fk.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("unitarity defect and band flags") {
  for (auto& model : {finite_cyclic_model(2, 1), finite_cyclic_model(6, 2)}) {
    auto f = random_interior(model.graph, 0, 81);
    auto rep = unitarity_defect(model.graph, model.grid, f);
    CHECK(rep.defect < 1e-12);
    CHECK(!rep.flags.any());
    CHECK(rep.input_norm == doctest::Approx(std::sqrt(covering_norm_sq(model.graph, f))));
  }

  auto g = CoveringGraph::build(GroupSpec::klein_bottle(), {3, 1.0, 2});
  auto grid = DualGrid::build(g.group(), 12);
  CoveringFunction delta = zero_function(g);
  delta.values[g.vertex(g.identity_copy(), 4)] = 1.0;
  CHECK(unitarity_defect(g, grid, delta).defect < 1e-12);

  CHECK(unitarity_defect(g, grid, zero_function(g)).defect == 0.0);

  // Exceeding the band raises the flag (FreeAbelian(1), M=4, support 3).
  auto gz = CoveringGraph::build(GroupSpec::free_abelian(1), {4, 1.0, 3});
  auto small = DualGrid::build(gz.group(), 4);
  auto wide = random_interior(gz, 0, 17);
  auto repz = unitarity_defect(gz, small, wide);
  CHECK(repz.flags.band_exceeded);
}

TEST_CASE("hamiltonian decomposition defect on finite and circle models") {
  // Finite micro-models with random invariant potentials.
  for (long n : {2L, 3L, 4L}) {
    auto model = finite_cyclic_model(n, 3);
    auto V = random_potential(model.graph.base_count(), 100 + n);
    auto H = assemble_invariant(model.graph, V);
    auto family = assemble_twisted_family(model.graph, V, model.grid);
    auto f = random_interior(model.graph, 0, 200 + n);
    auto rep = decomposition_defect(H, family, model.grid, f);
    CHECK(rep.defect < 1e-10);
  }

  // Z circle, m = 32, M = 64.
  auto g = CoveringGraph::build(GroupSpec::free_abelian(1), {32, 1.0, 3});
  auto grid = DualGrid::build(g.group(), 64);
  auto V = random_potential(g.base_count(), 321);
  auto H = assemble_invariant(g, V);
  auto family = assemble_twisted_family(g, V, grid);
  auto f = random_interior(g, 1, 654);
  auto rep = decomposition_defect(H, family, grid, f);
  CHECK(rep.defect < 1e-10);
  CHECK(!rep.flags.window_overflow);

  // Constant potentials shift both sides equally.
  auto model = finite_cyclic_model(3, 2);
  auto f3 = random_interior(model.graph, 0, 7);
  std::vector<double> zeroV(model.graph.base_count(), 0.0);
  std::vector<double> constV(model.graph.base_count(), 2.5);
  auto d0 = decomposition_defect(assemble_invariant(model.graph, zeroV),
                                 assemble_twisted_family(model.graph, zeroV, model.grid),
                                 model.grid, f3);
  auto dc = decomposition_defect(assemble_invariant(model.graph, constV),
                                 assemble_twisted_family(model.graph, constV, model.grid),
                                 model.grid, f3);
  CHECK(std::abs(d0.defect - dc.defect) < 1e-12);
}

TEST_CASE("multiplication by an invariant potential commutes through the transform") {
  auto g = CoveringGraph::build(GroupSpec::klein_bottle(), {3, 1.0, 2});
  auto grid = DualGrid::build(g.group(), 6);
  auto V = random_potential(g.base_count(), 77);
  auto f = random_interior(g, 1, 78);
  CoveringFunction Vf = f;
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    Vf.values[v] *= V[g.base_of(v)];
  BlochField lhs = bloch_transform(g, grid, Vf);
  BlochField rhs = bloch_transform(g, grid, f);
  for (std::size_t ni = 0; ni < grid.size(); ++ni) {
    int d = grid.node(ni).irrep.dim();
    for (long b = 0; b < g.base_count(); ++b) {
      CMatrix diff = lhs.block(ni, b, d) - V[b] * CMatrix(rhs.block(ni, b, d));
      CHECK(diff.cwiseAbs().maxCoeff() < 1e-13);
    }
  }
}

TEST_CASE("evolution decomposition defect on finite models") {
  for (long n : {2L, 3L}) {
    auto model = finite_cyclic_model(n, 2);
    auto V = random_potential(model.graph.base_count(), 400 + n);
    auto H = assemble_invariant(model.graph, V);
    auto family = assemble_twisted_family(model.graph, V, model.grid);
    auto f = random_interior(model.graph, 0, 500 + n);

    for (double t : {0.0, 0.1, 1.0}) {
      auto U = propagator(H, t);
      std::vector<EquivariantKernel> UL;
      for (const auto& HL : family) UL.push_back(propagator(HL, t));
      auto rep = evolution_decomposition_defect(U, UL, model.graph, model.grid, f);
      CHECK(rep.defect < 1e-10);
    }

    // Heat semigroup variant under the same contract.
    auto K = heat_kernel(H, 0.3);
    auto KL = heat_kernel_family(family, 0.3);
    CHECK(evolution_decomposition_defect(K, KL, model.graph, model.grid, f).defect <
          1e-10);
  }
}

TEST_CASE("defect records serialize deterministically") {
  auto model = finite_cyclic_model(2, 1);
  auto f = random_interior(model.graph, 0, 3);
  auto rep = unitarity_defect(model.graph, model.grid, f);
  std::ostringstream a, b;
  write_defect_record(a, "unitarity", rep);
  write_defect_record(b, "unitarity", rep);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("defect name=unitarity value=", 0) == 0);
  CHECK(a.str().find("flags=none") != std::string::npos);
}

// ---------------------------------------------------------------------------
// schulman
// ---------------------------------------------------------------------------

TEST_CASE("image sum on the micro model: the sign-rep fold is e^{-2 tau}") {
  auto model = finite_cyclic_model(2, 1);
  const auto& g = model.graph;
  auto H = assemble_invariant(g, {0.0});
  for (double tau : {0.05, 0.2, 1.0}) {
    auto K = heat_kernel(H, tau);
    auto minus = image_sum(K, g, irrep_at(g.group(), {1}), 0, 0, 2);
    CHECK(std::abs(minus.value(0, 0) - std::exp(-2.0 * tau)) < 1e-13);
    // Trivial rep: the fiber sum, i.e. the quotient heat kernel (here: 1).
    auto plus = image_sum(K, g, irrep_at(g.group(), {0}), 0, 0, 2);
    CHECK(std::abs(plus.value(0, 0) - 1.0) < 1e-13);
  }
}

TEST_CASE("trivial twist image sum equals the quotient heat kernel") {
  long m = 5;
  auto model = finite_cyclic_model(3, m);
  std::vector<double> V = random_potential(m, 61);
  auto H = assemble_invariant(model.graph, V);
  auto K = heat_kernel(H, 0.4);
  auto quotient = CoveringGraph::build(GroupSpec::finite_cyclic(1), {m, 1.0, 1});
  auto Kq = heat_kernel(assemble_invariant(quotient, V), 0.4);
  Irrep triv = irrep_at(model.graph.group(), {0});
  for (long x = 0; x < m; ++x)
    for (long y = 0; y < m; ++y) {
      auto r = image_sum(K, model.graph, triv, x, y, 3);
      // Quotient kernel carries measure h while the cover shares the same h.
      CHECK(std::abs(r.value(0, 0) - Kq.at(x, y)) < 1e-11);
    }
}

TEST_CASE("circle theta identity: image series vs spectral series") {
  double L = 1.0;
  for (double tau : {0.05, 0.1, 0.2}) {
    for (int it = 0; it < 8; ++it) {
      double theta = 2.0 * std::numbers::pi * it / 8.0;
      for (double x : {0.0, 0.3, 0.9})
        for (double y : {0.1, 0.5}) {
          Complex img = oracle::theta_image_series(x, y, tau, theta, L, 6);
          Complex spec = oracle::theta_spectral_series(x, y, tau, theta, L, 40);
          CHECK(std::abs(img - spec) < 1e-10);
        }
    }
  }
  // Frozen spot value at L=1, tau=0.05, theta=0, x=y.
  CHECK(std::abs(oracle::theta_image_series(0.2, 0.2, 0.05, 0.0, 1.0, 6) -
                 Complex(1.27857, 0)) < 1e-5);

  // The library's continuum comparator feeds the same sum.
  Complex manual = 0;
  double tau = 0.05;
  for (int n = -6; n <= 6; ++n)
    manual += continuum_free_heat_kernel({0.3 - n * L}, {0.1}, tau);
  CHECK(std::abs(manual - oracle::theta_image_series(0.3, 0.1, tau, 0.0, L, 6)) <
        1e-14);
}

TEST_CASE("image sum reproduces the twisted heat kernel on finite models") {
  for (long n : {2L, 3L, 4L}) {
    auto model = finite_cyclic_model(n, 2);
    auto V = random_potential(model.graph.base_count(), 700 + n);
    auto H = assemble_invariant(model.graph, V);
    for (double tau : {0.05, 0.2, 1.0}) {
      auto K = heat_kernel(H, tau);
      for (std::size_t ni = 0; ni < model.grid.size(); ++ni) {
        const Irrep& rep = model.grid.node(ni).irrep;
        auto KL = heat_kernel(assemble_twisted(model.graph, V, rep), tau);
        for (long x = 0; x < model.graph.base_count(); ++x)
          for (long y = 0; y < model.graph.base_count(); ++y) {
            auto r = image_sum(K, model.graph, rep, x, y, n);
            CHECK((r.value - CMatrix(KL.block(x, y))).cwiseAbs().maxCoeff() <
                  1e-10);
          }
      }
    }
  }
}

TEST_CASE("image sum matches the twisted kernel on truncated infinite models") {
  // Z circle: window 7, ball 6, tau = 0.1.
  auto g = CoveringGraph::build(GroupSpec::free_abelian(1), {8, 1.0, 7});
  auto V = random_potential(g.base_count(), 99);
  auto H = assemble_invariant(g, V);
  double tau = 0.1;
  auto K = heat_kernel(H, tau);
  for (double theta : {0.0, 1.1, 4.4}) {
    Irrep rep = irrep_at(g.group(), {theta});
    auto KL = heat_kernel(assemble_twisted(g, V, rep), tau);
    for (long x = 0; x < g.base_count(); x += 3)
      for (long y = 0; y < g.base_count(); y += 2) {
        auto r = image_sum(K, g, rep, x, y, 6);
        CHECK((r.value - CMatrix(KL.block(x, y))).cwiseAbs().maxCoeff() < 1e-10);
      }
  }

  // Klein bottle: window 5, ball 5, tau = 0.15.
  auto gk = CoveringGraph::build(GroupSpec::klein_bottle(), {3, 1.0, 5});
  auto Vk = random_potential(gk.base_count(), 101);
  auto Hk = assemble_invariant(gk, Vk);
  double tk = 0.15;
  auto Kk = heat_kernel(Hk, tk);
  Irrep repk = irrep_at(gk.group(), {0.7, 2.1});
  auto KLk = heat_kernel(assemble_twisted(gk, Vk, repk), tk);
  for (long x = 0; x < gk.base_count(); x += 2)
    for (long y = 0; y < gk.base_count(); y += 3) {
      auto r = image_sum(Kk, gk, repk, x, y, 5);
      CHECK((r.value - CMatrix(KLk.block(x, y))).cwiseAbs().maxCoeff() < 5e-10);
    }
}

TEST_CASE("image sum tail reporting bounds the true remainder") {
  auto g = CoveringGraph::build(GroupSpec::free_abelian(1), {4, 1.0, 8});
  auto H = assemble_invariant(g, std::vector<double>(4, 0.0));
  auto K = heat_kernel(H, 0.05);
  Irrep rep = irrep_at(g.group(), {0.9});
  auto full = image_sum(K, g, rep, 1, 2, 8, 0.0);
  for (long ball = 2; ball <= 5; ++ball) {
    auto part = image_sum(K, g, rep, 1, 2, ball, 0.0);
    double true_remainder = (full.value - part.value).norm();
    CHECK(part.tail >= true_remainder - 1e-15);
    CHECK(part.radius_used == ball);
  }
  // Shell decay is monotone in the Gaussian regime.
  auto p2 = image_sum(K, g, rep, 1, 2, 3, 0.0);
  auto p3 = image_sum(K, g, rep, 1, 2, 4, 0.0);
  CHECK(p3.tail < p2.tail);
  // The stopping rule reports the radius actually used.
  auto stopped = image_sum(K, g, rep, 1, 2, 8, 1e-6);
  CHECK(stopped.radius_used < 8);
}

TEST_CASE("real-time image sums are refused on infinite groups") {
  auto g = CoveringGraph::build(GroupSpec::free_abelian(1), {4, 1.0, 3});
  auto H = assemble_invariant(g, std::vector<double>(4, 0.0));
  // The propagator gate refuses upstream; the image-sum gate is checked on a
  // directly constructed oscillatory kernel.
  auto U = InvariantKernel::full_kernel(
      CMatrix::Identity(g.vertex_count(), g.vertex_count()), KernelKind::Unitary,
      Complex(0.0, 0.5), 0.5, g.node_measure());
  Irrep rep = irrep_at(g.group(), {0.3});
  CHECK_THROWS_AS(image_sum(U, g, rep, 0, 0, 2), std::domain_error);
  auto C = propagator(H, 0.4, 0.2);  // complex time passes the gate
  auto r = image_sum(C, g, rep, 0, 0, 2);
  CHECK(r.value.allFinite());
  // Finite models may sum real-time kernels directly.
  auto model = finite_cyclic_model(3, 2);
  auto Hf = assemble_invariant(model.graph, std::vector<double>(2, 0.0));
  auto Uf = propagator(Hf, 0.7);
  auto rf = image_sum(Uf, model.graph, irrep_at(model.graph.group(), {1}), 0, 1, 3);
  auto ULf = propagator(assemble_twisted(model.graph, std::vector<double>(2, 0.0),
                                         irrep_at(model.graph.group(), {1})),
                        0.7);
  CHECK((rf.value - CMatrix(ULf.block(0, 1))).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("reconstruction: finite closed form and the round trip") {
  auto model = finite_cyclic_model(2, 1);
  const auto& g = model.graph;
  auto H = assemble_invariant(g, {0.0});
  double tau = 0.35;
  auto K = heat_kernel(H, tau);
  auto family = heat_kernel_family(
      assemble_twisted_family(g, std::vector<double>{0.0}, model.grid), tau);

  // (1/2)[Tr K^+ + Tr(L(s)^* K^-)] reproduces both kernel entries.
  Complex k00 = reconstruct_invariant(family, model.grid, g.group().identity(), 0, 0);
  Complex k10 = reconstruct_invariant(family, model.grid, g.group().element({1}), 0, 0);
  CHECK(std::abs(k00 - K.at(0, 0)) < 1e-13);
  CHECK(std::abs(k10 - K.at(1, 0)) < 1e-13);

  // Trivial group: the single node carries the kernel itself.
  auto triv = CoveringGraph::build(GroupSpec::finite_cyclic(1), {4, 1.0, 1});
  auto gridt = DualGrid::build(triv.group(), 1);
  auto Ht = assemble_invariant(triv, random_potential(4, 5));
  auto Kt = heat_kernel(Ht, 0.2);
  auto fam_t = heat_kernel_family(
      assemble_twisted_family(triv, random_potential(4, 5), gridt), 0.2);
  for (long x = 0; x < 4; ++x)
    for (long y = 0; y < 4; ++y)
      CHECK(std::abs(reconstruct_invariant(fam_t, gridt, triv.group().identity(),
                                           x, y) -
                     Kt.at(x, y)) < 1e-12);
}

TEST_CASE("reconstruction matches the covering kernel on the circle window") {
  auto g = CoveringGraph::build(GroupSpec::free_abelian(1), {8, 1.0, 4});
  auto grid = DualGrid::build(g.group(), 64);
  auto V = random_potential(g.base_count(), 19);
  auto H = assemble_invariant(g, V);
  double tau = 0.1;
  auto K = heat_kernel(H, tau);
  auto family = heat_kernel_family(assemble_twisted_family(g, V, grid), tau);
  for (const auto& s : enumerate_ball(g.group(), 2))
    for (long x = 0; x < g.base_count(); x += 3)
      for (long y = 0; y < g.base_count(); y += 3) {
        VertexId u = g.act(inverse(s), g.vertex(g.identity_copy(), x));
        Complex expect = K.at(u, g.vertex(g.identity_copy(), y));
        CHECK(std::abs(reconstruct_invariant(family, grid, s, x, y) - expect) <
              1e-10);
      }
}

TEST_CASE("smeared pairings: identity kernel, deltas, bessel and HS bounds") {
  auto model = finite_cyclic_model(2, 1);
  const auto& g = model.graph;
  double mu = g.node_measure();

  // Identity kernel: F(s) = <L_s^* phi1, phi2>.
  auto I = InvariantKernel::full_kernel(
      CMatrix::Identity(g.vertex_count(), g.vertex_count()) / mu,
      KernelKind::Heat, 0.0, 0.0, mu);
  CoveringFunction phi1 = zero_function(g), phi2 = zero_function(g);
  phi1.values[0] = 1.0;  // copy e
  phi2.values[1] = 1.0;  // copy a
  GroupFunction F = smeared_F(I, g, phi1, phi2, 2);
  for (const auto& s : enumerate_ball(g.group(), 2)) {
    // <L_s^* phi1, phi2> is nonzero only when s aligns copy e onto copy a.
    Complex expect = (s == g.group().element({1})) ? mu : 0.0;
    CHECK(std::abs(F.at(s) - expect) < 1e-14);
  }

  // Deltas against a heat kernel pick out kernel entries.
  auto H = assemble_invariant(g, {0.0});
  auto K = heat_kernel(H, 0.6);
  GroupFunction Fk = smeared_F(K, g, phi1, phi1, 2);
  for (const auto& s : enumerate_ball(g.group(), 1)) {
    VertexId u = *g.try_act(inverse(s), 0);
    CHECK(std::abs(Fk.at(s) - mu * mu * K.at(u, 0)) < 1e-13);
  }

  // Bessel bound on random single-copy inputs (Z_6 cover).
  auto m6 = finite_cyclic_model(6, 3);
  auto H6 = assemble_invariant(m6.graph, random_potential(3, 44));
  auto K6 = heat_kernel(H6, 0.25);
  CoveringFunction p1 = zero_function(m6.graph), p2 = random_interior(m6.graph, 0, 45);
  {
    std::mt19937_64 rng(46);
    std::uniform_real_distribution<double> dist(-1, 1);
    for (long b = 0; b < m6.graph.base_count(); ++b)
      p1.values[m6.graph.vertex(m6.graph.identity_copy(), b)] =
          Complex(dist(rng), dist(rng));
  }
  GroupFunction F6 = smeared_F(K6, m6.graph, p1, p2, 6);
  double lhs = 0;
  for (const auto& [s, z] : F6.entries()) lhs += std::norm(z);
  double bound = covering_norm_sq(m6.graph, p1) * covering_norm_sq(m6.graph, p2);
  CHECK(lhs <= bound + 1e-12);

  // split_by_copy produces single-copy pieces.
  auto pieces = split_by_copy(m6.graph, p2);
  CHECK(pieces.size() <= static_cast<std::size_t>(m6.graph.copy_count()));
  for (const auto& piece : pieces) {
    long copies = 0;
    for (long c = 0; c < m6.graph.copy_count(); ++c) {
      bool any = false;
      for (long b = 0; b < m6.graph.base_count(); ++b)
        any = any || piece.values[m6.graph.vertex(c, b)] != Complex(0, 0);
      copies += any;
    }
    CHECK(copies == 1);
  }

  // G on the micro model: folded kernel entries, plus the HS bound.
  auto family = heat_kernel_family(
      assemble_twisted_family(g, std::vector<double>{0.0}, model.grid), 0.6);
  DualField G = smeared_G(family, g, model.grid, phi1, phi1);
  for (std::size_t ni = 0; ni < model.grid.size(); ++ni) {
    Complex folded = CMatrix(family[ni].block(0, 0))(0, 0) * mu * mu;
    CHECK(std::abs(G.values[ni](0, 0) - folded) < 1e-13);
    double hs_bound = model.grid.node(ni).irrep.dim() *
                      std::sqrt(covering_norm_sq(g, phi1)) *
                      std::sqrt(covering_norm_sq(g, phi1));
    CHECK(G.values[ni].norm() <= hs_bound + 1e-12);
  }
}

TEST_CASE("F/G round trip defects") {
  // Finite models: the whole chain is exact.
  for (long n : {2L, 3L, 4L}) {
    auto model = finite_cyclic_model(n, 2);
    auto V = random_potential(model.graph.base_count(), 800 + n);
    auto H = assemble_invariant(model.graph, V);
    double tau = 0.2;
    auto K = heat_kernel(H, tau);
    auto family =
        heat_kernel_family(assemble_twisted_family(model.graph, V, model.grid), tau);
    auto phi1 = random_interior(model.graph, 0, 900 + n);
    auto phi2 = random_interior(model.graph, 0, 950 + n);
    auto [d1, d2] =
        roundtrip_defect(K, family, model.graph, model.grid, phi1, phi2, n);
    CHECK(d1 < 1e-10);
    CHECK(d2 < 1e-10);
  }

  // Zero kernel: both defects vanish identically.
  auto model = finite_cyclic_model(3, 2);
  auto Z = InvariantKernel::full_kernel(
      CMatrix::Zero(model.graph.vertex_count(), model.graph.vertex_count()),
      KernelKind::Heat, 0.1, 0.1, model.graph.node_measure());
  std::vector<EquivariantKernel> zfam;
  for (std::size_t ni = 0; ni < model.grid.size(); ++ni)
    zfam.emplace_back(model.grid.node(ni).irrep,
                      CMatrix::Zero(model.graph.base_count(),
                                    model.graph.base_count()),
                      KernelKind::Heat, 0.1, 0.1, model.graph.node_measure(),
                      model.graph.base_count());
  auto phi = random_interior(model.graph, 0, 1);
  auto [z1, z2] = roundtrip_defect(Z, zfam, model.graph, model.grid, phi, phi, 3);
  CHECK(z1 == 0.0);
  CHECK(z2 == 0.0);

  // Z circle: heat kernel at tau = 0.1, ball 6, M = 64.
  auto g = CoveringGraph::build(GroupSpec::free_abelian(1), {16, 1.0, 8});
  auto grid = DualGrid::build(g.group(), 64);
  auto V = random_potential(g.base_count(), 3);
  auto H = assemble_invariant(g, V);
  auto K = heat_kernel(H, 0.1);
  auto family = heat_kernel_family(assemble_twisted_family(g, V, grid), 0.1);
  CoveringFunction phi1 = zero_function(g), phi2 = zero_function(g);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> dist(-1, 1);
  for (long b = 0; b < g.base_count(); ++b) {
    phi1.values[g.vertex(g.identity_copy(), b)] = Complex(dist(rng), dist(rng));
    phi2.values[g.vertex(g.identity_copy(), b)] = Complex(dist(rng), dist(rng));
  }
  auto [c1, c2] = roundtrip_defect(K, family, g, grid, phi1, phi2, 6);
  CHECK(c1 < 1e-8);
  CHECK(c2 < 1e-8);

  // Klein bottle, small window: the ball must exhaust the decayed range of
  // F_t before F[F] can match the exact G, and the window must keep the
  // outermost ball shell clear of the truncation boundary.
  auto gk = CoveringGraph::build(GroupSpec::klein_bottle(), {3, 1.0, 5});
  auto gridk = DualGrid::build(gk.group(), 12);
  auto Vk = random_potential(gk.base_count(), 31);
  auto Hk = assemble_invariant(gk, Vk);
  auto Kk = heat_kernel(Hk, 0.15);
  auto famk = heat_kernel_family(assemble_twisted_family(gk, Vk, gridk), 0.15);
  CoveringFunction q1 = zero_function(gk), q2 = zero_function(gk);
  for (long b = 0; b < gk.base_count(); ++b) {
    q1.values[gk.vertex(gk.identity_copy(), b)] = Complex(dist(rng), dist(rng));
    q2.values[gk.vertex(gk.identity_copy(), b)] = Complex(dist(rng), dist(rng));
  }
  auto [k1, k2] = roundtrip_defect(Kk, famk, gk, gridk, q1, q2, 5);
  CHECK(k1 < 1e-9);
  CHECK(k2 < 1e-9);
}

TEST_CASE("equivariance identities of the extended twisted kernel") {
  auto gk = CoveringGraph::build(GroupSpec::klein_bottle(), {3, 1.0, 3});
  Irrep rep = irrep_at(gk.group(), {1.2, 0.8});
  auto HL = assemble_twisted(gk, random_potential(gk.base_count(), 8), rep);
  auto K = heat_kernel(HL, 0.25);
  for (const auto& s : enumerate_ball(gk.group(), 2)) {
    for (long x = 0; x < gk.base_count(); x += 4)
      for (long y = 0; y < gk.base_count(); y += 3) {
        VertexId sx = gk.act(s, gk.vertex(gk.identity_copy(), x));
        // K(s.x, y) = L(s) K(x, y), exact by construction of the extension.
        CMatrix lhs = equivariant_extension_block(gk, K, sx, y);
        CMatrix rhs = rep(s) * CMatrix(K.block(x, y));
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() == 0.0);
        // Right equivariance K(x, s.y) = K(x, y) L(s^-1) through hermiticity.
        CMatrix right = equivariant_extension_block(gk, K, gk.act(s, gk.vertex(gk.identity_copy(), y)), x)
                            .adjoint();
        CMatrix expect = CMatrix(K.block(x, y)) * rep(inverse(s));
        CHECK((right - expect).cwiseAbs().maxCoeff() < 1e-12);
      }
  }
}

TEST_CASE("character orientation guard on Z_3") {
  // Nontrivial character, off-diagonal kernel blocks: a flipped s vs s^-1
  // convention conjugates the phases and breaks these equalities.
  auto model = finite_cyclic_model(3, 2);
  const auto& g = model.graph;
  std::vector<double> V = {0.2, -0.4};
  auto H = assemble_invariant(g, V);
  double tau = 0.3;
  auto K = heat_kernel(H, tau);
  Irrep chi = irrep_at(g.group(), {1});
  auto KL = heat_kernel(assemble_twisted(g, V, chi), tau);
  for (long x = 0; x < 2; ++x)
    for (long y = 0; y < 2; ++y) {
      auto r = image_sum(K, g, chi, x, y, 3);
      CHECK(std::abs(r.value(0, 0) - CMatrix(KL.block(x, y))(0, 0)) < 1e-12);
    }
  // The off-diagonal block really is complex (the guard has teeth).
  CHECK(std::abs(CMatrix(KL.block(0, 1))(0, 0).imag()) > 1e-6);

  // Frozen orbit-section phase: the delta in copy 1 shows up at s = 2.
  CoveringFunction f = zero_function(g);
  f.values[g.vertex(*g.window_index(g.group().element({1})), 0)] = 1.0;
  GroupFunction fy = orbit_section(g, f, g.vertex(g.identity_copy(), 0));
  DualField fhat = fourier(fy, model.grid);
  Complex expect = std::exp(Complex(0, 2.0 * 2.0 * std::numbers::pi / 3.0));
  CHECK(std::abs(fhat.values[1](0, 0) - expect) < 1e-13);
}
