#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "blochdeck/bloch.hpp"
#include "blochdeck/schulman.hpp"

namespace blochdeck::cli {

namespace {

namespace fs = std::filesystem;

long stride_for(long n, long limit) { return std::max<long>(1, n / limit); }

std::ofstream open_out(const std::string& outdir, const std::string& name) {
  fs::create_directories(outdir);
  std::ofstream os(fs::path(outdir) / name);
  if (!os) throw std::runtime_error("cannot write output file " + name + " in " + outdir);
  return os;
}

bool wants_csv(const RunConfig& cfg) {
  const auto& fmts = cfg.output().formats;
  return std::find(fmts.begin(), fmts.end(), "csv") != fmts.end();
}

double parseval_tolerance(const GroupSpec& spec, double scale) {
  return (spec.is_finite() ? 1e-12 : 1e-8) * scale;
}

// Continuum twisted circle kernel, image-sum side and spectral side.
Complex theta_image(double x, double y, double tau, double theta, double L,
                    int terms) {
  Complex acc = 0;
  for (int n = -terms; n <= terms; ++n) {
    double arg = theta * n;
    acc += Complex(std::cos(arg), std::sin(arg)) *
           continuum_free_heat_kernel({x - n * L}, {y}, tau);
  }
  return acc;
}

Complex theta_spectral(double x, double y, double tau, double theta, double L,
                       int terms) {
  Complex acc = 0;
  for (int m = -terms; m <= terms; ++m) {
    double km = (2.0 * std::numbers::pi * m + theta) / L;
    double arg = km * (x - y);
    acc += (1.0 / L) * std::exp(-km * km * tau) *
           Complex(std::cos(arg), std::sin(arg));
  }
  return acc;
}

std::string format_tau(double tau) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", tau);
  return buf;
}

}  // namespace

Report cmd_check_harmonic(const RunConfig& cfg, const std::string& outdir) {
  const GroupSpec& spec = cfg.group();
  double scale = cfg.task().tolerance_scale;
  DualGrid grid = DualGrid::build(spec, cfg.grid().dual_resolution);

  Report rep;
  rep.command = "check-harmonic";
  rep.config_hash = cfg.hash();

  // Representation audits on a deterministic node sample.
  long nstride = stride_for(static_cast<long>(grid.size()), 48);
  auto ball2 = enumerate_ball(spec, 2);
  double id_defect = 0, hom_defect = 0, uni_defect = 0;
  for (std::size_t ni = 0; ni < grid.size(); ni += nstride) {
    const Irrep& rep_i = grid.node(ni).irrep;
    int d = rep_i.dim();
    id_defect = std::max(id_defect, (rep_i(spec.identity()) - CMatrix::Identity(d, d))
                                        .cwiseAbs()
                                        .maxCoeff());
    for (const auto& s : ball2) {
      uni_defect = std::max(
          uni_defect,
          (rep_i(s) * rep_i(s).adjoint() - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff());
      uni_defect = std::max(
          uni_defect, (rep_i(inverse(s)) - rep_i(s).adjoint()).cwiseAbs().maxCoeff());
      for (const auto& r : ball2)
        hom_defect = std::max(
            hom_defect,
            (rep_i(multiply(s, r)) - rep_i(s) * rep_i(r)).cwiseAbs().maxCoeff());
    }
  }
  rep.add("irrep-identity", id_defect, 1e-13 * scale);
  rep.add("irrep-homomorphism", hom_defect, 1e-13 * scale);
  rep.add("irrep-unitarity", uni_defect, 1e-13 * scale);

  rep.add("plancherel-dimension-mass", std::abs(grid.dimension_mass() - 1.0),
          parseval_tolerance(spec, scale));
  rep.add("plancherel-total-mass", std::max(0.0, grid.total_mass() - 1.0),
          1e-12 * scale);

  // Band bookkeeping for the random-support checks.
  long band = grid.exact_support_radius();
  long requested = cfg.task().support_radius >= 0 ? cfg.task().support_radius : 3;
  long radius = spec.is_finite() ? requested : std::min(requested, band);
  Flags band_flags;
  if (!spec.is_finite() && requested > band) {
    band_flags.band_exceeded = true;
    rep.add_info("exactness-band", static_cast<double>(band), band_flags,
                 "requested support radius " + std::to_string(requested) +
                     " exceeds the exact band; checks ran at the band radius");
  }

  // Parseval on deltas: the dimension-mass identity and orthogonality.
  {
    GroupFunction de(spec);
    de.set(spec.identity(), 1.0);
    double defect = parseval_defect(de, de, grid);
    auto shells = enumerate_shells(spec, 1);
    for (const auto& s : shells.back()) {
      GroupFunction ds(spec);
      ds.set(s, 1.0);
      defect = std::max(defect, parseval_defect(de, ds, grid));
      defect = std::max(defect, parseval_defect(ds, ds, grid));
    }
    rep.add("parseval-deltas", defect, parseval_tolerance(spec, scale), band_flags);
  }

  std::mt19937_64 rng(cfg.task().seed);
  std::uniform_real_distribution<double> dist(-1, 1);
  GroupFunction f1(spec), f2(spec);
  for (const auto& s : enumerate_ball(spec, radius)) {
    f1.set(s, Complex(dist(rng), dist(rng)));
    f2.set(s, Complex(dist(rng), dist(rng)));
  }
  rep.add("parseval-random", parseval_defect(f1, f2, grid),
          parseval_tolerance(spec, scale), band_flags);

  {
    auto support = enumerate_ball(spec, radius);
    GroupFunction back = inverse_fourier(fourier(f1, grid), grid, support);
    double defect = 0;
    for (const auto& s : support) defect = std::max(defect, std::abs(back.at(s) - f1.at(s)));
    rep.add("fourier-roundtrip", defect, 1e-12 * scale, band_flags);
  }

  {
    double defect = 0;
    auto shells = enumerate_shells(spec, 1);
    for (const auto& s : shells.back())
      defect = std::max(defect, regular_rep_defect(f1, s, grid));
    rep.add("regular-representation", defect, 1e-12 * scale, band_flags);
  }

  if (wants_csv(cfg)) {
    auto os = open_out(outdir, "dual_grid.txt");
    grid.write_manifest(os);
  }
  auto ros = open_out(outdir, "report.txt");
  rep.write(ros);
  return rep;
}

Report cmd_bloch(const RunConfig& cfg, const std::string& outdir) {
  double scale = cfg.task().tolerance_scale;
  CoveringGraph graph = cfg.build_graph();
  DualGrid grid = DualGrid::build(cfg.group(), cfg.grid().dual_resolution);
  std::vector<double> V = cfg.potential_on_domain(graph);
  auto H = assemble_invariant(graph, V);
  auto family = assemble_twisted_family(graph, V, grid, cfg.task().threads);

  Report rep;
  rep.command = "bloch";
  rep.config_hash = cfg.hash();

  long margin = graph.group().is_finite() ? 0 : 1;
  auto f = random_interior(graph, margin, cfg.task().seed);

  auto uni = unitarity_defect(graph, grid, f);
  rep.add("bloch-unitarity", uni.defect, 1e-12 * scale, uni.flags);

  {
    auto back = inverse_bloch(graph, grid, bloch_transform(graph, grid, f));
    double defect = (back.values - f.values).cwiseAbs().maxCoeff();
    rep.add("bloch-roundtrip", defect, 1e-12 * scale);
  }

  auto dec = decomposition_defect(H, family, grid, f);
  rep.add("hamiltonian-decomposition", dec.defect, 1e-10 * scale, dec.flags);

  if (graph.group().is_finite()) {
    std::vector<double> unioned;
    for (std::size_t ni = 0; ni < grid.size(); ++ni) {
      RVector ev = spectrum(family[ni]);
      for (long j = 0; j < ev.size(); ++j)
        for (int c = 0; c < grid.node(ni).irrep.dim(); ++c) unioned.push_back(ev[j]);
    }
    std::sort(unioned.begin(), unioned.end());
    RVector full = spectrum(H);
    double defect = 0;
    if (static_cast<long>(unioned.size()) != full.size())
      defect = std::numeric_limits<double>::infinity();
    else
      for (long j = 0; j < full.size(); ++j)
        defect = std::max(defect, std::abs(full[j] - unioned[j]));
    rep.add("spectral-union", defect, 1e-10 * scale);

    for (double t : cfg.task().t) {
      auto U = propagator(H, t);
      std::vector<EquivariantKernel> UL;
      UL.reserve(family.size());
      for (const auto& HL : family) UL.push_back(propagator(HL, t));
      auto ev = evolution_decomposition_defect(U, UL, graph, grid, f);
      rep.add("evolution-decomposition t=" + format_tau(t), ev.defect, 1e-10 * scale,
              ev.flags);
      CMatrix A = U.raw() * graph.node_measure();
      double udef = (A * A.adjoint() - CMatrix::Identity(A.rows(), A.cols()))
                        .cwiseAbs()
                        .maxCoeff();
      rep.add("propagator-unitarity t=" + format_tau(t), udef, 1e-11 * scale);
    }
  } else if (!cfg.task().t.empty()) {
    rep.add_info("evolution-decomposition", 0.0, {},
                 "real-time evolution checks run on finite models only");
  }

  // Free circle dispersion against the closed form.
  bool zero_potential =
      std::all_of(V.begin(), V.end(), [](double v) { return v == 0.0; });
  if (cfg.group().family() == GroupFamily::FreeAbelian &&
      cfg.group().params()[0] == 1 && zero_potential) {
    double L = cfg.grid().cell_length;
    long m = cfg.grid().m;
    double defect = 0;
    for (std::size_t ni = 0; ni < grid.size(); ++ni) {
      double theta = grid.node(ni).irrep.params()[0];
      std::vector<double> expect;
      for (long j = 0; j < m; ++j) {
        double s = std::sin((2.0 * std::numbers::pi * j + theta) / (2.0 * m));
        expect.push_back(4.0 * m * m / (L * L) * s * s);
      }
      std::sort(expect.begin(), expect.end());
      RVector ev = spectrum(family[ni]);
      for (long j = 0; j < m; ++j) defect = std::max(defect, std::abs(ev[j] - expect[j]));
    }
    rep.add("free-circle-dispersion", defect, 1e-10 * scale);
  }

  // Constant shifts move every band rigidly.
  if (zero_potential && grid.size() > 0) {
    double c = 1.0;
    std::vector<double> Vc(V.size(), c);
    auto shifted = assemble_twisted(graph, Vc, grid.node(0).irrep);
    RVector ev0 = spectrum(family[0]);
    RVector evc = spectrum(shifted);
    double defect = 0;
    for (long j = 0; j < ev0.size(); ++j)
      defect = std::max(defect, std::abs(evc[j] - ev0[j] - c));
    rep.add("band-constant-shift", defect, 1e-10 * scale);
  }

  if (wants_csv(cfg)) {
    auto os = open_out(outdir, "bands.csv");
    os << "node";
    for (std::size_t p = 0; p < grid.node(0).irrep.params().size(); ++p)
      os << ",param" << p;
    os << ",index,eigenvalue\n";
    char buf[64];
    for (std::size_t ni = 0; ni < grid.size(); ++ni) {
      RVector ev = spectrum(family[ni]);
      for (long j = 0; j < ev.size(); ++j) {
        os << ni;
        for (double p : grid.node(ni).irrep.params()) {
          std::snprintf(buf, sizeof(buf), "%.17g", p);
          os << "," << buf;
        }
        std::snprintf(buf, sizeof(buf), "%.17g", ev[j]);
        os << "," << j << "," << buf << "\n";
      }
    }
    auto ds = open_out(outdir, "defects.txt");
    write_defect_record(ds, "bloch-unitarity", uni);
    write_defect_record(ds, "hamiltonian-decomposition", dec);
  }
  auto ros = open_out(outdir, "report.txt");
  rep.write(ros);
  return rep;
}

Report cmd_schulman(const RunConfig& cfg, const std::string& outdir) {
  double scale = cfg.task().tolerance_scale;
  CoveringGraph graph = cfg.build_graph();
  DualGrid grid = DualGrid::build(cfg.group(), cfg.grid().dual_resolution);
  std::vector<double> V = cfg.potential_on_domain(graph);
  auto H = assemble_invariant(graph, V);
  auto family = assemble_twisted_family(graph, V, grid, cfg.task().threads);
  bool finite = graph.group().is_finite();
  long ball = finite ? std::max<long>(cfg.task().ball_radius,
                                      graph.group().params()[0])
                     : cfg.task().ball_radius;

  Report rep;
  rep.command = "schulman";
  rep.config_hash = cfg.hash();

  double image_tol = (finite ? 1e-10 : 1e-8) * scale;
  double recon_tol = (finite ? 1e-10 : 1e-6) * scale;
  double round_tol = (finite ? 1e-10 : 1e-8) * scale;

  std::vector<VertexId> domain_cols;
  for (long b = 0; b < graph.base_count(); ++b)
    domain_cols.push_back(graph.vertex(graph.identity_copy(), b));

  bool first_tau = true;
  for (double tau : cfg.task().tau) {
    std::string suffix = " tau=" + format_tau(tau);
    auto kernels = heat_kernel_family(family, tau, cfg.task().threads);
    InvariantKernel K = finite ? heat_kernel(H, tau)
                               : heat_kernel_columns(H, tau, domain_cols);

    // Image sum against the directly synthesized twisted kernel, block-wise.
    {
      std::vector<double> node_defect(grid.size(), 0.0);
      std::vector<double> node_tail(grid.size(), 0.0);
      parallel_for(grid.size(), cfg.task().threads, [&](std::size_t ni) {
        ImageSummer summer(K, graph, grid.node(ni).irrep, ball);
        long stride = stride_for(graph.base_count(), 64);
        double dmax = 0, tmax = 0;
        for (long x = 0; x < graph.base_count(); x += stride)
          for (long y = 0; y < graph.base_count(); y += stride) {
            auto r = summer.at(x, y);
            dmax = std::max(dmax, (r.value - CMatrix(kernels[ni].block(x, y)))
                                      .cwiseAbs()
                                      .maxCoeff());
            tmax = std::max(tmax, r.tail);
          }
        node_defect[ni] = dmax;
        node_tail[ni] = tmax;
      });
      double defect = *std::max_element(node_defect.begin(), node_defect.end());
      rep.add("image-sum-vs-twisted" + suffix, defect, image_tol);

      if (first_tau && wants_csv(cfg)) {
        auto ts = open_out(outdir, "tails.txt");
        char buf[64];
        for (std::size_t ni = 0; ni < grid.size();
             ni += stride_for(static_cast<long>(grid.size()), 16)) {
          std::snprintf(buf, sizeof(buf), "%.17g", node_tail[ni]);
          ts << "tail node=" << ni << " ball=" << ball << " last_shell=" << buf
             << "\n";
        }
      }
    }

    // Quadrature reconstruction of the invariant kernel.
    {
      double defect = 0;
      long stride = stride_for(graph.base_count(), 8);
      long srad = finite ? 2 : std::min<long>(2, cfg.grid().window_radius);
      for (const auto& s : enumerate_ball(graph.group(), srad))
        for (long x = 0; x < graph.base_count(); x += stride)
          for (long y = 0; y < graph.base_count(); y += stride) {
            VertexId u = graph.act(inverse(s), graph.vertex(graph.identity_copy(), x));
            Complex expect = K.at(u, graph.vertex(graph.identity_copy(), y));
            defect = std::max(defect,
                              std::abs(reconstruct_invariant(kernels, grid, s, x, y) -
                                       expect));
          }
      rep.add("kernel-reconstruction" + suffix, defect, recon_tol);
    }

    // Smeared F/G round trip on fundamental-domain test functions.
    {
      std::mt19937_64 rng(cfg.task().seed + 17);
      std::uniform_real_distribution<double> dist(-1, 1);
      CoveringFunction phi1 = zero_function(graph), phi2 = zero_function(graph);
      for (long b = 0; b < graph.base_count(); ++b) {
        phi1.values[graph.vertex(graph.identity_copy(), b)] =
            Complex(dist(rng), dist(rng));
        phi2.values[graph.vertex(graph.identity_copy(), b)] =
            Complex(dist(rng), dist(rng));
      }
      auto [d1, d2] = roundtrip_defect(K, kernels, graph, grid, phi1, phi2, ball);
      rep.add("roundtrip-F-from-G" + suffix, d1, round_tol);
      rep.add("roundtrip-G-from-F" + suffix, d2, round_tol);
    }

    // Continuum theta comparison on the free circle.
    bool zero_potential =
        std::all_of(V.begin(), V.end(), [](double v) { return v == 0.0; });
    if (cfg.group().family() == GroupFamily::FreeAbelian &&
        cfg.group().params()[0] == 1 && zero_potential && tau >= 0.05) {
      double L = cfg.grid().cell_length;
      double defect = 0;
      for (int it = 0; it < 8; ++it) {
        double theta = 2.0 * std::numbers::pi * it / 8.0;
        for (int ix = 0; ix < 8; ++ix)
          for (int iy = 0; iy < 8; ++iy) {
            double x = L * ix / 8.0, y = L * iy / 8.0;
            defect = std::max(defect, std::abs(theta_image(x, y, tau, theta, L, 8) -
                                               theta_spectral(x, y, tau, theta, L, 60)));
          }
      }
      rep.add("circle-theta-identity" + suffix, defect, 1e-10 * scale);
    }

    // The one-element group: the image sum is the kernel itself.
    if (finite && graph.group().order() == 1) {
      ImageSummer summer(K, graph, grid.node(0).irrep, 1);
      double defect = 0;
      for (long x = 0; x < graph.base_count(); ++x)
        for (long y = 0; y < graph.base_count(); ++y)
          defect = std::max(defect,
                            std::abs(summer.at(x, y).value(0, 0) - K.at(x, y)));
      rep.add("trivial-group-identity" + suffix, defect, 1e-13 * scale);
    }

    if (first_tau && wants_csv(cfg)) {
      {
        auto os = open_out(outdir, "kernel_invariant.csv");
        write_kernel_csv(os, K);
      }
      long kstride = stride_for(static_cast<long>(grid.size()), 4);
      for (std::size_t ni = 0; ni < grid.size(); ni += kstride) {
        auto os = open_out(outdir, "kernel_twisted_node" + std::to_string(ni) + ".csv");
        os << "x,y,row,col,re,im,tau\n";
        char buf[64];
        int d = grid.node(ni).irrep.dim();
        for (long x = 0; x < graph.base_count(); ++x)
          for (long y = 0; y < graph.base_count(); ++y) {
            auto blk = kernels[ni].block(x, y);
            for (int r = 0; r < d; ++r)
              for (int c = 0; c < d; ++c) {
                os << x << "," << y << "," << r << "," << c;
                std::snprintf(buf, sizeof(buf), "%.17g", blk(r, c).real());
                os << "," << buf;
                std::snprintf(buf, sizeof(buf), "%.17g", blk(r, c).imag());
                os << "," << buf;
                std::snprintf(buf, sizeof(buf), "%.17g", tau);
                os << "," << buf << "\n";
              }
          }
      }
    }
    first_tau = false;
  }

  // Real-time kernels on finite models only (the config validator already
  // refused the infinite pure real-time case).
  for (double t : cfg.task().t) {
    std::string suffix = " t=" + format_tau(t);
    double eps = cfg.task().epsilon;
    InvariantKernel U = propagator(H, t, eps);
    double defect = 0;
    for (std::size_t ni = 0; ni < grid.size();
         ni += stride_for(static_cast<long>(grid.size()), 16)) {
      EquivariantKernel UL = propagator(family[ni], t, eps);
      ImageSummer summer(U, graph, grid.node(ni).irrep, ball);
      long stride = stride_for(graph.base_count(), 16);
      for (long x = 0; x < graph.base_count(); x += stride)
        for (long y = 0; y < graph.base_count(); y += stride)
          defect = std::max(defect, (summer.at(x, y).value - CMatrix(UL.block(x, y)))
                                        .cwiseAbs()
                                        .maxCoeff());
    }
    rep.add("image-sum-vs-twisted" + suffix, defect, image_tol);
  }

  auto ros = open_out(outdir, "report.txt");
  rep.write(ros);
  return rep;
}

Report run_command(const RunConfig& cfg, const std::string& outdir) {
  const std::string& cmd = cfg.task().command;
  if (cmd == "check-harmonic") return cmd_check_harmonic(cfg, outdir);
  if (cmd == "bloch") return cmd_bloch(cfg, outdir);
  if (cmd == "schulman") return cmd_schulman(cfg, outdir);
  throw std::invalid_argument("unknown command '" + cmd + "'");
}

}  // namespace blochdeck::cli
