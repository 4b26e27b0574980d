#include "blochdeck/harmonic.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace blochdeck {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_2pi(double x) {
  double y = std::fmod(x, kTwoPi);
  if (y < 0) y += kTwoPi;
  return y;
}

Complex unit_phase(double arg) { return Complex(std::cos(arg), std::sin(arg)); }

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// L(b)^n as a closed form: n = 2k   -> e^{i k beta} I
//                          n = 2k+1 -> e^{i k beta} [[0, e^{i beta}], [1, 0]]
CMatrix klein_b_power(long n, double beta) {
  long r = floor_mod(n, 2);
  long k = (n - r) / 2;
  Complex phase = unit_phase(static_cast<double>(k) * beta);
  CMatrix out(2, 2);
  if (r == 0) {
    out << phase, 0.0, 0.0, phase;
  } else {
    out << 0.0, phase * unit_phase(beta), phase, 0.0;
  }
  return out;
}

}  // namespace

Irrep::Irrep(GroupSpec spec, std::vector<double> params)
    : spec_(std::move(spec)), params_(std::move(params)),
      dim_(spec_.family() == GroupFamily::KleinBottle ? 2 : 1) {}

std::string Irrep::to_string() const {
  std::string s = spec_.describe() + "[";
  char buf[32];
  for (std::size_t i = 0; i < params_.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.12g", params_[i]);
    if (i) s += ",";
    s += buf;
  }
  return s + "]";
}

CMatrix Irrep::operator()(const GroupElement& s) const {
  if (!(s.spec() == spec_))
    throw std::invalid_argument("mixed-group arithmetic: element does not belong to the irrep's group");
  switch (spec_.family()) {
    case GroupFamily::FiniteCyclic: {
      double arg = kTwoPi * params_[0] * static_cast<double>(s.coords()[0]) /
                   static_cast<double>(spec_.params()[0]);
      CMatrix out(1, 1);
      out(0, 0) = unit_phase(arg);
      return out;
    }
    case GroupFamily::FiniteProduct: {
      double arg = 0;
      for (std::size_t i = 0; i < params_.size(); ++i)
        arg += kTwoPi * params_[i] * static_cast<double>(s.coords()[i]) /
               static_cast<double>(spec_.params()[i]);
      CMatrix out(1, 1);
      out(0, 0) = unit_phase(arg);
      return out;
    }
    case GroupFamily::FreeAbelian: {
      double arg = 0;
      for (std::size_t i = 0; i < params_.size(); ++i)
        arg += params_[i] * static_cast<double>(s.coords()[i]);
      CMatrix out(1, 1);
      out(0, 0) = unit_phase(arg);
      return out;
    }
    case GroupFamily::KleinBottle: {
      // L(a^m b^n) = diag(e^{i m alpha}, e^{-i m alpha}) L(b)^n
      double alpha = params_[0], beta = params_[1];
      double m = static_cast<double>(s.coords()[0]);
      CMatrix diag(2, 2);
      diag << unit_phase(m * alpha), 0.0, 0.0, unit_phase(-m * alpha);
      return diag * klein_b_power(s.coords()[1], beta);
    }
  }
  throw std::logic_error("unreachable");
}

Irrep irrep_at(const GroupSpec& spec, std::vector<double> params) {
  require(static_cast<int>(params.size()) ==
              (spec.family() == GroupFamily::KleinBottle ? 2 : spec.coord_count()),
          "dual parameter count does not match the family");
  switch (spec.family()) {
    case GroupFamily::FiniteCyclic:
    case GroupFamily::FiniteProduct: {
      for (std::size_t i = 0; i < params.size(); ++i) {
        double k = params[i];
        require(std::abs(k - std::round(k)) < 1e-9, "finite-family dual parameters must be integers");
        params[i] = floor_mod(static_cast<long>(std::llround(k)), spec.params()[i]);
      }
      return Irrep(spec, std::move(params));
    }
    case GroupFamily::FreeAbelian: {
      for (double& t : params) t = wrap_2pi(t);
      return Irrep(spec, std::move(params));
    }
    case GroupFamily::KleinBottle: {
      double alpha = params[0];
      require(alpha >= 0.0 && alpha <= kPi, "KleinBottle dual point requires alpha in [0, pi]");
      if (alpha < 1e-12 || alpha > kPi - 1e-12)
        throw std::domain_error(
            "KleinBottle boundary family alpha in {0, pi}: a Plancherel-null set of "
            "1-dimensional representations, not quadrature-sampled");
      params[1] = wrap_2pi(params[1]);
      return Irrep(spec, std::move(params));
    }
  }
  throw std::logic_error("unreachable");
}

DualGrid DualGrid::build(const GroupSpec& spec, long resolution) {
  require(resolution >= 1, "dual grid resolution must be >= 1");
  std::vector<DualNode> nodes;
  switch (spec.family()) {
    case GroupFamily::FiniteCyclic:
    case GroupFamily::FiniteProduct: {
      // All irrep classes, each d_L / |Gamma| with d_L = 1.
      double w = 1.0 / static_cast<double>(spec.order());
      std::vector<long> orders = spec.family() == GroupFamily::FiniteCyclic
                                     ? std::vector<long>{spec.params()[0]}
                                     : spec.params();
      std::vector<double> k(orders.size(), 0.0);
      std::function<void(std::size_t)> sweep = [&](std::size_t axis) {
        if (axis == orders.size()) {
          nodes.push_back({Irrep(spec, k), w});
          return;
        }
        for (long j = 0; j < orders[axis]; ++j) {
          k[axis] = static_cast<double>(j);
          sweep(axis + 1);
        }
      };
      sweep(0);
      break;
    }
    case GroupFamily::FreeAbelian: {
      int d = spec.coord_count();
      double w = std::pow(1.0 / static_cast<double>(resolution), d);
      std::vector<double> theta(d, 0.0);
      std::function<void(int)> sweep = [&](int axis) {
        if (axis == d) {
          nodes.push_back({Irrep(spec, theta), w});
          return;
        }
        for (long j = 0; j < resolution; ++j) {
          theta[axis] = kTwoPi * (static_cast<double>(j) + 0.5) /
                        static_cast<double>(resolution);
          sweep(axis + 1);
        }
      };
      sweep(0);
      break;
    }
    case GroupFamily::KleinBottle: {
      // Midpoint rule against the density d alpha d beta / (4 pi^2) on
      // (0, pi) x [0, 2 pi); every node carries a 2-dimensional irrep.
      double w = 1.0 / (2.0 * static_cast<double>(resolution) *
                        static_cast<double>(resolution));
      for (long i = 0; i < resolution; ++i) {
        double alpha = kPi * (static_cast<double>(i) + 0.5) /
                       static_cast<double>(resolution);
        for (long j = 0; j < resolution; ++j) {
          double beta = kTwoPi * (static_cast<double>(j) + 0.5) /
                        static_cast<double>(resolution);
          nodes.push_back({Irrep(spec, {alpha, beta}), w});
        }
      }
      break;
    }
  }
  return DualGrid(spec, resolution, std::move(nodes));
}

double DualGrid::total_mass() const {
  double m = 0;
  for (const auto& n : nodes_) m += n.weight;
  return m;
}

double DualGrid::dimension_mass() const {
  double m = 0;
  for (const auto& n : nodes_) m += n.weight * n.irrep.dim();
  return m;
}

long DualGrid::exact_support_radius() const {
  if (spec_.is_finite()) return std::numeric_limits<long>::max();
  return (resolution_ - 1) / 2;
}

void DualGrid::write_manifest(std::ostream& os) const {
  os << "dual-grid family=" << spec_.describe() << " resolution=" << resolution_
     << " nodes=" << nodes_.size() << "\n";
  char buf[128];
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    os << "node " << i << " params=";
    const auto& p = nodes_[i].irrep.params();
    for (std::size_t j = 0; j < p.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", p[j]);
      os << (j ? "," : "") << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", nodes_[i].weight);
    os << " dim=" << nodes_[i].irrep.dim() << " weight=" << buf << "\n";
  }
}

void GroupFunction::set(const GroupElement& s, Complex z) {
  require(s.spec() == spec_, "group function entry from a different group");
  if (z == Complex(0, 0))
    entries_.erase(s);
  else
    entries_[s] = z;
}

void GroupFunction::add(const GroupElement& s, Complex z) { set(s, at(s) + z); }

Complex GroupFunction::at(const GroupElement& s) const {
  auto it = entries_.find(s);
  return it == entries_.end() ? Complex(0, 0) : it->second;
}

std::vector<GroupElement> GroupFunction::support() const {
  std::vector<GroupElement> out;
  out.reserve(entries_.size());
  for (const auto& [g, z] : entries_) out.push_back(g);
  return out;
}

double GroupFunction::l2_norm_sq() const {
  double n = 0;
  for (const auto& [g, z] : entries_) n += std::norm(z);
  return n;
}

std::vector<CMatrix> evaluate_irrep(const Irrep& irrep,
                                    const std::vector<GroupElement>& elems) {
  std::vector<CMatrix> out;
  out.reserve(elems.size());
  for (const auto& g : elems) out.push_back(irrep(g));
  return out;
}

DualField fourier(const GroupFunction& f, const DualGrid& grid) {
  require(f.spec() == grid.spec(), "function and dual grid belong to different groups");
  DualField out;
  out.values.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Irrep& irrep = grid.node(i).irrep;
    CMatrix acc = CMatrix::Zero(irrep.dim(), irrep.dim());
    for (const auto& [g, z] : f.entries()) acc += z * irrep(g);
    out.values.push_back(std::move(acc));
  }
  return out;
}

GroupFunction inverse_fourier(const DualField& field, const DualGrid& grid,
                              const std::vector<GroupElement>& support) {
  require(field.values.size() == grid.size(), "dual field does not match the grid");
  GroupFunction f(grid.spec());
  for (const auto& s : support) {
    Complex acc = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const DualNode& node = grid.node(i);
      acc += node.weight * (node.irrep(s).adjoint() * field.values[i]).trace();
    }
    f.set(s, acc);
  }
  return f;
}

double parseval_defect(const GroupFunction& f1, const GroupFunction& f2,
                       const DualGrid& grid) {
  Complex lhs = 0;
  for (const auto& [g, z] : f1.entries()) lhs += std::conj(z) * f2.at(g);
  DualField F1 = fourier(f1, grid), F2 = fourier(f2, grid);
  Complex rhs = 0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    rhs += grid.node(i).weight * (F1.values[i].adjoint() * F2.values[i]).trace();
  return std::abs(lhs - rhs);
}

double regular_rep_defect(const GroupFunction& f, const GroupElement& s,
                          const DualGrid& grid) {
  // (L_s^* f)(r) = f(s r)
  GroupFunction shifted(f.spec());
  for (const auto& [g, z] : f.entries())
    shifted.set(multiply(inverse(s), g), z);  // r = s^-1 g  <=>  g = s r
  DualField lhs = fourier(shifted, grid);
  DualField rhs = fourier(f, grid);
  GroupElement sinv = inverse(s);
  double defect = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CMatrix diff = lhs.values[i] - grid.node(i).irrep(sinv) * rhs.values[i];
    defect = std::max(defect, diff.cwiseAbs().maxCoeff());
  }
  return defect;
}

}  // namespace blochdeck
