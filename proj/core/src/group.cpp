#include "blochdeck/group.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace blochdeck {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::vector<long> canonicalize(const GroupSpec& spec, std::vector<long> coords) {
  require(static_cast<int>(coords.size()) == spec.coord_count(),
          "group element coordinate count does not match the group");
  switch (spec.family()) {
    case GroupFamily::FiniteCyclic:
      coords[0] = floor_mod(coords[0], spec.params()[0]);
      break;
    case GroupFamily::FiniteProduct:
      for (std::size_t i = 0; i < coords.size(); ++i)
        coords[i] = floor_mod(coords[i], spec.params()[i]);
      break;
    case GroupFamily::FreeAbelian:
    case GroupFamily::KleinBottle:
      break;
  }
  return coords;
}

void require_same_group(const GroupElement& a, const GroupElement& b) {
  if (!(a.spec() == b.spec()))
    throw std::invalid_argument("mixed-group arithmetic: elements belong to different groups");
}

}  // namespace

GroupSpec GroupSpec::finite_cyclic(long n) {
  require(n >= 1, "FiniteCyclic requires n >= 1");
  return GroupSpec(GroupFamily::FiniteCyclic, {n});
}

GroupSpec GroupSpec::finite_product(std::vector<long> orders) {
  require(!orders.empty(), "FiniteProduct requires at least one factor");
  for (long n : orders) require(n >= 1, "FiniteProduct factors require n >= 1");
  return GroupSpec(GroupFamily::FiniteProduct, std::move(orders));
}

GroupSpec GroupSpec::free_abelian(int rank) {
  require(rank >= 1 && rank <= 3, "FreeAbelian requires 1 <= rank <= 3");
  return GroupSpec(GroupFamily::FreeAbelian, {rank});
}

GroupSpec GroupSpec::klein_bottle() {
  return GroupSpec(GroupFamily::KleinBottle, {});
}

int GroupSpec::coord_count() const {
  switch (family_) {
    case GroupFamily::FiniteCyclic: return 1;
    case GroupFamily::FiniteProduct: return static_cast<int>(params_.size());
    case GroupFamily::FreeAbelian: return static_cast<int>(params_[0]);
    case GroupFamily::KleinBottle: return 2;
  }
  return 0;
}

bool GroupSpec::is_finite() const {
  return family_ == GroupFamily::FiniteCyclic || family_ == GroupFamily::FiniteProduct;
}

long GroupSpec::order() const {
  if (!is_finite()) return 0;
  long n = 1;
  for (long p : params_) n *= p;
  return n;
}

std::string GroupSpec::describe() const {
  switch (family_) {
    case GroupFamily::FiniteCyclic: return "Z_" + std::to_string(params_[0]);
    case GroupFamily::FiniteProduct: {
      std::string s;
      for (long p : params_) s += (s.empty() ? "Z_" : " x Z_") + std::to_string(p);
      return s;
    }
    case GroupFamily::FreeAbelian: return "Z^" + std::to_string(params_[0]);
    case GroupFamily::KleinBottle: return "KleinBottle";
  }
  return "?";
}

GroupElement GroupSpec::identity() const {
  return GroupElement(*this, std::vector<long>(coord_count(), 0));
}

GroupElement GroupSpec::element(std::vector<long> coords) const {
  return GroupElement(*this, std::move(coords));
}

GroupElement::GroupElement(GroupSpec spec, std::vector<long> coords)
    : spec_(std::move(spec)), coords_(canonicalize(spec_, std::move(coords))) {}

bool GroupElement::is_identity() const {
  return std::all_of(coords_.begin(), coords_.end(), [](long c) { return c == 0; });
}

std::string GroupElement::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(coords_[i]);
  }
  return s + ")";
}

GroupElement multiply(const GroupElement& a, const GroupElement& b) {
  require_same_group(a, b);
  const GroupSpec& spec = a.spec();
  std::vector<long> c(a.coords().size());
  if (spec.family() == GroupFamily::KleinBottle) {
    // a^{m1} b^{n1} a^{m2} b^{n2} = a^{m1 + (-1)^{n1} m2} b^{n1 + n2}
    long sign = (floor_mod(a.coords()[1], 2) == 0) ? 1 : -1;
    c[0] = a.coords()[0] + sign * b.coords()[0];
    c[1] = a.coords()[1] + b.coords()[1];
  } else {
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coords()[i] + b.coords()[i];
  }
  return GroupElement(spec, std::move(c));
}

GroupElement inverse(const GroupElement& a) {
  const GroupSpec& spec = a.spec();
  std::vector<long> c(a.coords().size());
  if (spec.family() == GroupFamily::KleinBottle) {
    long sign = (floor_mod(a.coords()[1], 2) == 0) ? 1 : -1;
    c[0] = -sign * a.coords()[0];
    c[1] = -a.coords()[1];
  } else {
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = -a.coords()[i];
  }
  return GroupElement(spec, std::move(c));
}

long word_norm(const GroupElement& a) {
  const GroupSpec& spec = a.spec();
  long norm = 0;
  for (std::size_t i = 0; i < a.coords().size(); ++i) {
    long k = a.coords()[i];
    long axis;
    if (spec.family() == GroupFamily::FiniteCyclic ||
        spec.family() == GroupFamily::FiniteProduct) {
      long n = spec.params()[i];
      axis = std::min(k, n - k);  // k is canonical in [0, n)
    } else {
      axis = std::labs(k);
    }
    norm = std::max(norm, axis);
  }
  return norm;
}

std::vector<GroupElement> enumerate_ball(const GroupSpec& spec, long radius) {
  require(radius >= 0, "enumerate_ball requires radius >= 0");
  int d = spec.coord_count();
  std::set<std::vector<long>> seen;
  std::vector<long> cur(d, 0);
  // Cartesian sweep of [-radius, radius]^d in canonical form.
  std::function<void(int)> sweep = [&](int axis) {
    if (axis == d) {
      seen.insert(canonicalize(spec, cur));
      return;
    }
    for (long k = -radius; k <= radius; ++k) {
      cur[axis] = k;
      sweep(axis + 1);
    }
  };
  sweep(0);
  std::vector<GroupElement> out;
  out.reserve(seen.size());
  for (const auto& c : seen) out.emplace_back(spec, c);
  std::sort(out.begin(), out.end(), [](const GroupElement& x, const GroupElement& y) {
    long nx = word_norm(x), ny = word_norm(y);
    if (nx != ny) return nx < ny;
    return x.coords() < y.coords();
  });
  return out;
}

std::vector<std::vector<GroupElement>> enumerate_shells(const GroupSpec& spec,
                                                        long radius) {
  std::vector<std::vector<GroupElement>> shells(radius + 1);
  for (const auto& g : enumerate_ball(spec, radius))
    shells[word_norm(g)].push_back(g);
  return shells;
}

GroupAction::GroupAction(GroupSpec spec, double cell_length)
    : spec_(std::move(spec)), cell_length_(cell_length) {
  require(cell_length_ > 0, "GroupAction requires a positive cell length");
  if (spec_.family() == GroupFamily::KleinBottle)
    require(cell_length_ == 1.0, "the Klein-bottle action is defined on a unit cell");
}

int GroupAction::dim() const {
  switch (spec_.family()) {
    case GroupFamily::FiniteCyclic: return 1;
    case GroupFamily::FreeAbelian: return spec_.params()[0] <= 2 ? static_cast<int>(spec_.params()[0]) : 0;
    case GroupFamily::KleinBottle: return 2;
    case GroupFamily::FiniteProduct: return 0;
  }
  return 0;
}

std::vector<double> GroupAction::act(const GroupElement& s, std::vector<double> pt) const {
  if (!(s.spec() == spec_))
    throw std::invalid_argument("mixed-group arithmetic: element does not belong to the action's group");
  if (dim() == 0)
    throw std::invalid_argument("no continuum action is defined for " + spec_.describe());
  require(static_cast<int>(pt.size()) == dim(), "point dimension mismatch");
  switch (spec_.family()) {
    case GroupFamily::FiniteCyclic: {
      double circ = cell_length_ * static_cast<double>(spec_.params()[0]);
      double y = pt[0] + cell_length_ * static_cast<double>(s.coords()[0]);
      pt[0] = y - circ * std::floor(y / circ);
      break;
    }
    case GroupFamily::FreeAbelian:
      for (std::size_t i = 0; i < pt.size(); ++i)
        pt[i] += cell_length_ * static_cast<double>(s.coords()[i]);
      break;
    case GroupFamily::KleinBottle: {
      // (p,q).(x,y) = ((-1)^q x + p, y + q)
      long p = s.coords()[0], q = s.coords()[1];
      double sign = (floor_mod(q, 2) == 0) ? 1.0 : -1.0;
      pt = {sign * pt[0] + static_cast<double>(p), pt[1] + static_cast<double>(q)};
      break;
    }
    case GroupFamily::FiniteProduct:
      break;  // unreachable, dim() == 0
  }
  return pt;
}

}  // namespace blochdeck
