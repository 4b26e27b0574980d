#ifndef BLOCHDECK_GROUP_HPP
#define BLOCHDECK_GROUP_HPP

#include <compare>
#include <string>
#include <vector>

#include "blochdeck/common.hpp"

namespace blochdeck {

// Supported deck-transformation groups. Each family has an abelian normal
// subgroup of finite index (the whole group, or <a, b^2> of index 2 for the
// Klein-bottle group), which is what makes its harmonic analysis explicit.
enum class GroupFamily { FiniteCyclic, FiniteProduct, FreeAbelian, KleinBottle };

class GroupElement;

class GroupSpec {
 public:
  static GroupSpec finite_cyclic(long n);
  static GroupSpec finite_product(std::vector<long> orders);
  static GroupSpec free_abelian(int rank);  // 1 <= rank <= 3
  static GroupSpec klein_bottle();          // <a,b | b a b^-1 = a^-1>

  GroupFamily family() const { return family_; }
  const std::vector<long>& params() const { return params_; }
  int coord_count() const;
  bool is_finite() const;
  long order() const;  // |Gamma|; 0 when infinite
  std::string describe() const;

  GroupElement identity() const;
  // Canonicalizes the given coordinates (residues reduced for finite axes).
  GroupElement element(std::vector<long> coords) const;

  friend bool operator==(const GroupSpec& a, const GroupSpec& b) {
    return a.family_ == b.family_ && a.params_ == b.params_;
  }
  friend auto operator<=>(const GroupSpec& a, const GroupSpec& b) = default;

 private:
  GroupSpec(GroupFamily f, std::vector<long> p) : family_(f), params_(std::move(p)) {}
  GroupFamily family_;
  std::vector<long> params_;
};

// Element in canonical coordinates:
//   FiniteCyclic(n)     residue in [0, n)
//   FiniteProduct       residue per axis
//   FreeAbelian(d)      integer vector
//   KleinBottle         (m, n) meaning a^m b^n, with
//                       (m1,n1)*(m2,n2) = (m1 + (-1)^{n1} m2, n1 + n2)
class GroupElement {
 public:
  GroupElement(GroupSpec spec, std::vector<long> coords);

  const GroupSpec& spec() const { return spec_; }
  const std::vector<long>& coords() const { return coords_; }
  bool is_identity() const;
  std::string to_string() const;

  friend bool operator==(const GroupElement& a, const GroupElement& b) {
    return a.spec_ == b.spec_ && a.coords_ == b.coords_;
  }
  friend auto operator<=>(const GroupElement& a, const GroupElement& b) = default;

 private:
  GroupSpec spec_;
  std::vector<long> coords_;
};

GroupElement multiply(const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupElement& a);

// Max-norm of the canonical word coordinates; finite axes use the cyclic
// distance min(k, n-k).
long word_norm(const GroupElement& a);

// All elements with word-coordinate max-norm <= radius, deduplicated, in a
// deterministic (norm, then lexicographic) order. Returns the whole group
// once radius reaches the diameter of a finite family.
std::vector<GroupElement> enumerate_ball(const GroupSpec& spec, long radius);

// Same elements grouped by word norm: shells[r] holds norm-r elements.
std::vector<std::vector<GroupElement>> enumerate_shells(const GroupSpec& spec,
                                                        long radius);

// Left action on the continuum model space of each family:
//   FiniteCyclic(n): rotation y -> y + k L on the circle of circumference nL
//   FreeAbelian(1):  y -> y + n L on the real line
//   FreeAbelian(2):  translations of the plane by L * (n1, n2)
//   KleinBottle:     a.(x,y) = (x+1, y), b.(x,y) = (-x, y+1), unit cell
class GroupAction {
 public:
  GroupAction(GroupSpec spec, double cell_length);

  const GroupSpec& spec() const { return spec_; }
  double cell_length() const { return cell_length_; }
  int dim() const;

  std::vector<double> act(const GroupElement& s, std::vector<double> pt) const;

 private:
  GroupSpec spec_;
  double cell_length_;
};

}  // namespace blochdeck

#endif
