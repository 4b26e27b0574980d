#ifndef BLOCHDECK_HARMONIC_HPP
#define BLOCHDECK_HARMONIC_HPP

#include <iosfwd>
#include <map>
#include <vector>

#include "blochdeck/common.hpp"
#include "blochdeck/group.hpp"

namespace blochdeck {

// A point of the unitary dual, realized as a matrix-valued homomorphism.
//
// Dual parameters per family:
//   FiniteCyclic(n)   k in {0..n-1},         L(m) = exp(2 pi i k m / n)
//   FiniteProduct     k_i per axis,          L(m) = exp(2 pi i sum k_i m_i / n_i)
//   FreeAbelian(d)    theta in [0,2pi)^d,    L(m) = exp(i theta . m)
//   KleinBottle       (alpha,beta), alpha in (0,pi), beta in [0,2pi), with
//                     L(a) = diag(e^{i alpha}, e^{-i alpha}),
//                     L(b) = [[0, e^{i beta}], [1, 0]]   (2-dimensional)
class Irrep {
 public:
  Irrep(GroupSpec spec, std::vector<double> params);

  const GroupSpec& spec() const { return spec_; }
  const std::vector<double>& params() const { return params_; }
  int dim() const { return dim_; }
  std::string to_string() const;

  // Evaluates the representation matrix, always unitary dim() x dim().
  CMatrix operator()(const GroupElement& s) const;

  friend bool operator==(const Irrep& a, const Irrep& b) {
    return a.spec_ == b.spec_ && a.params_ == b.params_;
  }

 private:
  GroupSpec spec_;
  std::vector<double> params_;
  int dim_;
};

// Constructs the irrep at the given dual point; validates the parameters.
// KleinBottle with alpha in {0, pi} names a Plancherel-null boundary family
// of 1-dimensional representations and is rejected with a domain error.
Irrep irrep_at(const GroupSpec& spec, std::vector<double> params);

struct DualNode {
  Irrep irrep;
  double weight;  // Plancherel quadrature weight
};

// Quadrature model of the dual space with Plancherel weights.
//   finite groups    all irrep classes, weight d_L / |Gamma| (exact)
//   FreeAbelian(d)   midpoint grid of M^d points, weight M^{-d}
//   KleinBottle      midpoint grid on (0,pi) x [0,2pi), M^2 points of
//                    weight 1/(2 M^2)  (density  d alpha d beta / (4 pi^2))
class DualGrid {
 public:
  static DualGrid build(const GroupSpec& spec, long resolution);

  const GroupSpec& spec() const { return spec_; }
  long resolution() const { return resolution_; }
  std::size_t size() const { return nodes_.size(); }
  const DualNode& node(std::size_t i) const { return nodes_.at(i); }
  const std::vector<DualNode>& nodes() const { return nodes_; }

  double total_mass() const;      // sum of weights, the quadrature m(dual)
  double dimension_mass() const;  // sum of d_L * weight, targets 1 exactly

  // Largest word-norm support radius for which transforms and Parseval are
  // exact on this grid (band-limited duality). Unbounded for finite groups.
  long exact_support_radius() const;

  // Structured text manifest: family, resolution, node parameters, weights.
  void write_manifest(std::ostream& os) const;

 private:
  DualGrid(GroupSpec spec, long resolution, std::vector<DualNode> nodes)
      : spec_(std::move(spec)), resolution_(resolution), nodes_(std::move(nodes)) {}
  GroupSpec spec_;
  long resolution_;
  std::vector<DualNode> nodes_;
};

// Finitely supported complex function on the group.
class GroupFunction {
 public:
  explicit GroupFunction(GroupSpec spec) : spec_(std::move(spec)) {}

  const GroupSpec& spec() const { return spec_; }
  void set(const GroupElement& s, Complex z);
  void add(const GroupElement& s, Complex z);
  Complex at(const GroupElement& s) const;  // 0 off the support
  const std::map<GroupElement, Complex>& entries() const { return entries_; }
  std::vector<GroupElement> support() const;
  double l2_norm_sq() const;

 private:
  GroupSpec spec_;
  std::map<GroupElement, Complex> entries_;
};

// One matrix per dual-grid node, shaped d_L x d_L.
struct DualField {
  std::vector<CMatrix> values;
};

std::vector<CMatrix> evaluate_irrep(const Irrep& irrep,
                                    const std::vector<GroupElement>& elems);

// F[f](L) = sum_s f(s) L(s) at every grid node.
DualField fourier(const GroupFunction& f, const DualGrid& grid);

// f(s) = sum_nodes weight * Tr[L(s)^* F(L)] on the requested support.
GroupFunction inverse_fourier(const DualField& field, const DualGrid& grid,
                              const std::vector<GroupElement>& support);

// | sum_s conj(f1) f2 - sum_nodes weight Tr[F1^* F2] |
double parseval_defect(const GroupFunction& f1, const GroupFunction& f2,
                       const DualGrid& grid);

// Max-node max-entry norm of F[L_s^* f](L) - L(s^-1) F[f](L), where
// (L_s^* f)(r) = f(s r).
double regular_rep_defect(const GroupFunction& f, const GroupElement& s,
                          const DualGrid& grid);

}  // namespace blochdeck

#endif
