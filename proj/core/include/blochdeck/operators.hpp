#ifndef BLOCHDECK_OPERATORS_HPP
#define BLOCHDECK_OPERATORS_HPP

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/SparseCore>

#include "blochdeck/covering.hpp"

namespace blochdeck {

// H = -Delta + V on the covering window: graph Laplacian with the edge
// weights plus a Gamma-invariant potential given by its values on D.
// Real symmetric; the Laplacian part is positive semidefinite.
class InvariantHamiltonian {
 public:
  InvariantHamiltonian(const CoveringGraph& graph, RMatrix dense,
                       Eigen::SparseMatrix<double> sparse,
                       std::vector<double> potential);

  const CoveringGraph& graph() const { return *graph_; }
  const RMatrix& matrix() const { return dense_; }
  const Eigen::SparseMatrix<double>& sparse() const { return sparse_; }
  const std::vector<double>& potential() const { return potential_; }

 private:
  const CoveringGraph* graph_;
  RMatrix dense_;
  Eigen::SparseMatrix<double> sparse_;
  std::vector<double> potential_;
};

// H_Lambda acting on Lambda-equivariant sections stored on D, as a Hermitian
// (|D| d) x (|D| d) block matrix: an edge that leaves D through the group
// element s couples with the block -w L(s).
class TwistedHamiltonian {
 public:
  TwistedHamiltonian(const CoveringGraph& graph, Irrep irrep, CMatrix dense);

  const CoveringGraph& graph() const { return *graph_; }
  const Irrep& irrep() const { return irrep_; }
  const CMatrix& matrix() const { return dense_; }
  int block_dim() const { return irrep_.dim(); }

 private:
  const CoveringGraph* graph_;
  Irrep irrep_;
  CMatrix dense_;
};

InvariantHamiltonian assemble_invariant(const CoveringGraph& g,
                                        std::vector<double> potential);

// domain_shift moves the fundamental domain to the copy of that element; the
// spectrum is independent of the choice and the matrix conjugates by
// 1 (x) L(shift).
TwistedHamiltonian assemble_twisted(const CoveringGraph& g,
                                    const std::vector<double>& potential,
                                    const Irrep& irrep);
TwistedHamiltonian assemble_twisted(const CoveringGraph& g,
                                    const std::vector<double>& potential,
                                    const Irrep& irrep,
                                    const GroupElement& domain_shift);

enum class KernelKind { Heat, Unitary, ComplexTime };

// Scalar kernel of exp(-zH) on the covering, in measure-normalized kernel
// semantics: (K f)(u) = sum_v mu(v) K(u,v) f(v), i.e. K = matexp / mu.
// Either the full matrix or a restricted set of columns is stored.
class InvariantKernel {
 public:
  KernelKind kind() const { return kind_; }
  Complex exponent() const { return z_; }  // z in exp(-zH)
  double time() const { return time_; }    // tau (heat) or t (unitary)
  bool full() const { return columns_.empty(); }

  Complex at(VertexId u, VertexId v) const;
  bool has_column(VertexId v) const;

  // Operator application sum_v mu K(u,v) f(v); full kernels only.
  CVector apply(const CVector& f) const;

  const CMatrix& raw() const { return values_; }
  const std::vector<VertexId>& columns() const { return columns_; }

  static InvariantKernel full_kernel(CMatrix values, KernelKind kind, Complex z,
                                     double time, double mu);
  static InvariantKernel column_kernel(CMatrix values, std::vector<VertexId> cols,
                                       KernelKind kind, Complex z, double time,
                                       double mu);

 private:
  CMatrix values_;  // |V| x |V| or |V| x |cols|
  std::vector<VertexId> columns_;
  std::vector<long> column_index_;
  KernelKind kind_ = KernelKind::Heat;
  Complex z_ = 0.0;
  double time_ = 0.0;
  double mu_ = 1.0;
};

// Operator-valued kernel of exp(-z H_Lambda) on D x D with d x d blocks,
// measure-normalized like the scalar kernel.
class EquivariantKernel {
 public:
  EquivariantKernel(const Irrep& irrep, CMatrix values, KernelKind kind,
                    Complex z, double time, double mu, long base_count);

  const Irrep& irrep() const { return irrep_; }
  KernelKind kind() const { return kind_; }
  Complex exponent() const { return z_; }
  double time() const { return time_; }
  long base_count() const { return base_count_; }

  Eigen::Block<const CMatrix> block(long x, long y) const {
    int d = irrep_.dim();
    return values_.block(x * d, y * d, d, d);
  }
  const CMatrix& raw() const { return values_; }
  double mu() const { return mu_; }

 private:
  Irrep irrep_;
  CMatrix values_;
  KernelKind kind_;
  Complex z_;
  double time_;
  double mu_;
  long base_count_;
};

// Spectral synthesis by dense Hermitian eigendecomposition. tau >= 0.
InvariantKernel heat_kernel(const InvariantHamiltonian& H, double tau);
EquivariantKernel heat_kernel(const TwistedHamiltonian& H, double tau);

// exp(-i t H), unitary in the measure-weighted inner product. On infinite
// groups a pure real-time kernel is refused; pass epsilon > 0 to regularize
// through complex time t - i epsilon (the kernel is then exp(-(epsilon+it)H)).
InvariantKernel propagator(const InvariantHamiltonian& H, double t,
                           double epsilon = 0.0);
EquivariantKernel propagator(const TwistedHamiltonian& H, double t,
                             double epsilon = 0.0);

// Selected columns of the heat kernel through a Chebyshev expansion of
// exp(-tau x) on the Gershgorin interval of H, using sparse products only.
// Complements the dense route when only K(., y) for y in a small set is
// needed on large windows; accuracy is near machine precision.
InvariantKernel heat_kernel_columns(const InvariantHamiltonian& H, double tau,
                                    std::vector<VertexId> cols);

// (4 pi tau)^{-d/2} exp(-|x-y|^2 / (4 tau)), d in {1, 2}.
double continuum_free_heat_kernel(const std::vector<double>& x,
                                  const std::vector<double>& y, double tau);

RVector spectrum(const InvariantHamiltonian& H);
RVector spectrum(const TwistedHamiltonian& H);

// Family helpers over a dual grid (one twisted operator/kernel per node).
std::vector<TwistedHamiltonian> assemble_twisted_family(
    const CoveringGraph& g, const std::vector<double>& potential,
    const DualGrid& grid, int threads = 1);
std::vector<EquivariantKernel> heat_kernel_family(
    const std::vector<TwistedHamiltonian>& family, double tau, int threads = 1);

void write_kernel_csv(std::ostream& os, const InvariantKernel& K);
void write_spectrum_csv(std::ostream& os, const RVector& eigenvalues);

}  // namespace blochdeck

#endif
