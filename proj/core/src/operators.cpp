#include "blochdeck/operators.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include <Eigen/Eigenvalues>

namespace blochdeck {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_potential(const CoveringGraph& g, const std::vector<double>& potential) {
  require(static_cast<long>(potential.size()) == g.base_count(),
          "potential must be given on the fundamental domain nodes");
  for (double v : potential)
    if (!std::isfinite(v))
      throw std::invalid_argument("potential values must be finite reals");
}

Complex synth_factor(Complex z, double lambda) {
  return std::exp(-z * lambda);
}

}  // namespace

InvariantHamiltonian::InvariantHamiltonian(const CoveringGraph& graph, RMatrix dense,
                                           Eigen::SparseMatrix<double> sparse,
                                           std::vector<double> potential)
    : graph_(&graph), dense_(std::move(dense)), sparse_(std::move(sparse)),
      potential_(std::move(potential)) {}

TwistedHamiltonian::TwistedHamiltonian(const CoveringGraph& graph, Irrep irrep,
                                       CMatrix dense)
    : graph_(&graph), irrep_(std::move(irrep)), dense_(std::move(dense)) {}

InvariantHamiltonian assemble_invariant(const CoveringGraph& g,
                                        std::vector<double> potential) {
  check_potential(g, potential);
  long n = g.vertex_count();
  RMatrix H = RMatrix::Zero(n, n);
  for (const Edge& e : g.edges()) {
    H(e.u, e.u) += e.weight;
    H(e.v, e.v) += e.weight;
    H(e.u, e.v) -= e.weight;
    H(e.v, e.u) -= e.weight;
  }
  for (VertexId v = 0; v < n; ++v) H(v, v) += potential[g.base_of(v)];

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * g.edges().size() + n);
  for (const Edge& e : g.edges()) {
    trip.emplace_back(e.u, e.u, e.weight);
    trip.emplace_back(e.v, e.v, e.weight);
    trip.emplace_back(e.u, e.v, -e.weight);
    trip.emplace_back(e.v, e.u, -e.weight);
  }
  for (VertexId v = 0; v < n; ++v)
    trip.emplace_back(v, v, potential[g.base_of(v)]);
  Eigen::SparseMatrix<double> S(n, n);
  S.setFromTriplets(trip.begin(), trip.end());

  return InvariantHamiltonian(g, std::move(H), std::move(S), std::move(potential));
}

TwistedHamiltonian assemble_twisted(const CoveringGraph& g,
                                    const std::vector<double>& potential,
                                    const Irrep& irrep) {
  return assemble_twisted(g, potential, irrep, g.group().identity());
}

TwistedHamiltonian assemble_twisted(const CoveringGraph& g,
                                    const std::vector<double>& potential,
                                    const Irrep& irrep,
                                    const GroupElement& domain_shift) {
  check_potential(g, potential);
  require(irrep.spec() == g.group(), "irrep belongs to a different group");
  auto base_copy = g.window_index(domain_shift);
  require(base_copy.has_value(), "domain shift must lie in the copy window");

  int d = irrep.dim();
  long nd = g.base_count() * d;
  CMatrix H = CMatrix::Zero(nd, nd);
  GroupElement shift_inv = inverse(domain_shift);

  // For a directed edge (shift . d_u) -> (s . d_v), the equivariant extension
  // psi(s . y) = L(s) psi(y) gives the coupling block -w L(s shift^{-1}).
  auto couple = [&](long du, long dv, const GroupElement& target_copy, double w) {
    CMatrix block = irrep(multiply(target_copy, shift_inv));
    H.block(du * d, du * d, d, d) += w * CMatrix::Identity(d, d);
    H.block(du * d, dv * d, d, d) -= w * block;
  };
  for (const Edge& e : g.edges()) {
    if (g.copy_index_of(e.u) == *base_copy)
      couple(g.base_of(e.u), g.base_of(e.v), g.copy_of(e.v), e.weight);
    if (g.copy_index_of(e.v) == *base_copy)
      couple(g.base_of(e.v), g.base_of(e.u), g.copy_of(e.u), e.weight);
  }
  for (long b = 0; b < g.base_count(); ++b)
    H.block(b * d, b * d, d, d) +=
        potential[b] * CMatrix::Identity(d, d);

  return TwistedHamiltonian(g, irrep, std::move(H));
}

Complex InvariantKernel::at(VertexId u, VertexId v) const {
  if (full()) return values_(u, v);
  long idx = column_index_.at(v);
  require(idx >= 0, "kernel column not stored for the requested vertex");
  return values_(u, idx);
}

bool InvariantKernel::has_column(VertexId v) const {
  if (full()) return v >= 0 && v < values_.cols();
  return v >= 0 && v < static_cast<VertexId>(column_index_.size()) &&
         column_index_[v] >= 0;
}

CVector InvariantKernel::apply(const CVector& f) const {
  require(full(), "operator application requires the full kernel matrix");
  return mu_ * (values_ * f);
}

InvariantKernel InvariantKernel::full_kernel(CMatrix values, KernelKind kind,
                                             Complex z, double time, double mu) {
  InvariantKernel K;
  K.values_ = std::move(values);
  K.kind_ = kind;
  K.z_ = z;
  K.time_ = time;
  K.mu_ = mu;
  return K;
}

InvariantKernel InvariantKernel::column_kernel(CMatrix values,
                                               std::vector<VertexId> cols,
                                               KernelKind kind, Complex z,
                                               double time, double mu) {
  InvariantKernel K;
  K.values_ = std::move(values);
  K.columns_ = std::move(cols);
  K.kind_ = kind;
  K.z_ = z;
  K.time_ = time;
  K.mu_ = mu;
  K.column_index_.assign(K.values_.rows(), -1);
  for (std::size_t i = 0; i < K.columns_.size(); ++i)
    K.column_index_[K.columns_[i]] = static_cast<long>(i);
  return K;
}

EquivariantKernel::EquivariantKernel(const Irrep& irrep, CMatrix values,
                                     KernelKind kind, Complex z, double time,
                                     double mu, long base_count)
    : irrep_(irrep), values_(std::move(values)), kind_(kind), z_(z), time_(time),
      mu_(mu), base_count_(base_count) {}

namespace {

CMatrix dense_exp_hermitian(const RMatrix& H, Complex z) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(H);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("Hermitian eigendecomposition failed (n=" +
                             std::to_string(H.rows()) + ")");
  CVector phases(H.rows());
  for (long i = 0; i < H.rows(); ++i)
    phases[i] = synth_factor(z, es.eigenvalues()[i]);
  CMatrix U = es.eigenvectors().cast<Complex>();
  return U * phases.asDiagonal() * U.adjoint();
}

CMatrix dense_exp_hermitian(const CMatrix& H, Complex z) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("Hermitian eigendecomposition failed (n=" +
                             std::to_string(H.rows()) + ")");
  CVector phases(H.rows());
  for (long i = 0; i < H.rows(); ++i)
    phases[i] = synth_factor(z, es.eigenvalues()[i]);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

void check_real_time_policy(const CoveringGraph& g, double t, double epsilon) {
  if (!g.group().is_finite() && epsilon == 0.0 && t != 0.0)
    throw std::domain_error(
        "real-time kernels on infinite groups are defined only through complex "
        "time t - i*epsilon; pass epsilon > 0 or use heat_kernel");
}

}  // namespace

InvariantKernel heat_kernel(const InvariantHamiltonian& H, double tau) {
  if (tau < 0) throw std::domain_error("heat_kernel requires tau >= 0");
  double mu = H.graph().node_measure();
  CMatrix K = dense_exp_hermitian(H.matrix(), Complex(tau, 0)) / mu;
  return InvariantKernel::full_kernel(std::move(K), KernelKind::Heat, tau, tau, mu);
}

EquivariantKernel heat_kernel(const TwistedHamiltonian& H, double tau) {
  if (tau < 0) throw std::domain_error("heat_kernel requires tau >= 0");
  double mu = H.graph().node_measure();
  CMatrix K = dense_exp_hermitian(H.matrix(), Complex(tau, 0)) / mu;
  return EquivariantKernel(H.irrep(), std::move(K), KernelKind::Heat, tau, tau, mu,
                           H.graph().base_count());
}

InvariantKernel propagator(const InvariantHamiltonian& H, double t, double epsilon) {
  check_real_time_policy(H.graph(), t, epsilon);
  Complex z(epsilon, t);
  double mu = H.graph().node_measure();
  CMatrix K = dense_exp_hermitian(H.matrix(), z) / mu;
  KernelKind kind = epsilon == 0.0 ? KernelKind::Unitary : KernelKind::ComplexTime;
  return InvariantKernel::full_kernel(std::move(K), kind, z, t, mu);
}

EquivariantKernel propagator(const TwistedHamiltonian& H, double t, double epsilon) {
  check_real_time_policy(H.graph(), t, epsilon);
  Complex z(epsilon, t);
  double mu = H.graph().node_measure();
  CMatrix K = dense_exp_hermitian(H.matrix(), z) / mu;
  KernelKind kind = epsilon == 0.0 ? KernelKind::Unitary : KernelKind::ComplexTime;
  return EquivariantKernel(H.irrep(), std::move(K), kind, z, t, mu,
                           H.graph().base_count());
}

namespace {

// Chebyshev coefficients of exp(-tau x) on [a, b] by Chebyshev-Gauss
// quadrature. The series decays superexponentially past tau (b-a)/2 terms;
// coefficients below the quadrature noise floor (relative to the largest
// function value) are pure rounding noise and get truncated.
std::vector<double> chebyshev_coeffs_exp(double tau, double a, double b) {
  double w = 0.5 * tau * (b - a);
  int need = static_cast<int>(4.0 * (w + 64.0));
  int N = 256;
  while (N < need && N < 8192) N *= 2;
  std::vector<double> fx(N);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double fmax = 0;
  for (int j = 0; j < N; ++j) {
    double theta = std::numbers::pi * (j + 0.5) / N;
    fx[j] = std::exp(-tau * (mid + half * std::cos(theta)));
    fmax = std::max(fmax, std::abs(fx[j]));
  }
  std::vector<double> c(N);
  for (int k = 0; k < N; ++k) {
    double acc = 0;
    for (int j = 0; j < N; ++j)
      acc += fx[j] * std::cos(k * std::numbers::pi * (j + 0.5) / N);
    c[k] = 2.0 * acc / N;
  }
  double floor = 4e-16 * fmax;
  int deg = N - 1;
  while (deg > 1 && std::abs(c[deg]) < floor && std::abs(c[deg - 1]) < floor)
    --deg;
  c.resize(deg + 1);
  return c;
}

}  // namespace

InvariantKernel heat_kernel_columns(const InvariantHamiltonian& H, double tau,
                                    std::vector<VertexId> cols) {
  if (tau < 0) throw std::domain_error("heat_kernel_columns requires tau >= 0");
  const auto& S = H.sparse();
  long n = S.rows();
  for (VertexId v : cols)
    require(v >= 0 && v < n, "requested kernel column out of range");

  // Gershgorin enclosure of the spectrum.
  RVector radius = RVector::Zero(n), diag = RVector::Zero(n);
  for (int k = 0; k < S.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(S, k); it; ++it) {
      if (it.row() == it.col())
        diag[it.row()] = it.value();
      else
        radius[it.row()] += std::abs(it.value());
    }
  double a = (diag - radius).minCoeff(), b = (diag + radius).maxCoeff();
  if (b - a < 1e-12) b = a + 1.0;

  std::vector<double> c = chebyshev_coeffs_exp(tau, a, b);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);

  RMatrix rhs = RMatrix::Zero(n, static_cast<long>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) rhs(cols[i], static_cast<long>(i)) = 1.0;

  // Clenshaw recurrence in the scaled variable (H - mid) / half, with
  // preallocated buffers (the sparse product dominates the cost).
  RMatrix bk1 = RMatrix::Zero(n, rhs.cols()), bk2 = bk1, tmp = bk1;
  for (long k = static_cast<long>(c.size()) - 1; k >= 1; --k) {
    tmp.noalias() = S * bk1;
    tmp = (2.0 / half) * tmp - (2.0 * mid / half) * bk1 - bk2 + c[k] * rhs;
    bk2.swap(bk1);
    bk1.swap(tmp);
  }
  tmp.noalias() = S * bk1;
  RMatrix result =
      (1.0 / half) * tmp - (mid / half) * bk1 - bk2 + 0.5 * c[0] * rhs;

  double mu = H.graph().node_measure();
  CMatrix K = (result / mu).cast<Complex>();
  return InvariantKernel::column_kernel(std::move(K), std::move(cols),
                                        KernelKind::Heat, tau, tau, mu);
}

double continuum_free_heat_kernel(const std::vector<double>& x,
                                  const std::vector<double>& y, double tau) {
  if (tau <= 0) throw std::domain_error("continuum_free_heat_kernel requires tau > 0");
  require(x.size() == y.size() && (x.size() == 1 || x.size() == 2),
          "continuum comparator is defined for d in {1, 2}");
  double d2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
  double dim = static_cast<double>(x.size());
  return std::pow(4.0 * std::numbers::pi * tau, -0.5 * dim) * std::exp(-d2 / (4.0 * tau));
}

RVector spectrum(const InvariantHamiltonian& H) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(H.matrix(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigenvalue computation failed");
  return es.eigenvalues();
}

RVector spectrum(const TwistedHamiltonian& H) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H.matrix(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigenvalue computation failed");
  return es.eigenvalues();
}

std::vector<TwistedHamiltonian> assemble_twisted_family(
    const CoveringGraph& g, const std::vector<double>& potential,
    const DualGrid& grid, int threads) {
  std::vector<std::optional<TwistedHamiltonian>> slots(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    slots[i] = assemble_twisted(g, potential, grid.node(i).irrep);
  });
  std::vector<TwistedHamiltonian> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<EquivariantKernel> heat_kernel_family(
    const std::vector<TwistedHamiltonian>& family, double tau, int threads) {
  std::vector<std::optional<EquivariantKernel>> slots(family.size());
  parallel_for(family.size(), threads, [&](std::size_t i) {
    slots[i] = heat_kernel(family[i], tau);
  });
  std::vector<EquivariantKernel> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

void write_kernel_csv(std::ostream& os, const InvariantKernel& K) {
  os << "row,col,re,im," << (K.kind() == KernelKind::Heat ? "tau" : "t") << "\n";
  char buf[64];
  const auto& V = K.raw();
  for (long i = 0; i < V.rows(); ++i)
    for (long j = 0; j < V.cols(); ++j) {
      VertexId col = K.full() ? j : K.columns()[j];
      os << i << "," << col;
      std::snprintf(buf, sizeof(buf), "%.17g", V(i, j).real());
      os << "," << buf;
      std::snprintf(buf, sizeof(buf), "%.17g", V(i, j).imag());
      os << "," << buf;
      std::snprintf(buf, sizeof(buf), "%.17g", K.time());
      os << "," << buf << "\n";
    }
}

void write_spectrum_csv(std::ostream& os, const RVector& eigenvalues) {
  os << "index,eigenvalue\n";
  char buf[64];
  for (long i = 0; i < eigenvalues.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", eigenvalues[i]);
    os << i << "," << buf << "\n";
  }
}

}  // namespace blochdeck
