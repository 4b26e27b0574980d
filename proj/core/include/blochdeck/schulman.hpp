#ifndef BLOCHDECK_SCHULMAN_HPP
#define BLOCHDECK_SCHULMAN_HPP

#include <utility>

#include "blochdeck/bloch.hpp"
#include "blochdeck/operators.hpp"

namespace blochdeck {

struct ImageSumResult {
  CMatrix value;        // d x d twisted kernel block at (x, y)
  double tail = 0;      // max block norm of the last computed shell
  long radius_used = 0; // shells actually summed
};

// Group-weighted image sum
//   K^L(x, y) = sum_{|s| <= ball} L(s) K(s^-1 . x, y),
// for fundamental-domain nodes x, y, with shells accumulated in word-norm
// order. Summation stops early once a full shell's max block norm falls
// below tail_epsilon times the partial sum norm; the achieved radius and the
// last shell norm are reported. Pure real-time kernels are rejected on
// infinite groups (regularize through complex time or smeared pairings).
ImageSumResult image_sum(const InvariantKernel& K, const CoveringGraph& g,
                         const Irrep& irrep, long x, long y, long ball_radius,
                         double tail_epsilon = 1e-12);

// Reusable image summation over many (x, y) pairs: shells, their translated
// copy indices and the irrep matrices are evaluated once per construction.
class ImageSummer {
 public:
  ImageSummer(const InvariantKernel& K, const CoveringGraph& g, Irrep irrep,
              long ball_radius, double tail_epsilon = 1e-12);
  ImageSumResult at(long x, long y) const;

 private:
  const InvariantKernel* kernel_;
  const CoveringGraph* graph_;
  Irrep irrep_;
  double tail_epsilon_;
  std::vector<std::vector<CMatrix>> shell_matrices_;   // per shell, per element
  std::vector<std::vector<double>> shell_matrix_norms_;
  std::vector<std::vector<long>> shell_copy_index_;    // copy index of s^-1
};

// Trace reconstruction of the invariant kernel from the twisted family:
//   K(s^-1 . x, y) = sum_nodes weight Tr[L(s)^* K^L(x, y)].
Complex reconstruct_invariant(const std::vector<EquivariantKernel>& family,
                              const DualGrid& grid, const GroupElement& s,
                              long x, long y);

// Smeared pairing F_t(s) = <L_s^* phi1, K phi2> over the requested ball;
// translates that leave the window drop (zero-fill). Satisfies the Bessel
// bound sum_s |F_t(s)|^2 <= ||phi1||^2 ||phi2||^2 whenever the translates of
// supp phi1 are disjoint (see split_by_copy).
GroupFunction smeared_F(const InvariantKernel& K, const CoveringGraph& g,
                        const CoveringFunction& phi1, const CoveringFunction& phi2,
                        long ball_radius);

// Smeared pairing G_t(L) = sum_{x,y} mu mu Phi[phi1](L)(x)^* K^L(x,y)
// Phi[phi2](L)(y), one bounded matrix per dual node.
DualField smeared_G(const std::vector<EquivariantKernel>& family,
                    const CoveringGraph& g, const DualGrid& grid,
                    const CoveringFunction& phi1, const CoveringFunction& phi2);

// Splits a covering function into per-copy pieces; each piece satisfies
// supp phi and supp L_s^* phi disjoint for all s != e.
std::vector<CoveringFunction> split_by_copy(const CoveringGraph& g,
                                            const CoveringFunction& phi);

// A test pair together with both smeared pairings: F_t on the ball and
// G_t per dual node. The two are each other's Fourier transforms up to
// window and ball truncation, which roundtrip_defect quantifies.
struct SmearedPairing {
  CoveringFunction phi1, phi2;
  GroupFunction F;
  DualField G;
};

SmearedPairing make_smeared_pairing(const InvariantKernel& K,
                                    const std::vector<EquivariantKernel>& family,
                                    const CoveringGraph& g, const DualGrid& grid,
                                    const CoveringFunction& phi1,
                                    const CoveringFunction& phi2, long ball_radius);

// (l2-over-ball defect of F - Finv[G], max-node HS defect of G - F[F]).
std::pair<double, double> roundtrip_defect(
    const InvariantKernel& K, const std::vector<EquivariantKernel>& family,
    const CoveringGraph& g, const DualGrid& grid, const CoveringFunction& phi1,
    const CoveringFunction& phi2, long ball_radius);

// Equivariant extension of a twisted kernel block to a window row vertex:
// K^L(act(s, x), y) = L(s) K^L(x, y).
CMatrix equivariant_extension_block(const CoveringGraph& g,
                                    const EquivariantKernel& K, VertexId u,
                                    long y);

}  // namespace blochdeck

#endif
