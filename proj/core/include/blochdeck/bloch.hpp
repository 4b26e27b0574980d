#ifndef BLOCHDECK_BLOCH_HPP
#define BLOCHDECK_BLOCH_HPP

#include <iosfwd>

#include "blochdeck/covering.hpp"
#include "blochdeck/operators.hpp"

namespace blochdeck {

// Direct-integral image of a covering function: one stacked matrix per dual
// node. Block row y of node_values[i] is the d x d value Phi[f](L_i)(y);
// each of its d columns is a L_i-equivariant section of the fundamental
// domain, so (1 (x) H_L) acts by the twisted Hamiltonian matrix from the left.
struct BlochField {
  std::vector<CMatrix> node_values;  // (|D| * d) x d each
  Flags flags;

  Eigen::Block<const CMatrix> block(std::size_t node, long y, int d) const {
    return node_values[node].block(y * d, 0, d, d);
  }
};

// Orbit section f_y(s) = f(s^-1 . y), supported on {s : s^-1 copy(y) in W}.
// Satisfies the shift law f_{s.y} = L_{s^-1}^* f_y.
GroupFunction orbit_section(const CoveringGraph& g, const CoveringFunction& f,
                            VertexId y);

// Phi[f](L)(y) = F[f_y](L) = sum_{w in W} f(w . y) L(w)^*. Raises the
// band-exceeded flag when the support radius of f exceeds the grid's
// exactness band.
BlochField bloch_transform(const CoveringGraph& g, const DualGrid& grid,
                           const CoveringFunction& f);

// Constructive inverse: f(w . y) = sum_nodes weight Tr[L(w) Phi[f](L)(y)],
// the node-wise inverse Fourier transform of the orbit sections evaluated
// back at the window copies. Exact on the grid's band.
CoveringFunction inverse_bloch(const CoveringGraph& g, const DualGrid& grid,
                               const BlochField& field);

// Direct-integral norm squared: sum_nodes weight * mu * |stack|_F^2.
double field_norm_sq(const CoveringGraph& g, const DualGrid& grid,
                     const BlochField& field);

// Absolute defects together with the inputs' sizes; tolerances belong to the
// caller. input_hash identifies the test input for report records.
struct DefectReport {
  double defect = 0;
  double input_norm = 0;
  std::uint64_t input_hash = 0;
  Flags flags;
};

// | ||Phi f||^2 - ||f||^2 | in the weighted direct-integral norm.
DefectReport unitarity_defect(const CoveringGraph& g, const DualGrid& grid,
                              const CoveringFunction& f);

// Direct-integral norm of Phi[H f] - {(1 (x) H_L) Phi[f]}. The twisted family
// must match the grid node order. f needs a one-copy interior margin.
DefectReport decomposition_defect(const InvariantHamiltonian& H,
                                  const std::vector<TwistedHamiltonian>& family,
                                  const DualGrid& grid, const CoveringFunction& f);

// Same contract for the evolution/heat side: Phi[K f] vs (1 (x) K_L) Phi[f],
// with K and the per-node kernels produced by the same time parameter.
DefectReport evolution_decomposition_defect(
    const InvariantKernel& K, const std::vector<EquivariantKernel>& family,
    const CoveringGraph& g, const DualGrid& grid, const CoveringFunction& f);

std::uint64_t hash_function_values(const CoveringFunction& f);

// One structured record per defect: name, defect, norms, flags, input hash.
void write_defect_record(std::ostream& os, const std::string& name,
                         const DefectReport& report);

// Per-node CSV blocks of a Bloch field: node, base, row, col, re, im.
void write_field_csv(std::ostream& os, const CoveringGraph& g,
                     const DualGrid& grid, const BlochField& field);

}  // namespace blochdeck

#endif
