#pragma once

#include <vector>

#include "xxzdm/tensor.hpp"

namespace xxzdm {

/// Scaled model parameters of the spin chain. Energies are measured in units
/// of 4t^2/U, so the nearest-neighbor coupling is -1/lambda and the
/// anisotropy is 2*lambda - 1.
///
/// phi is restricted to [0, pi]; the chain satisfies
/// Gamma H(phi) Gamma^dag = H(-phi) with Gamma = prod_j 2 S^x_j, so negative
/// flux is physically equivalent and callers should fold it in themselves.
struct ModelParams {
  double phi = 0.0;          // flux / DM angle, radians in [0, pi]
  double lambda = 1.0;       // interspin / intraspin interaction ratio, > 0
  double omega_prime = 0.0;  // scaled transverse field, >= 0
  int length = 2;            // chain length L >= 2

  void validate() const;
};

struct ScaledParams {
  double j;            // -4 t^2 / (lambda U)
  double j_z;          // 2 lambda - 1
  double omega_prime;  // omega / (4 t^2 / U)
  bool strong_coupling;  // false flags a questionable perturbative regime
};

/// Couplings from raw Hubbard-scale energies. Throws on non-positive t or u;
/// strong_coupling is false (a warning, not an error) when u < 10 max(t, omega).
ScaledParams derive_scaled_params(double t, double u, double lambda, double omega);

/// Matrix product operator: one rank-4 tensor per site with index order
/// (left bond, physical out, physical in, right bond); boundary bonds are 1.
struct MpoOperator {
  std::vector<Tensor> tensors;

  int length() const { return static_cast<int>(tensors.size()); }
  const Tensor& site(int l) const { return tensors[static_cast<std::size_t>(l - 1)]; }
  Index bond_dim(int l) const;  // b_l
  int phys_dim() const { return static_cast<int>(tensors.front().dim(1)); }
};

/// MPO of the scaled Hamiltonian
///   H = -(1/lambda) sum_j [ cos(phi) (SxSx + SySy) + (2 lambda - 1) SzSz
///                           + sin(phi) (SxSy - SySx) ] - omega' sum_j Sx,
/// written directly as a bond-dimension-5 operator-valued matrix.
MpoOperator build_xxz_dm_mpo(const ModelParams& p);

/// Generic nearest-neighbor MPO from explicit bond terms (left_op acting on
/// site j, right_op on j+1, coefficients folded into left_op) plus a uniform
/// single-site term. Used to cross-check the direct builder.
struct BondTerm {
  Tensor left_op;
  Tensor right_op;
};
MpoOperator build_nearest_neighbor_mpo(int length, const std::vector<BondTerm>& bonds,
                                       const Tensor& site_op);

/// Dense matrix of the represented operator, (d^L, d^L). Guarded to L <= 12.
Tensor mpo_to_dense(const MpoOperator& op);

/// Spin-1/2 operators in the {up, down} basis, S^a = sigma^a / 2.
namespace spin_half {
Tensor sx();
Tensor sy();
Tensor sz();
Tensor id();
}  // namespace spin_half

}  // namespace xxzdm
