#pragma once

#include <utility>
#include <vector>

#include "xxzdm/mpo.hpp"

namespace xxzdm {

/// Exact Hamiltonian on a small chain. The matrix is materialized for
/// L <= 12; for L = 13, 14 the spectrum is computed matrix-free.
struct DenseHamiltonian {
  ModelParams params;
  Index dim = 0;
  Tensor matrix;             // (dim, dim) when materialized
  bool materialized = false;
};

/// Assemble the chain Hamiltonian by explicit tensor-product embedding of
/// the two-site bond terms and the single-site field (open boundaries,
/// L - 1 bonds). Hard cap L <= 14.
DenseHamiltonian dense_hamiltonian(const ModelParams& p);

/// n lowest eigenpairs, energies ascending, eigenvectors orthonormal.
/// Dense diagonalization when the matrix is materialized, deflated Lanczos
/// on the matrix-free application otherwise.
std::vector<std::pair<double, std::vector<cplx>>> lowest_spectrum(
    const DenseHamiltonian& h, int n);

/// y = H x without materializing H. Basis convention matches
/// from_dense_vector: site 1 is the most significant digit, spin-up = 0.
void apply_hamiltonian(const ModelParams& p, const cplx* x, cplx* y);

/// Same assembly from raw couplings, without the phi-range validation of
/// ModelParams. Used by the symmetry checks that need H(-phi).
Tensor dense_from_couplings(int length, double cos_phi, double sin_phi, double lambda,
                            double omega_prime);

/// All eigenvalues of a Hermitian matrix, ascending.
std::vector<double> full_spectrum(const Tensor& hermitian);

/// Observable oracles on dense state vectors (same basis convention).
cplx dense_expect_site(const std::vector<cplx>& v, int length, int j, const Tensor& op);
cplx dense_expect_two_site(const std::vector<cplx>& v, int length, int j, int l,
                           const Tensor& op_a, const Tensor& op_b);

}  // namespace xxzdm
