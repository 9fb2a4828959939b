#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xxzdm/tensor.hpp"

namespace xxzdm {

enum class CanonicalForm { None, Left, Right, Mixed };

/// Matrix product state: one rank-3 tensor per site with index order
/// (left bond, physical, right bond). Sites are 1-based in the public API.
/// Left form means sites 1..L-1 are left-normalized (center at L), Right
/// means sites 2..L are right-normalized (center at 1). States are values:
/// operations return new states.
struct MpsState {
  std::vector<Tensor> tensors;
  int phys_dim = 2;
  CanonicalForm form = CanonicalForm::None;
  int center = -1;  // 1-based orthogonal center; -1 when form == None

  int length() const { return static_cast<int>(tensors.size()); }
  const Tensor& site(int l) const { return tensors[static_cast<std::size_t>(l - 1)]; }
  Tensor& site(int l) { return tensors[static_cast<std::size_t>(l - 1)]; }

  /// Bond dimension a_l between sites l and l+1; a_0 = a_L = 1.
  Index bond_dim(int l) const;
  Index max_bond_dim() const;

  /// Adjacent bond dimensions match and boundary bonds are 1.
  void validate() const;
};

/// Exact (up to chi_max truncation) MPS from a dense coefficient vector of
/// length phys_dim^L, built by repeated SVD from the left. The result is
/// left-canonical; truncated Schmidt weight accumulates in *discarded_weight
/// when given.
MpsState from_dense_vector(const std::vector<cplx>& c, Index chi_max, int phys_dim = 2,
                           double* discarded_weight = nullptr);

/// Random MPS with independent standard-normal real/imaginary entries,
/// right-canonicalized and normalized to 1. Deterministic for a given seed.
MpsState random_mps(int length, int phys_dim, Index chi_max, std::uint64_t seed);

/// Move the orthogonal center to site k (mixed-canonical form). The
/// represented state is unchanged; residual SVD factors are absorbed into
/// the center tensor.
MpsState shift_center(const MpsState& psi, int k);

double norm(const MpsState& psi);

/// <phi|psi>; phi is the conjugated (bra) side.
cplx overlap(const MpsState& phi, const MpsState& psi);

/// Full contraction back to a dense coefficient vector. Guarded to L <= 20.
std::vector<cplx> to_dense(const MpsState& psi);

/// Checkpoint container, version-tagged, little-endian doubles. Round-trips
/// bit-exactly.
void save_mps(const MpsState& psi, const std::string& path);
MpsState load_mps(const std::string& path);

/// Canonical-form checks, tolerance per entry.
bool is_left_normalized(const Tensor& t, double tol);
bool is_right_normalized(const Tensor& t, double tol);
bool check_canonical(const MpsState& psi, double tol);

namespace detail {

/// In-place canonical moves used by the sweep engine. Site k must currently
/// hold the center. Returns the discarded Schmidt weight of the move.
double move_center_right(MpsState& psi, int k, Index chi_max, double cutoff);
double move_center_left(MpsState& psi, int k, Index chi_max, double cutoff);

/// In-place canonicalization to Mixed(k); returns total discarded weight.
double canonicalize(MpsState& psi, int k, Index chi_max, double cutoff);

/// Scale the center tensor so the state has unit norm.
void normalize_center(MpsState& psi);

}  // namespace detail

}  // namespace xxzdm
