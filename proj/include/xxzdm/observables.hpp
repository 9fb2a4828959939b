#pragma once

#include <array>
#include <vector>

#include "xxzdm/mps.hpp"

namespace xxzdm {

enum class Axis { X, Y, Z };

/// <psi|op_j|psi> / <psi|psi>, evaluated with the orthogonal center at j.
cplx expect_site(const MpsState& psi, int j, const Tensor& op);

/// <psi|op_a_j op_b_l|psi> / <psi|psi> for j < l, via the transfer-tensor
/// recursion with identity insertions between j and l.
cplx correlation(const MpsState& psi, int j, int l, const Tensor& op_a,
                 const Tensor& op_b);

/// All pairs <S^a_j S^a_l> for one axis, including the j = l diagonal (1/4
/// for spin-1/2). Hermitian: value(j,l) = conj(value(l,j)).
struct CorrelationRecord {
  Axis axis = Axis::Z;
  int length = 0;
  std::vector<cplx> pairs;  // row-major (j-1)*L + (l-1)

  cplx value(int j, int l) const {
    return pairs[static_cast<std::size_t>((j - 1) * length + (l - 1))];
  }
  /// Decay profile from the central reference site ceil(L/2).
  int reference_site() const { return (length + 1) / 2; }
};

CorrelationRecord correlation_profile(const MpsState& psi, Axis axis);

/// Q(k) = (1/L) sum_{j,l} e^{ik(j-l)} <S^a_j S^a_l>. Real up to roundoff;
/// the imaginary part is checked and discarded.
std::vector<double> structure_factor(const CorrelationRecord& corr,
                                     const std::vector<double>& k_grid);

/// {2 pi m / L : m = 0..L-1}.
std::vector<double> default_k_grid(int length);

/// Peak of Q over the half grid k in [0, pi]; correlations of commuting
/// Hermitian observables are real, so Q(k) = Q(2 pi - k) and the half grid
/// carries the physics. Returns (k, Q(k)).
std::pair<double, double> structure_factor_peak(const CorrelationRecord& corr);

/// Magnetization M, staggered magnetization N, vector chirality C, each
/// per axis: M_a = |sum_j <S^a_j>| / L, N_a = |sum_j (-1)^j <S^a_j>| / L,
/// C_a = |sum_j <(S_j x S_{j+1})^a>| / L (L-1 bond terms).
struct OrderParameters {
  std::array<double, 3> m{};  // x, y, z
  std::array<double, 3> n{};
  std::array<double, 3> c{};
};

OrderParameters order_parameters(const MpsState& psi);

/// (E1 - E0, E2 - E0), clamped at zero within -1e-9; larger violations of
/// the ordering raise SolverQualityError.
std::pair<double, double> energy_gaps(double e0, double e1, double e2);

Tensor axis_operator(Axis axis);

}  // namespace xxzdm
