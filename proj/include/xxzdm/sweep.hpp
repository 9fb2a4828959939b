#pragma once

#include <cstdint>
#include <vector>

#include "xxzdm/mpo.hpp"
#include "xxzdm/mps.hpp"

namespace xxzdm {

struct SweepConfig {
  Index chi_max = 16;
  double tol_variance = 1e-7;  // convergence criterion on <H^2> - <H>^2
  int max_sweeps = 60;
  int restarts = 1;  // independent random initializations, lowest energy wins
  std::uint64_t seed = 0;
  Index local_solver_dim_threshold = 1024;  // dense eigensolve at or below, Lanczos above
  double svd_cutoff = 1e-14;
  double noise_scale = 0.0;  // optional per-update escape noise, halves each sweep
  int noise_sweeps = 3;

  void validate() const;
};

/// Partial contractions of <psi|H|psi>. left[l] covers sites 1..l with index
/// order (bra bond, MPO bond, ket bond); left[0] is the scalar-1 boundary.
/// right[l] covers sites l..L; right[L+1] is the scalar-1 boundary.
struct EnvironmentCache {
  std::vector<Tensor> left;   // indices 0..L
  std::vector<Tensor> right;  // indices 0..L+1, slot 0 unused
};

EnvironmentCache make_environment_cache(int length);

enum class Side { Left, Right };

/// Recompute the cached entry for `site` on the given side from its inward
/// neighbor. The state must be canonically consistent: center > site for a
/// left update, center < site for a right update.
EnvironmentCache update_environment(const EnvironmentCache& cache, Side side, int site,
                                    const MpsState& psi, const MpoOperator& h);

/// Dense local Hamiltonian at the center site k, shape
/// (a_{k-1} d a_k, a_{k-1} d a_k), assembled from left[k-1] and right[k+1].
Tensor local_effective_hamiltonian(const EnvironmentCache& cache, const MpoOperator& h,
                                   int k);

struct SweepProgress {
  int sweep = 0;
  double energy = 0.0;
  double variance = 0.0;
  double max_discarded = 0.0;
};

struct SolveReport {
  double energy = 0.0;
  double variance = 0.0;
  int sweeps_used = 0;
  bool converged = false;
  MpsState final_state;
  std::vector<SweepProgress> progress;
  std::vector<double> update_energies;  // every local eigenvalue, in sweep order
  double max_discarded_weight = 0.0;    // of the final sweep
};

/// <psi|H|psi> / <psi|psi>.
double energy_expectation(const MpsState& psi, const MpoOperator& h);

/// <H^2> - <H>^2 on the normalized state, computed with two MPO layers
/// between bra and ket (H^2 is never materialized). Clamped at zero.
double energy_variance(const MpsState& psi, const MpoOperator& h);

/// Variational single-site ground-state sweeps. The final state is
/// right-canonical and unit-normalized. Non-convergence is reported through
/// the flag, never thrown.
SolveReport ground_state_search(const MpoOperator& h, const SweepConfig& cfg);
SolveReport ground_state_search(const MpoOperator& h, const SweepConfig& cfg,
                                const MpsState& initial);

/// Lowest state orthogonal to `lower` (which must be converged, normalized
/// and mutually orthogonal to 1e-6): same sweeps with the local solve
/// projected by P = 1 - F N^{-1} F^dag, N pseudo-inverted with a 1e-12
/// singular-value floor.
SolveReport excited_state_search(const MpoOperator& h, const std::vector<MpsState>& lower,
                                 const SweepConfig& cfg);
SolveReport excited_state_search(const MpoOperator& h, const std::vector<MpsState>& lower,
                                 const SweepConfig& cfg, const MpsState& initial);

namespace detail {

Tensor update_left_env(const Tensor& prev, const Tensor& a, const Tensor& w);
Tensor update_right_env(const Tensor& next, const Tensor& a, const Tensor& w);

/// y = H_eff x at one site, x and y shaped (a_{k-1}, d, a_k).
Tensor apply_local_hamiltonian(const Tensor& left, const Tensor& w, const Tensor& right,
                               const Tensor& x);

/// Apply P = 1 - F N^{-1} F^dag built from the given constraint tensors,
/// with the Gram matrix N pseudo-inverted at a 1e-12 relative floor.
Tensor project_out(const std::vector<Tensor>& f_tensors, const Tensor& x);

}  // namespace detail

}  // namespace xxzdm
