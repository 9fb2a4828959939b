#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xxzdm/ed.hpp"
#include "xxzdm/observables.hpp"
#include "xxzdm/sweep.hpp"

namespace xxzdm {

struct AxisSpec {
  std::string name;  // one of phi, lambda, omega_prime
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;

  std::vector<double> values() const;
};

/// Parameter-scan description: up to two scanned axes, fixed values for the
/// rest; fixed + scanned must cover exactly {phi, lambda, omega_prime}.
struct ScanSpec {
  std::vector<AxisSpec> axes;
  std::map<std::string, double> fixed;
  int length = 48;
  SweepConfig sweep;
  int n_excited = 0;       // 0..2
  bool order_params = true;
  bool structure_factors = true;
  bool warm_start = true;   // seed each point from the previous point's state
  bool bidirectional = false;  // run warm chains both ways, keep the lower energy

  void validate() const;
};

/// One solved grid point. Absent values (e.g. E1 when n_excited = 0) are NaN.
struct PointRecord {
  double phi = 0.0, lambda = 0.0, omega_prime = 0.0;
  int length = 0;
  Index chi = 0;
  std::array<double, 3> energy{};  // E0, E1, E2
  double variance = 0.0;
  std::array<bool, 3> state_converged{true, true, true};
  bool converged = false;  // all requested states converged
  double delta1 = 0.0, delta2 = 0.0;
  OrderParameters ops;
  std::array<double, 3> q_peak_k{};    // x, y, z
  std::array<double, 3> q_peak_val{};
  double max_discarded_weight = 0.0;
  std::string spec_hash;
};

struct ScanResult {
  ScanSpec spec;
  std::string spec_hash;
  std::vector<PointRecord> records;  // grid order: outer axis major
  bool all_converged = false;
};

struct RunPointOutput {
  PointRecord record;
  std::vector<MpsState> states;  // ground state first, then excited
};

/// Solve one parameter point: ground state, requested excited states, and
/// the enabled observables. Warm states (per level) seed the first attempt;
/// further restarts are random. `salt` decorrelates the point's seeds inside
/// a scan while keeping runs deterministic.
RunPointOutput run_point(const ModelParams& p, const SweepConfig& cfg, int n_excited,
                         bool order_params, bool structure_factors,
                         const std::vector<MpsState>* warm = nullptr,
                         std::uint64_t salt = 0);

struct ScanIo {
  std::string out_prefix;  // empty: in-memory only, no checkpointing
  bool resume = false;
  int max_points = -1;  // stop after this many newly solved points (testing hook)
};

/// Run every grid point. Independent points execute on a worker pool;
/// warm-started chains run serially along the inner axis with rows in
/// parallel. With an out_prefix, progress is journaled per point and the
/// scan can resume at grid-point granularity.
ScanResult run_scan(const ScanSpec& spec, const ScanIo& io = {});

struct DetectionRules {
  std::vector<std::string> columns{"Mz", "Ny", "Cz"};
  double jump_threshold = 0.5;  // relative to the column maximum
  double floor = 0.02;          // continuous-transition crossing level, relative
  double column_gate = 0.02;    // skip columns whose absolute maximum is below this
};

struct Detection {
  std::string param;           // scanned axis name
  double value = 0.0;          // located transition point
  std::string type;            // "first-order" or "continuous"
  std::string order_parameter; // column that triggered it
};

/// Locate transitions along a 1-D scan from the order-parameter columns:
/// first-order at the largest single-step jump above jump_threshold,
/// continuous at interpolated floor crossings. Thresholds are relative to
/// the column maximum, so detections are invariant under uniform rescaling.
std::vector<Detection> detect_transitions(const ScanResult& scan,
                                          const DetectionRules& rules);

struct GapRecord {
  std::vector<int> lengths;
  std::vector<double> e0, e1, e2;
  std::vector<double> delta1, delta2;
  std::vector<bool> converged;
  bool extrapolated = false;  // requires >= 3 converged lengths
  double delta1_intercept = 0.0, delta1_slope = 0.0;
  double delta2_intercept = 0.0, delta2_slope = 0.0;
};

/// Gaps Delta_1, Delta_2 per chain length plus a linear extrapolation of
/// Delta(1/L) to 1/L -> 0.
GapRecord finite_size_gap_study(const ModelParams& base, const std::vector<int>& lengths,
                                const SweepConfig& cfg);

/// FNV-1a hash of the canonical spec serialization, 16 hex digits.
std::string scan_spec_hash(const ScanSpec& spec);

/// Fixed-column CSV; the leading comment line carries the spec hash and,
/// unless suppressed, a timestamp.
void write_scan_csv(const ScanResult& result, const std::string& path,
                    bool with_timestamp = true);
std::string scan_csv_string(const ScanResult& result, bool with_timestamp = true);

/// Versioned JSON document embedding the full spec and all records.
void write_scan_json(const ScanResult& result, const std::string& path);
ScanResult read_scan_json(const std::string& path);

void write_gap_csv(const GapRecord& rec, const std::string& path);
void write_gap_json(const GapRecord& rec, const ModelParams& base, const std::string& path);

}  // namespace xxzdm
