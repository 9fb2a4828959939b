#include "xxzdm/scan.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace xxzdm {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t mix64(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + (salt + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

const std::vector<std::string> kParamNames{"phi", "lambda", "omega_prime"};

ModelParams params_from_map(const std::map<std::string, double>& vals, int length) {
  ModelParams p;
  p.phi = vals.at("phi");
  p.lambda = vals.at("lambda");
  p.omega_prime = vals.at("omega_prime");
  p.length = length;
  return p;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

json sweep_to_json(const SweepConfig& c) {
  return json{{"chi_max", c.chi_max},
              {"tol_variance", c.tol_variance},
              {"max_sweeps", c.max_sweeps},
              {"restarts", c.restarts},
              {"seed", c.seed},
              {"local_solver_dim_threshold", c.local_solver_dim_threshold},
              {"svd_cutoff", c.svd_cutoff},
              {"noise_scale", c.noise_scale},
              {"noise_sweeps", c.noise_sweeps}};
}

SweepConfig sweep_from_json(const json& j) {
  SweepConfig c;
  c.chi_max = j.at("chi_max").get<Index>();
  c.tol_variance = j.at("tol_variance").get<double>();
  c.max_sweeps = j.at("max_sweeps").get<int>();
  c.restarts = j.at("restarts").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.local_solver_dim_threshold = j.at("local_solver_dim_threshold").get<Index>();
  c.svd_cutoff = j.at("svd_cutoff").get<double>();
  c.noise_scale = j.at("noise_scale").get<double>();
  c.noise_sweeps = j.at("noise_sweeps").get<int>();
  return c;
}

json spec_to_json(const ScanSpec& s) {
  json axes = json::array();
  for (const auto& a : s.axes)
    axes.push_back({{"name", a.name}, {"start", a.start}, {"stop", a.stop}, {"step", a.step}});
  return json{{"axes", axes},
              {"fixed", s.fixed},
              {"length", s.length},
              {"sweep", sweep_to_json(s.sweep)},
              {"n_excited", s.n_excited},
              {"order_params", s.order_params},
              {"structure_factors", s.structure_factors},
              {"warm_start", s.warm_start},
              {"bidirectional", s.bidirectional}};
}

ScanSpec spec_from_json(const json& j) {
  ScanSpec s;
  for (const auto& a : j.at("axes"))
    s.axes.push_back({a.at("name").get<std::string>(), a.at("start").get<double>(),
                      a.at("stop").get<double>(), a.at("step").get<double>()});
  s.fixed = j.at("fixed").get<std::map<std::string, double>>();
  s.length = j.at("length").get<int>();
  s.sweep = sweep_from_json(j.at("sweep"));
  s.n_excited = j.at("n_excited").get<int>();
  s.order_params = j.at("order_params").get<bool>();
  s.structure_factors = j.at("structure_factors").get<bool>();
  s.warm_start = j.at("warm_start").get<bool>();
  s.bidirectional = j.at("bidirectional").get<bool>();
  return s;
}

double json_num(const json& j) {
  if (j.is_null()) return kNaN;
  return j.get<double>();
}

json num_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

json record_to_json(const PointRecord& r) {
  return json{{"phi", r.phi},
              {"lambda", r.lambda},
              {"omega_prime", r.omega_prime},
              {"length", r.length},
              {"chi", r.chi},
              {"E", {num_or_null(r.energy[0]), num_or_null(r.energy[1]), num_or_null(r.energy[2])}},
              {"variance", r.variance},
              {"state_converged", {r.state_converged[0], r.state_converged[1], r.state_converged[2]}},
              {"converged", r.converged},
              {"delta1", num_or_null(r.delta1)},
              {"delta2", num_or_null(r.delta2)},
              {"M", {num_or_null(r.ops.m[0]), num_or_null(r.ops.m[1]), num_or_null(r.ops.m[2])}},
              {"N", {num_or_null(r.ops.n[0]), num_or_null(r.ops.n[1]), num_or_null(r.ops.n[2])}},
              {"C", {num_or_null(r.ops.c[0]), num_or_null(r.ops.c[1]), num_or_null(r.ops.c[2])}},
              {"Q_peak_k",
               {num_or_null(r.q_peak_k[0]), num_or_null(r.q_peak_k[1]), num_or_null(r.q_peak_k[2])}},
              {"Q_peak_val",
               {num_or_null(r.q_peak_val[0]), num_or_null(r.q_peak_val[1]),
                num_or_null(r.q_peak_val[2])}},
              {"max_discarded_weight", r.max_discarded_weight},
              {"spec_hash", r.spec_hash}};
}

PointRecord record_from_json(const json& j) {
  PointRecord r;
  r.phi = j.at("phi").get<double>();
  r.lambda = j.at("lambda").get<double>();
  r.omega_prime = j.at("omega_prime").get<double>();
  r.length = j.at("length").get<int>();
  r.chi = j.at("chi").get<Index>();
  for (int i = 0; i < 3; ++i) {
    r.energy[static_cast<std::size_t>(i)] = json_num(j.at("E")[static_cast<std::size_t>(i)]);
    r.state_converged[static_cast<std::size_t>(i)] =
        j.at("state_converged")[static_cast<std::size_t>(i)].get<bool>();
    r.ops.m[static_cast<std::size_t>(i)] = json_num(j.at("M")[static_cast<std::size_t>(i)]);
    r.ops.n[static_cast<std::size_t>(i)] = json_num(j.at("N")[static_cast<std::size_t>(i)]);
    r.ops.c[static_cast<std::size_t>(i)] = json_num(j.at("C")[static_cast<std::size_t>(i)]);
    r.q_peak_k[static_cast<std::size_t>(i)] =
        json_num(j.at("Q_peak_k")[static_cast<std::size_t>(i)]);
    r.q_peak_val[static_cast<std::size_t>(i)] =
        json_num(j.at("Q_peak_val")[static_cast<std::size_t>(i)]);
  }
  r.variance = j.at("variance").get<double>();
  r.converged = j.at("converged").get<bool>();
  r.delta1 = json_num(j.at("delta1"));
  r.delta2 = json_num(j.at("delta2"));
  r.max_discarded_weight = j.at("max_discarded_weight").get<double>();
  r.spec_hash = j.at("spec_hash").get<std::string>();
  return r;
}

}  // namespace

std::vector<double> AxisSpec::values() const {
  if (!(step > 0.0)) throw ShapeError("axis step must be positive");
  if (stop < start - 1e-12) throw ShapeError("axis stop must be >= start");
  std::vector<double> v;
  for (double x = start; x <= stop + 0.5 * step; x += step) v.push_back(x);
  return v;
}

void ScanSpec::validate() const {
  if (axes.empty() || axes.size() > 2)
    throw ShapeError("scan needs one or two axes");
  std::map<std::string, int> seen;
  for (const auto& a : axes) {
    if (std::find(kParamNames.begin(), kParamNames.end(), a.name) == kParamNames.end())
      throw ShapeError("unknown scan axis " + a.name);
    if (a.values().empty()) throw ShapeError("empty scan grid");
    ++seen[a.name];
  }
  for (const auto& [name, val] : fixed) {
    (void)val;
    if (std::find(kParamNames.begin(), kParamNames.end(), name) == kParamNames.end())
      throw ShapeError("unknown fixed parameter " + name);
    ++seen[name];
  }
  for (const auto& name : kParamNames)
    if (seen[name] != 1)
      throw ShapeError("scanned + fixed parameters must cover exactly {phi, lambda, "
                       "omega_prime}; '" +
                       name + "' appears " + std::to_string(seen[name]) + " times");
  if (n_excited < 0 || n_excited > 2) throw ShapeError("n_excited must be 0..2");
  if (bidirectional && !warm_start)
    throw ShapeError("bidirectional scanning requires warm_start");
  sweep.validate();
}

std::string scan_spec_hash(const ScanSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& a : spec.axes)
    os << "axis:" << a.name << "," << a.start << "," << a.stop << "," << a.step << ";";
  for (const auto& [k, v] : spec.fixed) os << "fix:" << k << "=" << v << ";";
  const SweepConfig& c = spec.sweep;
  os << "L=" << spec.length << ";chi=" << c.chi_max << ";tol=" << c.tol_variance
     << ";sweeps=" << c.max_sweeps << ";restarts=" << c.restarts << ";seed=" << c.seed
     << ";thresh=" << c.local_solver_dim_threshold << ";cutoff=" << c.svd_cutoff
     << ";noise=" << c.noise_scale << "," << c.noise_sweeps << ";nex=" << spec.n_excited
     << ";op=" << spec.order_params << ";sf=" << spec.structure_factors
     << ";warm=" << spec.warm_start << ";bidir=" << spec.bidirectional;
  const std::string s = os.str();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunPointOutput run_point(const ModelParams& p, const SweepConfig& cfg, int n_excited,
                         bool order_params_on, bool structure_factors_on,
                         const std::vector<MpsState>* warm, std::uint64_t salt) {
  p.validate();
  if (n_excited < 0 || n_excited > 2) throw ShapeError("n_excited must be 0..2");

  const MpoOperator h = build_xxz_dm_mpo(p);
  RunPointOutput out;
  PointRecord& rec = out.record;
  rec.phi = p.phi;
  rec.lambda = p.lambda;
  rec.omega_prime = p.omega_prime;
  rec.length = p.length;
  rec.chi = cfg.chi_max;
  rec.energy = {kNaN, kNaN, kNaN};
  rec.delta1 = rec.delta2 = kNaN;
  rec.ops.m = {kNaN, kNaN, kNaN};
  rec.ops.n = {kNaN, kNaN, kNaN};
  rec.ops.c = {kNaN, kNaN, kNaN};
  rec.q_peak_k = {kNaN, kNaN, kNaN};
  rec.q_peak_val = {kNaN, kNaN, kNaN};

  std::vector<SolveReport> reports;
  for (int level = 0; level <= n_excited; ++level) {
    SweepConfig lc = cfg;
    lc.seed = mix64(cfg.seed, salt * 4 + static_cast<std::uint64_t>(level));
    const MpsState* w =
        (warm && static_cast<int>(warm->size()) > level) ? &(*warm)[static_cast<std::size_t>(level)] : nullptr;
    std::vector<MpsState> lower;
    for (const auto& s : out.states) lower.push_back(s);
    SolveReport rep;
    if (level == 0)
      rep = w ? ground_state_search(h, lc, *w) : ground_state_search(h, lc);
    else
      rep = w ? excited_state_search(h, lower, lc, *w) : excited_state_search(h, lower, lc);
    rec.energy[static_cast<std::size_t>(level)] = rep.energy;
    rec.state_converged[static_cast<std::size_t>(level)] = rep.converged;
    rec.max_discarded_weight = std::max(rec.max_discarded_weight, rep.max_discarded_weight);
    out.states.push_back(rep.final_state);
    reports.push_back(std::move(rep));
  }
  rec.variance = reports.front().variance;
  rec.converged = true;
  for (int level = 0; level <= n_excited; ++level)
    rec.converged = rec.converged && rec.state_converged[static_cast<std::size_t>(level)];

  if (n_excited >= 1) {
    const double e0 = rec.energy[0], e1 = rec.energy[1];
    const double e2 = (n_excited >= 2) ? rec.energy[2] : e1;
    try {
      auto [d1, d2] = energy_gaps(e0, e1, e2);
      rec.delta1 = d1;
      rec.delta2 = (n_excited >= 2) ? d2 : kNaN;
    } catch (const SolverQualityError&) {
      rec.delta1 = std::max(0.0, e1 - e0);
      rec.delta2 = (n_excited >= 2) ? std::max(0.0, e2 - e0) : kNaN;
      rec.converged = false;
    }
  }

  const MpsState& gs = out.states.front();
  if (order_params_on) rec.ops = order_parameters(gs);
  if (structure_factors_on) {
#pragma omp parallel for schedule(dynamic)
    for (int a = 0; a < 3; ++a) {
      const CorrelationRecord corr =
          correlation_profile(gs, a == 0 ? Axis::X : (a == 1 ? Axis::Y : Axis::Z));
      const auto [k, val] = structure_factor_peak(corr);
      rec.q_peak_k[static_cast<std::size_t>(a)] = k;
      rec.q_peak_val[static_cast<std::size_t>(a)] = val;
    }
  }
  return out;
}

namespace {

struct GridShape {
  std::vector<double> outer, inner;
  std::string outer_name, inner_name;
  int no = 1, ni = 0;
};

GridShape make_grid(const ScanSpec& spec) {
  GridShape g;
  if (spec.axes.size() == 2) {
    g.outer = spec.axes[0].values();
    g.outer_name = spec.axes[0].name;
    g.inner = spec.axes[1].values();
    g.inner_name = spec.axes[1].name;
  } else {
    g.outer = {0.0};
    g.inner = spec.axes[0].values();
    g.inner_name = spec.axes[0].name;
  }
  g.no = static_cast<int>(g.outer.size());
  g.ni = static_cast<int>(g.inner.size());
  return g;
}

std::string csv_header() {
  return "phi,lambda,omega_prime,L,chi,E0,E1,E2,variance,converged,delta1,delta2,"
         "Mx,My,Mz,Nx,Ny,Nz,Cx,Cy,Cz,Qx_peak_k,Qx_peak_val,Qy_peak_k,Qy_peak_val,"
         "Qz_peak_k,Qz_peak_val,max_discarded_weight";
}

std::string csv_row(const PointRecord& r) {
  std::ostringstream os;
  os << fmt(r.phi) << ',' << fmt(r.lambda) << ',' << fmt(r.omega_prime) << ',' << r.length
     << ',' << r.chi << ',' << fmt(r.energy[0]) << ',' << fmt(r.energy[1]) << ','
     << fmt(r.energy[2]) << ',' << fmt(r.variance) << ',' << (r.converged ? 1 : 0) << ','
     << fmt(r.delta1) << ',' << fmt(r.delta2);
  for (int i = 0; i < 3; ++i) os << ',' << fmt(r.ops.m[static_cast<std::size_t>(i)]);
  for (int i = 0; i < 3; ++i) os << ',' << fmt(r.ops.n[static_cast<std::size_t>(i)]);
  for (int i = 0; i < 3; ++i) os << ',' << fmt(r.ops.c[static_cast<std::size_t>(i)]);
  for (int i = 0; i < 3; ++i)
    os << ',' << fmt(r.q_peak_k[static_cast<std::size_t>(i)]) << ','
       << fmt(r.q_peak_val[static_cast<std::size_t>(i)]);
  os << ',' << fmt(r.max_discarded_weight);
  return os.str();
}

}  // namespace

ScanResult run_scan(const ScanSpec& spec, const ScanIo& io) {
  spec.validate();
  const std::string hash = scan_spec_hash(spec);
  const GridShape grid = make_grid(spec);
  const int total = grid.no * grid.ni;

  struct Slot {
    std::optional<PointRecord> fwd, bwd;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(total));

  const bool journaling = !io.out_prefix.empty();
  const std::string journal_path = io.out_prefix + ".journal.jsonl";
  if (journaling && io.resume && std::filesystem::exists(journal_path)) {
    std::ifstream in(journal_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded()) continue;  // torn tail line from an interrupt
      const int idx = j.at("index").get<int>();
      if (idx < 0 || idx >= total) continue;
      PointRecord r = record_from_json(j.at("record"));
      if (r.spec_hash != hash) continue;  // journal from a different spec
      if (j.at("chain").get<std::string>() == "b")
        slots[static_cast<std::size_t>(idx)].bwd = std::move(r);
      else
        slots[static_cast<std::size_t>(idx)].fwd = std::move(r);
    }
  } else if (journaling && std::filesystem::exists(journal_path)) {
    std::filesystem::remove(journal_path);
  }

  std::ofstream journal;
  if (journaling) journal.open(journal_path, std::ios::app);

  std::atomic<int> solved{0};
  std::atomic<bool> exhausted{false};

  auto warm_file = [&](int row, bool backward, int level) {
    return io.out_prefix + ".r" + std::to_string(row) + (backward ? ".b" : ".f") + ".w" +
           std::to_string(level) + ".mpsc";
  };

  auto record_point = [&](int idx, bool backward, const PointRecord& rec) {
    if (!journaling) return;
    json j{{"chain", backward ? "b" : "f"}, {"index", idx}, {"record", record_to_json(rec)}};
#pragma omp critical(xxzdm_journal)
    {
      journal << j.dump() << "\n";
      journal.flush();
    }
  };

  auto solve_chain = [&](int row, bool backward) {
    std::vector<MpsState> states;
    bool have_states = false;
    for (int s = 0; s < grid.ni; ++s) {
      const int i = backward ? grid.ni - 1 - s : s;
      const int idx = row * grid.ni + i;
      auto& slot = backward ? slots[static_cast<std::size_t>(idx)].bwd
                            : slots[static_cast<std::size_t>(idx)].fwd;
      if (slot) {
        have_states = false;  // stored states, if any, live in the warm files
        continue;
      }
      if (exhausted.load()) return;
      if (io.max_points >= 0 && solved.load() >= io.max_points) {
        exhausted.store(true);
        return;
      }
      if (!have_states && s > 0 && journaling && spec.warm_start) {
        // resuming mid-chain: reload the warm states of the previous point
        std::vector<MpsState> loaded;
        bool ok = true;
        for (int level = 0; level <= spec.n_excited && ok; ++level) {
          const std::string f = warm_file(row, backward, level);
          if (std::filesystem::exists(f))
            loaded.push_back(load_mps(f));
          else
            ok = false;
        }
        if (ok && !loaded.empty()) {
          states = std::move(loaded);
          have_states = true;
        }
      }

      std::map<std::string, double> vals = spec.fixed;
      if (!grid.outer_name.empty())
        vals[grid.outer_name] = grid.outer[static_cast<std::size_t>(row)];
      vals[grid.inner_name] = grid.inner[static_cast<std::size_t>(i)];
      const ModelParams p = params_from_map(vals, spec.length);

      RunPointOutput pt = run_point(p, spec.sweep, spec.n_excited, spec.order_params,
                                    spec.structure_factors,
                                    (spec.warm_start && have_states) ? &states : nullptr,
                                    static_cast<std::uint64_t>(idx));
      pt.record.spec_hash = hash;
      slot = pt.record;
      record_point(idx, backward, pt.record);
      if (spec.warm_start) {
        states = std::move(pt.states);
        have_states = true;
        if (journaling)
          for (int level = 0; level < static_cast<int>(states.size()); ++level)
            save_mps(states[static_cast<std::size_t>(level)], warm_file(row, backward, level));
      }
      solved.fetch_add(1);
    }
  };

  if (spec.warm_start) {
    const int dirs = spec.bidirectional ? 2 : 1;
    const int tasks = grid.no * dirs;
#pragma omp parallel for schedule(dynamic) if (io.max_points < 0)
    for (int t = 0; t < tasks; ++t) solve_chain(t % grid.no, t >= grid.no);
  } else {
#pragma omp parallel for schedule(dynamic) if (io.max_points < 0)
    for (int idx = 0; idx < total; ++idx) {
      auto& slot = slots[static_cast<std::size_t>(idx)].fwd;
      if (slot) continue;
      if (exhausted.load()) continue;
      if (io.max_points >= 0 && solved.load() >= io.max_points) {
        exhausted.store(true);
        continue;
      }
      std::map<std::string, double> vals = spec.fixed;
      const int row = idx / grid.ni, i = idx % grid.ni;
      if (!grid.outer_name.empty())
        vals[grid.outer_name] = grid.outer[static_cast<std::size_t>(row)];
      vals[grid.inner_name] = grid.inner[static_cast<std::size_t>(i)];
      RunPointOutput pt =
          run_point(params_from_map(vals, spec.length), spec.sweep, spec.n_excited,
                    spec.order_params, spec.structure_factors, nullptr,
                    static_cast<std::uint64_t>(idx));
      pt.record.spec_hash = hash;
      slot = pt.record;
      record_point(idx, false, pt.record);
      solved.fetch_add(1);
    }
  }

  ScanResult result;
  result.spec = spec;
  result.spec_hash = hash;
  result.records.resize(static_cast<std::size_t>(total));
  bool complete = true;
  for (int idx = 0; idx < total; ++idx) {
    const Slot& slot = slots[static_cast<std::size_t>(idx)];
    if (slot.fwd && slot.bwd)
      result.records[static_cast<std::size_t>(idx)] =
          (slot.bwd->energy[0] < slot.fwd->energy[0]) ? *slot.bwd : *slot.fwd;
    else if (slot.fwd)
      result.records[static_cast<std::size_t>(idx)] = *slot.fwd;
    else if (slot.bwd)
      result.records[static_cast<std::size_t>(idx)] = *slot.bwd;
    else
      complete = false;
  }
  result.all_converged = complete;
  for (const auto& r : result.records)
    result.all_converged = result.all_converged && r.converged;

  if (journaling && complete) {
    write_scan_csv(result, io.out_prefix + ".csv");
    write_scan_json(result, io.out_prefix + ".json");
    journal.close();
    std::filesystem::remove(journal_path);
    for (int row = 0; row < grid.no; ++row)
      for (int dir = 0; dir < 2; ++dir)
        for (int level = 0; level <= spec.n_excited; ++level) {
          const std::string f = warm_file(row, dir == 1, level);
          if (std::filesystem::exists(f)) std::filesystem::remove(f);
        }
  }
  return result;
}

std::vector<Detection> detect_transitions(const ScanResult& scan,
                                          const DetectionRules& rules) {
  if (scan.spec.axes.size() != 1)
    throw ShapeError("transition detection works on 1-D scans");
  const std::string axis = scan.spec.axes[0].name;
  const auto& recs = scan.records;
  const int n = static_cast<int>(recs.size());
  if (n < 2) return {};

  auto axis_value = [&](const PointRecord& r) {
    if (axis == "phi") return r.phi;
    if (axis == "lambda") return r.lambda;
    return r.omega_prime;
  };
  auto column_value = [&](const PointRecord& r, const std::string& name) -> double {
    const std::size_t comp = (name[1] == 'x') ? 0 : (name[1] == 'y') ? 1 : 2;
    if (name[0] == 'M') return r.ops.m[comp];
    if (name[0] == 'N') return r.ops.n[comp];
    if (name[0] == 'C') return r.ops.c[comp];
    throw ShapeError("unknown order-parameter column " + name);
  };

  std::vector<Detection> out;
  for (const auto& col : rules.columns) {
    std::vector<double> u(static_cast<std::size_t>(n));
    double vmax = 0.0;
    for (int i = 0; i < n; ++i) {
      u[static_cast<std::size_t>(i)] = column_value(recs[static_cast<std::size_t>(i)], col);
      if (std::isnan(u[static_cast<std::size_t>(i)]))
        throw ShapeError("order parameters missing for detection column " + col);
      vmax = std::max(vmax, u[static_cast<std::size_t>(i)]);
    }
    if (vmax < rules.column_gate) continue;
    for (auto& v : u) v /= vmax;

    int jump_at = -1;
    double jump = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      const double dv = std::abs(u[static_cast<std::size_t>(i + 1)] - u[static_cast<std::size_t>(i)]);
      if (dv > jump) {
        jump = dv;
        jump_at = i;
      }
    }
    if (jump_at >= 0 && jump > rules.jump_threshold)
      out.push_back({axis,
                     0.5 * (axis_value(recs[static_cast<std::size_t>(jump_at)]) +
                            axis_value(recs[static_cast<std::size_t>(jump_at + 1)])),
                     "first-order", col});
    else
      jump_at = -1;

    for (int i = 0; i + 1 < n; ++i) {
      if (jump_at >= 0 && std::abs(i - jump_at) <= 1) continue;
      const double a = u[static_cast<std::size_t>(i)] - rules.floor;
      const double b = u[static_cast<std::size_t>(i + 1)] - rules.floor;
      if (a == 0.0 || a * b >= 0.0) continue;
      const double x0 = axis_value(recs[static_cast<std::size_t>(i)]);
      const double x1 = axis_value(recs[static_cast<std::size_t>(i + 1)]);
      out.push_back({axis, x0 + (x1 - x0) * a / (a - b), "continuous", col});
    }
  }
  return out;
}

GapRecord finite_size_gap_study(const ModelParams& base, const std::vector<int>& lengths,
                                const SweepConfig& cfg) {
  if (lengths.empty()) throw ShapeError("gap study needs at least one length");
  for (std::size_t i = 1; i < lengths.size(); ++i)
    if (lengths[i] <= lengths[i - 1]) throw ShapeError("lengths must be ascending");

  GapRecord rec;
  rec.lengths = lengths;
  const int n = static_cast<int>(lengths.size());
  rec.e0.assign(static_cast<std::size_t>(n), kNaN);
  rec.e1.assign(static_cast<std::size_t>(n), kNaN);
  rec.e2.assign(static_cast<std::size_t>(n), kNaN);
  rec.delta1.assign(static_cast<std::size_t>(n), kNaN);
  rec.delta2.assign(static_cast<std::size_t>(n), kNaN);
  rec.converged.assign(static_cast<std::size_t>(n), false);

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    ModelParams p = base;
    p.length = lengths[static_cast<std::size_t>(i)];
    RunPointOutput pt = run_point(p, cfg, 2, false, false, nullptr,
                                  static_cast<std::uint64_t>(p.length));
    rec.e0[static_cast<std::size_t>(i)] = pt.record.energy[0];
    rec.e1[static_cast<std::size_t>(i)] = pt.record.energy[1];
    rec.e2[static_cast<std::size_t>(i)] = pt.record.energy[2];
    rec.delta1[static_cast<std::size_t>(i)] = pt.record.delta1;
    rec.delta2[static_cast<std::size_t>(i)] = pt.record.delta2;
    rec.converged[static_cast<std::size_t>(i)] = pt.record.converged;
  }

  // least-squares Delta(1/L) over the converged lengths
  std::vector<double> xs, y1, y2;
  for (int i = 0; i < n; ++i)
    if (rec.converged[static_cast<std::size_t>(i)]) {
      xs.push_back(1.0 / lengths[static_cast<std::size_t>(i)]);
      y1.push_back(rec.delta1[static_cast<std::size_t>(i)]);
      y2.push_back(rec.delta2[static_cast<std::size_t>(i)]);
    }
  if (xs.size() >= 3) {
    auto fit = [&](const std::vector<double>& y) {
      const double m = static_cast<double>(xs.size());
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += y[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * y[i];
      }
      const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
      return std::pair<double, double>{(sy - slope * sx) / m, slope};
    };
    std::tie(rec.delta1_intercept, rec.delta1_slope) = fit(y1);
    std::tie(rec.delta2_intercept, rec.delta2_slope) = fit(y2);
    rec.extrapolated = true;
  }
  return rec;
}

std::string scan_csv_string(const ScanResult& result, bool with_timestamp) {
  std::ostringstream os;
  os << "# xxzdm scan spec_hash=" << result.spec_hash;
  if (with_timestamp) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    os << " generated=" << buf;
  }
  os << "\n" << csv_header() << "\n";
  for (const auto& r : result.records) os << csv_row(r) << "\n";
  return os.str();
}

void write_scan_csv(const ScanResult& result, const std::string& path, bool with_timestamp) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw NumericError("cannot open " + path);
  out << scan_csv_string(result, with_timestamp);
}

void write_scan_json(const ScanResult& result, const std::string& path) {
  json doc{{"schema_version", 1},
           {"tool", "xxzdm 1.0"},
           {"spec", spec_to_json(result.spec)},
           {"spec_hash", result.spec_hash},
           {"all_converged", result.all_converged},
           {"records", json::array()}};
  for (const auto& r : result.records) doc["records"].push_back(record_to_json(r));
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw NumericError("cannot open " + path);
  out << doc.dump(1) << "\n";
}

ScanResult read_scan_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NumericError("cannot open " + path);
  json doc = json::parse(in);
  if (doc.at("schema_version").get<int>() != 1)
    throw NumericError("unsupported scan document version");
  ScanResult result;
  result.spec = spec_from_json(doc.at("spec"));
  result.spec_hash = doc.at("spec_hash").get<std::string>();
  result.all_converged = doc.at("all_converged").get<bool>();
  for (const auto& r : doc.at("records")) result.records.push_back(record_from_json(r));
  return result;
}

void write_gap_csv(const GapRecord& rec, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw NumericError("cannot open " + path);
  out << "L,inv_L,E0,E1,E2,delta1,delta2,converged\n";
  for (std::size_t i = 0; i < rec.lengths.size(); ++i)
    out << rec.lengths[i] << ',' << fmt(1.0 / rec.lengths[i]) << ',' << fmt(rec.e0[i]) << ','
        << fmt(rec.e1[i]) << ',' << fmt(rec.e2[i]) << ',' << fmt(rec.delta1[i]) << ','
        << fmt(rec.delta2[i]) << ',' << (rec.converged[i] ? 1 : 0) << "\n";
}

void write_gap_json(const GapRecord& rec, const ModelParams& base, const std::string& path) {
  json doc{{"schema_version", 1},
           {"params",
            {{"phi", base.phi}, {"lambda", base.lambda}, {"omega_prime", base.omega_prime}}},
           {"lengths", rec.lengths},
           {"E0", rec.e0},
           {"E1", rec.e1},
           {"E2", rec.e2},
           {"delta1", rec.delta1},
           {"delta2", rec.delta2},
           {"converged", rec.converged},
           {"extrapolated", rec.extrapolated}};
  if (rec.extrapolated) {
    doc["delta1_fit"] = {{"intercept", rec.delta1_intercept}, {"slope", rec.delta1_slope}};
    doc["delta2_fit"] = {{"intercept", rec.delta2_intercept}, {"slope", rec.delta2_slope}};
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw NumericError("cannot open " + path);
  out << doc.dump(1) << "\n";
}

}  // namespace xxzdm
