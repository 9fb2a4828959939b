// Command-line front end: single-point solves, parameter scans, finite-size
// gap studies, and phase-transition detection on scan output.
//
// Thread count is controlled by OMP_NUM_THREADS only.

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "xxzdm/scan.hpp"

namespace {

using namespace xxzdm;

struct CommonOpts {
  double phi = 0.0;
  double lambda = 1.0;
  double omega = 0.0;
  int length = 48;
  SweepConfig sweep;
  int excited = 0;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--phi", o.phi, "flux phi in radians, [0, pi]");
  cmd->add_option("--lambda", o.lambda, "interaction ratio lambda > 0");
  cmd->add_option("--omega", o.omega, "scaled transverse field omega'");
  cmd->add_option("--length", o.length, "chain length L");
  cmd->add_option("--chi", o.sweep.chi_max, "maximum bond dimension");
  cmd->add_option("--tol", o.sweep.tol_variance, "energy-variance convergence tolerance");
  cmd->add_option("--sweeps", o.sweep.max_sweeps, "maximum number of sweeps");
  cmd->add_option("--restarts", o.sweep.restarts, "independent random initializations");
  cmd->add_option("--seed", o.sweep.seed, "RNG seed");
  cmd->add_option("--noise", o.sweep.noise_scale,
                  "local-minimum escape noise scale (0 disables)");
  cmd->add_option("--solver-threshold", o.sweep.local_solver_dim_threshold,
                  "dense local eigensolver up to this dimension");
  cmd->add_option("--excited", o.excited, "number of excited states (0-2)");
  cmd->add_option("--out", o.out, "output path prefix (.csv/.json appended)");
}

int print_records(const ScanResult& result) {
  for (const auto& r : result.records) {
    std::printf("phi=%-8.5g lambda=%-7.5g omega'=%-8.5g L=%-4d E0=%-14.10g", r.phi,
                r.lambda, r.omega_prime, r.length, r.energy[0]);
    if (!std::isnan(r.energy[1])) std::printf(" d1=%-10.4g", r.delta1);
    if (!std::isnan(r.energy[2])) std::printf(" d2=%-10.4g", r.delta2);
    if (!std::isnan(r.ops.m[2]))
      std::printf(" Mx=%-8.4g Mz=%-8.4g Ny=%-8.4g Cz=%-8.4g", r.ops.m[0], r.ops.m[2],
                  r.ops.n[1], r.ops.c[2]);
    std::printf(" var=%-9.3g %s\n", r.variance, r.converged ? "ok" : "NOT-CONVERGED");
  }
  return result.all_converged ? 0 : 2;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

AxisSpec parse_axis(const std::string& s) {
  // name=start:stop:step
  const auto eq = s.find('=');
  if (eq == std::string::npos) throw CLI::ValidationError("--scan expects name=start:stop:step");
  AxisSpec a;
  a.name = s.substr(0, eq);
  const std::string rest = s.substr(eq + 1);
  if (std::sscanf(rest.c_str(), "%lf:%lf:%lf", &a.start, &a.stop, &a.step) != 3)
    throw CLI::ValidationError("--scan expects name=start:stop:step");
  return a;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational MPS solver for the XXZ chain with DM interaction "
               "and transverse field"};
  app.require_subcommand(1);

  CommonOpts point_opts, scan_opts, gaps_opts;
  bool no_sf = false, no_order = false;

  auto* point = app.add_subcommand("point", "solve a single parameter point");
  add_common(point, point_opts);
  point->add_flag("--no-sf", no_sf, "skip structure factors");
  point->add_flag("--no-order", no_order, "skip order parameters");

  std::vector<std::string> axis_strings;
  bool resume = false, warm = true, bidirectional = false;
  auto* scan = app.add_subcommand("scan", "solve a 1-D or 2-D parameter grid");
  add_common(scan, scan_opts);
  scan->add_option("--scan", axis_strings, "scan axis as name=start:stop:step (max 2)")
      ->required()
      ->expected(1, 2);
  scan->add_flag("--resume", resume, "resume from the journal of an interrupted run");
  scan->add_flag("--warm-start,!--no-warm-start", warm,
                 "seed each point from the previous point's state");
  scan->add_flag("--bidirectional", bidirectional,
                 "run warm chains both ways and keep the lower energy");
  scan->add_flag("--no-sf", no_sf, "skip structure factors");
  scan->add_flag("--no-order", no_order, "skip order parameters");

  std::string lengths_str;
  auto* gaps = app.add_subcommand("gaps", "finite-size gap study over several lengths");
  add_common(gaps, gaps_opts);
  gaps->add_option("--lengths", lengths_str, "comma-separated chain lengths, ascending")
      ->required();

  std::string detect_in, detect_columns = "Mz,Ny,Cz", detect_out;
  DetectionRules rules;
  auto* detect = app.add_subcommand("detect", "locate transitions in a 1-D scan result");
  detect->add_option("--in", detect_in, "scan JSON document")->required();
  detect->add_option("--columns", detect_columns, "order-parameter columns to examine");
  detect->add_option("--jump-threshold", rules.jump_threshold,
                     "first-order jump threshold, relative to the column max");
  detect->add_option("--floor", rules.floor, "continuous-crossing level, relative");
  detect->add_option("--gate", rules.column_gate, "skip columns with max below this");
  detect->add_option("--out", detect_out, "write detections as CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*point) {
      ModelParams p{point_opts.phi, point_opts.lambda, point_opts.omega, point_opts.length};
      RunPointOutput out =
          run_point(p, point_opts.sweep, point_opts.excited, !no_order, !no_sf);
      ScanResult res;
      res.spec.axes = {{"omega_prime", p.omega_prime, p.omega_prime, 1.0}};
      res.spec.fixed = {{"phi", p.phi}, {"lambda", p.lambda}};
      res.spec.length = p.length;
      res.spec.sweep = point_opts.sweep;
      res.spec.n_excited = point_opts.excited;
      res.spec.order_params = !no_order;
      res.spec.structure_factors = !no_sf;
      res.spec_hash = scan_spec_hash(res.spec);
      out.record.spec_hash = res.spec_hash;
      res.records.push_back(out.record);
      res.all_converged = out.record.converged;
      if (!point_opts.out.empty()) {
        write_scan_csv(res, point_opts.out + ".csv");
        write_scan_json(res, point_opts.out + ".json");
      }
      return print_records(res);
    }

    if (*scan) {
      ScanSpec spec;
      for (const auto& s : axis_strings) spec.axes.push_back(parse_axis(s));
      spec.fixed = {{"phi", scan_opts.phi},
                    {"lambda", scan_opts.lambda},
                    {"omega_prime", scan_opts.omega}};
      for (const auto& a : spec.axes) spec.fixed.erase(a.name);
      spec.length = scan_opts.length;
      spec.sweep = scan_opts.sweep;
      spec.n_excited = scan_opts.excited;
      spec.order_params = !no_order;
      spec.structure_factors = !no_sf;
      spec.warm_start = warm;
      spec.bidirectional = bidirectional;
      ScanIo io;
      io.out_prefix = scan_opts.out;
      io.resume = resume;
      ScanResult res = run_scan(spec, io);
      return print_records(res);
    }

    if (*gaps) {
      ModelParams p{gaps_opts.phi, gaps_opts.lambda, gaps_opts.omega, 2};
      GapRecord rec =
          finite_size_gap_study(p, parse_int_list(lengths_str), gaps_opts.sweep);
      bool ok = true;
      for (std::size_t i = 0; i < rec.lengths.size(); ++i) {
        std::printf("L=%-5d delta1=%-12.6g delta2=%-12.6g %s\n", rec.lengths[i],
                    rec.delta1[i], rec.delta2[i], rec.converged[i] ? "ok" : "NOT-CONVERGED");
        ok = ok && rec.converged[i];
      }
      if (rec.extrapolated)
        std::printf("extrapolation: delta1(1/L->0)=%.6g (slope %.6g), "
                    "delta2(1/L->0)=%.6g (slope %.6g)\n",
                    rec.delta1_intercept, rec.delta1_slope, rec.delta2_intercept,
                    rec.delta2_slope);
      else
        std::printf("extrapolation skipped: fewer than 3 converged lengths\n");
      if (!gaps_opts.out.empty()) {
        write_gap_csv(rec, gaps_opts.out + ".csv");
        write_gap_json(rec, p, gaps_opts.out + ".json");
      }
      return ok ? 0 : 2;
    }

    if (*detect) {
      ScanResult res = read_scan_json(detect_in);
      rules.columns.clear();
      std::stringstream ss(detect_columns);
      std::string tok;
      while (std::getline(ss, tok, ',')) rules.columns.push_back(tok);
      const std::vector<Detection> found = detect_transitions(res, rules);
      for (const auto& d : found)
        std::printf("%s = %.6g   %-12s via %s\n", d.param.c_str(), d.value, d.type.c_str(),
                    d.order_parameter.c_str());
      if (found.empty()) std::printf("no transitions detected\n");
      if (!detect_out.empty()) {
        std::ofstream out(detect_out);
        out << "param,value,type,order_parameter\n";
        for (const auto& d : found)
          out << d.param << ',' << d.value << ',' << d.type << ',' << d.order_parameter
              << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
