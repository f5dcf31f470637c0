#include "cuspsheet/cli/commands.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>
#include <ostream>
#include <sstream>

#include "cuspsheet/capture_kernel.hpp"
#include "cuspsheet/cli/output.hpp"
#include "cuspsheet/gaussfields.hpp"
#include "cuspsheet/su2.hpp"

namespace cuspsheet::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

TransportSolution transport_for(const Scenario& sc, const LatticeSpec& L, Chirality c) {
  const double h = L.step;
  const bool plus = c == Chirality::plus;
  const double lo = static_cast<double>(plus ? L.plus_min() : L.minus_min()) * h;
  const double hi = static_cast<double>(plus ? L.plus_max() : L.minus_max()) * h;
  return integrate_transport(plus ? sc.rhoPlus : sc.rhoMinus, c, lo, hi, h, plus ? sc.initialPlus : sc.initialMinus,
                             sc.eulerTransport ? StepScheme::explicit_euler : StepScheme::magnus_midpoint);
}

struct TransportDefects {
  double unitarity = 0.0;
  double determinant = 0.0;
  double nullNorm = 0.0;
};

TransportDefects transport_defects(const TransportSolution& ts) {
  TransportDefects d;
  for (const Matrix2C& t : ts.samples()) {
    d.unitarity = std::max(d.unitarity, unitarity_defect(t));
    d.determinant = std::max(d.determinant, determinant_defect(t));
    d.nullNorm = std::max(d.nullNorm, std::abs(null_vector(t, ts.chirality()).minkowski_norm()));
  }
  return d;
}

ordered_json lattice_json(const LatticeSpec& L) {
  return {{"step", L.step},        {"t_min", L.t(0)},   {"t_max", L.t(L.nt() - 1)}, {"s_min", L.s(0)},
          {"s_max", L.s(L.ns() - 1)}, {"nt", L.nt()}, {"ns", L.ns()}};
}

ordered_json constraints_json(const ConstraintReport& c) {
  return {{"null_plus", c.nullPlus}, {"null_minus", c.nullMinus}, {"wave", c.wave}, {"points", c.points}};
}

const char* status_name(Status s) {
  switch (s) {
    case Status::pass:
      return "PASS";
    case Status::fail:
      return "FAIL";
    case Status::skip:
      return "SKIP";
  }
  return "?";
}

class Run {
 public:
  Run(Command command, const RunOptions& options, std::ostream& log) : command_(command), log_(log) {
    scenario_ = load_scenario(options.scenario);
    if (options.step) {
      if (!(*options.step > 0.0)) throw ScenarioError("--step must be positive");
      scenario_.grid.step = *options.step;
    }
    if (options.tol) {
      if (!(*options.tol > 0.0)) throw ScenarioError("--tol must be positive");
      scenario_.cuspTol = *options.tol;
    }
    if (options.threads) {
      if (*options.threads < 1) throw ScenarioError("--threads must be at least 1");
      omp_set_num_threads(*options.threads);
    }
    outDir_ = options.out ? *options.out : scenario_.outputDir;
  }

  int execute() {
    sim_.emplace(simulate(scenario_));
    int code = 0;
    const bool all = command_ == Command::all;
    if (all || command_ == Command::simulate) write_simulation();
    if (all || command_ == Command::cusps) write_cusps();
    if (all || command_ == Command::verify) code = std::max(code, write_verify());
    if (command_ == Command::kernel || (all && scenario_.kernel)) write_kernel();
    write_manifest();
    return code;
  }

 private:
  void emit(const std::string& name, const std::string& contents) {
    write_atomic(outDir_ / name, contents);
    files_[name] = sha256_hex(contents);
    log_ << "wrote " << (outDir_ / name).string() << "\n";
  }

  void write_simulation() {
    const Simulation& s = *sim_;
    const LatticeSpec& L = s.lattice;
    std::string ws = "t,s,X0,X1,X2,X3,metric\n";
    std::string metric = "t,s,metric,combination_sq\n";
    for (std::size_t i = 0; i < L.nt(); ++i) {
      for (std::size_t j = 0; j < L.ns(); ++j) {
        const Vec4& x = s.grid.X(i, j);
        const std::string ts = fmt(L.t(i)) + "," + fmt(L.s(j)) + ",";
        ws += ts + fmt(x(0)) + "," + fmt(x(1)) + "," + fmt(x(2)) + "," + fmt(x(3)) + "," + fmt(s.grid.metric(i, j)) +
              "\n";
        metric += ts + fmt(s.grid.metric(i, j)) + "," + fmt(s.grid.combination_sq(i, j)) + "\n";
      }
    }
    emit("worldsheet.csv", ws);
    emit("metric.csv", metric);

    const TransportDefects dp = transport_defects(s.plus);
    const TransportDefects dm = transport_defects(s.minus);
    ordered_json meta;
    meta["scenario"] = scenario_.name;
    meta["scenario_sha256"] = sha256_hex(scenario_.sourceText);
    meta["kappa"] = scenario_.kappa;
    meta["base_point"] = {scenario_.basePoint(0), scenario_.basePoint(1), scenario_.basePoint(2),
                          scenario_.basePoint(3)};
    meta["lattice"] = lattice_json(L);
    meta["transport"] = {
        {"scheme", scenario_.eulerTransport ? "explicit_euler" : "magnus_midpoint"},
        {"xi_plus", {s.plus.grid_start(), s.plus.grid_end()}},
        {"xi_minus", {s.minus.grid_start(), s.minus.grid_end()}},
        {"max_unitarity_defect", std::max(dp.unitarity, dm.unitarity)},
        {"max_determinant_defect", std::max(dp.determinant, dm.determinant)},
        {"max_frame_null_norm", std::max(dp.nullNorm, dm.nullNorm)}};
    if (L.nt() >= 3 && L.ns() >= 3) meta["constraints"] = constraints_json(constraint_residuals(s.grid));
    emit("metadata.json", meta.dump(2) + "\n");
  }

  void write_cusps() {
    const Simulation& s = *sim_;
    DetectOptions opt;
    opt.tol = scenario_.cuspTol;
    const auto events = detect(s.plus, s.minus, s.grid, opt);
    ordered_json list = ordered_json::array();
    for (const CuspEvent& e : events) {
      ordered_json j;
      j["kind"] = to_string(e.kind);
      j["t"] = e.t;
      j["s"] = e.s;
      j["residual"] = e.residual;
      j["lattice_points"] = e.latticePoints;
      if (e.nullDirection) {
        const NullVector& n = *e.nullDirection;
        j["null_direction"] = {n.x0, n.x1, n.x2, n.x3};
      }
      if (e.diamond) {
        const DiamondDescriptor& d = *e.diamond;
        j["diamond"] = {{"center_t", d.centerT},   {"center_s", d.centerS}, {"half_width", d.halfWidth},
                        {"t_start", d.tStart},     {"t_end", d.tEnd},       {"duration", d.tEnd - d.tStart},
                        {"xi_plus", {d.plusMin, d.plusMax}}, {"xi_minus", {d.minusMin, d.minusMax}},
                        {"fill_fraction", d.fillFraction}};
        const SegmentReport r = verify_degenerate_segment(e, s.grid);
        j["segment"] = {{"tolerance", r.tolerance},         {"line_deviation", r.lineDeviation},
                        {"max_ds_x", r.maxDsX},             {"direction_norm", r.directionNorm},
                        {"segment_norm", r.segmentNorm},    {"passed", r.passed()}};
      }
      if (!e.trajectory.empty()) {
        ordered_json traj = ordered_json::array();
        for (const auto& [t, sp] : e.trajectory) traj.push_back({t, sp});
        j["trajectory"] = traj;
      }
      if (e.kind != CuspKind::isolated) {
        try {
          j["speed"] = cusp_speed(e, s.grid);
        } catch (const std::invalid_argument& err) {
          j["speed_error"] = err.what();
        }
      }
      list.push_back(j);
    }
    ordered_json doc;
    doc["tolerance"] = opt.tol;
    doc["events"] = list;
    emit("cusps.json", doc.dump(2) + "\n");
    summary_["cusp_events"] = events.size();
  }

  int write_verify() {
    const Simulation& s = *sim_;
    const std::vector<Check> checks = verify_checks(s);
    ordered_json list = ordered_json::array();
    int failures = 0;
    for (const Check& c : checks) {
      list.push_back({{"name", c.name},
                      {"status", status_name(c.status)},
                      {"value", c.value},
                      {"threshold", c.threshold},
                      {"note", c.note}});
      if (c.status == Status::fail) ++failures;
      log_ << status_name(c.status) << "  " << c.name << "  " << fmt(c.value) << " (threshold " << fmt(c.threshold)
           << ")" << (c.note.empty() ? "" : "  " + c.note) << "\n";
    }
    ordered_json doc;
    doc["passed"] = failures == 0;
    doc["failures"] = failures;
    doc["checks"] = list;
    emit("verify.json", doc.dump(2) + "\n");
    summary_["verify_failures"] = failures;

    const GaussFields f = decompose_lattice(s.plus, s.minus, s.lattice, scenario_.singularThreshold);
    const LatticeSpec& L = s.lattice;
    std::string csv =
        "t,s,re_phi,im_phi,re_alpha_plus,im_alpha_plus,re_alpha_minus,im_alpha_minus,singular,branch_jump,chi\n";
    for (std::size_t i = 0; i < L.nt(); ++i) {
      for (std::size_t j = 0; j < L.ns(); ++j) {
        double chi = std::nan("");
        try {
          chi = second_forms(s.plus, s.minus, f, scenario_.kappa, scenario_.beta, L.t(i), L.s(j)).chi;
        } catch (const PhaseUndefined&) {
        }
        csv += fmt(L.t(i)) + "," + fmt(L.s(j)) + "," + fmt(f.phi(i, j).real()) + "," + fmt(f.phi(i, j).imag()) + "," +
               fmt(f.alphaPlus(i, j).real()) + "," + fmt(f.alphaPlus(i, j).imag()) + "," +
               fmt(f.alphaMinus(i, j).real()) + "," + fmt(f.alphaMinus(i, j).imag()) + "," +
               std::to_string(f.singular(i, j)) + "," + std::to_string(f.branchJump(i, j)) + "," + fmt(chi) + "\n";
      }
    }
    emit("fields.csv", csv);
    return failures == 0 ? 0 : 1;
  }

  void write_kernel() {
    if (!scenario_.kernel) throw ScenarioError("scenario has no 'kernel' section");
    const KernelSpec& k = *scenario_.kernel;
    const auto table = kernel_table(k.momenta, k.momentaPrime, k.time, sim_->grid, k.config);
    std::string csv = "px,py,pz,ppx,ppy,ppz,re,im\n";
    for (const KernelEntry& e : table) {
      csv += fmt(e.p(0)) + "," + fmt(e.p(1)) + "," + fmt(e.p(2)) + "," + fmt(e.pPrime(0)) + "," + fmt(e.pPrime(1)) +
             "," + fmt(e.pPrime(2)) + "," + fmt(e.value.real()) + "," + fmt(e.value.imag()) + "\n";
    }
    emit("kernel.csv", csv);
    summary_["kernel_entries"] = table.size();
  }

  void write_manifest() {
    static const char* names[] = {"simulate", "cusps", "verify", "kernel", "all"};
    ordered_json m;
    m["command"] = names[static_cast<int>(command_)];
    m["scenario"] = scenario_.name;
    m["scenario_sha256"] = sha256_hex(scenario_.sourceText);
    m["grid"] = lattice_json(sim_->lattice);
    m["cusp_tol"] = scenario_.cuspTol;
    ordered_json residuals = summary_;
    const TransportDefects dp = transport_defects(sim_->plus);
    const TransportDefects dm = transport_defects(sim_->minus);
    residuals["max_unitarity_defect"] = std::max(dp.unitarity, dm.unitarity);
    residuals["max_determinant_defect"] = std::max(dp.determinant, dm.determinant);
    if (sim_->lattice.nt() >= 3 && sim_->lattice.ns() >= 3) {
      residuals["constraints"] = constraints_json(constraint_residuals(sim_->grid));
    }
    m["residual_summary"] = residuals;
    ordered_json files = ordered_json::object();
    for (const auto& [name, hash] : files_) files[name] = hash;
    m["files"] = files;
    write_atomic(outDir_ / "manifest.json", m.dump(2) + "\n");
    log_ << "wrote " << (outDir_ / "manifest.json").string() << "\n";
  }

  Command command_;
  std::ostream& log_;
  Scenario scenario_;
  fs::path outDir_;
  std::optional<Simulation> sim_;
  std::map<std::string, std::string> files_;
  ordered_json summary_ = ordered_json::object();
};

// Largest |phi_a - phi_b| (Im part modulo 4 pi) off the dilated singular masks.
double field_distance(const GaussFields& a, const GaussFields& b) {
  double worst = 0.0;
  const std::size_t nt = a.lattice.nt();
  const std::size_t ns = a.lattice.ns();
  const auto near_singular = [&](std::size_t i, std::size_t j) {
    for (long di = -2; di <= 2; ++di) {
      for (long dj = -2; dj <= 2; ++dj) {
        const long ii = static_cast<long>(i) + di;
        const long jj = static_cast<long>(j) + dj;
        if (ii < 0 || jj < 0 || ii >= static_cast<long>(nt) || jj >= static_cast<long>(ns)) continue;
        const auto ui = static_cast<std::size_t>(ii);
        const auto uj = static_cast<std::size_t>(jj);
        if (a.singular(ui, uj) || b.singular(ui, uj)) return true;
      }
    }
    return false;
  };
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < ns; ++j) {
      if (near_singular(i, j)) continue;
      const cplx d = a.phi(i, j) - b.phi(i, j);
      const double im = d.imag() - 4.0 * pi * std::round(d.imag() / (4.0 * pi));
      worst = std::max({worst, std::hypot(d.real(), im), std::abs(a.alphaPlus(i, j) - b.alphaPlus(i, j)),
                        std::abs(a.alphaMinus(i, j) - b.alphaMinus(i, j))});
    }
  }
  return worst;
}

// Residual at h should shrink against the same stencil at 2h (second order: ~4x).
Check two_level(const std::string& name, double atH, double at2H, double floor) {
  Check c;
  c.name = name;
  c.value = atH;
  c.threshold = std::max(floor, at2H / 2.5);
  c.status = atH <= c.threshold ? Status::pass : Status::fail;
  std::ostringstream note;
  note << "at 2h: " << fmt(at2H);
  if (atH > 0.0) note << ", ratio " << fmt(at2H / atH);
  c.note = note.str();
  return c;
}

Check bounded(const std::string& name, double value, double threshold, std::string note = {}) {
  return {name, value, threshold, value <= threshold ? Status::pass : Status::fail, std::move(note)};
}

}  // namespace

Simulation simulate(const Scenario& sc) {
  const LatticeSpec L = LatticeSpec::from_ranges(sc.grid.tMin, sc.grid.tMax, sc.grid.sMin, sc.grid.sMax, sc.grid.step);
  TransportSolution plus = transport_for(sc, L, Chirality::plus);
  TransportSolution minus = transport_for(sc, L, Chirality::minus);
  WorldSheetGrid grid = reconstruct(plus, minus, sc.kappa, sc.basePoint, L);
  return {sc, L, std::move(plus), std::move(minus), std::move(grid)};
}

std::vector<Check> verify_checks(const Simulation& sim) {
  const Scenario& sc = sim.scenario;
  const LatticeSpec& L = sim.lattice;
  const double h = L.step;
  std::vector<Check> out;

  const TransportDefects dp = transport_defects(sim.plus);
  const TransportDefects dm = transport_defects(sim.minus);
  out.push_back(bounded("su2_unitarity", std::max(dp.unitarity, dm.unitarity), 1e-10));
  out.push_back(bounded("su2_determinant", std::max(dp.determinant, dm.determinant), 1e-10));
  out.push_back(bounded("frame_null_norm", std::max(dp.nullNorm, dm.nullNorm), 1e-10));

  if (L.nt() >= 3 && L.ns() >= 3) {
    const ConstraintReport c = constraint_residuals(sim.grid);
    const double bound = std::max(sc.rhoPlus.magnitude_bound(), sc.rhoMinus.magnitude_bound());
    const double nullLimit = 3.0 * sc.kappa * sc.kappa * bound * bound * h * h + 1e-12;
    out.push_back(bounded("null_constraint_plus", c.nullPlus, nullLimit, "3 kappa^2 max|rho|^2 h^2"));
    out.push_back(bounded("null_constraint_minus", c.nullMinus, nullLimit, "3 kappa^2 max|rho|^2 h^2"));
    double xmax = 1.0;
    for (const Vec4& x : sim.grid.X.data()) xmax = std::max(xmax, x.norm());
    out.push_back(bounded("wave_equation", c.wave, 256.0 * 2.2e-16 * xmax / (h * h), "roundoff level"));
  } else {
    out.push_back({"null_constraint", 0.0, 0.0, Status::skip, "lattice needs 3 points per axis"});
  }

  const GaussFields fields = decompose_lattice(sim.plus, sim.minus, L, sc.singularThreshold);
  const ProfileFunction rp = as_function(sc.rhoPlus);
  const ProfileFunction rm = as_function(sc.rhoMinus);
  if (L.nt() >= 9 && L.ns() >= 9) {
    // Smooth, resolved patches only: near a cusp phi = -2 log K11 has unbounded
    // derivatives, and bumps narrower than 20 h are not in the asymptotic regime.
    const double minModulus = 0.5;
    const double minWidth = 20.0 * h;
    const auto unresolved = [&](const ChiralProfile& p, double xi) {
      for (const Bump& b : p.terms()) {
        if (b.width < minWidth && std::abs(xi - b.center) < b.width + 3.0 * h) return true;
      }
      return false;
    };
    Mask2D exclude(L.nt(), L.ns(), 0);
    for (std::size_t i = 0; i < L.nt(); ++i) {
      for (std::size_t j = 0; j < L.ns(); ++j) {
        exclude(i, j) = unresolved(sc.rhoPlus, static_cast<double>(L.plus_index(i, j)) * h) ||
                        unresolved(sc.rhoMinus, static_cast<double>(L.minus_index(i, j)) * h);
      }
    }
    const PdeResiduals r1 = pde_residuals(fields, rp, rm, {1, 2, minModulus, exclude});
    const PdeResiduals r2 = pde_residuals(fields, rp, rm, {2, 2, minModulus, exclude});
    const double floor = 1e-8;
    const std::string region = "; region |K11| >= " + fmt(minModulus) + ", bumps >= 20h: " +
                               std::to_string(r1.points) + " centres, " + std::to_string(r1.skipped) + " skipped";
    const std::pair<const char*, std::pair<double, double>> rows[] = {
        {"pde_liouville", {r1.liouville, r2.liouville}},       {"pde_alpha_minus", {r1.alphaMinus, r2.alphaMinus}},
        {"pde_alpha_plus", {r1.alphaPlus, r2.alphaPlus}},      {"pde_chiral_plus", {r1.chiralPlus, r2.chiralPlus}},
        {"pde_chiral_minus", {r1.chiralMinus, r2.chiralMinus}}, {"pde_rho_recovery", {r1.rhoRecovery, r2.rhoRecovery}}};
    for (const auto& [name, v] : rows) {
      Check c = two_level(name, v.first, v.second, floor);
      c.note += region;
      out.push_back(c);
    }
  } else {
    out.push_back({"pde_residuals", 0.0, 0.0, Status::skip, "lattice needs 9 points per axis"});
  }

  const CrossValidation cv = cross_validate(sim.plus, sim.minus, fields);
  out.push_back(bounded("gauss_vs_metric", cv.maxRelativeDeviation, 1e-4,
                        std::to_string(cv.compared) + " points compared, " + std::to_string(cv.excluded) + " masked"));

  // Goursat against the transport path, at h and 2h.
  try {
    const auto goursat_error = [&](const Simulation& s) {
      const GaussFields decomp = decompose_lattice(s.plus, s.minus, s.lattice, sc.singularThreshold);
      const GoursatBoundary bd = boundary_from_transport(s.plus, s.minus, s.lattice);
      const GaussFields solved = goursat_solve(rp, rm, bd, s.lattice, sc.singularThreshold);
      return field_distance(decomp, solved);
    };
    Scenario coarse = sc;
    coarse.grid.step = 2.0 * h;
    const double e1 = goursat_error(sim);
    const double e2 = goursat_error(simulate(coarse));
    out.push_back(two_level("goursat_vs_transport", e1, e2, 1e-8));
  } catch (const GoursatBlowUp& e) {
    out.push_back({"goursat_vs_transport", 0.0, 0.0, Status::skip, e.what()});
  } catch (const std::invalid_argument& e) {
    out.push_back({"goursat_vs_transport", 0.0, 0.0, Status::skip, e.what()});
  }

  DetectOptions opt;
  opt.tol = sc.cuspTol;
  for (const CuspEvent& e : detect(sim.plus, sim.minus, sim.grid, opt)) {
    if (e.kind != CuspKind::stableDiamond) continue;
    const SegmentReport r = verify_degenerate_segment(e, sim.grid);
    std::ostringstream name;
    name << "degenerate_segment(t=" << fmt(e.t) << ",s=" << fmt(e.s) << ")";
    out.push_back({name.str(), std::max({r.lineDeviation, r.maxDsX, r.directionNorm, r.segmentNorm}), r.tolerance,
                   r.passed() ? Status::pass : Status::fail, r.diagnostic()});
  }
  return out;
}

int run_command(Command command, const RunOptions& options, std::ostream& log) {
  try {
    Run run(command, options, log);
    return run.execute();
  } catch (const ScenarioError& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    log << "error: invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    log << "error: invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace cuspsheet::cli
