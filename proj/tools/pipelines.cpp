#include "pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>
#include <random>

#include "gapcert/certifier.hpp"
#include "gapcert/edlab.hpp"
#include "gapcert/families.hpp"
#include "gapcert/filters.hpp"

namespace gapcert::cli {

namespace {

using nlohmann::json;

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::CertifiedTrend: return kSuccess;
    case Verdict::Fails: return kFails;
    default: return kInconclusive;
  }
}

Check make_check(std::string name, double value, const std::string& rel, double threshold, std::string source) {
  bool ok = false;
  if (rel == "<=") ok = value <= threshold;
  else if (rel == ">=") ok = value >= threshold;
  else if (rel == "<") ok = value < threshold;
  else if (rel == ">") ok = value > threshold;
  else if (rel == "==") ok = value == threshold;
  return {std::move(name), ok, value, threshold, rel, std::move(source)};
}

Check flag_check(std::string name, bool ok, std::string source) {
  return {std::move(name), ok, ok ? 1.0 : 0.0, 1.0, "==", std::move(source)};
}

void finish_by_checks(Report& rep) {
  if (rep.all_passed()) rep.set_status("pass", kSuccess);
  else rep.set_status("fail", kFails);
}

// ---------------------------------------------------------------------------- certify

struct FamilyRun {
  double parameter;
  double epsilon;
  StabilityReport report;
};

FamilyModel build_family(const Config& cfg, const std::string& family, double a, int d) {
  const std::string s = "certify";
  if (family == "semi-hyperbolic") {
    SemiHyperbolicSpec spec;
    spec.a = a;
    spec.alpha = cfg.real(s, "alpha", spec.alpha);
    spec.beta = cfg.real(s, "beta", spec.beta);
    spec.gamma_const = cfg.real(s, "gamma_const", spec.gamma_const);
    spec.l_grid = cfg.reals(s, "grid", parse_real_list(a == 0.0 ? "log10:2:6:1" : "log10:10:15:0.5"));
    return model_semi_hyperbolic(spec);
  }
  if (family == "stacked") return model_stacked(d, cfg.reals(s, "grid", parse_real_list("log10:9:12:1")));
  if (family == "hyperbolic")
    return model_hyperbolic(cfg.real(s, "beta", 1.0), cfg.real(s, "rho_factor", 0.5),
                            cfg.reals(s, "grid", parse_real_list("log10:2:6:1")));
  return model_stretched(cfg.real(s, "eps1", 0.5), cfg.real(s, "rho_power", 1.5),
                         cfg.reals(s, "grid", parse_real_list("log10:20:24:0.5")));
}

}  // namespace

int run_certify(const Config& cfg, const std::string& out_dir, std::ostream& log) {
  const std::string s = "certify";
  const std::string family = cfg.text(s, "family", "semi-hyperbolic");
  const Perturbation pert{cfg.real(s, "J", 0.01), cfg.real(s, "mu", 5.0)};
  const Constants consts{cfg.real("constants", "c_W", 1.0), cfg.real("constants", "c_Wt", 1.0),
                         cfg.real("constants", "c_D", 1.0)};
  CertifierOptions opt;
  opt.slope_threshold = cfg.real(s, "slope_threshold", opt.slope_threshold);
  opt.bounded_variation = cfg.real(s, "bounded_variation", opt.bounded_variation);
  opt.interval_count = static_cast<int>(cfg.integer(s, "intervals", opt.interval_count));
  if (opt.interval_count < 1) throw UsageError("certify.intervals must be at least 1");

  std::vector<FamilyRun> runs;
  if (family == "semi-hyperbolic") {
    for (double a : cfg.reals(s, "a", {0.25})) {
      if (a < 0) throw UsageError("certify.a must be nonnegative");
      runs.push_back({a, 2 * a / (1 + 2 * a), {}});
    }
  } else if (family == "stacked") {
    for (int64_t d : cfg.integers(s, "d", {3})) {
      if (d < 2 || d > 64) throw UsageError("certify.d must be in [2, 64]");
      runs.push_back({static_cast<double>(d), std::nan(""), {}});
    }
  } else {
    runs.push_back({0.0, std::nan(""), {}});
  }
  for (auto& r : runs) {
    log << "certify " << family << " parameter " << r.parameter << "\n";
    r.report = certify(build_family(cfg, family, r.parameter, static_cast<int>(r.parameter)), pert, consts, opt);
  }

  Report rep("certify", cfg);
  rep.text("family", family);
  Table pts;
  pts.name = "points";
  pts.add_column("parameter", "config");
  const std::string src = "certifier.certify";
  for (const char* c : {"index", "ln_N", "D", "rho_star"}) pts.add_column(c, "certifier.model_" + family);
  for (const char* c : {"v1", "ln_v2", "ln_b0", "ln_b", "ln_delta", "ln_J0", "ln_fbar1", "rel_err"})
    pts.add_column(c, src);
  pts.add_column("degenerate", src);
  pts.add_column("verdict", src);
  Table iv;
  iv.name = "intervals";
  iv.add_column("parameter", "config");
  iv.add_column("k", "certifier.certify");
  iv.add_column("lower", "certifier.certify/intervals");
  iv.add_column("upper", "certifier.certify/intervals");
  Table scan;
  scan.name = "scan";
  scan.add_column("label", src);
  scan.add_column("parameter", "config");
  scan.add_column("epsilon", "cli.certify/2a/(1+2a)");
  scan.add_column("ln_J0", "certifier.certify/last member");
  scan.add_column("verdict", src);

  Verdict worst = Verdict::CertifiedTrend;
  for (const auto& r : runs) {
    const auto& sr = r.report;
    for (const auto& p : sr.points)
      pts.rows.push_back({r.parameter, p.index, p.ln_N, p.D, p.rho_star, p.v1, p.ln_v2, p.ln_b0, p.ln_b, p.ln_delta,
                          p.ln_J0, p.ln_fbar1, p.rel_err, p.degenerate, verdict_name(sr.verdict)});
    for (std::size_t k = 0; k < sr.intervals.size(); ++k)
      iv.rows.push_back({r.parameter, static_cast<double>(k), sr.intervals[k].first, sr.intervals[k].second});
    scan.rows.push_back({sr.label, r.parameter, r.epsilon, sr.points.empty() ? std::nan("") : sr.points.back().ln_J0,
                         verdict_name(sr.verdict)});
    const std::string tag = runs.size() > 1 ? "[" + format_number(r.parameter) + "]" : "";
    rep.text("verdict" + tag, verdict_name(sr.verdict));
    for (std::size_t i = 0; i < sr.reasons.size(); ++i) rep.text("reason" + tag + "." + std::to_string(i), sr.reasons[i]);
    if (!sr.points.empty()) {
      rep.value("ln_J0" + tag, sr.points.back().ln_J0, src + "/last member");
      rep.value("ln_delta" + tag, sr.points.back().ln_delta, src + "/last member");
    }
    rep.check(flag_check("certified-trend verdict" + tag, sr.verdict == Verdict::CertifiedTrend, src));
    bool dec = sr.points.size() >= 2;
    for (std::size_t i = 1; i < sr.points.size(); ++i) dec = dec && sr.points[i].ln_delta < sr.points[i - 1].ln_delta;
    rep.check(flag_check("delta strictly decreasing along the family" + tag, dec, src));
    if (sr.verdict == Verdict::Fails) worst = Verdict::Fails;
    else if (sr.verdict == Verdict::Inconclusive && worst != Verdict::Fails) worst = Verdict::Inconclusive;
  }
  bool scan_ok = true;
  if (runs.size() > 1) {
    std::vector<double> j0;
    for (const auto& r : runs) j0.push_back(r.report.points.back().ln_J0);
    if (family == "semi-hyperbolic") {
      const auto [lo, hi] = std::minmax_element(j0.begin(), j0.end());
      auto c = make_check("J0 relative spread across a", std::expm1(*hi - *lo), "<=", 0.2, "cli.certify/scan");
      scan_ok = c.passed;
      rep.check(c);
    } else {
      bool dec = true;
      for (std::size_t i = 1; i < j0.size(); ++i) dec = dec && j0[i] < j0[i - 1];
      scan_ok = dec;
      rep.check(flag_check("J0 strictly decreasing in d", dec, "cli.certify/scan"));
    }
  }
  rep.table(pts);
  rep.table(iv);
  if (runs.size() > 1) rep.table(scan);
  // The verdict decides the exit code; a failed scan-level check can only make it worse.
  int code = verdict_exit(worst);
  if (!scan_ok) code = kFails;
  rep.set_status(verdict_name(worst), code);
  rep.write(out_dir);
  log << "verdict " << verdict_name(worst) << "\n";
  return code;
}

// ---------------------------------------------------------------------------- families

int run_families(const Config& cfg, const std::string& out_dir, std::ostream& log) {
  const std::string s = "families";
  const std::string kind = cfg.text(s, "kind", "toric");
  FamilyInstance inst;
  const auto l1 = static_cast<int32_t>(cfg.integer(s, "l1", 3)), l2 = static_cast<int32_t>(cfg.integer(s, "l2", l1));
  if (kind == "toric") {
    inst = toric_code(l1, l2);
  } else if (kind == "subdivide") {
    inst = surface_code_from_complex(subdivide(torus_complex(l1, l2), static_cast<int32_t>(cfg.integer(s, "l", 2))),
                                     "subdivided torus");
  } else if (kind == "stacked") {
    inst = stacked_toric(static_cast<int32_t>(cfg.integer(s, "d", 3)), static_cast<int32_t>(cfg.integer(s, "l", 3)));
  } else {
    if (!cfg.has(s, "code")) throw UsageError("families.kind = code needs families.code");
    inst.code = load_code(cfg.text(s, "code", ""));
    inst.graph = interaction_graph(inst.code);
    inst.label = cfg.text(s, "code", "");
    inst.n = inst.code.n_qubits;
    inst.k = num_logicals(inst.code);
  }
  log << "family " << inst.label << " N=" << inst.n << "\n";
  Report rep("families", cfg);
  rep.text("label", inst.label);
  rep.value("N", inst.n, "families.construct");
  rep.value("k", num_logicals(inst.code), "stabilizer.num_logicals");
  rep.value("generators", static_cast<double>(inst.code.generators.size()), "families.construct");
  if (cfg.has(s, "distance_cap") || !inst.d) {
    const auto dr = distance(inst.code, static_cast<int32_t>(cfg.integer(s, "distance_cap", 8)));
    rep.value("d", dr.value, "stabilizer.distance");
    rep.text("d_exact", dr.exact ? "true" : "false");
    if (inst.d && dr.exact) rep.check(make_check("distance matches construction", dr.value, "==", *inst.d, "stabilizer.distance"));
  } else {
    rep.value("d", *inst.d, "families.construct");
  }
  rep.check(make_check("k matches construction", num_logicals(inst.code), "==", inst.k, "stabilizer.num_logicals"));
  const auto gp = growth_profile(inst.graph);
  rep.value("diameter", gp.diameter, "graph.growth_profile");
  const auto rr = indistinguishability_radius(inst.code, inst.graph, static_cast<int32_t>(cfg.integer(s, "radius_cap", 8)));
  rep.value("rho_star", rr.rho, "stabilizer.indistinguishability_radius");
  rep.text("rho_star_flagged", rr.flagged ? "true" : "false");
  rep.text("rho_star_capped", rr.capped ? "true" : "false");
  Table growth;
  growth.name = "growth";
  growth.add_column("r", "graph.growth_profile");
  growth.add_column("gamma", "graph.growth_profile");
  for (std::size_t r = 0; r < gp.gamma.size(); ++r)
    growth.rows.push_back({static_cast<double>(r), static_cast<double>(gp.gamma[r])});
  rep.table(growth);
  finish_by_checks(rep);
  rep.write(out_dir);
  return rep.exit_code();
}

// ---------------------------------------------------------------------------- edlab

namespace {

struct LabCode {
  StabilizerCode code;
  Graph graph;
  std::string label;
};

LabCode lab_code(const Config& cfg) {
  const std::string s = "edlab";
  if (cfg.has(s, "code") == cfg.has(s, "toric")) throw UsageError("edlab needs exactly one of 'code' and 'toric'");
  if (cfg.has(s, "toric")) {
    const auto t = cfg.integers(s, "toric", {});
    if (t.size() != 2 || t[0] < 2 || t[1] < 2) throw UsageError("edlab.toric expects 'L1, L2' with both >= 2");
    auto inst = toric_code(static_cast<int32_t>(t[0]), static_cast<int32_t>(t[1]));
    return {inst.code, inst.graph, inst.label};
  }
  LabCode c;
  c.code = load_code(cfg.text(s, "code", ""));
  c.graph = interaction_graph(c.code);
  c.label = cfg.text(s, "code", "");
  return c;
}

const TransferCache& shared_transfer() {
  static const Filter f;
  static const TransferCache wt(f);
  return wt;
}

Table trace_table(const SpectrumTrace& tr) {
  Table t;
  t.name = "trace";
  t.add_column("s", "config");
  const std::size_t m = tr.levels.empty() ? 0 : tr.levels.front().size();
  for (std::size_t k = 0; k < m; ++k) t.add_column("E" + std::to_string(k), "edlab.spectrum_trace");
  for (std::size_t i = 0; i < tr.s.size(); ++i) {
    std::vector<json> row{tr.s[i]};
    for (double e : tr.levels[i]) row.emplace_back(e);
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace

int run_edlab(const Config& cfg, const std::string& out_dir, std::ostream& log) {
  const std::string s = "edlab";
  const std::string task = cfg.text(s, "task", "spectrum");
  const LabCode lc = lab_code(cfg);
  const int n = lc.code.n_qubits;
  if (n > kSparseMaxQubits) throw UsageError("edlab: at most " + std::to_string(kSparseMaxQubits) + " qubits");
  const FieldSpec field{cfg.real(s, "field_x", task == "transport" ? 0.05 : 0.0), cfg.real(s, "field_z", 0.0)};
  log << "edlab " << task << " on " << lc.label << " (" << n << " qubits)\n";
  Report rep("edlab", cfg);
  rep.text("code", lc.label);
  rep.text("task", task);
  rep.value("field_strength", field.strength(), "edlab.FieldSpec");
  const PauliSum h0 = build_H0(lc.code);

  auto dense_only = [&](int limit) {
    if (n > limit) throw UsageError("edlab." + task + " is dense-only: at most " + std::to_string(limit) + " qubits");
  };

  if (task == "spectrum" || task == "intervals") {
    LowestOptions opt;
    opt.count = static_cast<std::size_t>(cfg.integer(s, "levels", 8));
    if (opt.count < 1) throw UsageError("edlab.levels must be positive");
    opt.tol = cfg.real(s, "eig_tol", 1e-8);
    if (n > opt.dense_max_qubits) opt.seed = cfg.require_seed("the iterative eigensolver's random start");
    const PauliSum v = build_perturbation(n, {field.h_x, field.h_z});
    const auto grid = cfg.reals(s, "s_grid", {1.0});
    // The trace runs H0 + s V, so V carries the field and s scales it.
    const auto tr = spectrum_trace(h0, v, grid, opt.count, opt);
    rep.value("ground_degeneracy", tr.ground_degeneracy, "edlab.spectrum_trace");
    rep.text("degeneracy_resolved", tr.degeneracy_resolved ? "true" : "false");
    rep.check(make_check("Weyl-consistent level motion (jumps)", static_cast<double>(tr.jumps.size()), "==", 0.0,
                         "edlab.spectrum_trace"));
    rep.table(trace_table(tr));
    if (task == "intervals") {
      const double bJ = cfg.real(s, "bJ", 0.3), delta = cfg.real(s, "delta", 1e-2);
      const bool shift = cfg.text(s, "shift_to_ground", "true") == "true";
      Table it;
      it.name = "intervals";
      it.add_column("s", "config");
      it.add_column("shift", "edlab.interval_check");
      it.add_column("min_bJ", "edlab.interval_check");
      it.add_column("min_delta", "edlab.interval_check");
      it.add_column("contained", "edlab.interval_check");
      double worst_b = 0, worst_d = 0;
      bool all = true;
      for (std::size_t i = 0; i < tr.s.size(); ++i) {
        const double sh = shift ? tr.levels[i].front() : 0.0;
        const auto r = interval_check(tr.levels[i], bJ, delta, sh);
        it.rows.push_back({tr.s[i], sh, r.min_bJ, r.min_delta, r.contained});
        worst_b = std::max(worst_b, r.min_bJ);
        worst_d = std::max(worst_d, r.min_delta);
        all = all && r.contained;
      }
      rep.table(it);
      rep.value("min_bJ", worst_b, "edlab.interval_check");
      rep.value("min_delta_at_bJ", worst_d, "edlab.interval_check");
      rep.check(flag_check("levels inside the union of intervals", all, "edlab.interval_check"));
    }
  } else if (task == "transport") {
    dense_only(kDenseMaxQubits);
    const auto steps = cfg.integers(s, "steps", {8, 16, 32});
    const double s_end = cfg.real(s, "s_end", 1.0), min_gap = cfg.real(s, "min_gap", 0.9);
    const double tol = cfg.real(s, "residual_tol", 1e-3), slope_tol = cfg.real(s, "slope_tol", 0.3);
    const CMat hd = h0.dense(), vd = build_perturbation(n, {field.h_x, field.h_z}).dense();
    Table t;
    t.name = "residuals";
    t.add_column("steps", "config");
    t.add_column("h", "edlab.qac_flow");
    t.add_column("residual", "edlab.qac_flow");
    t.add_column("min_gap", "edlab.qac_flow");
    t.add_column("unitarity_error", "edlab.qac_flow");
    std::vector<std::pair<double, double>> pts;
    double finest = std::numeric_limits<double>::infinity(), gap = std::numeric_limits<double>::infinity();
    for (int64_t k : steps) {
      if (k < 1) throw UsageError("edlab.steps must be positive");
      FlowOptions fo;
      fo.steps = static_cast<int>(k);
      fo.min_gap_required = min_gap;
      const auto fr = qac_flow(hd, vd, s_end, fo, shared_transfer());
      const double h = s_end / static_cast<double>(k);
      t.rows.push_back({static_cast<double>(k), h, fr.residual, fr.min_gap, fr.unitarity_error});
      log << "  steps " << k << " residual " << fr.residual << "\n";
      // Points at the rounding floor carry no order information.
      if (fr.residual > 1e-12) pts.emplace_back(std::log(h), std::log(fr.residual));
      finest = fr.residual;
      gap = std::min(gap, fr.min_gap);
    }
    rep.table(t);
    rep.value("residual_finest", finest, "edlab.qac_flow");
    rep.value("min_gap", gap, "edlab.qac_flow");
    rep.check(make_check("path min gap", gap, ">=", min_gap, "edlab.qac_flow"));
    rep.check(make_check("transport residual at finest step", finest, "<=", tol, "edlab.qac_flow"));
    if (pts.size() >= 2) {
      double mx = 0, my = 0;
      for (auto [x, y] : pts) mx += x, my += y;
      mx /= static_cast<double>(pts.size());
      my /= static_cast<double>(pts.size());
      double sxy = 0, sxx = 0;
      for (auto [x, y] : pts) sxy += (x - mx) * (y - my), sxx += (x - mx) * (x - mx);
      const double slope = sxy / sxx;
      rep.value("convergence_slope", slope, "cli.edlab/least squares of ln residual on ln h");
      rep.check(make_check("convergence order |slope - 4|", std::fabs(slope - 4.0), "<=", slope_tol, "edlab.qac_flow"));
    } else {
      rep.check(flag_check("convergence order measurable (two residuals above 1e-12)", false, "edlab.qac_flow"));
    }
  } else if (task == "indist") {
    dense_only(kDenseMaxQubits);
    Table t;
    t.name = "regions";
    for (const char* c : {"u", "r", "region_size", "symplectic", "dense", "agree"}) t.add_column(c, "edlab.indist_dense_check");
    bool agree = true;
    std::size_t count = 0;
    for (Vertex u = 0; u < lc.graph.size(); ++u) {
      const auto dist = lc.graph.distances(u);
      const int32_t ecc = *std::max_element(dist.begin(), dist.end());
      for (int32_t r = 0; r <= ecc; ++r) {
        const VertexSet a = ball(lc.graph, u, r);
        const bool sym = is_locally_indistinguishable(lc.code, a, lc.graph).indistinguishable;
        const bool den = indist_dense_check(lc.code, a, lc.graph).indistinguishable;
        t.rows.push_back({static_cast<double>(u), static_cast<double>(r), static_cast<double>(a.size()), sym, den, sym == den});
        agree = agree && sym == den;
        ++count;
      }
    }
    rep.table(t);
    rep.value("regions_checked", static_cast<double>(count), "edlab.indist_dense_check");
    rep.check(flag_check("symplectic and dense checks agree on every ball", agree, "edlab.indist_dense_check"));
  } else if (task == "relbound") {
    dense_only(kDenseMaxQubits);
    const uint64_t seed = cfg.require_seed("random relatively bounded perturbations");
    const auto bs = cfg.reals(s, "relbound_b", {0.1});
    const auto trials = cfg.integer(s, "trials", 20);
    if (trials < 1) throw UsageError("edlab.trials must be positive");
    const CMat hd = h0.dense();
    Table t;
    t.name = "relbound";
    for (const char* c : {"trial", "b", "measured_ratio", "worst_excess", "kernel_ok", "contained"})
      t.add_column(c, "edlab.relbound_check");
    std::mt19937_64 rng(seed);
    bool all = true;
    for (double b : bs) {
      if (!(b >= 0 && b < 1)) throw UsageError("edlab.relbound_b entries must be in [0, 1)");
      for (int64_t i = 0; i < trials; ++i) {
        const auto r = relbound_check(hd, b, rng());
        t.rows.push_back({static_cast<double>(i), b, r.measured_ratio, r.worst_excess, r.kernel_ok, r.contained});
        all = all && r.contained && r.kernel_ok;
      }
    }
    rep.table(t);
    rep.check(flag_check("every perturbed level inside [(1-b)l, (1+b)l]", all, "edlab.relbound_check"));
  } else {  // lr
    dense_only(kDenseMaxQubits);
    const CMat h = (h0.dense() + build_perturbation(n, {field.h_x, field.h_z}).dense()).eval();
    const auto dist = lc.graph.distances(0);
    const Vertex far = static_cast<Vertex>(std::max_element(dist.begin(), dist.end()) - dist.begin());
    CMat x(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    z << 1, 0, 0, -1;
    const auto prof = lr_profile(h, embed(x, {0}, n), {0}, embed(z, {far}, n), {far}, lc.graph,
                                 cfg.reals(s, "lr_t", parse_real_list("0:2:0.25")),
                                 ExpTailBound{cfg.real(s, "lr_mu", 1.0), field.strength(), 1.0});
    Table t;
    t.name = "lr_profile";
    t.add_column("t", "config");
    t.add_column("commutator_norm", "edlab.lr_profile");
    t.add_column("bound", "edlab.lr_profile");
    for (const auto& smp : prof.samples) t.rows.push_back({smp.t, smp.norm, smp.bound});
    rep.table(t);
    rep.value("velocity", prof.velocity, "edlab.lr_velocity");
    rep.value("distance", prof.distance, "graph.set_distance");
    rep.check(flag_check("commutator below the bound at every t", prof.below_bound, "edlab.lr_profile"));
  }
  finish_by_checks(rep);
  rep.write(out_dir);
  return rep.exit_code();
}

// ---------------------------------------------------------------------------- filters

int run_filters(const Config& cfg, const std::string& out_dir, std::ostream& log) {
  const std::string s = "filters";
  FilterParams fp;
  fp.gamma = cfg.real(s, "gamma", fp.gamma);
  const auto nt = cfg.integer(s, "n_terms", static_cast<int64_t>(fp.n_terms));
  if (nt < 1) throw UsageError("filters.n_terms must be positive");
  fp.n_terms = static_cast<std::size_t>(nt);
  fp.trunc_tol = cfg.real(s, "trunc_tol", fp.trunc_tol);
  const auto triples = cfg.integer(s, "tail_triples", 20);
  const uint64_t seed = triples > 0 ? cfg.require_seed("the random tail-lemma triples") : 0;
  log << "building filter (gamma " << fp.gamma << ")\n";
  Filter f(fp);

  Report rep("filters", cfg);
  const double w0 = std::abs(f.w_hat(0.0) - 1.0);
  rep.value("w_hat(0)", f.w_hat(0.0).real(), "filters.Filter::w_hat");
  rep.check(make_check("|w_hat(0) - 1|", w0, "<=", cfg.real(s, "w_hat_tol", 1e-6), "filters.Filter::w_hat"));
  const double band = cfg.real(s, "stop_band", 0.5);
  Table tr;
  tr.name = "transforms";
  tr.add_column("omega", "config");
  tr.add_column("abs_w_hat", "filters.Filter::w_hat");
  tr.add_column("W_hat_imag", "filters.Filter::W_hat");
  tr.add_column("W_hat_err", "filters.Filter::W_hat");
  double worst_stop = 0, worst_W = 0;
  for (double om : cfg.reals(s, "omega", {0.5, 0.75, 1.0, 1.5, 2.0, 3.0})) {
    if (std::fabs(om) < band) throw UsageError("filters.omega entries must lie in the stop band |omega| >= stop_band");
    const double aw = std::abs(f.w_hat(om));
    const auto Wh = f.W_hat(om);
    const double err = std::abs(Wh - std::complex<double>(0.0, -1.0 / om));
    tr.rows.push_back({om, aw, Wh.imag(), err});
    worst_stop = std::max(worst_stop, aw);
    worst_W = std::max(worst_W, err);
  }
  rep.table(tr);
  rep.check(make_check("max |w_hat| in the stop band", worst_stop, "<=", 1e-4, "filters.Filter::w_hat"));
  rep.check(make_check("max |W_hat + i/omega|", worst_W, "<=", cfg.real(s, "W_hat_tol", 1e-4), "filters.Filter::W_hat"));
  rep.value("W(0)", f.W(0.0), "filters.Filter::W");
  rep.check(make_check("|W(0) - 1/2|", std::fabs(f.W(0.0) - 0.5), "<=", cfg.real(s, "W0_tol", 1e-6), "filters.Filter::W"));
  rep.value("t_cut", f.t_cut(), "filters.Filter");
  rep.value("t_bound", f.t_bound(), "filters.Filter");
  rep.value("truncation_residual", f.truncation_residual(), "filters.Filter");

  const auto br = verify_bounds(f, cfg.reals(s, "t_samples", parse_real_list("0:2000:7.3")));
  rep.check(flag_check("w bound at every sample with gamma t >= e^(1/sqrt 2)", br.w_bound_holds, "filters.verify_bounds"));
  rep.value("w_bound_min_margin", br.min_margin, "filters.verify_bounds");
  rep.constant("fitted_c_W", br.fitted_c_W, "filters.verify_bounds");
  rep.constant("C_w", br.C_w, "filters.verify_bounds");
  rep.constant("C_W", br.C_W, "filters.verify_bounds");
  rep.constant("C_intW", br.C_intW, "filters.verify_bounds");
  Table wb;
  wb.name = "w_bound";
  for (const char* c : {"t", "ln_w", "ln_bound", "holds"}) wb.add_column(c, "filters.verify_bounds");
  for (const auto& smp : br.samples) wb.rows.push_back({smp.t, smp.ln_w, smp.ln_bound, smp.holds});
  rep.table(wb);

  if (triples > 0) {
    std::mt19937_64 rng(seed);
    Table tl;
    tl.name = "tail_lemma";
    for (const char* c : {"k", "a", "t", "ln_lhs", "ln_rhs", "holds"}) tl.add_column(c, "filters.intua_check");
    bool all = true;
    int64_t found = 0, tries = 0;
    while (found < triples) {
      if (++tries > 1000 * triples) throw std::runtime_error("filters: could not draw admissible tail-lemma triples");
      const int k = static_cast<int>(rng() % 5);
      const double a = std::exp(std::uniform_real_distribution<double>(std::log(0.05), std::log(5.0))(rng));
      const double t = std::exp(std::uniform_real_distribution<double>(4.0, 9.0)(rng));
      const auto r = intua_check(k, a, t);
      if (!r.precondition_met) continue;
      ++found;
      tl.rows.push_back({static_cast<double>(k), a, t, r.ln_lhs, r.ln_rhs, r.holds});
      all = all && r.holds;
    }
    rep.table(tl);
    rep.check(flag_check("tail lemma at every admissible triple", all, "filters.intua_check"));
  }
  finish_by_checks(rep);
  rep.write(out_dir);
  return rep.exit_code();
}

int run_task(const std::string& task, const Config& cfg, const std::string& out_dir, std::ostream& log) {
  if (cfg.has("", "task") && cfg.text("", "task", "") != task)
    throw UsageError("config task '" + cfg.text("", "task", "") + "' does not match subcommand '" + task + "'");
  if (task == "certify") return run_certify(cfg, out_dir, log);
  if (task == "families") return run_families(cfg, out_dir, log);
  if (task == "edlab") return run_edlab(cfg, out_dir, log);
  if (task == "filters") return run_filters(cfg, out_dir, log);
  throw UsageError("unknown task '" + task + "'");
}

}  // namespace gapcert::cli
