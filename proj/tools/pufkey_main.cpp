#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "pufkey/io.hpp"

namespace {

using namespace pufkey;
namespace fs = std::filesystem;

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

RegionKind parse_kind(const std::string& s) {
  if (s == "gs") return RegionKind::gs;
  if (s == "cs") return RegionKind::cs;
  throw invalid_input("--kind must be gs or cs");
}

SearchCaps parse_caps(const std::string& s) {
  SearchCaps caps;
  if (s.empty()) return caps;
  const auto x = s.find('x');
  if (x == std::string::npos)
    throw invalid_input("--caps must look like UxV, e.g. 4x3");
  try {
    caps.u_cap = std::stoul(s.substr(0, x));
    caps.v_cap = std::stoul(s.substr(x + 1));
  } catch (const std::exception&) {
    throw invalid_input("--caps must look like UxV, e.g. 4x3");
  }
  if (caps.u_cap < 1 || caps.v_cap < 1)
    throw invalid_input("--caps entries must be >= 1");
  return caps;
}

void emit_manifest(const RunManifest& m) {
  const std::string target = m.outputs.empty() ? "run" : m.outputs.front();
  write_text_atomic(target + ".manifest.json", manifest_json(m));
}

// --- gaussian-region --------------------------------------------------------

int cmd_gaussian_region(const std::string& model_path, const std::string& kind,
                        std::size_t points, const std::string& out) {
  const double t0 = now_ms();
  const CompoundGaussianModel m = load_gaussian_model(model_path);
  const auto [k_star, l_star] = saddle_indices(m);
  const bool degraded = degradedness_check(m);
  std::cout << "saddle indices: k*=" << k_star << " l*=" << l_star << "\n"
            << "degraded: " << (degraded ? "yes" : "no") << "\n";
  RunManifest man;
  man.command = "gaussian-region";
  man.inputs = {model_path};
  man.outputs = {out};
  if (!degraded) {
    std::cerr << "warning: model is not degraded; the region is r_s = 0 with "
                 "any r_j >= 0, r_l >= 0\n";
    write_text_atomic(out,
                      "alpha,r_s,r_j,r_l\n"
                      "# non-degraded model: r_s = 0 for all r_j >= 0, "
                      "r_l >= 0\n");
    man.duration_ms = now_ms() - t0;
    emit_manifest(man);
    return 0;
  }
  const AlphaCurve curve = trace_curve(m, parse_kind(kind), points);
  write_text_atomic(out, curve_csv(curve));
  man.duration_ms = now_ms() - t0;
  emit_manifest(man);
  return 0;
}

// --- fig3 -------------------------------------------------------------------

CompoundGaussianModel fig3_case(int which) {
  const double s2 = 5.0;
  const std::vector<double> h1{0.95};
  const std::vector<double> h3{0.95, 0.95, 0.95};
  const std::vector<double> e1{0.8};
  const std::vector<double> e4{0.8, 0.8, 0.5, 0.5};
  switch (which) {
    case 1: return CompoundGaussianModel(s2, {h1}, {e1});
    case 2: return CompoundGaussianModel(s2, {h3}, {e1});
    default: return CompoundGaussianModel(s2, {h3}, {e4});
  }
}

// invert the CS storage constraint (same closed form as the GS one, with
// the eve gain in place of the decoder gain)
double alpha_from_storage_cs(const CompoundGaussianModel& m, double r_j) {
  const auto [k, l] = saddle_indices(m);
  (void)k;
  const double b = m.sigma_x2() * power_gain(m.eve_gains()[l]);
  const double two_pow = std::exp2(2.0 * r_j);
  return 1.0 / (two_pow + (two_pow - 1.0) * b);
}

int cmd_fig3(const std::string& out_dir, std::size_t points) {
  const double t0 = now_ms();
  fs::create_directories(out_dir);
  const CompoundGaussianModel c1 = fig3_case(1), c2 = fig3_case(2),
                              c3 = fig3_case(3);
  char buf[256];
  // (a) storage vs key rate for the three antenna configurations
  std::ostringstream a;
  a << "r_j,case1_r_s,case2_r_s,case3_r_s\n";
  for (std::size_t i = 0; i < points; ++i) {
    const double rj = 8.0 * static_cast<double>(i) / (points - 1);
    std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6g,%.6g\n", rj,
                  key_rate_vs_storage(c1, rj), key_rate_vs_storage(c2, rj),
                  key_rate_vs_storage(c3, rj));
    a << buf;
  }
  // (b) both rates against the tuning parameter, strongest-eve case
  std::ostringstream b;
  b << "alpha,r_s,r_j\n";
  for (const auto& [alpha, t] : trace_curve(c3, RegionKind::gs, points).samples) {
    std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6g\n", alpha, t.r_s, t.r_j);
    b << buf;
  }
  // (c,d) GS vs CS at matched storage, multi-antenna decoder case
  std::ostringstream c, d;
  c << "r_j,gs_r_s,cs_r_s\n";
  d << "r_j,gs_r_l,cs_r_l\n";
  for (std::size_t i = 0; i < points; ++i) {
    const double rj = 1e-3 + (8.0 - 1e-3) * static_cast<double>(i) / (points - 1);
    const RateTriple gs = gs_rate_point(c2, alpha_from_storage(c2, rj));
    const RateTriple cs = cs_rate_point(c2, alpha_from_storage_cs(c2, rj));
    std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6g\n", rj, gs.r_s, cs.r_s);
    c << buf;
    std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6g\n", rj, gs.r_l, cs.r_l);
    d << buf;
  }
  const std::string pa = out_dir + "/fig3a.csv", pb = out_dir + "/fig3b.csv",
                    pc = out_dir + "/fig3c.csv", pd = out_dir + "/fig3d.csv";
  write_text_atomic(pa, a.str());
  write_text_atomic(pb, b.str());
  write_text_atomic(pc, c.str());
  write_text_atomic(pd, d.str());
  RunManifest man;
  man.command = "fig3";
  man.outputs = {pa, pb, pc, pd};
  man.duration_ms = now_ms() - t0;
  write_text_atomic(out_dir + "/fig3.manifest.json", manifest_json(man));
  return 0;
}

// --- discrete-bounds --------------------------------------------------------

int cmd_discrete_bounds(const std::string& model_path, const std::string& kind,
                        std::size_t budget, const std::string& caps_str,
                        std::uint64_t seed, const std::string& out) {
  const double t0 = now_ms();
  if (budget < 1) throw invalid_input("--budget must be >= 1");
  const DiscreteCompoundModel m = load_discrete_model(model_path);
  const RegionKind rk = parse_kind(kind);
  const SearchCaps caps = parse_caps(caps_str);

  const auto front = search_inner_region(m, rk, budget, caps, seed);
  const SupportTable outer =
      outer_intersection(m, rk, budget, caps, seed + 1, ExecMode::parallel,
                         &front);
  write_text_atomic(out, pareto_csv(front));
  const std::string outer_path = out + ".outer.csv";
  write_text_atomic(outer_path, support_csv(outer));
  RunManifest man;
  man.command = "discrete-bounds";
  man.inputs = {model_path};
  man.seed = seed;
  man.outputs = {out, outer_path};
  if (m.n_decoder_states() == 1 && m.n_eve_states() == 1) {
    const GapReport gap = single_state_gap(m, rk, budget, caps, seed + 2);
    const std::string gap_path = out + ".gap.json";
    write_text_atomic(gap_path, gap_report_json(gap));
    man.outputs.push_back(gap_path);
    std::cout << "single-state max support gap: " << gap.max_gap << " bits\n";
  }
  man.duration_ms = now_ms() - t0;
  emit_manifest(man);
  return 0;
}

// --- simulate ---------------------------------------------------------------

int cmd_simulate(const std::string& model_path, const std::string& tc_path,
                 const std::string& cfg_path, const std::string& out,
                 bool exact, std::size_t trials, std::int64_t seed,
                 const std::string& trace_path) {
  const double t0 = now_ms();
  const DiscreteCompoundModel m = load_discrete_model(model_path);
  const TestChannelPair t = load_test_channels(tc_path);
  SimConfig cfg = load_sim_config(cfg_path);
  if (exact) cfg.mode = SimMode::exact;
  if (trials > 0) cfg.trials = trials;
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  TrialTrace trace;
  const bool want_trace =
      !trace_path.empty() && cfg.mode == SimMode::monte_carlo;
  const SimReport rep =
      run_trials(m, t, cfg, ExecMode::parallel, want_trace ? &trace : nullptr);
  write_text_atomic(out, sim_report_json(rep));
  RunManifest man;
  man.command = "simulate";
  man.inputs = {model_path, tc_path, cfg_path};
  man.seed = cfg.seed;
  man.outputs = {out};
  if (want_trace) {
    write_text_atomic(trace_path, trial_trace_csv(trace));
    man.outputs.push_back(trace_path);
  }
  man.duration_ms = now_ms() - t0;
  emit_manifest(man);
  return 0;
}

// --- selfcheck --------------------------------------------------------------

struct CheckContext {
  std::string mutate;
  bool all_pass = true;
  // a mutation nudges one side of the named check's comparison, proving the
  // check can fail
  double nudge(const std::string& name) const {
    return mutate == name ? 1e-6 : 0.0;
  }
  void report(const std::string& name, bool pass, double worst) {
    std::printf("%s %-24s worst deviation %.3e\n", pass ? "PASS" : "FAIL",
                name.c_str(), worst);
    all_pass = all_pass && pass;
  }
};

CompoundGaussianModel random_degraded_model(RngStream& rng) {
  const double s2 = 0.5 + 6.0 * rng.uniform01();
  const std::size_t K = 1 + rng.below(3), L = 1 + rng.below(3);
  const std::size_t dy = 1 + rng.below(3), dz = 1 + rng.below(3);
  std::vector<std::vector<double>> dec, eve;
  for (std::size_t k = 0; k < K; ++k) {
    std::vector<double> h(dy);
    for (auto& v : h) v = 0.6 + rng.uniform01();
    dec.push_back(h);
  }
  for (std::size_t l = 0; l < L; ++l) {
    std::vector<double> h(dz);
    for (auto& v : h) v = 0.3 * rng.uniform01();
    eve.push_back(h);
  }
  return CompoundGaussianModel(s2, std::move(dec), std::move(eve));
}

int cmd_selfcheck(const std::string& mutate) {
  CheckContext ctx;
  ctx.mutate = mutate;

  {  // determinant identity across dimensions 1..8
    double worst = 0.0;
    RngStream rng(2024, 11, 0);
    for (int i = 0; i < 1000; ++i) {
      const std::size_t dim = 1 + rng.below(8);
      std::vector<double> h(dim);
      for (auto& v : h) v = 4.0 * (rng.uniform01() - 0.5);
      const double a = 5.0 * rng.uniform01();
      auto [lhs, rhs] = wa_identity_check(a, h);
      lhs += ctx.nudge("wa_identity");
      worst = std::max(worst,
                       std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
    ctx.report("wa_identity", worst <= 1e-12, worst);
  }
  {  // scalar sufficient statistic preserves the vector-channel MI
    double worst = 0.0;
    RngStream rng(2024, 12, 0);
    for (int i = 0; i < 1000; ++i) {
      const std::size_t dim = 1 + rng.below(8);
      std::vector<double> h(dim);
      for (auto& v : h) v = 3.0 * (rng.uniform01() - 0.5);
      const double s2 = 0.5 + 8.0 * rng.uniform01();
      const auto [det, scalar] = wa_identity_check(s2, h);
      const double vec_mi = 0.5 * std::log2(det);
      const double sc_mi =
          gaussian_scalar_mi(s2, power_gain(h)) + ctx.nudge("scalarization_mi");
      worst = std::max(worst, std::abs(vec_mi - sc_mi));
    }
    ctx.report("scalarization_mi", worst <= 1e-12, worst);
  }
  {  // monotonicity of the rate kernel and minimality at the saddle
    double worst = 0.0;
    bool pass = true;
    for (double alpha : {1e-6, 1e-3, 0.1, 0.5, 0.9, 1.0}) {
      double prev = -1e300;
      for (double nu = 0.0; nu <= 5.0; nu += 0.05) {
        const double f =
            std::log2((3.0 * nu + 1.0) / (alpha * 3.0 * nu + 1.0)) +
            ctx.nudge("rate_monotonicity");
        if (f + 1e-12 < prev) {
          pass = false;
          worst = std::max(worst, prev - f);
        }
        prev = f;
      }
    }
    RngStream rng(2024, 13, 0);
    for (int i = 0; i < 200 && pass; ++i) {
      const CompoundGaussianModel m = random_degraded_model(rng);
      const double alpha = 0.05 + 0.9 * rng.uniform01();
      const RateTriple at_saddle = gs_rate_point(m, alpha);
      for (const auto& hk : m.decoder_gains())
        for (const auto& hl : m.eve_gains()) {
          const CompoundGaussianModel single(m.sigma_x2(), {hk}, {hl});
          if (degradedness_check(single)) {
            const double rs = gs_rate_point(single, alpha).r_s;
            if (at_saddle.r_s > rs + 1e-10) {
              pass = false;
              worst = std::max(worst, at_saddle.r_s - rs);
            }
          }
        }
    }
    ctx.report("rate_monotonicity", pass, worst);
  }
  {  // GS/CS algebraic links across random models and alphas
    double worst = 0.0;
    RngStream rng(2024, 14, 0);
    for (int i = 0; i < 1000; ++i) {
      const CompoundGaussianModel m = random_degraded_model(rng);
      const double alpha = std::pow(10.0, -5.0 * rng.uniform01());
      const RateTriple gs = gs_rate_point(m, alpha);
      const RateTriple cs = cs_rate_point(m, alpha);
      worst = std::max(worst, std::abs(cs.r_j - gs.r_j - gs.r_s) +
                                  std::abs(cs.r_l - gs.r_l) +
                                  ctx.nudge("gs_cs_identities"));
    }
    ctx.report("gs_cs_identities", worst <= 1e-10, worst);
  }
  {  // alpha <-> storage round trip
    double worst = 0.0;
    RngStream rng(2024, 15, 0);
    for (int i = 0; i < 1000; ++i) {
      const CompoundGaussianModel m = random_degraded_model(rng);
      const double alpha = std::pow(10.0, -6.0 * rng.uniform01());
      const double rj = gs_rate_point(m, alpha).r_j;
      const double back =
          alpha_from_storage(m, rj) + ctx.nudge("storage_roundtrip");
      worst = std::max(worst, std::abs(back - alpha));
    }
    ctx.report("storage_roundtrip", worst <= 1e-9, worst);
  }
  return ctx.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"secret-key rate regions for identifier-based authentication"};
  app.require_subcommand(1);

  std::string model, kind = "gs", out, out_dir, tc_path, cfg_path, caps_str,
              mutate, trace_path;
  std::size_t points = 200, budget = 50000, trials = 0;
  std::uint64_t seed = 1;
  std::int64_t seed_override = -1;
  bool exact = false;

  auto* gr = app.add_subcommand("gaussian-region",
                                "trace a GS/CS boundary curve");
  gr->add_option("--model", model)->required();
  gr->add_option("--kind", kind);
  gr->add_option("--points", points);
  gr->add_option("--out", out)->required();

  auto* f3 = app.add_subcommand("fig3", "emit the built-in example curves");
  f3->add_option("--out-dir", out_dir)->required();
  f3->add_option("--points", points);

  auto* db = app.add_subcommand("discrete-bounds",
                                "search inner/outer bounds of a discrete model");
  db->add_option("--model", model)->required();
  db->add_option("--kind", kind);
  db->add_option("--budget", budget);
  db->add_option("--caps", caps_str);
  db->add_option("--seed", seed);
  db->add_option("--out", out)->required();

  auto* sim = app.add_subcommand("simulate", "run the binning protocol");
  sim->add_option("--model", model)->required();
  sim->add_option("--testchannels", tc_path)->required();
  sim->add_option("--config", cfg_path)->required();
  sim->add_option("--out", out)->required();
  sim->add_flag("--exact", exact);
  sim->add_option("--trials", trials);
  sim->add_option("--seed", seed_override);
  sim->add_option("--trace", trace_path)
      ->description("write a per-trial outcome CSV (monte carlo only)");

  auto* sc = app.add_subcommand("selfcheck", "run the identity suites");
  sc->add_option("--mutate", mutate)
      ->description("perturb a named check to verify it can fail");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gr->parsed()) return cmd_gaussian_region(model, kind, points, out);
    if (f3->parsed()) return cmd_fig3(out_dir, points);
    if (db->parsed())
      return cmd_discrete_bounds(model, kind, budget, caps_str, seed, out);
    if (sim->parsed())
      return cmd_simulate(model, tc_path, cfg_path, out, exact, trials,
                          seed_override, trace_path);
    if (sc->parsed()) return cmd_selfcheck(mutate);
  } catch (const resource_limit& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const invalid_input& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
