// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fails. Criterion 8 drives the installed CLI binary.

#include <Eigen/Dense>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pufkey/binning.hpp"
#include "pufkey/io.hpp"
#include "pufkey/search.hpp"
#include "test_util.hpp"

using namespace pufkey;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

struct Criterion {
  const char* name;
  double limit_s;
  std::chrono::steady_clock::time_point start;
  bool ok = true;
  std::string detail;

  explicit Criterion(const char* n, double lim)
      : name(n), limit_s(lim), start(std::chrono::steady_clock::now()) {}

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
  ~Criterion() {
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    if (secs > limit_s) {
      ok = false;
      if (detail.empty()) detail = "runtime limit exceeded";
    }
    std::printf("%s %s (%.2f s / limit %.0f s)%s%s\n", ok ? "PASS" : "FAIL",
                name, secs, limit_s, detail.empty() ? "" : ": ",
                detail.c_str());
    if (!ok) ++g_failures;
  }
};

CompoundGaussianModel fig_case(int which) {
  const std::vector<double> h1{0.95}, h3{0.95, 0.95, 0.95};
  const std::vector<double> e1{0.8}, e4{0.8, 0.8, 0.5, 0.5};
  switch (which) {
    case 1: return CompoundGaussianModel(5.0, {h1}, {e1});
    case 2: return CompoundGaussianModel(5.0, {h3}, {e1});
    default: return CompoundGaussianModel(5.0, {h3}, {e4});
  }
}

void criterion1() {
  Criterion c("criterion 1 (0.2771 reproduction)", 1.0);
  const CompoundGaussianModel m = fig_case(3);
  c.expect(std::abs(asymptotic_key_rate(m) - 0.2771) <= 5e-4,
           "asymptotic key rate off");
  c.expect(std::abs(key_rate_vs_storage(m, 50.0) - 0.2771) <= 5e-4,
           "large-storage key rate off");
}

void criterion2() {
  Criterion c("criterion 2 (figure-3 qualitative)", 5.0);
  const CompoundGaussianModel m1 = fig_case(1), m2 = fig_case(2),
                              m3 = fig_case(3);
  // (a) pointwise dominance on a 200-point storage grid
  for (int i = 0; i < 200; ++i) {
    const double rj = 8.0 * i / 199.0;
    const double r1 = key_rate_vs_storage(m1, rj);
    const double r2 = key_rate_vs_storage(m2, rj);
    const double r3 = key_rate_vs_storage(m3, rj);
    c.expect(r2 >= r1 - 1e-12, "case 2 below case 1");
    c.expect(r3 <= r2 + 1e-12, "case 3 above case 2");
  }
  // (b) all rates zero at alpha = 1; storage blows up toward alpha -> 0
  const AlphaCurve curve = trace_curve(m3, RegionKind::gs, 200);
  c.expect(curve.samples.back().second.r_s == 0.0 &&
               curve.samples.back().second.r_j == 0.0 &&
               curve.samples.back().second.r_l == 0.0,
           "alpha=1 not zero");
  c.expect(curve.samples.front().second.r_j > 5.0,
           "storage does not grow near alpha = 1e-6");
  // (c,d) GS vs CS at matched storage
  auto alpha_cs = [&](const CompoundGaussianModel& m, double rj) {
    const auto [k, l] = saddle_indices(m);
    (void)k;
    const double b = m.sigma_x2() * power_gain(m.eve_gains()[l]);
    const double tp = std::exp2(2.0 * rj);
    return 1.0 / (tp + (tp - 1.0) * b);
  };
  for (int i = 1; i < 200; ++i) {
    const double rj = 8.0 * i / 199.0;
    const double gs_rs = key_rate_vs_storage(m2, rj);
    const double cs_rs = cs_rate_point(m2, alpha_cs(m2, rj)).r_s;
    c.expect(gs_rs >= cs_rs - 1e-12, "CS key rate above GS at shared storage");
  }
  const double gs50 = key_rate_vs_storage(m2, 50.0);
  const double cs50 = cs_rate_point(m2, alpha_cs(m2, 50.0)).r_s;
  c.expect(std::abs(gs50 - cs50) <= 1e-6, "GS/CS key rates differ at r_j=50");
  const double gs_rl50 = gs_rate_point(m2, alpha_from_storage(m2, 50.0)).r_l;
  const double cs_rl50 = cs_rate_point(m2, alpha_cs(m2, 50.0)).r_l;
  c.expect(std::abs((gs_rl50 - cs_rl50) - asymptotic_key_rate(m2)) <= 1e-6,
           "GS-CS privacy gap at r_j=50 is not the key rate");
}

void criterion3() {
  Criterion c("criterion 3 (identity suite)", 10.0);
  RngStream rng(101, 1, 0);
  // determinant identity, dimensions 1..8
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> h(1 + rng.below(8));
    for (auto& v : h) v = 4.0 * (rng.uniform01() - 0.5);
    const double a = 6.0 * rng.uniform01();
    const auto [lhs, rhs] = wa_identity_check(a, h);
    c.expect(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)),
             "determinant identity violated");
  }
  // scalarization preserves the vector-channel MI
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> h(1 + rng.below(8));
    for (auto& v : h) v = 3.0 * (rng.uniform01() - 0.5);
    const double s2 = 0.5 + 6.0 * rng.uniform01();
    const auto [det, scalar] = wa_identity_check(s2, h);
    c.expect(std::abs(gaussian_scalar_mi(s2, power_gain(h)) -
                      0.5 * std::log2(det)) <= 1e-12,
             "scalarization changed the MI");
  }
  // one-antenna closed form equals the general rate points
  for (int i = 0; i < 100; ++i) {
    const double s2 = 0.5 + 5.0 * rng.uniform01();
    const double hz = rng.uniform01();
    const double hy = hz + 0.01 + rng.uniform01();
    const double alpha = 0.01 + 0.98 * rng.uniform01();
    const CompoundGaussianModel m(s2, {{hy}}, {{hz}});
    const auto [gs, cs] = single_antenna_region(s2, hy, hz, alpha);
    const RateTriple g = gs_rate_point(m, alpha);
    const RateTriple cc = cs_rate_point(m, alpha);
    c.expect(std::abs(gs.r_s - g.r_s) <= 1e-12 &&
                 std::abs(gs.r_j - g.r_j) <= 1e-12 &&
                 std::abs(gs.r_l - g.r_l) <= 1e-12 &&
                 std::abs(cs.r_j - cc.r_j) <= 1e-12 &&
                 std::abs(cs.r_l - cc.r_l) <= 1e-12,
             "one-antenna form mismatch");
  }
  // whitening preserves each state's Gaussian MI
  for (int i = 0; i < 100; ++i) {
    const std::size_t oy = 1 + rng.below(3), oz = 1 + rng.below(3);
    const std::size_t K = 1 + rng.below(2), L = 1 + rng.below(2);
    const std::size_t dim = 1 + K * oy + L * oz;
    Eigen::MatrixXd a(dim, dim);
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t s = 0; s < dim; ++s)
        a(r, s) = 2.0 * (rng.uniform01() - 0.5);
    const Eigen::MatrixXd sigma =
        a * a.transpose() + 0.2 * Eigen::MatrixXd::Identity(dim, dim);
    FullCovariance cov;
    cov.dim = dim;
    cov.data.assign(sigma.data(), sigma.data() + dim * dim);
    const CompoundGaussianModel back = normalize_covariance(
        cov, CovBlocks{oy, K, oz, L});
    auto check_block = [&](std::size_t offset, std::size_t omega,
                           const std::vector<double>& gain) {
      const Eigen::MatrixXd joint = [&] {
        Eigen::MatrixXd jm(omega + 1, omega + 1);
        jm(0, 0) = sigma(0, 0);
        for (std::size_t r = 0; r < omega; ++r) {
          jm(r + 1, 0) = sigma(offset + r, 0);
          jm(0, r + 1) = sigma(0, offset + r);
          for (std::size_t s = 0; s < omega; ++s)
            jm(r + 1, s + 1) = sigma(offset + r, offset + s);
        }
        return jm;
      }();
      const double mi_oracle =
          0.5 * std::log2(sigma(0, 0) *
                          joint.block(1, 1, omega, omega).determinant() /
                          joint.determinant());
      const double mi_norm = gaussian_scalar_mi(sigma(0, 0), power_gain(gain));
      c.expect(std::abs(mi_oracle - mi_norm) <= 1e-10,
               "whitening changed a state's MI");
    };
    std::size_t off = 1;
    for (std::size_t k = 0; k < K; ++k, off += oy)
      check_block(off, oy, back.decoder_gains()[k]);
    for (std::size_t l = 0; l < L; ++l, off += oz)
      check_block(off, oz, back.eve_gains()[l]);
  }
}

void criterion4() {
  Criterion c("criterion 4 (algebraic model identities)", 30.0);
  RngStream rng(102, 1, 0);
  for (int i = 0; i < 1000; ++i) {
    const CompoundGaussianModel m = testutil::random_degraded_gaussian(rng);
    const double alpha = std::pow(10.0, -6.0 * rng.uniform01());
    const RateTriple gs = gs_rate_point(m, alpha);
    const RateTriple cs = cs_rate_point(m, alpha);
    c.expect(std::abs(cs.r_j - gs.r_j - gs.r_s) <= 1e-10,
             "CS storage is not GS storage plus key rate");
    c.expect(std::abs(cs.r_l - gs.r_l) <= 1e-10, "CS leakage differs from GS");
    c.expect(std::abs(alpha_from_storage(m, gs.r_j) - alpha) <= 1e-9,
             "storage inversion round trip failed");
  }
  // monotone rates along alpha grids
  RngStream rng2(103, 1, 0);
  for (int i = 0; i < 50; ++i) {
    const CompoundGaussianModel m = testutil::random_degraded_gaussian(rng2);
    const AlphaCurve g = trace_curve(m, RegionKind::gs, 100);
    const AlphaCurve s = trace_curve(m, RegionKind::cs, 100);
    for (std::size_t t = 1; t < g.samples.size(); ++t) {
      c.expect(g.samples[t].second.r_s <= g.samples[t - 1].second.r_s + 1e-12 &&
                   g.samples[t].second.r_j <=
                       g.samples[t - 1].second.r_j + 1e-12 &&
                   g.samples[t].second.r_l <=
                       g.samples[t - 1].second.r_l + 1e-12,
               "GS rates not monotone in alpha");
      c.expect(s.samples[t].second.r_s <= s.samples[t - 1].second.r_s + 1e-12 &&
                   s.samples[t].second.r_j <=
                       s.samples[t - 1].second.r_j + 1e-12 &&
                   s.samples[t].second.r_l <=
                       s.samples[t - 1].second.r_l + 1e-12,
               "CS rates not monotone in alpha");
    }
  }
}

DiscreteCompoundModel random_binary_model(std::size_t K, std::size_t L,
                                          RngStream& rng) {
  std::vector<CondDist> dec, eve;
  for (std::size_t k = 0; k < K; ++k)
    dec.push_back(CondDist::bsc(0.05 + 0.2 * rng.uniform01()));
  for (std::size_t l = 0; l < L; ++l)
    eve.push_back(CondDist::bsc(0.25 + 0.2 * rng.uniform01()));
  return DiscreteCompoundModel(
      FiniteDist(testutil::random_simplex(2, rng)),
      testutil::random_cond(2, 2, rng), std::move(dec), std::move(eve));
}

void criterion5() {
  Criterion c("criterion 5 (discrete oracle equivalence + single-state gap)",
              300.0);
  RngStream rng(104, 1, 0);
  // 50 random test-channel pairs against the definition-sum oracle
  for (int i = 0; i < 50; ++i) {
    const DiscreteCompoundModel m =
        random_binary_model(1 + rng.below(2), 1 + rng.below(2), rng);
    const TestChannelPair t = testutil::random_test_channels(2, 3, 2, rng);
    const BoundPoint in = inner_point(m, t, RegionKind::gs);
    const testutil::InnerTermsOracle o = testutil::inner_terms_oracle(m, t);
    const double rs = std::max(0.0, o.min_iyu_v - o.max_izu_v);
    const double rj = o.max_ixtu_vy + o.max_ixtv_y;
    const double rl = std::max(0.0, rj - o.ixtu_x + o.min_iyv - o.min_izv);
    c.expect(std::abs(in.triple.r_s - rs) <= 1e-10 &&
                 std::abs(in.triple.r_j - rj) <= 1e-10 &&
                 std::abs(in.triple.r_l - rl) <= 1e-10,
             "inner point disagrees with the oracle");
    // outer point for a random state pair
    const std::size_t k = rng.below(m.n_decoder_states());
    const std::size_t l = rng.below(m.n_eve_states());
    const BoundPoint out = outer_point(m, k, l, t, RegionKind::gs);
    const testutil::Joint5 jy = testutil::chain_joint5(m, t, m.decoder_states()[k]);
    const testutil::Joint5 jz = testutil::chain_joint5(m, t, m.eve_states()[l]);
    auto v_of = [&](std::size_t i) { return i / (jy.nu * jy.nxt * jy.nx * jy.nw); };
    auto u_of = [&](std::size_t i) { return i / (jy.nxt * jy.nx * jy.nw) % jy.nu; };
    auto xt_of = [&](std::size_t i) { return i / (jy.nx * jy.nw) % jy.nxt; };
    auto x_of = [&](std::size_t i) { return i / jy.nw % jy.nx; };
    auto w_of = [&](std::size_t i) { return i % jy.nw; };
    auto unit = [](std::size_t) { return std::size_t{0}; };
    const double iyu_v = testutil::cmi_oracle(jy.p, jy.p.size(), w_of, u_of,
                                              v_of, jy.nw, jy.nu, jy.nv);
    const double izu_v = testutil::cmi_oracle(jz.p, jz.p.size(), w_of, u_of,
                                              v_of, jz.nw, jz.nu, jz.nv);
    const double ixtu_y = testutil::cmi_oracle(jy.p, jy.p.size(), xt_of, u_of,
                                               w_of, jy.nxt, jy.nu, jy.nw);
    const double ixu_y = testutil::cmi_oracle(jy.p, jy.p.size(), x_of, u_of,
                                              w_of, jy.nx, jy.nu, jy.nw);
    const double iyv = testutil::cmi_oracle(jy.p, jy.p.size(), w_of, v_of,
                                            unit, jy.nw, jy.nv, 1);
    const double izv = testutil::cmi_oracle(jz.p, jz.p.size(), w_of, v_of,
                                            unit, jz.nw, jz.nv, 1);
    const double ors = std::max(0.0, iyu_v - izu_v);
    const double orl = std::max(0.0, ixu_y + iyv - izv);
    c.expect(std::abs(out.triple.r_s - ors) <= 1e-10 &&
                 std::abs(out.triple.r_j - ixtu_y) <= 1e-10 &&
                 std::abs(out.triple.r_l - orl) <= 1e-10,
             "outer point disagrees with the oracle");
  }
  // the single-state coincidence: two independent searches agree
  RngStream rng2(105, 1, 0);
  for (int i = 0; i < 5; ++i) {
    const DiscreteCompoundModel m = random_binary_model(1, 1, rng2);
    const GapReport rep = single_state_gap(m, RegionKind::gs, 50000,
                                         SearchCaps{4, 3}, 1000 + i);
    c.expect(rep.max_gap <= 0.02,
             "single-state gap " + std::to_string(rep.max_gap) + " exceeds 0.02");
  }
}

void criterion6() {
  Criterion c("criterion 6 (inner-outer containment)", 300.0);
  RngStream rng(106, 1, 0);
  for (int i = 0; i < 5; ++i) {
    const DiscreteCompoundModel m = random_binary_model(2, 2, rng);
    const auto front = search_inner_region(m, RegionKind::gs, 20000,
                                           SearchCaps{4, 3}, 2000 + i);
    const SupportTable table =
        outer_intersection(m, RegionKind::gs, 40000, SearchCaps{4, 3},
                           3000 + i, ExecMode::parallel, &front);
    for (const auto& e : front)
      c.expect(satisfies_outer_table(table, e.point.triple, 1e-9),
               "inner Pareto point escapes the outer table");
  }
}

void criterion7() {
  Criterion c("criterion 7 (simulator trends)", 600.0);
  // binary single-state reference instance: uniform source, noiseless
  // enrollment and decoder, eavesdropper BSC with I(Z;U) = 0.6; rates sit
  // 0.1 bits inside the inner point, delta = 0.35
  const double pe = 0.0793826004806491;
  const DiscreteCompoundModel m(FiniteDist::uniform(2), CondDist::identity(2),
                                {CondDist::identity(2)}, {CondDist::bsc(pe)});
  const TestChannelPair t{CondDist::identity(2), CondDist::constant(2, 1)};
  SimConfig cfg;
  cfg.delta = 0.35;
  cfg.rates = {0.1, 0.2, 0.3, 0.3, 0.5};
  cfg.seed = 1;  // reference draw; trends at this scale are codebook-dependent
  cfg.trials = 10000;
  cfg.mode = SimMode::monte_carlo;

  double prev_err = 1e9, prev_tv = 1e9;
  double err6 = 0, lo6 = 0, hi6 = 0;
  for (std::size_t n : {std::size_t{6}, std::size_t{9}, std::size_t{12}}) {
    cfg.n = n;
    const SimReport rep = run_trials(m, t, cfg);
    c.expect(rep.error_prob_per_k[0] <= prev_err,
             "error estimate increased at n=" + std::to_string(n));
    c.expect(rep.key_tv_uniform <= prev_tv,
             "key TV distance increased at n=" + std::to_string(n));
    prev_err = rep.error_prob_per_k[0];
    prev_tv = rep.key_tv_uniform;
    if (n == 6) {
      err6 = rep.error_prob_per_k[0];
      lo6 = rep.error_lo_per_k[0];
      hi6 = rep.error_hi_per_k[0];
    }
  }
  double prev_leak = 1e9;
  for (std::size_t n : {std::size_t{4}, std::size_t{6}, std::size_t{8}}) {
    cfg.n = n;
    const BinningCodebook cb = build_codebook(m, t, cfg);
    const double leak = exact_leakage(cb, m, 0, LeakageKind::secrecy,
                                      cfg.delta, cfg.max_enum_states) /
                        static_cast<double>(n);
    c.expect(leak <= prev_leak,
             "per-symbol secrecy leakage increased at n=" + std::to_string(n));
    prev_leak = leak;
  }
  // exact vs monte carlo at n = 6
  cfg.n = 6;
  const BinningCodebook cb = build_codebook(m, t, cfg);
  const double exact = exact_error_probability(cb, m, 0, cfg.delta,
                                               cfg.max_enum_states);
  const double width = hi6 - lo6;
  c.expect(std::abs(exact - err6) <= 3.0 * width,
           "exact and monte-carlo error probabilities disagree");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void criterion8() {
  Criterion c("criterion 8 (byte-identical reruns)", 120.0);
#ifndef PUFKEY_BIN
  c.expect(false, "CLI binary path not configured");
#else
  const fs::path dir = fs::temp_directory_path() / "pufkey-acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  // inputs
  write_text_atomic((dir / "model.json").string(), R"({
    "p_x": [0.5, 0.5],
    "enrollment": [[1.0, 0.0], [0.0, 1.0]],
    "decoder_states": [[[1.0, 0.0], [0.0, 1.0]]],
    "eve_states": [[[0.92, 0.08], [0.08, 0.92]]]
  })");
  write_text_atomic((dir / "channels.json").string(), R"({
    "u_given_xt": [[1.0, 0.0], [0.0, 1.0]],
    "v_given_u": [[1.0], [1.0]]
  })");
  write_text_atomic((dir / "sim.json").string(), R"({
    "n": 6, "delta": 0.35,
    "rates": {"r_v": 0.1, "r_jv1": 0.2, "r_ju1": 0.3, "r_s": 0.3, "r_u3": 0.5},
    "seed": 7, "mode": "exact"
  })");
  auto run = [&](const std::string& args) {
    const std::string cmd = std::string(PUFKEY_BIN) + " " + args + " > " +
                            (dir / "stdout.txt").string() + " 2>&1";
    return std::system(cmd.c_str());
  };
  const std::string sim_args = "simulate --model " +
                               (dir / "model.json").string() +
                               " --testchannels " +
                               (dir / "channels.json").string() + " --config " +
                               (dir / "sim.json").string() + " --out ";
  c.expect(run(sim_args + (dir / "rep1.json").string()) == 0,
           "simulate run 1 failed");
  c.expect(run(sim_args + (dir / "rep2.json").string()) == 0,
           "simulate run 2 failed");
  c.expect(!slurp(dir / "rep1.json").empty() &&
               slurp(dir / "rep1.json") == slurp(dir / "rep2.json"),
           "simulate outputs differ between reruns");

  const std::string db_args =
      "discrete-bounds --model " + (dir / "model.json").string() +
      " --kind gs --budget 4000 --caps 3x2 --seed 5 --out ";
  c.expect(run(db_args + (dir / "p1.csv").string()) == 0,
           "discrete-bounds run 1 failed");
  c.expect(run(db_args + (dir / "p2.csv").string()) == 0,
           "discrete-bounds run 2 failed");
  c.expect(!slurp(dir / "p1.csv").empty() &&
               slurp(dir / "p1.csv") == slurp(dir / "p2.csv"),
           "pareto outputs differ between reruns");
  c.expect(slurp(dir / "p1.csv.outer.csv") == slurp(dir / "p2.csv.outer.csv"),
           "outer tables differ between reruns");
  c.expect(!slurp(dir / "p1.csv.gap.json").empty() &&
               slurp(dir / "p1.csv.gap.json") == slurp(dir / "p2.csv.gap.json"),
           "gap reports differ between reruns");
#endif
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria FAILED\n", g_failures);
  return 1;
}
