// Times the OpenMP kernels against their serial counterparts on fixed
// workloads and verifies that both modes produce identical results.

#include <chrono>
#include <cstdio>
#include <string>

#include "pufkey/binning.hpp"
#include "pufkey/search.hpp"

using namespace pufkey;

namespace {

double time_ms(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

void row(const std::string& name, double serial_ms, double parallel_ms,
         bool equal) {
  std::printf("%-28s %10.1f ms %10.1f ms %8.2fx   %s\n", name.c_str(),
              serial_ms, parallel_ms, serial_ms / parallel_ms,
              equal ? "identical" : "MISMATCH");
}

DiscreteCompoundModel bench_model() {
  return DiscreteCompoundModel(
      FiniteDist::uniform(2), CondDist::identity(2),
      {CondDist::bsc(0.1), CondDist::bsc(0.2)},
      {CondDist::bsc(0.3)});
}

}  // namespace

int main() {
  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "openmp",
              "speedup");

  {
    const DiscreteCompoundModel m = bench_model();
    const SearchCaps caps{4, 3};
    std::vector<ParetoEntry> a, b;
    const double ts = time_ms([&] {
      a = search_inner_region(m, RegionKind::gs, 20000, caps, 7,
                              ExecMode::serial);
    });
    const double tp = time_ms([&] {
      b = search_inner_region(m, RegionKind::gs, 20000, caps, 7,
                              ExecMode::parallel);
    });
    bool equal = a.size() == b.size();
    for (std::size_t i = 0; equal && i < a.size(); ++i)
      equal = a[i].point.triple.r_s == b[i].point.triple.r_s &&
              a[i].point.triple.r_j == b[i].point.triple.r_j &&
              a[i].point.triple.r_l == b[i].point.triple.r_l;
    row("inner-region search", ts, tp, equal);
  }

  const DiscreteCompoundModel sm(
      FiniteDist::uniform(2), CondDist::identity(2), {CondDist::identity(2)},
      {CondDist::bsc(0.0793826004806491)});
  const TestChannelPair tc{CondDist::identity(2), CondDist::constant(2, 1)};
  SimConfig cfg;
  cfg.n = 10;
  cfg.delta = 0.35;
  cfg.rates = {0.1, 0.2, 0.3, 0.3, 0.5};
  cfg.seed = 7;
  cfg.trials = 20000;
  cfg.mode = SimMode::monte_carlo;

  {
    SimReport a, b;
    const double ts =
        time_ms([&] { a = run_trials(sm, tc, cfg, ExecMode::serial); });
    const double tp =
        time_ms([&] { b = run_trials(sm, tc, cfg, ExecMode::parallel); });
    const bool equal = a.error_prob_per_k == b.error_prob_per_k &&
                       a.key_tv_uniform == b.key_tv_uniform &&
                       a.secrecy_leak_per_l == b.secrecy_leak_per_l;
    row("monte-carlo trials", ts, tp, equal);
  }

  {
    SimConfig ecfg = cfg;
    ecfg.n = 8;
    const BinningCodebook cb = build_codebook(sm, tc, ecfg);
    double a = 0, b = 0;
    const double ts = time_ms([&] {
      a = exact_error_probability(cb, sm, 0, ecfg.delta,
                                  ecfg.max_enum_states, ExecMode::serial);
    });
    const double tp = time_ms([&] {
      b = exact_error_probability(cb, sm, 0, ecfg.delta,
                                  ecfg.max_enum_states, ExecMode::parallel);
    });
    row("exact error enumeration", ts, tp, a == b);
  }

  {
    SimConfig ecfg = cfg;
    ecfg.n = 8;
    const BinningCodebook cb = build_codebook(sm, tc, ecfg);
    double a = 0, b = 0;
    const double ts = time_ms([&] {
      a = exact_leakage(cb, sm, 0, LeakageKind::secrecy, ecfg.delta,
                        ecfg.max_enum_states, ExecMode::serial);
    });
    const double tp = time_ms([&] {
      b = exact_leakage(cb, sm, 0, LeakageKind::secrecy, ecfg.delta,
                        ecfg.max_enum_states, ExecMode::parallel);
    });
    row("exact secrecy leakage", ts, tp, a == b);
  }
  return 0;
}
