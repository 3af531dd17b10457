#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "pufkey/binning.hpp"
#include "test_util.hpp"

using namespace pufkey;

namespace {

// noiseless decoder, moderately noisy eavesdropper; U = Xt, V constant
DiscreteCompoundModel ref_model(double eve = 0.0793826004806491) {
  return DiscreteCompoundModel(FiniteDist::uniform(2), CondDist::identity(2),
                               {CondDist::identity(2)}, {CondDist::bsc(eve)});
}

TestChannelPair ref_channels() {
  return {CondDist::identity(2), CondDist::constant(2, 1)};
}

SimConfig ref_config(std::size_t n, std::uint64_t seed = 7) {
  SimConfig cfg;
  cfg.n = n;
  cfg.delta = 0.35;
  cfg.rates = {0.1, 0.2, 0.3, 0.3, 0.5};  // r_v, r_jv1, r_ju1, r_s, r_u3
  cfg.seed = seed;
  cfg.trials = 4000;
  cfg.mode = SimMode::monte_carlo;
  return cfg;
}

// independent frequency-typicality check used by the oracle scans
bool oracle_typical_pair(const std::uint8_t* a, const std::uint8_t* b,
                         std::size_t n, const std::vector<double>& p,
                         std::size_t nb, double delta) {
  std::map<std::size_t, int> counts;
  for (std::size_t t = 0; t < n; ++t) ++counts[a[t] * nb + b[t]];
  for (std::size_t cell = 0; cell < p.size(); ++cell) {
    const double expect = p[cell] * static_cast<double>(n);
    const int c = counts.count(cell) ? counts.at(cell) : 0;
    if (p[cell] == 0.0 && c > 0) return false;
    if (std::abs(c - expect) > delta * expect + 1e-9) return false;
  }
  return true;
}

bool oracle_typical_triple(const std::uint8_t* a, const std::uint8_t* b,
                           const std::uint8_t* c, std::size_t n,
                           const std::vector<double>& p, std::size_t nb,
                           std::size_t nc, double delta) {
  std::map<std::size_t, int> counts;
  for (std::size_t t = 0; t < n; ++t) ++counts[(a[t] * nb + b[t]) * nc + c[t]];
  for (std::size_t cell = 0; cell < p.size(); ++cell) {
    const double expect = p[cell] * static_cast<double>(n);
    const int cnt = counts.count(cell) ? counts.at(cell) : 0;
    if (p[cell] == 0.0 && cnt > 0) return false;
    if (std::abs(cnt - expect) > delta * expect + 1e-9) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("index sizes") {
  SimRates zero;
  const IndexSizes s = index_sizes(8, zero);
  CHECK(s.jv1 == 1);
  CHECK(s.jv2 == 1);
  CHECK(s.ju1 == 1);
  CHECK(s.ju2 == 1);
  CHECK(s.ju3 == 1);
  // negative bin-complement rates still give singleton sets
  SimRates r;
  r.r_v = 0.1;
  r.r_jv1 = 0.2;
  CHECK(index_sizes(10, r).jv2 == 1);
  CHECK(index_sizes(10, r).jv1 == 4);  // ceil(2^2)
}

TEST_CASE("codebook build") {
  const auto m = ref_model();
  const auto t = ref_channels();
  SUBCASE("rates all zero give a single word per layer") {
    SimConfig cfg = ref_config(6);
    cfg.rates = SimRates{};
    const BinningCodebook cb = build_codebook(m, t, cfg);
    CHECK(cb.sizes.n_v_words() == 1);
    CHECK(cb.sizes.n_u_words_per_v() == 1);
  }
  SUBCASE("same seed twice gives identical words") {
    const SimConfig cfg = ref_config(8);
    const BinningCodebook a = build_codebook(m, t, cfg);
    const BinningCodebook b = build_codebook(m, t, cfg);
    CHECK(a.v_words == b.v_words);
    CHECK(a.u_words == b.u_words);
    const BinningCodebook s = build_codebook(m, t, cfg, ExecMode::serial);
    CHECK(a.u_words == s.u_words);
  }
  SUBCASE("empirical symbol frequencies match the codeword law") {
    // eight v-words: r_v = r_jv1 = 0.75 at n = 4 gives exactly 2^3 words
    SimConfig cfg = ref_config(4);
    cfg.rates = {0.75, 0.75, 0.0, 0.0, 0.0};
    // V = U = Xt so the v-law is uniform binary
    const TestChannelPair ident{CondDist::identity(2), CondDist::identity(2)};
    const BinningCodebook cb = build_codebook(m, ident, cfg);
    REQUIRE(cb.sizes.n_v_words() == 8);
    int zeros = 0;
    for (std::uint8_t sym : cb.v_words) zeros += sym == 0;
    const double total = static_cast<double>(cb.v_words.size());
    // 3 sigma of Binomial(32, 1/2)
    CHECK(std::abs(zeros - 0.5 * total) <= 3.0 * std::sqrt(total * 0.25));
  }
  SUBCASE("memory cap") {
    SimConfig cfg = ref_config(12);
    cfg.max_codebook_cells = 100;
    CHECK_THROWS_AS(build_codebook(m, t, cfg), resource_limit);
  }
}

TEST_CASE("enroll") {
  SUBCASE("degenerate point-mass model takes the unique tuple") {
    const DiscreteCompoundModel pm(FiniteDist({1.0}), CondDist::identity(1),
                                   {CondDist::identity(1)},
                                   {CondDist::identity(1)});
    const TestChannelPair tc{CondDist::identity(1), CondDist::identity(1)};
    SimConfig cfg = ref_config(5);
    cfg.rates = SimRates{};
    const BinningCodebook cb = build_codebook(pm, tc, cfg);
    const std::vector<std::uint8_t> xt(5, 0);
    RngStream rng(1, 2, 3);
    const EnrollResult r = enroll(cb, xt.data(), cfg.delta, rng);
    CHECK_FALSE(r.fallback);
    CHECK(r.j_v1 == 0);
    CHECK(r.j_u1 == 0);
    CHECK(r.key() == 0);
  }
  SUBCASE("atypical input falls back to the all-ones tuple") {
    const SimConfig cfg = ref_config(8);
    const BinningCodebook cb = build_codebook(ref_model(), ref_channels(), cfg);
    const std::vector<std::uint8_t> xt(8, 0);  // type (8,0) far from uniform
    RngStream rng(1, 2, 3);
    const EnrollResult r = enroll(cb, xt.data(), cfg.delta, rng);
    CHECK(r.fallback);
    CHECK(r.j_v1 == 0);
    CHECK(r.key() == 0);
    CHECK_FALSE(any_typical_v(cb, xt.data(), cfg.delta));
  }
  SUBCASE("matches an exhaustive scan with the same tie-break draw") {
    const SimConfig cfg = ref_config(8, 99);
    const BinningCodebook cb = build_codebook(ref_model(), ref_channels(), cfg);
    RngStream seq(5, 6, 7);
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<std::uint8_t> xt(8);
      for (auto& s : xt) s = static_cast<std::uint8_t>(seq.below(2));
      // oracle scan in the same lexicographic order
      std::vector<EnrollResult> expect;
      for (std::uint64_t jv1 = 0; jv1 < cb.sizes.jv1; ++jv1)
        for (std::uint64_t jv2 = 0; jv2 < cb.sizes.jv2; ++jv2) {
          if (!oracle_typical_pair(xt.data(), cb.v_word(jv1, jv2), 8,
                                   cb.p_xt_v, cb.n_v, cfg.delta))
            continue;
          for (std::uint64_t ju1 = 0; ju1 < cb.sizes.ju1; ++ju1)
            for (std::uint64_t ju2 = 0; ju2 < cb.sizes.ju2; ++ju2)
              for (std::uint64_t ju3 = 0; ju3 < cb.sizes.ju3; ++ju3)
                if (oracle_typical_triple(
                        xt.data(), cb.u_word(jv1, jv2, ju1, ju2, ju3),
                        cb.v_word(jv1, jv2), 8, cb.p_xt_u_v, cb.n_u, cb.n_v,
                        cfg.delta))
                  expect.push_back({jv1, jv2, ju1, ju2, ju3, false});
        }
      RngStream r1(1000, 2000, static_cast<std::uint64_t>(rep));
      RngStream r2(1000, 2000, static_cast<std::uint64_t>(rep));
      const EnrollResult got = enroll(cb, xt.data(), cfg.delta, r1);
      if (expect.empty()) {
        CHECK(got.fallback);
      } else {
        const EnrollResult want =
            expect.size() == 1 ? expect[0] : expect[r2.below(expect.size())];
        CHECK(got.j_v1 == want.j_v1);
        CHECK(got.j_v2 == want.j_v2);
        CHECK(got.j_u1 == want.j_u1);
        CHECK(got.j_u2 == want.j_u2);
        CHECK(got.j_u3 == want.j_u3);
      }
    }
  }
}

TEST_CASE("authenticate") {
  SUBCASE("noiseless observation recovers the enrolled key") {
    const SimConfig cfg = ref_config(9, 13);
    const BinningCodebook cb = build_codebook(ref_model(), ref_channels(), cfg);
    RngStream rng(3, 4, 5);
    int recovered = 0, enrolled_ok = 0;
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<std::uint8_t> xt(9);
      for (auto& s : xt) s = static_cast<std::uint8_t>(rng.below(2));
      const EnrollResult e = enroll(cb, xt.data(), cfg.delta, rng);
      if (e.fallback) continue;
      ++enrolled_ok;
      const AuthResult a =
          authenticate(cb, 0, xt.data(), e.j_v1, e.j_u1, cfg.delta);
      recovered += !a.failed && a.key_estimate == e.key();
    }
    REQUIRE(enrolled_ok > 50);
    // failures only through inner-layer collisions, which are rare here
    CHECK(recovered >= enrolled_ok * 0.5);
  }
  SUBCASE("two typical outer words force a failure") {
    // point-mass V law with two identical v-words in one bin
    const DiscreteCompoundModel pm(FiniteDist({1.0}), CondDist::identity(1),
                                   {CondDist::identity(1)},
                                   {CondDist::identity(1)});
    const TestChannelPair tc{CondDist::identity(1), CondDist::identity(1)};
    SimConfig cfg = ref_config(4);
    cfg.rates = SimRates{};
    cfg.rates.r_v = 0.25;  // two words, both the constant sequence
    const BinningCodebook cb = build_codebook(pm, tc, cfg);
    REQUIRE(cb.sizes.jv2 == 2);
    const std::vector<std::uint8_t> y(4, 0);
    const AuthResult a = authenticate(cb, 0, y.data(), 0, 0, cfg.delta);
    CHECK(a.failed);
    CHECK(a.key_estimate == 0);
  }
  SUBCASE("matches an exhaustive decode scan") {
    const SimConfig cfg = ref_config(8, 131);
    const DiscreteCompoundModel m = ref_model();
    const BinningCodebook cb = build_codebook(m, ref_channels(), cfg);
    RngStream rng(6, 7, 8);
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<std::uint8_t> y(8);
      for (auto& s : y) s = static_cast<std::uint8_t>(rng.below(2));
      const std::uint64_t jv1 = rng.below(cb.sizes.jv1);
      const std::uint64_t ju1 = rng.below(cb.sizes.ju1);
      const AuthResult got = authenticate(cb, 0, y.data(), jv1, ju1, cfg.delta);
      // oracle decode
      std::vector<std::uint64_t> v_hits;
      for (std::uint64_t jv2 = 0; jv2 < cb.sizes.jv2; ++jv2)
        if (oracle_typical_pair(y.data(), cb.v_word(jv1, jv2), 8,
                                cb.p_y_v_per_k[0], cb.n_v, cfg.delta))
          v_hits.push_back(jv2);
      if (v_hits.size() != 1) {
        CHECK(got.failed);
        continue;
      }
      std::vector<std::uint64_t> u_hits;
      for (std::uint64_t ju2 = 0; ju2 < cb.sizes.ju2; ++ju2)
        for (std::uint64_t ju3 = 0; ju3 < cb.sizes.ju3; ++ju3)
          if (oracle_typical_triple(y.data(),
                                    cb.u_word(jv1, v_hits[0], ju1, ju2, ju3),
                                    cb.v_word(jv1, v_hits[0]), 8,
                                    cb.p_y_u_v_per_k[0], cb.n_u, cb.n_v,
                                    cfg.delta))
            u_hits.push_back(ju2);
      if (u_hits.size() != 1) {
        CHECK(got.failed);
      } else {
        CHECK_FALSE(got.failed);
        CHECK(got.key_estimate == u_hits[0]);
      }
    }
  }
}

TEST_CASE("run_trials monte carlo") {
  SUBCASE("noiseless chain with every error event impossible never errs") {
    // Blind eavesdropper, noiseless decoder, U = Xt, V constant, and a
    // tight slack so only exactly-balanced sequences are typical. With a
    // codebook draw that covers every balanced sequence and has no
    // duplicated balanced word inside a helper bin, all five error events
    // are structurally absent and the error probability is exactly zero
    // (atypical inputs fall back to the sentinel on both sides).
    const DiscreteCompoundModel m(
        FiniteDist::uniform(2), CondDist::identity(2), {CondDist::identity(2)},
        {CondDist::constant(2, 1)});
    const std::size_t n = 10;
    SimConfig cfg = ref_config(n);
    cfg.delta = 0.05;                       // typical <=> count(1) = n/2
    cfg.rates = {0.0, 0.0, 1.2, 0.1, 0.0};  // ample helper bins, two keys
    cfg.trials = 2000;
    auto balanced = [&](std::uint64_t seq) {
      int ones = 0;
      for (std::size_t t = 0; t < n; ++t) ones += (seq >> t) & 1;
      return ones == 5;
    };
    bool found_clean_draw = false;
    for (std::uint64_t seed = 1; seed <= 60 && !found_clean_draw; ++seed) {
      cfg.seed = seed;
      const BinningCodebook cb = build_codebook(m, ref_channels(), cfg);
      const std::uint64_t per_bin = cb.sizes.ju2 * cb.sizes.ju3;
      const std::uint64_t bins = cb.sizes.n_v_words() * cb.sizes.ju1;
      bool clean = true;
      std::vector<bool> covered(1 << n, false);
      for (std::uint64_t b = 0; b < bins && clean; ++b) {
        std::vector<std::uint64_t> packs(per_bin);
        for (std::uint64_t i = 0; i < per_bin; ++i) {
          const std::uint8_t* w = cb.u_words.data() + (b * per_bin + i) * n;
          std::uint64_t pack = 0;
          for (std::size_t t = 0; t < n; ++t) pack = pack * 2 + w[t];
          packs[i] = pack;
          covered[pack] = true;
        }
        for (std::uint64_t i = 0; i < per_bin && clean; ++i)
          for (std::uint64_t j = i + 1; j < per_bin && clean; ++j)
            clean = packs[i] != packs[j] || !balanced(packs[i]);
      }
      if (!clean) continue;
      for (std::uint64_t seq = 0; seq < (1ULL << n) && clean; ++seq)
        if (balanced(seq)) clean = covered[seq];
      if (!clean) continue;
      found_clean_draw = true;
      CHECK(exact_error_probability(cb, m, 0, cfg.delta,
                                    cfg.max_enum_states) == 0.0);
      const SimReport rep = run_trials(m, ref_channels(), cfg);
      CHECK(rep.error_prob_per_k[0] == 0.0);
      CHECK(rep.e345_per_k[0][2] == 0.0);
    }
    REQUIRE(found_clean_draw);
  }
  SUBCASE("report invariants and determinism") {
    SimConfig cfg = ref_config(8, 17);
    cfg.trials = 3000;
    const SimReport a = run_trials(ref_model(), ref_channels(), cfg);
    const SimReport b = run_trials(ref_model(), ref_channels(), cfg);
    const SimReport s =
        run_trials(ref_model(), ref_channels(), cfg, ExecMode::serial);
    CHECK(a.error_prob_per_k == b.error_prob_per_k);
    CHECK(a.key_tv_uniform == b.key_tv_uniform);
    CHECK(a.secrecy_leak_per_l == b.secrecy_leak_per_l);
    CHECK(a.privacy_leak_per_l == b.privacy_leak_per_l);
    CHECK(a.error_prob_per_k == s.error_prob_per_k);
    CHECK(a.secrecy_leak_per_l == s.secrecy_leak_per_l);
    // storage accounting: log2 |Jv1| + log2 |Ju1|
    const IndexSizes sz = index_sizes(cfg.n, cfg.rates);
    CHECK(a.storage_bits == std::log2(static_cast<double>(sz.jv1)) +
                                std::log2(static_cast<double>(sz.ju1)));
    CHECK(a.key_bits == std::log2(static_cast<double>(sz.ju2)));
    CHECK(a.error_prob_per_k[0] >= 0.0);
    CHECK(a.error_prob_per_k[0] <= 1.0);
    CHECK(a.error_lo_per_k[0] <= a.error_prob_per_k[0]);
    CHECK(a.error_hi_per_k[0] >= a.error_prob_per_k[0]);
    CHECK(a.key_tv_uniform >= 0.0);
    CHECK(a.key_tv_uniform <= 1.0);
    CHECK(a.secrecy_leak_per_l[0] >= 0.0);
    CHECK(a.privacy_leak_per_l[0] >= 0.0);
  }
  SUBCASE("config validation") {
    SimConfig cfg = ref_config(6);
    cfg.delta = 0.0;
    CHECK_THROWS_AS(cfg.validate(), invalid_input);
    cfg = ref_config(6);
    cfg.rates.r_s = -0.1;
    CHECK_THROWS_AS(run_trials(ref_model(), ref_channels(), cfg),
                    invalid_input);
    cfg = ref_config(6);
    cfg.trials = 0;
    CHECK_THROWS_AS(run_trials(ref_model(), ref_channels(), cfg),
                    invalid_input);
  }
}

TEST_CASE("exact leakage") {
  SUBCASE("blind eavesdropper reduces to helper-only quantities") {
    // Z carries nothing, so secrecy = I(S;J) and privacy = I(X^n;J)
    const DiscreteCompoundModel m(
        FiniteDist::uniform(2), CondDist::identity(2), {CondDist::identity(2)},
        {CondDist::constant(2, 1)});
    const SimConfig cfg = ref_config(6, 23);
    const BinningCodebook cb = build_codebook(m, ref_channels(), cfg);
    const double secrecy = exact_leakage(cb, m, 0,
                                         LeakageKind::secrecy, cfg.delta,
                                         cfg.max_enum_states);
    const double privacy = exact_leakage(cb, m, 0,
                                         LeakageKind::privacy, cfg.delta,
                                         cfg.max_enum_states);
    // independent tabulation of P(x^n) P(s,j | x^n) over all sequences
    const std::uint64_t n_seqs = 64;
    const std::uint64_t n_j = cb.sizes.jv1 * cb.sizes.ju1;
    std::vector<double> p_sj(cb.sizes.ju2 * n_j, 0.0);
    std::vector<std::vector<double>> p_xj(n_seqs,
                                          std::vector<double>(n_j, 0.0));
    for (std::uint64_t xi = 0; xi < n_seqs; ++xi) {
      std::vector<std::uint8_t> xt(6);
      for (std::size_t t = 0; t < 6; ++t) xt[t] = (xi >> (5 - t)) & 1;
      const auto cands = enroll_candidates(cb, xt.data(), cfg.delta);
      const double px = 1.0 / 64.0;
      if (cands.empty()) {
        p_sj[0] += px;
        p_xj[xi][0] += px;
      } else {
        const double w = px / static_cast<double>(cands.size());
        for (const auto& c : cands) {
          const std::uint64_t j = c.j_v1 * cb.sizes.ju1 + c.j_u1;
          p_sj[c.j_u2 * n_j + j] += w;
          p_xj[xi][j] += w;
        }
      }
    }
    auto h = [](const std::vector<double>& p) {
      double s = 0.0;
      for (double v : p)
        if (v > 0.0) s -= v * std::log2(v);
      return s;
    };
    std::vector<double> ps(cb.sizes.ju2, 0.0), pj(n_j, 0.0);
    for (std::uint64_t s = 0; s < cb.sizes.ju2; ++s)
      for (std::uint64_t j = 0; j < n_j; ++j) {
        ps[s] += p_sj[s * n_j + j];
        pj[j] += p_sj[s * n_j + j];
      }
    const double isj = h(ps) + h(pj) - h(p_sj);
    CHECK(secrecy == doctest::Approx(isj).epsilon(1e-10));
    // I(X^n;J) = H(J) - H(J|X^n)
    double hjx = 0.0;
    for (std::uint64_t xi = 0; xi < n_seqs; ++xi) {
      double px = 0.0;
      for (double v : p_xj[xi]) px += v;
      for (double v : p_xj[xi])
        if (v > 0.0) hjx -= v * std::log2(v / px);
    }
    CHECK(privacy == doctest::Approx(h(pj) - hjx).epsilon(1e-10));
  }
  SUBCASE("degenerate single-codeword codebook leaks nothing") {
    const DiscreteCompoundModel m = ref_model();
    SimConfig cfg = ref_config(6);
    cfg.rates = SimRates{};
    const BinningCodebook cb = build_codebook(m, ref_channels(), cfg);
    CHECK(exact_leakage(cb, m, 0, LeakageKind::secrecy,
                        cfg.delta, cfg.max_enum_states) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(exact_leakage(cb, m, 0, LeakageKind::privacy,
                        cfg.delta, cfg.max_enum_states) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("sandwich bounds for the reference instance") {
    const DiscreteCompoundModel m = ref_model();
    const SimConfig cfg = ref_config(6, 29);
    const BinningCodebook cb = build_codebook(m, ref_channels(), cfg);
    const double secrecy = exact_leakage(cb, m, 0,
                                         LeakageKind::secrecy, cfg.delta,
                                         cfg.max_enum_states);
    const double privacy = exact_leakage(cb, m, 0,
                                         LeakageKind::privacy, cfg.delta,
                                         cfg.max_enum_states);
    const IndexSizes sz = index_sizes(cfg.n, cfg.rates);
    // exact H(S) from the encoder law
    std::vector<double> key_dist(sz.ju2, 0.0);
    for (std::uint64_t xi = 0; xi < 64; ++xi) {
      std::vector<std::uint8_t> xt(6);
      for (std::size_t t = 0; t < 6; ++t) xt[t] = (xi >> (5 - t)) & 1;
      const auto cands = enroll_candidates(cb, xt.data(), cfg.delta);
      if (cands.empty()) {
        key_dist[0] += 1.0 / 64.0;
      } else {
        for (const auto& c : cands)
          key_dist[c.j_u2] += 1.0 / (64.0 * cands.size());
      }
    }
    double h_s = 0.0;
    for (double v : key_dist)
      if (v > 0.0) h_s -= v * std::log2(v);
    CHECK(secrecy >= 0.0);
    CHECK(secrecy <= h_s + 1e-9);
    CHECK(privacy >= 0.0);
    CHECK(privacy <=
          std::log2(static_cast<double>(sz.jv1 * sz.ju1)) + 1e-9);
  }
  SUBCASE("enumeration cap") {
    const DiscreteCompoundModel m = ref_model();
    const SimConfig cfg = ref_config(8);
    const BinningCodebook cb = build_codebook(m, ref_channels(), cfg);
    CHECK_THROWS_AS(exact_leakage(cb, m, 0,
                                  LeakageKind::secrecy, cfg.delta, 1000),
                    resource_limit);
  }
}

TEST_CASE("exact error probability") {
  SUBCASE("always-failing decoder errs whenever the key is not the sentinel") {
    // BSC(0.25) decoder at n=6: the off-diagonal cells expect 1.5 symbols
    // but tolerate at most ~0.5 at delta=0.3, so no decode succeeds
    const DiscreteCompoundModel m(
        FiniteDist::uniform(2), CondDist::identity(2), {CondDist::bsc(0.25)},
        {CondDist::bsc(0.1)});
    SimConfig cfg = ref_config(6, 37);
    cfg.delta = 0.3;
    const BinningCodebook cb = build_codebook(m, ref_channels(), cfg);
    const double err = exact_error_probability(cb, m, 0,
                                               cfg.delta, cfg.max_enum_states);
    // oracle: P(S != 0) from the encoder law
    double p_s0 = 0.0;
    for (std::uint64_t xi = 0; xi < 64; ++xi) {
      std::vector<std::uint8_t> xt(6);
      for (std::size_t t = 0; t < 6; ++t) xt[t] = (xi >> (5 - t)) & 1;
      const auto cands = enroll_candidates(cb, xt.data(), cfg.delta);
      if (cands.empty()) {
        p_s0 += 1.0 / 64.0;
      } else {
        for (const auto& c : cands)
          if (c.j_u2 == 0) p_s0 += 1.0 / (64.0 * cands.size());
      }
    }
    CHECK(err == doctest::Approx(1.0 - p_s0).epsilon(1e-10));
  }
  SUBCASE("exact agrees with monte carlo within three Wilson widths") {
    const DiscreteCompoundModel m = ref_model();
    SimConfig cfg = ref_config(6, 41);
    cfg.trials = 20000;
    const SimReport mc = run_trials(m, ref_channels(), cfg);
    const BinningCodebook cb = build_codebook(m, ref_channels(), cfg);
    const double exact =
        exact_error_probability(cb, m, 0, cfg.delta, cfg.max_enum_states);
    const double width = mc.error_hi_per_k[0] - mc.error_lo_per_k[0];
    CHECK(std::abs(exact - mc.error_prob_per_k[0]) <= 3.0 * width);
  }
  SUBCASE("serial and parallel enumerate identically") {
    const DiscreteCompoundModel m = ref_model();
    const SimConfig cfg = ref_config(6, 43);
    const BinningCodebook cb = build_codebook(m, ref_channels(), cfg);
    const double a = exact_error_probability(cb, m, 0,
                                             cfg.delta, cfg.max_enum_states,
                                             ExecMode::serial);
    const double b = exact_error_probability(cb, m, 0,
                                             cfg.delta, cfg.max_enum_states,
                                             ExecMode::parallel);
    CHECK(a == b);
  }
}

TEST_CASE("exact mode report is reproducible end to end") {
  const DiscreteCompoundModel m = ref_model();
  SimConfig cfg = ref_config(6, 47);
  cfg.mode = SimMode::exact;
  const SimReport a = run_trials(m, ref_channels(), cfg);
  const SimReport b = run_trials(m, ref_channels(), cfg);
  const SimReport s = run_trials(m, ref_channels(), cfg, ExecMode::serial);
  CHECK(a.error_prob_per_k == b.error_prob_per_k);
  CHECK(a.secrecy_leak_per_l == b.secrecy_leak_per_l);
  CHECK(a.privacy_leak_per_l == b.privacy_leak_per_l);
  CHECK(a.key_tv_uniform == b.key_tv_uniform);
  CHECK(a.error_prob_per_k == s.error_prob_per_k);
  CHECK(a.secrecy_leak_per_l == s.secrecy_leak_per_l);
  CHECK(a.e1 == s.e1);
  CHECK(a.e2 == s.e2);
  // rate bookkeeping of the inner layer
  CHECK(cfg.rate_u() ==
        doctest::Approx(cfg.rates.r_ju1 + cfg.rates.r_s + cfg.rates.r_u3)
            .epsilon(1e-15));
}
