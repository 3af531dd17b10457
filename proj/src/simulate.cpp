#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "pufkey/binning.hpp"

namespace pufkey {

namespace {

constexpr double kWilsonZ = 1.959963984540054;  // 95%

std::pair<double, double> wilson_interval(std::uint64_t successes,
                                          std::uint64_t trials) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      kWilsonZ * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double neg_sum_plogp(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

// positions decoded most-significant first: index = sum sym_t * base^(n-1-t)
void unrank(std::uint64_t idx, std::size_t n, std::size_t base,
            std::uint8_t* out) {
  for (std::size_t t = n; t-- > 0;) {
    out[t] = static_cast<std::uint8_t>(idx % base);
    idx /= base;
  }
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (b != 0 && a > UINT64_MAX / b) return UINT64_MAX;
  return a * b;
}

std::uint64_t pow_checked(std::size_t base, std::size_t n,
                          std::uint64_t limit) {
  std::uint64_t v = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (v > limit / base)
      throw resource_limit("enumeration space exceeds cap",
                           sat_mul(v, base), limit);
    v *= base;
  }
  return v;
}

std::size_t pack_bits(std::size_t alphabet) {
  std::size_t bits = 1;
  while ((1ULL << bits) < alphabet) ++bits;
  return bits;
}

// per-tuple encoder distribution: (jv1, ju1, key) with uniform tie weight
struct EncoderLaw {
  std::vector<EnrollResult> cands;  // empty means fallback to all-zero tuple
  double weight() const {
    return cands.empty() ? 1.0 : 1.0 / static_cast<double>(cands.size());
  }
};

EncoderLaw encoder_law(const BinningCodebook& cb, const std::uint8_t* xt,
                       double delta) {
  return {enroll_candidates(cb, xt, delta)};
}

}  // namespace

ExactDecodeStats exact_decode_stats(const BinningCodebook& cb,
                                    const DiscreteCompoundModel& m,
                                    std::size_t k,
                                    double delta,
                                    std::uint64_t max_enum_states,
                                    ExecMode mode) {
  const std::size_t n = cb.n;
  const std::size_t nx = m.p_x().size();
  const std::size_t nxt = cb.n_xt;
  const std::size_t ny = m.decoder_states()[k].n_outputs();
  const std::uint64_t n_xt_seqs = pow_checked(nxt, n, max_enum_states);
  const std::uint64_t n_y_seqs = pow_checked(ny, n, max_enum_states);
  if (n_xt_seqs > max_enum_states / n_y_seqs)
    throw resource_limit("exact_decode_stats: |Xt|^n * |Y|^n exceeds cap",
                         sat_mul(n_xt_seqs, n_y_seqs), max_enum_states);

  // single-letter joint P(xt, y) under the true chain
  std::vector<double> kernel(nxt * ny, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t xt = 0; xt < nxt; ++xt)
      for (std::size_t y = 0; y < ny; ++y)
        kernel[xt * ny + y] += m.p_x()[x] * m.enrollment().at(x, xt) *
                               m.decoder_states()[k].at(x, y);

  const std::size_t n_chunks =
      static_cast<std::size_t>(std::min<std::uint64_t>(n_xt_seqs, 64));
  const std::uint64_t chunk =
      (n_xt_seqs + n_chunks - 1) / n_chunks;
  std::vector<ExactDecodeStats> partial(n_chunks);

  parallel_for(n_chunks, mode, [&](std::size_t c) {
    std::vector<std::uint8_t> xt(n), y(n);
    ExactDecodeStats acc;
    const std::uint64_t lo = c * chunk;
    const std::uint64_t hi = std::min<std::uint64_t>(lo + chunk, n_xt_seqs);
    for (std::uint64_t xi = lo; xi < hi; ++xi) {
      unrank(xi, n, nxt, xt.data());
      const EncoderLaw law = encoder_law(cb, xt.data(), delta);
      const double w = law.weight();
      for (std::uint64_t yi = 0; yi < n_y_seqs; ++yi) {
        unrank(yi, n, ny, y.data());
        double pxy = 1.0;
        for (std::size_t tpos = 0; tpos < n && pxy > 0.0; ++tpos)
          pxy *= kernel[xt[tpos] * ny + y[tpos]];
        if (pxy == 0.0) continue;
        if (law.cands.empty()) {
          const AuthResult a = authenticate(cb, k, y.data(), 0, 0, delta);
          if (a.key_estimate != 0) acc.error_prob += pxy;
          continue;
        }
        // decode once per distinct helper among the candidates
        std::uint64_t prev_v1 = UINT64_MAX, prev_u1 = UINT64_MAX;
        std::uint64_t dec_key = 0;
        for (const EnrollResult& cand : law.cands) {
          if (cand.j_v1 != prev_v1 || cand.j_u1 != prev_u1) {
            const AuthResult a =
                authenticate(cb, k, y.data(), cand.j_v1, cand.j_u1, delta);
            dec_key = a.key_estimate;
            prev_v1 = cand.j_v1;
            prev_u1 = cand.j_u1;
          }
          if (dec_key != cand.j_u2) acc.error_prob += pxy * w;
          const DecodeEvents ev = decode_events(cb, k, y.data(), cand, delta);
          if (ev.e3) acc.e3 += pxy * w;
          if (ev.e4) acc.e4 += pxy * w;
          if (ev.e5) acc.e5 += pxy * w;
        }
      }
    }
    partial[c] = acc;
  });

  ExactDecodeStats total;
  for (const auto& p : partial) {
    total.error_prob += p.error_prob;
    total.e3 += p.e3;
    total.e4 += p.e4;
    total.e5 += p.e5;
  }
  return total;
}

double exact_error_probability(const BinningCodebook& cb,
                               const DiscreteCompoundModel& m,
                               std::size_t k,
                               double delta, std::uint64_t max_enum_states,
                               ExecMode mode) {
  return exact_decode_stats(cb, m, k, delta, max_enum_states, mode)
      .error_prob;
}

namespace {

// joint law over (x^n index, (s,j) pair) folded with the source weights:
// g[x][s*J + j]; the x marginal equals P(x^n)
struct EncoderJoint {
  std::vector<double> g;     // [n_x_seqs][S*J]
  std::uint64_t n_x_seqs = 0;
  std::uint64_t n_sj = 0;
};

EncoderJoint encoder_joint(const BinningCodebook& cb,
                           const DiscreteCompoundModel& m, double delta,
                           std::uint64_t max_enum_states, ExecMode mode) {
  const std::size_t n = cb.n;
  const std::size_t nx = m.p_x().size();
  const std::size_t nxt = cb.n_xt;
  const std::uint64_t n_x_seqs = pow_checked(nx, n, max_enum_states);
  const std::uint64_t n_xt_seqs = pow_checked(nxt, n, max_enum_states);
  if (n_x_seqs > max_enum_states / n_xt_seqs)
    throw resource_limit("exact_leakage: |X|^n * |Xt|^n exceeds cap",
                         sat_mul(n_x_seqs, n_xt_seqs), max_enum_states);
  const std::uint64_t n_j = cb.sizes.jv1 * cb.sizes.ju1;
  const std::uint64_t n_sj = cb.sizes.ju2 * n_j;
  if (n_x_seqs > max_enum_states / std::max<std::uint64_t>(n_sj, 1))
    throw resource_limit("exact_leakage: (s,j) table exceeds cap",
                         sat_mul(n_x_seqs, n_sj), max_enum_states);

  // sparse encoder law per xt sequence
  std::vector<std::vector<std::pair<std::uint32_t, double>>> law(n_xt_seqs);
  parallel_for(n_xt_seqs, mode, [&](std::size_t xi) {
    std::vector<std::uint8_t> xt(n);
    unrank(xi, n, nxt, xt.data());
    const EncoderLaw el = encoder_law(cb, xt.data(), delta);
    auto& entries = law[xi];
    if (el.cands.empty()) {
      entries.emplace_back(0, 1.0);  // all-zero tuple: s = 0, j = (0,0)
      return;
    }
    const double w = el.weight();
    for (const EnrollResult& c : el.cands) {
      const std::uint32_t j =
          static_cast<std::uint32_t>(c.j_v1 * cb.sizes.ju1 + c.j_u1);
      entries.emplace_back(
          static_cast<std::uint32_t>(c.j_u2 * n_j + j), w);
    }
  });

  EncoderJoint out;
  out.n_x_seqs = n_x_seqs;
  out.n_sj = n_sj;
  out.g.assign(n_x_seqs * n_sj, 0.0);
  parallel_for(n_x_seqs, mode, [&](std::size_t xsi) {
    std::vector<std::uint8_t> x(n), xt(n);
    unrank(xsi, n, nx, x.data());
    double px = 1.0;
    for (std::size_t tpos = 0; tpos < n; ++tpos) px *= m.p_x()[x[tpos]];
    if (px == 0.0) return;
    double* row = out.g.data() + xsi * n_sj;
    for (std::uint64_t xti = 0; xti < n_xt_seqs; ++xti) {
      unrank(xti, n, nxt, xt.data());
      double pxt = 1.0;
      for (std::size_t tpos = 0; tpos < n && pxt > 0.0; ++tpos)
        pxt *= m.enrollment().at(x[tpos], xt[tpos]);
      if (pxt == 0.0) continue;
      for (const auto& [sj, w] : law[xti]) row[sj] += px * pxt * w;
    }
  });
  return out;
}

}  // namespace

double exact_leakage(const BinningCodebook& cb, const DiscreteCompoundModel& m,
                     std::size_t l, LeakageKind kind,
                     double delta, std::uint64_t max_enum_states,
                     ExecMode mode) {
  if (l >= m.n_eve_states())
    throw invalid_input("exact_leakage: eve state index out of range");
  const std::size_t n = cb.n;
  const std::size_t nz = m.eve_states()[l].n_outputs();
  const std::uint64_t n_z_seqs = pow_checked(nz, n, max_enum_states);
  const std::uint64_t n_xt_seqs = pow_checked(cb.n_xt, n, max_enum_states);
  if (n_xt_seqs > max_enum_states / n_z_seqs)
    throw resource_limit("exact_leakage: |Xt|^n * |Z|^n exceeds cap",
                         sat_mul(n_xt_seqs, n_z_seqs), max_enum_states);
  const EncoderJoint ej = encoder_joint(cb, m, delta, max_enum_states, mode);
  const std::uint64_t n_j = cb.sizes.jv1 * cb.sizes.ju1;
  const std::uint64_t n_s = cb.sizes.ju2;
  const std::size_t nx = m.p_x().size();
  if (ej.n_sj > max_enum_states / n_z_seqs)
    throw resource_limit("exact_leakage: (s,j,z) table exceeds cap",
                         ej.n_sj * n_z_seqs, max_enum_states);

  if (kind == LeakageKind::secrecy) {
    // T[(s,j), z] = sum_x g[x][(s,j)] P(z|x)
    std::vector<double> tbl(ej.n_sj * n_z_seqs, 0.0);
    const std::size_t n_chunks =
        static_cast<std::size_t>(std::min<std::uint64_t>(n_z_seqs, 64));
    const std::uint64_t chunk = (n_z_seqs + n_chunks - 1) / n_chunks;
    parallel_for(n_chunks, mode, [&](std::size_t c) {
      std::vector<std::uint8_t> z(n), x(n);
      const std::uint64_t lo = c * chunk;
      const std::uint64_t hi = std::min<std::uint64_t>(lo + chunk, n_z_seqs);
      for (std::uint64_t zi = lo; zi < hi; ++zi) {
        unrank(zi, n, nz, z.data());
        for (std::uint64_t xsi = 0; xsi < ej.n_x_seqs; ++xsi) {
          unrank(xsi, n, nx, x.data());
          double pz = 1.0;
          for (std::size_t tpos = 0; tpos < n && pz > 0.0; ++tpos)
            pz *= m.eve_states()[l].at(x[tpos], z[tpos]);
          if (pz == 0.0) continue;
          const double* row = ej.g.data() + xsi * ej.n_sj;
          for (std::uint64_t sj = 0; sj < ej.n_sj; ++sj)
            if (row[sj] > 0.0) tbl[sj * n_z_seqs + zi] += row[sj] * pz;
        }
      }
    });
    // I(S; J,Z) = H(S) + H(J,Z) - H(S,J,Z)
    std::vector<double> ps(n_s, 0.0), pjz(n_j * n_z_seqs, 0.0);
    for (std::uint64_t sj = 0; sj < ej.n_sj; ++sj) {
      const std::uint64_t s = sj / n_j, j = sj % n_j;
      for (std::uint64_t zi = 0; zi < n_z_seqs; ++zi) {
        const double v = tbl[sj * n_z_seqs + zi];
        ps[s] += v;
        pjz[j * n_z_seqs + zi] += v;
      }
    }
    const double h_sjz = neg_sum_plogp(tbl);
    const double mi = neg_sum_plogp(ps) + neg_sum_plogp(pjz) - h_sjz;
    return std::max(0.0, mi);
  }

  // privacy: I(X^n; J | Z^n) = H(J|Z) - H(J|X)
  std::vector<double> q(ej.n_x_seqs * n_j, 0.0);  // joint over (x, j)
  for (std::uint64_t xsi = 0; xsi < ej.n_x_seqs; ++xsi) {
    const double* row = ej.g.data() + xsi * ej.n_sj;
    for (std::uint64_t sj = 0; sj < ej.n_sj; ++sj)
      q[xsi * n_j + sj % n_j] += row[sj];
  }
  double h_j_given_x = 0.0;
  std::vector<double> px_seq(ej.n_x_seqs, 0.0);
  for (std::uint64_t xsi = 0; xsi < ej.n_x_seqs; ++xsi) {
    double px = 0.0;
    for (std::uint64_t j = 0; j < n_j; ++j) px += q[xsi * n_j + j];
    px_seq[xsi] = px;
    if (px == 0.0) continue;
    for (std::uint64_t j = 0; j < n_j; ++j) {
      const double v = q[xsi * n_j + j];
      if (v > 0.0) h_j_given_x -= v * std::log2(v / px);
    }
  }
  std::vector<double> pjz(n_j * n_z_seqs, 0.0);
  {
    std::vector<std::uint8_t> z(n), x(n);
    for (std::uint64_t zi = 0; zi < n_z_seqs; ++zi) {
      unrank(zi, n, nz, z.data());
      for (std::uint64_t xsi = 0; xsi < ej.n_x_seqs; ++xsi) {
        unrank(xsi, n, nx, x.data());
        double pz = 1.0;
        for (std::size_t tpos = 0; tpos < n && pz > 0.0; ++tpos)
          pz *= m.eve_states()[l].at(x[tpos], z[tpos]);
        if (pz == 0.0) continue;
        for (std::uint64_t j = 0; j < n_j; ++j)
          pjz[j * n_z_seqs + zi] += q[xsi * n_j + j] * pz;
      }
    }
  }
  std::vector<double> pz_marg(n_z_seqs, 0.0);
  for (std::uint64_t j = 0; j < n_j; ++j)
    for (std::uint64_t zi = 0; zi < n_z_seqs; ++zi)
      pz_marg[zi] += pjz[j * n_z_seqs + zi];
  const double h_j_given_z = neg_sum_plogp(pjz) - neg_sum_plogp(pz_marg);
  return std::max(0.0, h_j_given_z - h_j_given_x);
}

SimReport run_trials(const DiscreteCompoundModel& m, const TestChannelPair& t,
                     const SimConfig& cfg, ExecMode mode, TrialTrace* trace) {
  cfg.validate();
  const BinningCodebook cb = build_codebook(m, t, cfg, mode);
  const std::size_t K = m.n_decoder_states(), L = m.n_eve_states();

  SimReport rep;
  rep.n = cfg.n;
  rep.storage_bits = std::log2(static_cast<double>(cb.sizes.jv1)) +
                     std::log2(static_cast<double>(cb.sizes.ju1));
  rep.key_bits = std::log2(static_cast<double>(cb.sizes.ju2));
  rep.e345_per_k.assign(K, {0.0, 0.0, 0.0});

  if (cfg.mode == SimMode::exact) {
    rep.mode = "exact";
    // encoder statistics from the closed-form per-sequence law
    const std::size_t nxt = cb.n_xt;
    const std::uint64_t n_xt_seqs =
        pow_checked(nxt, cfg.n, cfg.max_enum_states);
    std::vector<double> q_xt(nxt, 0.0);  // single-letter P(xt)
    for (std::size_t x = 0; x < m.p_x().size(); ++x)
      for (std::size_t xt = 0; xt < nxt; ++xt)
        q_xt[xt] += m.p_x()[x] * m.enrollment().at(x, xt);
    std::vector<double> key_dist(cb.sizes.ju2, 0.0);
    double e1 = 0.0, e2 = 0.0;
    {
      std::vector<std::uint8_t> xt(cfg.n);
      for (std::uint64_t xi = 0; xi < n_xt_seqs; ++xi) {
        unrank(xi, cfg.n, nxt, xt.data());
        double p = 1.0;
        for (std::size_t tp = 0; tp < cfg.n && p > 0.0; ++tp)
          p *= q_xt[xt[tp]];
        if (p == 0.0) continue;
        const EncoderLaw law = encoder_law(cb, xt.data(), cfg.delta);
        if (law.cands.empty()) {
          key_dist[0] += p;
          if (any_typical_v(cb, xt.data(), cfg.delta))
            e2 += p;
          else
            e1 += p;
        } else {
          const double w = law.weight();
          for (const auto& c : law.cands) key_dist[c.j_u2] += p * w;
        }
      }
    }
    rep.e1 = e1;
    rep.e2 = e2;
    double tv = 0.0;
    const double uni = 1.0 / static_cast<double>(cb.sizes.ju2);
    for (double v : key_dist) tv += std::abs(v - uni);
    rep.key_tv_uniform = 0.5 * tv;
    for (std::size_t k = 0; k < K; ++k) {
      const ExactDecodeStats st = exact_decode_stats(
          cb, m, k, cfg.delta, cfg.max_enum_states, mode);
      rep.error_prob_per_k.push_back(st.error_prob);
      rep.e345_per_k[k] = {st.e3, st.e4, st.e5};
    }
    for (std::size_t l = 0; l < L; ++l) {
      rep.secrecy_leak_per_l.push_back(
          exact_leakage(cb, m, l, LeakageKind::secrecy, cfg.delta,
                        cfg.max_enum_states, mode));
      rep.privacy_leak_per_l.push_back(
          exact_leakage(cb, m, l, LeakageKind::privacy, cfg.delta,
                        cfg.max_enum_states, mode));
    }
    return rep;
  }

  // Monte Carlo. Fixed draw order per trial stream: x, xt, enroll
  // tie-break, y per decoder state, z per eve state.
  rep.mode = "monte_carlo";
  if (cfg.trials == 0) throw invalid_input("run_trials: trials must be > 0");
  const std::size_t T = cfg.trials;
  rep.trials_run = T;

  const std::size_t x_bits = pack_bits(m.p_x().size());
  std::vector<std::size_t> z_bits(L);
  for (std::size_t l = 0; l < L; ++l) {
    z_bits[l] = pack_bits(m.eve_states()[l].n_outputs());
    if (z_bits[l] * cfg.n > 64)
      throw resource_limit("run_trials: Z^n too large to histogram",
                           z_bits[l] * cfg.n, 64);
  }
  if (x_bits * cfg.n > 64)
    throw resource_limit("run_trials: X^n too large to histogram",
                         x_bits * cfg.n, 64);

  std::vector<std::uint32_t> keys(T);
  std::vector<std::uint32_t> helpers(T);
  std::vector<std::uint64_t> xpacks(T);
  std::vector<std::uint8_t> enc_event(T);  // 0 ok, 1 e1, 2 e2
  std::vector<std::uint8_t> dec_err(T * K), ev3(T * K), ev4(T * K),
      ev5(T * K);
  std::vector<std::uint64_t> zpacks(T * L);

  parallel_for(T, mode, [&](std::size_t i) {
    RngStream rng(cfg.seed, stream_purpose::trial, i);
    std::vector<std::uint8_t> x(cfg.n), xt(cfg.n), w(cfg.n);
    std::uint64_t xpack = 0;
    for (std::size_t tp = 0; tp < cfg.n; ++tp) {
      x[tp] = static_cast<std::uint8_t>(rng.sample(m.p_x().probs()));
      xpack = (xpack << x_bits) | x[tp];
    }
    xpacks[i] = xpack;
    for (std::size_t tp = 0; tp < cfg.n; ++tp)
      xt[tp] = static_cast<std::uint8_t>(
          rng.sample(m.enrollment().rows()[x[tp]]));
    const EnrollResult enr = enroll(cb, xt.data(), cfg.delta, rng);
    keys[i] = static_cast<std::uint32_t>(enr.j_u2);
    helpers[i] =
        static_cast<std::uint32_t>(enr.j_v1 * cb.sizes.ju1 + enr.j_u1);
    enc_event[i] =
        enr.fallback ? (any_typical_v(cb, xt.data(), cfg.delta) ? 2 : 1) : 0;
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t tp = 0; tp < cfg.n; ++tp)
        w[tp] = static_cast<std::uint8_t>(
            rng.sample(m.decoder_states()[k].rows()[x[tp]]));
      const AuthResult a =
          authenticate(cb, k, w.data(), enr.j_v1, enr.j_u1, cfg.delta);
      dec_err[i * K + k] = a.key_estimate != enr.j_u2 ? 1 : 0;
      if (!enr.fallback) {
        const DecodeEvents ev = decode_events(cb, k, w.data(), enr, cfg.delta);
        ev3[i * K + k] = ev.e3;
        ev4[i * K + k] = ev.e4;
        ev5[i * K + k] = ev.e5;
      }
    }
    for (std::size_t l = 0; l < L; ++l) {
      std::uint64_t zpack = 0;
      for (std::size_t tp = 0; tp < cfg.n; ++tp) {
        const auto z = static_cast<std::uint8_t>(
            rng.sample(m.eve_states()[l].rows()[x[tp]]));
        zpack = (zpack << z_bits[l]) | z;
      }
      zpacks[i * L + l] = zpack;
    }
  });

  if (trace) {
    trace->n_decoder_states = K;
    trace->key.assign(keys.begin(), keys.end());
    trace->j_v1.resize(T);
    trace->j_u1.resize(T);
    const std::uint32_t ju1_count = static_cast<std::uint32_t>(cb.sizes.ju1);
    for (std::size_t i = 0; i < T; ++i) {
      trace->j_v1[i] = helpers[i] / ju1_count;
      trace->j_u1[i] = helpers[i] % ju1_count;
    }
    trace->encoder_event.assign(enc_event.begin(), enc_event.end());
    trace->key_error.assign(dec_err.begin(), dec_err.end());
  }

  // aggregation is a separate serial pass so results cannot depend on
  // scheduling
  std::uint64_t c1 = 0, c2 = 0;
  for (std::size_t i = 0; i < T; ++i) {
    c1 += enc_event[i] == 1;
    c2 += enc_event[i] == 2;
  }
  rep.e1 = static_cast<double>(c1) / T;
  rep.e2 = static_cast<double>(c2) / T;
  for (std::size_t k = 0; k < K; ++k) {
    std::uint64_t errs = 0, c3 = 0, c4 = 0, c5 = 0;
    for (std::size_t i = 0; i < T; ++i) {
      errs += dec_err[i * K + k];
      c3 += ev3[i * K + k];
      c4 += ev4[i * K + k];
      c5 += ev5[i * K + k];
    }
    rep.error_prob_per_k.push_back(static_cast<double>(errs) / T);
    const auto [lo, hi] = wilson_interval(errs, T);
    rep.error_lo_per_k.push_back(lo);
    rep.error_hi_per_k.push_back(hi);
    rep.e345_per_k[k] = {static_cast<double>(c3) / T,
                         static_cast<double>(c4) / T,
                         static_cast<double>(c5) / T};
  }
  {
    std::vector<std::uint64_t> hist(cb.sizes.ju2, 0);
    for (std::size_t i = 0; i < T; ++i) ++hist[keys[i]];
    double tv = 0.0;
    const double uni = 1.0 / static_cast<double>(cb.sizes.ju2);
    for (std::uint64_t h : hist)
      tv += std::abs(static_cast<double>(h) / T - uni);
    rep.key_tv_uniform = 0.5 * tv;
  }
  // plug-in leakage estimates from empirical histograms
  struct Key2 {
    std::uint64_t a, b;
    bool operator==(const Key2& o) const { return a == o.a && b == o.b; }
  };
  struct Key2Hash {
    std::size_t operator()(const Key2& k) const {
      std::uint64_t h = k.a * 0x9e3779b97f4a7c15ULL;
      h ^= k.b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      return static_cast<std::size_t>(h);
    }
  };
  struct Key3 {
    std::uint64_t a, b, c;
    bool operator==(const Key3& o) const {
      return a == o.a && b == o.b && c == o.c;
    }
  };
  struct Key3Hash {
    std::size_t operator()(const Key3& k) const {
      std::uint64_t h = k.a * 0x9e3779b97f4a7c15ULL;
      h ^= k.b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 0xbf58476d1ce4e5b9ULL;
      h ^= k.c + (h << 7) + (h >> 3);
      return static_cast<std::size_t>(h);
    }
  };
  const double n_d = static_cast<double>(T);
  for (std::size_t l = 0; l < L; ++l) {
    std::unordered_map<Key2, std::uint32_t, Key2Hash> m_jz, m_xz;
    std::unordered_map<Key3, std::uint32_t, Key3Hash> m_sjz, m_xjz;
    std::unordered_map<std::uint64_t, std::uint32_t> m_s, m_z;
    for (std::size_t i = 0; i < T; ++i) {
      const std::uint64_t s = keys[i], j = helpers[i];
      const std::uint64_t z = zpacks[i * L + l], x = xpacks[i];
      ++m_sjz[{s, j, z}];
      ++m_jz[{j, z}];
      ++m_s[s];
      ++m_z[z];
      ++m_xjz[{x, j, z}];
      ++m_xz[{x, z}];
    }
    double secrecy = 0.0;  // I(S; J, Z^n)
    for (const auto& [k3, c] : m_sjz)
      secrecy += c / n_d *
                 std::log2(static_cast<double>(c) * n_d /
                           (static_cast<double>(m_s[k3.a]) *
                            m_jz.at({k3.b, k3.c})));
    double privacy = 0.0;  // I(X^n; J | Z^n)
    for (const auto& [k3, c] : m_xjz)
      privacy += c / n_d *
                 std::log2(static_cast<double>(c) *
                           static_cast<double>(m_z[k3.c]) /
                           (static_cast<double>(m_xz.at({k3.a, k3.c})) *
                            m_jz.at({k3.b, k3.c})));
    rep.secrecy_leak_per_l.push_back(std::max(0.0, secrecy));
    rep.privacy_leak_per_l.push_back(std::max(0.0, privacy));
  }
  return rep;
}

}  // namespace pufkey
