#include "pufkey/binning.hpp"

#include <cmath>

namespace pufkey {

void SimConfig::validate() const {
  if (n < 1) throw invalid_input("SimConfig: n must be >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw invalid_input("SimConfig: delta outside (0,1)");
  for (double r : {rates.r_v, rates.r_jv1, rates.r_ju1, rates.r_s, rates.r_u3})
    if (!(r >= 0.0)) throw invalid_input("SimConfig: rates must be >= 0");
}

namespace {

std::uint64_t set_size(std::size_t n, double rate) {
  const double bits = static_cast<double>(n) * rate;
  if (bits > 62.0)
    throw resource_limit("index set size overflows", 63, 62);
  const double v = std::ceil(std::exp2(bits) - 1e-9);
  return v < 1.0 ? 1 : static_cast<std::uint64_t>(v);
}

}  // namespace

IndexSizes index_sizes(std::size_t n, const SimRates& rates) {
  IndexSizes s;
  s.jv1 = set_size(n, rates.r_jv1);
  s.jv2 = set_size(n, rates.r_v - rates.r_jv1);
  s.ju1 = set_size(n, rates.r_ju1);
  s.ju2 = set_size(n, rates.r_s);
  s.ju3 = set_size(n, rates.r_u3);
  return s;
}

namespace {

// Strong (frequency) typicality: every symbol-pair count within
// delta * n * P of its expectation, and zero-probability cells unvisited.
// The zero-cell test doubles as an early exit.
bool typical_pair(const std::uint8_t* a, const std::uint8_t* b, std::size_t n,
                  const double* p, std::size_t nb, std::size_t cells,
                  double delta, std::vector<int>& scratch) {
  scratch.assign(cells, 0);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t cell = a[t] * nb + b[t];
    if (p[cell] == 0.0) return false;
    ++scratch[cell];
  }
  const double nd = static_cast<double>(n);
  for (std::size_t c = 0; c < cells; ++c) {
    const double expect = nd * p[c];
    if (std::abs(scratch[c] - expect) > delta * expect + 1e-9) return false;
  }
  return true;
}

bool typical_triple(const std::uint8_t* a, const std::uint8_t* b,
                    const std::uint8_t* c, std::size_t n, const double* p,
                    std::size_t nb, std::size_t nc, std::size_t cells,
                    double delta, std::vector<int>& scratch) {
  scratch.assign(cells, 0);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t cell = (a[t] * nb + b[t]) * nc + c[t];
    if (p[cell] == 0.0) return false;
    ++scratch[cell];
  }
  const double nd = static_cast<double>(n);
  for (std::size_t ci = 0; ci < cells; ++ci) {
    const double expect = nd * p[ci];
    if (std::abs(scratch[ci] - expect) > delta * expect + 1e-9) return false;
  }
  return true;
}

}  // namespace

BinningCodebook build_codebook(const DiscreteCompoundModel& m,
                               const TestChannelPair& t, const SimConfig& cfg,
                               ExecMode mode) {
  cfg.validate();
  BinningCodebook cb;
  cb.n = cfg.n;
  cb.sizes = index_sizes(cfg.n, cfg.rates);
  cb.n_xt = m.enrollment().n_outputs();
  cb.n_u = t.u_given_xt.n_outputs();
  cb.n_v = t.v_given_u.n_outputs();
  if (t.u_given_xt.n_inputs() != cb.n_xt)
    throw invalid_input("build_codebook: P(U|Xt) input != |Xt|");
  if (cb.n_xt > 255 || cb.n_u > 255 || cb.n_v > 255)
    throw invalid_input("build_codebook: alphabets larger than 255 symbols");

  const std::uint64_t n_v_words = cb.sizes.n_v_words();
  const std::uint64_t n_u_words = n_v_words * cb.sizes.n_u_words_per_v();
  const std::uint64_t cells = (n_v_words + n_u_words) * cfg.n;
  if (cells > cfg.max_codebook_cells)
    throw resource_limit("build_codebook: codebook exceeds memory cap", cells,
                         cfg.max_codebook_cells);

  // single-letter joints along the chain V-U-Xt-X-(Y_k)
  const std::size_t nx = m.p_x().size();
  const std::size_t nxt = cb.n_xt, nu = cb.n_u, nv = cb.n_v;
  std::vector<double> p4(nv * nu * nxt * nx);  // [v][u][xt][x]
  {
    std::size_t flat = 0;
    for (std::size_t v = 0; v < nv; ++v)
      for (std::size_t u = 0; u < nu; ++u)
        for (std::size_t xt = 0; xt < nxt; ++xt)
          for (std::size_t x = 0; x < nx; ++x)
            p4[flat++] = t.v_given_u.at(u, v) * t.u_given_xt.at(xt, u) *
                         m.enrollment().at(x, xt) * m.p_x()[x];
  }
  cb.p_v.assign(nv, 0.0);
  cb.p_xt_v.assign(nxt * nv, 0.0);
  cb.p_xt_u_v.assign(nxt * nu * nv, 0.0);
  std::vector<double> p_uv(nu * nv, 0.0);
  {
    std::size_t flat = 0;
    for (std::size_t v = 0; v < nv; ++v)
      for (std::size_t u = 0; u < nu; ++u)
        for (std::size_t xt = 0; xt < nxt; ++xt)
          for (std::size_t x = 0; x < nx; ++x) {
            const double p = p4[flat++];
            cb.p_v[v] += p;
            cb.p_xt_v[xt * nv + v] += p;
            cb.p_xt_u_v[(xt * nu + u) * nv + v] += p;
            p_uv[u * nv + v] += p;
          }
  }
  for (std::size_t k = 0; k < m.n_decoder_states(); ++k) {
    const CondDist& ch = m.decoder_states()[k];
    const std::size_t ny = ch.n_outputs();
    std::vector<double> pyv(ny * nv, 0.0), pyuv(ny * nu * nv, 0.0);
    std::size_t flat = 0;
    for (std::size_t v = 0; v < nv; ++v)
      for (std::size_t u = 0; u < nu; ++u)
        for (std::size_t xt = 0; xt < nxt; ++xt)
          for (std::size_t x = 0; x < nx; ++x) {
            const double p = p4[flat++];
            if (p == 0.0) continue;
            for (std::size_t y = 0; y < ny; ++y) {
              const double py = p * ch.at(x, y);
              pyv[y * nv + v] += py;
              pyuv[(y * nu + u) * nv + v] += py;
            }
          }
    cb.n_y_per_k.push_back(ny);
    cb.p_y_v_per_k.push_back(std::move(pyv));
    cb.p_y_u_v_per_k.push_back(std::move(pyuv));
  }

  // conditional P(U|V) for drawing the inner layer
  std::vector<std::vector<double>> u_given_v(nv, std::vector<double>(nu, 0.0));
  for (std::size_t v = 0; v < nv; ++v) {
    if (cb.p_v[v] > 0.0) {
      for (std::size_t u = 0; u < nu; ++u)
        u_given_v[v][u] = p_uv[u * nv + v] / cb.p_v[v];
    } else {
      u_given_v[v][0] = 1.0;  // unreachable v, any row works
    }
  }

  cb.v_words.resize(n_v_words * cfg.n);
  const std::vector<double> p_v_copy = cb.p_v;
  parallel_for(n_v_words, mode, [&](std::size_t w) {
    RngStream rng(cfg.seed, stream_purpose::codebook_v, w);
    for (std::size_t tpos = 0; tpos < cfg.n; ++tpos)
      cb.v_words[w * cfg.n + tpos] =
          static_cast<std::uint8_t>(rng.sample(p_v_copy));
  });
  cb.u_words.resize(n_u_words * cfg.n);
  const std::uint64_t per_v = cb.sizes.n_u_words_per_v();
  parallel_for(n_u_words, mode, [&](std::size_t w) {
    RngStream rng(cfg.seed, stream_purpose::codebook_u, w);
    const std::uint64_t jv = w / per_v;
    const std::uint8_t* vw = cb.v_words.data() + jv * cfg.n;
    for (std::size_t tpos = 0; tpos < cfg.n; ++tpos)
      cb.u_words[w * cfg.n + tpos] =
          static_cast<std::uint8_t>(rng.sample(u_given_v[vw[tpos]]));
  });
  return cb;
}

std::vector<EnrollResult> enroll_candidates(const BinningCodebook& cb,
                                            const std::uint8_t* xt_seq,
                                            double delta) {
  std::vector<EnrollResult> out;
  std::vector<int> scratch;
  const auto& s = cb.sizes;
  for (std::uint64_t jv1 = 0; jv1 < s.jv1; ++jv1)
    for (std::uint64_t jv2 = 0; jv2 < s.jv2; ++jv2) {
      const std::uint8_t* vw = cb.v_word(jv1, jv2);
      if (!typical_pair(xt_seq, vw, cb.n, cb.p_xt_v.data(), cb.n_v,
                        cb.n_xt * cb.n_v, delta, scratch))
        continue;
      for (std::uint64_t ju1 = 0; ju1 < s.ju1; ++ju1)
        for (std::uint64_t ju2 = 0; ju2 < s.ju2; ++ju2)
          for (std::uint64_t ju3 = 0; ju3 < s.ju3; ++ju3) {
            const std::uint8_t* uw = cb.u_word(jv1, jv2, ju1, ju2, ju3);
            if (typical_triple(xt_seq, uw, vw, cb.n, cb.p_xt_u_v.data(),
                               cb.n_u, cb.n_v, cb.n_xt * cb.n_u * cb.n_v,
                               delta, scratch))
              out.push_back({jv1, jv2, ju1, ju2, ju3, false});
          }
    }
  return out;
}

EnrollResult enroll(const BinningCodebook& cb, const std::uint8_t* xt_seq,
                    double delta, RngStream& rng) {
  const std::vector<EnrollResult> cands = enroll_candidates(cb, xt_seq, delta);
  if (cands.empty()) {
    EnrollResult r;
    r.fallback = true;  // "all ones": index 0 of every set
    return r;
  }
  // unique hit taken as is; several hits broken uniformly from the stream
  if (cands.size() == 1) return cands[0];
  return cands[rng.below(cands.size())];
}

bool any_typical_v(const BinningCodebook& cb, const std::uint8_t* xt_seq,
                   double delta) {
  std::vector<int> scratch;
  for (std::uint64_t jv1 = 0; jv1 < cb.sizes.jv1; ++jv1)
    for (std::uint64_t jv2 = 0; jv2 < cb.sizes.jv2; ++jv2)
      if (typical_pair(xt_seq, cb.v_word(jv1, jv2), cb.n, cb.p_xt_v.data(),
                       cb.n_v, cb.n_xt * cb.n_v, delta, scratch))
        return true;
  return false;
}

AuthResult authenticate(const BinningCodebook& cb, std::size_t k,
                        const std::uint8_t* y_seq, std::uint64_t j_v1,
                        std::uint64_t j_u1, double delta) {
  if (k >= cb.p_y_v_per_k.size())
    throw invalid_input("authenticate: decoder state index out of range");
  const auto& s = cb.sizes;
  const std::size_t ny = cb.n_y_per_k[k];
  const double* pyv = cb.p_y_v_per_k[k].data();
  const double* pyuv = cb.p_y_u_v_per_k[k].data();
  std::vector<int> scratch;

  std::uint64_t hit_v2 = 0;
  std::size_t n_hits = 0;
  for (std::uint64_t jv2 = 0; jv2 < s.jv2 && n_hits < 2; ++jv2) {
    if (typical_pair(y_seq, cb.v_word(j_v1, jv2), cb.n, pyv, cb.n_v,
                     ny * cb.n_v, delta, scratch)) {
      hit_v2 = jv2;
      ++n_hits;
    }
  }
  if (n_hits != 1) return {0, true};

  const std::uint8_t* vw = cb.v_word(j_v1, hit_v2);
  std::uint64_t hit_u2 = 0;
  n_hits = 0;
  for (std::uint64_t ju2 = 0; ju2 < s.ju2 && n_hits < 2; ++ju2)
    for (std::uint64_t ju3 = 0; ju3 < s.ju3 && n_hits < 2; ++ju3) {
      const std::uint8_t* uw = cb.u_word(j_v1, hit_v2, j_u1, ju2, ju3);
      if (typical_triple(y_seq, uw, vw, cb.n, pyuv, cb.n_u, cb.n_v,
                         ny * cb.n_u * cb.n_v, delta, scratch)) {
        hit_u2 = ju2;
        ++n_hits;
      }
    }
  if (n_hits != 1) return {0, true};
  return {hit_u2, false};
}

DecodeEvents decode_events(const BinningCodebook& cb, std::size_t k,
                           const std::uint8_t* y_seq,
                           const EnrollResult& enrolled, double delta) {
  const auto& s = cb.sizes;
  const std::size_t ny = cb.n_y_per_k[k];
  const double* pyv = cb.p_y_v_per_k[k].data();
  const double* pyuv = cb.p_y_u_v_per_k[k].data();
  std::vector<int> scratch;
  DecodeEvents ev;

  const std::uint8_t* vw = cb.v_word(enrolled.j_v1, enrolled.j_v2);
  const std::uint8_t* uw = cb.u_word(enrolled.j_v1, enrolled.j_v2,
                                     enrolled.j_u1, enrolled.j_u2,
                                     enrolled.j_u3);
  ev.e3 = !typical_triple(y_seq, uw, vw, cb.n, pyuv, cb.n_u, cb.n_v,
                          ny * cb.n_u * cb.n_v, delta, scratch);
  for (std::uint64_t jv2 = 0; jv2 < s.jv2 && !ev.e4; ++jv2) {
    if (jv2 == enrolled.j_v2) continue;
    ev.e4 = typical_pair(y_seq, cb.v_word(enrolled.j_v1, jv2), cb.n, pyv,
                         cb.n_v, ny * cb.n_v, delta, scratch);
  }
  for (std::uint64_t ju2 = 0; ju2 < s.ju2 && !ev.e5; ++ju2)
    for (std::uint64_t ju3 = 0; ju3 < s.ju3 && !ev.e5; ++ju3) {
      if (ju2 == enrolled.j_u2 && ju3 == enrolled.j_u3) continue;
      const std::uint8_t* cand = cb.u_word(enrolled.j_v1, enrolled.j_v2,
                                           enrolled.j_u1, ju2, ju3);
      ev.e5 = typical_triple(y_seq, cand, vw, cb.n, pyuv, cb.n_u, cb.n_v,
                             ny * cb.n_u * cb.n_v, delta, scratch);
    }
  return ev;
}

}  // namespace pufkey
