#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pufkey/discrete.hpp"
#include "pufkey/parallel.hpp"

namespace pufkey {

struct SimRates {
  double r_v = 0.0;    // outer-layer codeword rate
  double r_jv1 = 0.0;  // outer-layer bin (helper) rate
  double r_ju1 = 0.0;  // inner-layer bin (helper) rate
  double r_s = 0.0;    // secret-key rate
  double r_u3 = 0.0;   // inner-layer randomization rate
};

enum class SimMode { exact, monte_carlo };

struct SimConfig {
  std::size_t n = 1;       // block length
  double delta = 0.15;     // typicality slack
  SimRates rates;
  std::uint64_t seed = 0;
  std::size_t trials = 0;  // monte_carlo only
  SimMode mode = SimMode::monte_carlo;
  std::uint64_t max_codebook_cells = 1ULL << 26;
  std::uint64_t max_enum_states = 1ULL << 26;

  void validate() const;
  // inner-layer codeword rate implied by the index bookkeeping
  double rate_u() const { return rates.r_ju1 + rates.r_s + rates.r_u3; }
};

// index-set sizes ceil(2^{n r}), never below 1
struct IndexSizes {
  std::uint64_t jv1 = 1, jv2 = 1, ju1 = 1, ju2 = 1, ju3 = 1;
  std::uint64_t n_v_words() const { return jv1 * jv2; }
  std::uint64_t n_u_words_per_v() const { return ju1 * ju2 * ju3; }
};

IndexSizes index_sizes(std::size_t n, const SimRates& rates);

// Layered random codebook plus the test-channel-induced statistics the
// typicality encoder/decoder needs. Immutable after construction; safe to
// share across threads.
struct BinningCodebook {
  std::size_t n = 0;
  IndexSizes sizes;
  std::size_t n_xt = 0, n_u = 0, n_v = 0;

  // v_words[(jv1*jv2_count + jv2)*n + t]; u words per v-word, ju1 slowest
  // then ju2 then ju3
  std::vector<std::uint8_t> v_words;
  std::vector<std::uint8_t> u_words;

  const std::uint8_t* v_word(std::uint64_t jv1, std::uint64_t jv2) const {
    return v_words.data() + (jv1 * sizes.jv2 + jv2) * n;
  }
  const std::uint8_t* u_word(std::uint64_t jv1, std::uint64_t jv2,
                             std::uint64_t ju1, std::uint64_t ju2,
                             std::uint64_t ju3) const {
    const std::uint64_t jv = jv1 * sizes.jv2 + jv2;
    const std::uint64_t ju = (ju1 * sizes.ju2 + ju2) * sizes.ju3 + ju3;
    return u_words.data() + (jv * sizes.n_u_words_per_v() + ju) * n;
  }

  // single-letter joints for the typicality tests, flattened row-major
  std::vector<double> p_v;            // [v]
  std::vector<double> p_xt_v;         // [xt][v]
  std::vector<double> p_xt_u_v;       // [xt][u][v]
  std::vector<std::size_t> n_y_per_k;
  std::vector<std::vector<double>> p_y_v_per_k;    // [k]: [y][v]
  std::vector<std::vector<double>> p_y_u_v_per_k;  // [k]: [y][u][v]
};

BinningCodebook build_codebook(const DiscreteCompoundModel& m,
                               const TestChannelPair& t, const SimConfig& cfg,
                               ExecMode mode = ExecMode::parallel);

struct EnrollResult {
  std::uint64_t j_v1 = 0, j_v2 = 0;        // outer-layer indices
  std::uint64_t j_u1 = 0, j_u2 = 0, j_u3 = 0;
  bool fallback = false;  // no jointly typical tuple existed
  std::uint64_t key() const { return j_u2; }
};

// All jointly typical tuples in lexicographic (jv1, jv2, ju1, ju2, ju3)
// order; empty when the encoder must fall back to the all-ones tuple.
std::vector<EnrollResult> enroll_candidates(const BinningCodebook& cb,
                                            const std::uint8_t* xt_seq,
                                            double delta);

// typicality encoding with seeded uniform tie-breaking among multiple hits
EnrollResult enroll(const BinningCodebook& cb, const std::uint8_t* xt_seq,
                    double delta, RngStream& rng);

// whether any outer-layer codeword is jointly typical with the observation
// (separates the two encoder error events)
bool any_typical_v(const BinningCodebook& cb, const std::uint8_t* xt_seq,
                   double delta);

struct AuthResult {
  std::uint64_t key_estimate = 0;
  bool failed = false;  // non-unique or missing typicality hit
};

// two-stage typicality decoding for decoder state k
AuthResult authenticate(const BinningCodebook& cb, std::size_t k,
                        const std::uint8_t* y_seq, std::uint64_t j_v1,
                        std::uint64_t j_u1, double delta);

// Decoder-side error events for state k given the enrolled tuple: the
// enrolled triple falling outside the typical set (e3), a wrong outer
// index passing the first stage (e4), a wrong inner pair passing the
// second stage (e5).
struct DecodeEvents {
  bool e3 = false, e4 = false, e5 = false;
};

DecodeEvents decode_events(const BinningCodebook& cb, std::size_t k,
                           const std::uint8_t* y_seq,
                           const EnrollResult& enrolled, double delta);

struct SimReport {
  std::string mode;
  std::size_t n = 0;
  std::uint64_t trials_run = 0;
  double storage_bits = 0.0;
  double key_bits = 0.0;  // log2 |S|

  std::vector<double> error_prob_per_k;
  // Wilson 95% intervals, monte_carlo only
  std::vector<double> error_lo_per_k, error_hi_per_k;
  double key_tv_uniform = 0.0;
  std::vector<double> secrecy_leak_per_l;  // I(S; J, Z^n) in bits
  std::vector<double> privacy_leak_per_l;  // I(X^n; J | Z^n) in bits

  // error-event attribution: probabilities in exact mode, trial fractions
  // in monte_carlo mode
  double e1 = 0.0, e2 = 0.0;
  std::vector<std::array<double, 3>> e345_per_k;
};

// per-trial outcomes, filled in monte_carlo mode when a trace is requested
struct TrialTrace {
  std::size_t n_decoder_states = 0;
  std::vector<std::uint32_t> key;       // [trial]
  std::vector<std::uint32_t> j_v1, j_u1;
  std::vector<std::uint8_t> encoder_event;  // 0 none, 1 e1, 2 e2
  std::vector<std::uint8_t> key_error;      // [trial * K + k]
};

SimReport run_trials(const DiscreteCompoundModel& m, const TestChannelPair& t,
                     const SimConfig& cfg, ExecMode mode = ExecMode::parallel,
                     TrialTrace* trace = nullptr);

enum class LeakageKind { secrecy, privacy };

// Exact I(S;J,Z^n) or I(X^n;J|Z^n) for the fixed codebook by full
// enumeration; encoder tie-breaking marginalized analytically.
double exact_leakage(const BinningCodebook& cb, const DiscreteCompoundModel& m,
                     std::size_t l, LeakageKind kind,
                     double delta, std::uint64_t max_enum_states,
                     ExecMode mode = ExecMode::parallel);

struct ExactDecodeStats {
  double error_prob = 0.0;
  double e3 = 0.0, e4 = 0.0, e5 = 0.0;
};

ExactDecodeStats exact_decode_stats(const BinningCodebook& cb,
                                    const DiscreteCompoundModel& m,
                                    std::size_t k,
                                    double delta,
                                    std::uint64_t max_enum_states,
                                    ExecMode mode = ExecMode::parallel);

// exact P{S_hat != S} for decoder state k
double exact_error_probability(const BinningCodebook& cb,
                               const DiscreteCompoundModel& m,
                               std::size_t k,
                               double delta, std::uint64_t max_enum_states,
                               ExecMode mode = ExecMode::parallel);

}  // namespace pufkey
