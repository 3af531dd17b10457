#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "pufkey/gaussian.hpp"  // RateTriple, RegionKind
#include "pufkey/joint.hpp"

namespace pufkey {

// Finite-alphabet source with a noisy enrollment channel and compound
// decoder/eavesdropper states. Vector outputs arrive pre-flattened to one
// finite alphabet; this module never builds products itself.
class DiscreteCompoundModel {
 public:
  DiscreteCompoundModel(FiniteDist p_x, CondDist enrollment,
                        std::vector<CondDist> decoder_states,
                        std::vector<CondDist> eve_states);

  const FiniteDist& p_x() const { return p_x_; }
  const CondDist& enrollment() const { return enrollment_; }
  const std::vector<CondDist>& decoder_states() const {
    return decoder_states_;
  }
  const std::vector<CondDist>& eve_states() const { return eve_states_; }
  std::size_t n_decoder_states() const { return decoder_states_.size(); }
  std::size_t n_eve_states() const { return eve_states_.size(); }

 private:
  FiniteDist p_x_;
  CondDist enrollment_;
  std::vector<CondDist> decoder_states_;
  std::vector<CondDist> eve_states_;
};

// Auxiliary test channels P(U|Xt) and P(V|U) defining a bound point.
struct TestChannelPair {
  CondDist u_given_xt;
  CondDist v_given_u;
};

// A rate triple together with the named mutual-information terms it was
// assembled from; the triple is reconstructible from the terms.
struct BoundPoint {
  RateTriple triple;
  std::map<std::string, double> terms;
};

// Extreme achievable triple of the inner bound for the given test channels:
// maximal r_s, minimal r_j and r_l. r_s and r_l clamp at 0.
BoundPoint inner_point(const DiscreteCompoundModel& m,
                       const TestChannelPair& t, RegionKind kind);

// Per-state outer-bound triple for decoder state k and eve state l.
BoundPoint outer_point(const DiscreteCompoundModel& m, std::size_t k,
                       std::size_t l, const TestChannelPair& t,
                       RegionKind kind);

// reassemble the triple from a BoundPoint's stored terms (for the
// reconstruction invariant)
RateTriple reconstruct_triple(const BoundPoint& p, RegionKind kind,
                              bool outer);

}  // namespace pufkey
