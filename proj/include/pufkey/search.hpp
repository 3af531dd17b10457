#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pufkey/discrete.hpp"
#include "pufkey/parallel.hpp"

namespace pufkey {

// Cardinality caps for the auxiliary alphabets. The defaults are large
// enough that nothing achievable is excluded; callers may lower them for
// speed at the cost of a possibly looser inner region.
struct SearchCaps {
  std::size_t u_cap = 0;
  std::size_t v_cap = 0;
};

SearchCaps default_caps(const DiscreteCompoundModel& m);

struct ParetoEntry {
  BoundPoint point;
  TestChannelPair channels;
};

// Nondominated set (maximize r_s, minimize r_j and r_l) found by random
// restarts plus per-row coordinate ascent on logit-parameterized simplex
// rows. Deterministic under a given seed, independent of ExecMode.
std::vector<ParetoEntry> search_inner_region(const DiscreteCompoundModel& m,
                                             RegionKind kind,
                                             std::size_t budget,
                                             SearchCaps caps,
                                             std::uint64_t seed,
                                             ExecMode mode = ExecMode::parallel);

struct SupportDirection {
  double w_s = 0.0, w_j = 0.0, w_l = 0.0;
};

// fixed scalarization directions used for support tables
const std::vector<SupportDirection>& support_directions();

inline double support_value(const SupportDirection& d, const RateTriple& t) {
  return d.w_s * t.r_s - d.w_j * t.r_j - d.w_l * t.r_l;
}

// Per-direction support of the intersection over channel-state pairs of the
// per-state outer regions: value[d] = min over (k,l) of the per-state
// maximum of the scalarized objective.
struct SupportTable {
  std::vector<SupportDirection> directions;
  std::vector<std::vector<double>> per_state;  // [dir][k * L + l]
  std::vector<double> value;                   // [dir], min over states
};

SupportTable outer_intersection(
    const DiscreteCompoundModel& m, RegionKind kind, std::size_t budget,
    SearchCaps caps, std::uint64_t seed, ExecMode mode = ExecMode::parallel,
    const std::vector<ParetoEntry>* warm_starts = nullptr);

// every Pareto point of the inner search must satisfy the table
bool satisfies_outer_table(const SupportTable& table, const RateTriple& t,
                           double tol = 1e-9);

// Numerical coincidence check of the single-state capacity result: inner
// and outer support values from two independently seeded searches.
struct GapReport {
  std::vector<SupportDirection> directions;
  std::vector<double> inner_support;
  std::vector<double> outer_support;
  std::vector<double> gap;  // outer - inner per direction
  double max_gap = 0.0;
};

GapReport single_state_gap(const DiscreteCompoundModel& m, RegionKind kind,
                         std::size_t budget, SearchCaps caps,
                         std::uint64_t seed,
                         ExecMode mode = ExecMode::parallel);

}  // namespace pufkey
