#include "pufkey/search.hpp"

#include <algorithm>
#include <cmath>

namespace pufkey {

namespace {

constexpr double kDominanceTol = 1e-9;
constexpr double kConvergenceTol = 1e-7;
constexpr double kFdStep = 1e-4;
constexpr std::size_t kRestartBudget = 1500;

struct ChannelLogits {
  std::vector<std::vector<double>> u_rows;  // |Xt| rows over u_cap
  std::vector<std::vector<double>> v_rows;  // u_cap rows over v_cap

  TestChannelPair to_channels() const {
    auto softmax_rows = [](const std::vector<std::vector<double>>& rows) {
      std::vector<std::vector<double>> out(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        double mx = row[0];
        for (double v : row) mx = std::max(mx, v);
        double sum = 0.0;
        out[r].resize(row.size());
        for (std::size_t i = 0; i < row.size(); ++i) {
          out[r][i] = std::exp(row[i] - mx);
          sum += out[r][i];
        }
        for (auto& v : out[r]) v /= sum;
        // renormalize exactly enough for the CondDist validity check
        double s2 = 0.0;
        for (double v : out[r]) s2 += v;
        out[r].back() += 1.0 - s2;
      }
      return out;
    };
    return {CondDist(softmax_rows(u_rows)), CondDist(softmax_rows(v_rows))};
  }
};

ChannelLogits constant_init(std::size_t nxt, std::size_t u_cap,
                            std::size_t v_cap) {
  ChannelLogits p;
  p.u_rows.assign(nxt, std::vector<double>(u_cap, 0.0));
  p.v_rows.assign(u_cap, std::vector<double>(v_cap, 0.0));
  for (auto& r : p.u_rows) r[0] = 8.0;
  for (auto& r : p.v_rows) r[0] = 8.0;
  return p;
}

ChannelLogits diagonal_init(std::size_t nxt, std::size_t u_cap,
                            std::size_t v_cap) {
  ChannelLogits p;
  p.u_rows.assign(nxt, std::vector<double>(u_cap, 0.0));
  p.v_rows.assign(u_cap, std::vector<double>(v_cap, 0.0));
  for (std::size_t i = 0; i < nxt; ++i) p.u_rows[i][i % u_cap] = 8.0;
  for (std::size_t i = 0; i < u_cap; ++i) p.v_rows[i][i % v_cap] = 8.0;
  return p;
}

ChannelLogits random_init(std::size_t nxt, std::size_t u_cap,
                          std::size_t v_cap, RngStream& rng) {
  ChannelLogits p;
  p.u_rows.assign(nxt, std::vector<double>(u_cap, 0.0));
  p.v_rows.assign(u_cap, std::vector<double>(v_cap, 0.0));
  for (auto& r : p.u_rows)
    for (auto& v : r) v = 3.0 * (rng.uniform01() - 0.5);
  for (auto& r : p.v_rows)
    for (auto& v : r) v = 3.0 * (rng.uniform01() - 0.5);
  return p;
}

SupportDirection random_direction(RngStream& rng) {
  double w[3];
  double sum = 0.0;
  for (auto& v : w) {
    v = -std::log(1.0 - rng.uniform01() + 1e-300);
    sum += v;
  }
  return {w[0] / sum, w[1] / sum, w[2] / sum};
}

const SupportDirection kAnchors[4] = {
    {1.0, 0.02, 0.02}, {1.0, 1.0, 0.02}, {1.0, 0.02, 1.0}, {1.0, 1.0, 1.0}};

struct AscentResult {
  std::vector<ParetoEntry> visited;  // init + every accepted improvement
};

// Cyclic per-row coordinate ascent with finite-difference row gradients and
// a step-halving line search. Every call of eval consumes one budget unit;
// stops on convergence or when the slice is exhausted.
AscentResult ascend(ChannelLogits params, const SupportDirection& dir,
                    std::size_t budget,
                    const std::function<BoundPoint(const TestChannelPair&)>& eval) {
  AscentResult res;
  std::size_t used = 0;
  auto score = [&](const ChannelLogits& p, BoundPoint* out) {
    const TestChannelPair t = p.to_channels();
    BoundPoint b = eval(t);
    ++used;
    const double v = support_value(dir, b.triple);
    if (out) *out = std::move(b);
    return v;
  };

  BoundPoint cur_point;
  double cur = score(params, &cur_point);
  res.visited.push_back({cur_point, params.to_channels()});
  if (used >= budget) return res;

  auto all_rows = [&](ChannelLogits& p) {
    std::vector<std::vector<double>*> rows;
    for (auto& r : p.u_rows) rows.push_back(&r);
    for (auto& r : p.v_rows) rows.push_back(&r);
    return rows;
  };

  bool converged = false;
  while (!converged && used < budget) {
    const double cycle_start = cur;
    auto rows = all_rows(params);
    for (auto* row : rows) {
      if (used >= budget) break;
      if (row->size() < 2) continue;  // single-column rows have no freedom
      // forward-difference gradient of the scalarized objective
      std::vector<double> grad(row->size(), 0.0);
      double norm = 0.0;
      for (std::size_t i = 0; i < row->size() && used < budget; ++i) {
        const double keep = (*row)[i];
        (*row)[i] = keep + kFdStep;
        const double f = score(params, nullptr);
        (*row)[i] = keep;
        grad[i] = (f - cur) / kFdStep;
        norm += grad[i] * grad[i];
      }
      norm = std::sqrt(norm);
      if (norm < 1e-12) continue;
      for (auto& g : grad) g /= norm;
      // step-halving line search along the row gradient
      for (double step = 1.0; step >= 1e-3 && used < budget; step *= 0.5) {
        std::vector<double> saved = *row;
        for (std::size_t i = 0; i < row->size(); ++i) {
          (*row)[i] += step * grad[i];
          (*row)[i] = std::clamp((*row)[i], -30.0, 30.0);
        }
        BoundPoint cand_point;
        const double f = score(params, &cand_point);
        if (f > cur + 1e-15) {
          cur = f;
          res.visited.push_back({std::move(cand_point), params.to_channels()});
          break;
        }
        *row = std::move(saved);
      }
    }
    if (cur - cycle_start < kConvergenceTol) converged = true;
  }
  return res;
}

bool dominates(const RateTriple& a, const RateTriple& b) {
  const bool geq = a.r_s >= b.r_s - kDominanceTol &&
                   a.r_j <= b.r_j + kDominanceTol &&
                   a.r_l <= b.r_l + kDominanceTol;
  const bool strict = a.r_s > b.r_s + kDominanceTol ||
                      a.r_j < b.r_j - kDominanceTol ||
                      a.r_l < b.r_l - kDominanceTol;
  return geq && strict;
}

void pareto_insert(std::vector<ParetoEntry>& front, ParetoEntry entry) {
  for (const auto& e : front)
    if (dominates(e.point.triple, entry.point.triple)) return;
  front.erase(std::remove_if(front.begin(), front.end(),
                             [&](const ParetoEntry& e) {
                               return dominates(entry.point.triple,
                                                e.point.triple);
                             }),
              front.end());
  front.push_back(std::move(entry));
}

ChannelLogits init_for_restart(std::size_t r, std::size_t nxt,
                               std::size_t u_cap, std::size_t v_cap,
                               RngStream& rng) {
  if (r == 0) return constant_init(nxt, u_cap, v_cap);
  if (r <= 3) return diagonal_init(nxt, u_cap, v_cap);
  return random_init(nxt, u_cap, v_cap, rng);
}

SupportDirection direction_for_restart(std::size_t r, RngStream& rng) {
  if (r < 4) return kAnchors[r == 0 ? 0 : r - 1];
  return random_direction(rng);
}

}  // namespace

SearchCaps default_caps(const DiscreteCompoundModel& m) {
  const std::size_t nxt = m.enrollment().n_outputs();
  const std::size_t kl = m.n_decoder_states() + m.n_eve_states();
  SearchCaps caps;
  caps.v_cap = nxt + 2 * kl + 1;
  caps.u_cap = (nxt + 2 * kl + 1) * (nxt + kl + 1);
  return caps;
}

std::vector<ParetoEntry> search_inner_region(const DiscreteCompoundModel& m,
                                             RegionKind kind,
                                             std::size_t budget,
                                             SearchCaps caps,
                                             std::uint64_t seed,
                                             ExecMode mode) {
  if (budget < 1) throw invalid_input("search_inner_region: budget < 1");
  if (caps.u_cap == 0 || caps.v_cap == 0) {
    const SearchCaps d = default_caps(m);
    if (caps.u_cap == 0) caps.u_cap = d.u_cap;
    if (caps.v_cap == 0) caps.v_cap = d.v_cap;
  }
  const std::size_t nxt = m.enrollment().n_outputs();

  const std::size_t n_restarts = (budget + kRestartBudget - 1) / kRestartBudget;
  std::vector<AscentResult> results(n_restarts);
  parallel_for(n_restarts, mode, [&](std::size_t r) {
    RngStream rng(seed, stream_purpose::search_restart, r);
    const std::size_t slice = r + 1 == n_restarts
                                  ? budget - r * kRestartBudget
                                  : kRestartBudget;
    const ChannelLogits init =
        init_for_restart(r, nxt, caps.u_cap, caps.v_cap, rng);
    const SupportDirection dir = direction_for_restart(r, rng);
    results[r] = ascend(init, dir, slice, [&](const TestChannelPair& t) {
      return inner_point(m, t, kind);
    });
  });

  std::vector<ParetoEntry> front;
  for (auto& res : results)
    for (auto& e : res.visited) pareto_insert(front, std::move(e));
  std::sort(front.begin(), front.end(),
            [](const ParetoEntry& a, const ParetoEntry& b) {
              if (a.point.triple.r_s != b.point.triple.r_s)
                return a.point.triple.r_s > b.point.triple.r_s;
              if (a.point.triple.r_j != b.point.triple.r_j)
                return a.point.triple.r_j < b.point.triple.r_j;
              return a.point.triple.r_l < b.point.triple.r_l;
            });
  return front;
}

const std::vector<SupportDirection>& support_directions() {
  auto normalized = [](double s, double j, double l) {
    const double sum = s + j + l;
    return SupportDirection{s / sum, j / sum, l / sum};
  };
  static const std::vector<SupportDirection> dirs = {
      normalized(1, 0, 0), normalized(0, 1, 0), normalized(0, 0, 1),
      normalized(1, 1, 0), normalized(1, 0, 1), normalized(0, 1, 1),
      normalized(1, 1, 1), normalized(2, 1, 0), normalized(1, 2, 0),
      normalized(2, 0, 1), normalized(1, 0, 2), normalized(1, 2, 2),
      normalized(2, 1, 1)};
  return dirs;
}

namespace {

// One scalarized maximization: a few deterministic restarts plus optional
// warm starts, sharing one budget slice. Returns the best value found and
// appends every visited entry to the pool when requested.
double maximize_direction(
    const std::function<BoundPoint(const TestChannelPair&)>& eval,
    const SupportDirection& dir, std::size_t budget, std::size_t nxt,
    const SearchCaps& caps, std::uint64_t seed, std::uint64_t item,
    const std::vector<TestChannelPair>* warm,
    std::vector<ParetoEntry>* pool) {
  double best = -1e300;
  std::size_t left = budget;

  if (warm) {
    for (const auto& t : *warm) {
      if (left == 0) break;
      BoundPoint b = eval(t);
      --left;
      best = std::max(best, support_value(dir, b.triple));
      if (pool) pool->push_back({std::move(b), t});
    }
  }

  const std::size_t n_restarts = 4;
  for (std::size_t r = 0; r < n_restarts && left > 0; ++r) {
    RngStream rng(seed, stream_purpose::direction, item * 131 + r);
    const ChannelLogits init =
        init_for_restart(r, nxt, caps.u_cap, caps.v_cap, rng);
    const std::size_t slice =
        r + 1 == n_restarts ? left : std::min(left, budget / n_restarts + 1);
    AscentResult res = ascend(init, dir, slice, eval);
    left -= std::min(left, slice);
    for (auto& e : res.visited) {
      best = std::max(best, support_value(dir, e.point.triple));
      if (pool) pool->push_back(std::move(e));
    }
  }
  return best;
}

}  // namespace

SupportTable outer_intersection(const DiscreteCompoundModel& m,
                                RegionKind kind, std::size_t budget,
                                SearchCaps caps, std::uint64_t seed,
                                ExecMode mode,
                                const std::vector<ParetoEntry>* warm_starts) {
  if (budget < 1) throw invalid_input("outer_intersection: budget < 1");
  if (caps.u_cap == 0 || caps.v_cap == 0) {
    const SearchCaps d = default_caps(m);
    if (caps.u_cap == 0) caps.u_cap = d.u_cap;
    if (caps.v_cap == 0) caps.v_cap = d.v_cap;
  }
  const std::size_t nxt = m.enrollment().n_outputs();
  const auto& dirs = support_directions();
  const std::size_t K = m.n_decoder_states(), L = m.n_eve_states();
  const std::size_t n_items = dirs.size() * K * L;
  const std::size_t slice = std::max<std::size_t>(1, budget / n_items);

  std::vector<TestChannelPair> warm;
  if (warm_starts)
    for (const auto& e : *warm_starts) warm.push_back(e.channels);

  std::vector<double> values(n_items, 0.0);
  parallel_for(n_items, mode, [&](std::size_t item) {
    const std::size_t d = item / (K * L);
    const std::size_t k = (item % (K * L)) / L;
    const std::size_t l = item % L;
    values[item] = maximize_direction(
        [&](const TestChannelPair& t) {
          return outer_point(m, k, l, t, kind);
        },
        dirs[d], slice, nxt, caps, seed, item,
        warm.empty() ? nullptr : &warm, nullptr);
  });

  SupportTable table;
  table.directions = dirs;
  table.per_state.resize(dirs.size());
  table.value.resize(dirs.size());
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    table.per_state[d].resize(K * L);
    double mn = 1e300;
    for (std::size_t kl = 0; kl < K * L; ++kl) {
      table.per_state[d][kl] = values[d * K * L + kl];
      mn = std::min(mn, table.per_state[d][kl]);
    }
    table.value[d] = mn;
  }
  return table;
}

bool satisfies_outer_table(const SupportTable& table, const RateTriple& t,
                           double tol) {
  for (std::size_t d = 0; d < table.directions.size(); ++d)
    if (support_value(table.directions[d], t) > table.value[d] + tol)
      return false;
  return true;
}

GapReport single_state_gap(const DiscreteCompoundModel& m, RegionKind kind,
                         std::size_t budget, SearchCaps caps,
                         std::uint64_t seed, ExecMode mode) {
  if (m.n_decoder_states() != 1 || m.n_eve_states() != 1)
    throw invalid_input("single_state_gap: model must have K = L = 1");
  if (caps.u_cap == 0 || caps.v_cap == 0) {
    const SearchCaps d = default_caps(m);
    if (caps.u_cap == 0) caps.u_cap = d.u_cap;
    if (caps.v_cap == 0) caps.v_cap = d.v_cap;
  }
  const std::size_t nxt = m.enrollment().n_outputs();
  const auto& dirs = support_directions();
  const std::size_t slice = std::max<std::size_t>(1, budget / dirs.size());

  // Two independent searches over the identical test-channel class; their
  // support values coincide up to search noise. Candidate pools are shared
  // across directions within each side.
  auto run_side = [&](bool outer, std::uint64_t side_seed) {
    std::vector<std::vector<ParetoEntry>> pools(dirs.size());
    std::vector<double> vals(dirs.size(), -1e300);
    parallel_for(dirs.size(), mode, [&](std::size_t d) {
      vals[d] = maximize_direction(
          [&](const TestChannelPair& t) {
            return outer ? outer_point(m, 0, 0, t, kind)
                         : inner_point(m, t, kind);
          },
          dirs[d], slice, nxt, caps, side_seed, d, nullptr, &pools[d]);
    });
    // cross-evaluate every pooled candidate under every direction
    for (std::size_t d = 0; d < dirs.size(); ++d)
      for (const auto& pool : pools)
        for (const auto& e : pool)
          vals[d] = std::max(vals[d], support_value(dirs[d], e.point.triple));
    return vals;
  };

  GapReport rep;
  rep.directions = dirs;
  rep.inner_support = run_side(false, seed);
  rep.outer_support = run_side(true, seed ^ 0x9e3779b97f4a7c15ULL);
  rep.gap.resize(dirs.size());
  rep.max_gap = -1e300;
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    rep.gap[d] = rep.outer_support[d] - rep.inner_support[d];
    rep.max_gap = std::max(rep.max_gap, rep.gap[d]);
  }
  return rep;
}

}  // namespace pufkey
