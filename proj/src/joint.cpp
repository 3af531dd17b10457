#include "pufkey/joint.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace pufkey {

namespace {

double neg_sum_plogp(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

double clamp_mi(double v) {
  if (v < 0.0 && v > -kMiClampTol) return 0.0;
  if (v > 0.0 && v < 1e-14) return 0.0;  // cancellation dust on exact zeros
  return v;
}

}  // namespace

JointDist::JointDist(std::vector<std::string> axes,
                     std::vector<std::size_t> dims, std::vector<double> table)
    : axes_(std::move(axes)), dims_(std::move(dims)), table_(std::move(table)) {
  if (axes_.size() != dims_.size())
    throw invalid_input("JointDist: axes/dims size mismatch");
  std::unordered_set<std::string> seen;
  for (const auto& a : axes_)
    if (!seen.insert(a).second)
      throw invalid_input("JointDist: duplicate axis name '" + a + "'");
  std::uint64_t cells = 1;
  for (std::size_t d : dims_) {
    if (d == 0) throw invalid_input("JointDist: zero-sized axis");
    if (cells > kMaxJointCells / d)
      throw resource_limit("JointDist: table too large", cells * d,
                           kMaxJointCells);
    cells *= d;
  }
  if (table_.size() != cells)
    throw invalid_input("JointDist: table size does not match dims");
  double sum = 0.0;
  for (double v : table_) {
    if (!(v >= 0.0)) throw invalid_input("JointDist: negative or NaN mass");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kProbSumTol)
    throw invalid_input("JointDist: masses sum to " + std::to_string(sum));
}

std::size_t JointDist::axis_index(const std::string& name) const {
  for (std::size_t i = 0; i < axes_.size(); ++i)
    if (axes_[i] == name) return i;
  throw invalid_input("JointDist: unknown axis '" + name + "'");
}

double JointDist::total() const {
  double s = 0.0;
  for (double v : table_) s += v;
  return s;
}

std::vector<double> JointDist::marginal_table(
    const std::vector<bool>& keep, std::vector<std::size_t>& out_dims) const {
  out_dims.clear();
  std::size_t out_cells = 1;
  for (std::size_t i = 0; i < dims_.size(); ++i)
    if (keep[i]) {
      out_dims.push_back(dims_[i]);
      out_cells *= dims_[i];
    }
  std::vector<double> out(out_cells, 0.0);
  // walk cells with a mixed-radix counter, projecting onto kept axes
  std::vector<std::size_t> idx(dims_.size(), 0);
  for (std::size_t flat = 0; flat < table_.size(); ++flat) {
    std::size_t o = 0;
    for (std::size_t i = 0; i < dims_.size(); ++i)
      if (keep[i]) o = o * dims_[i] + idx[i];
    out[o] += table_[flat];
    for (std::size_t i = dims_.size(); i-- > 0;) {
      if (++idx[i] < dims_[i]) break;
      idx[i] = 0;
    }
  }
  return out;
}

JointDist JointDist::marginal(const std::vector<std::string>& keep) const {
  std::vector<bool> mask(dims_.size(), false);
  for (const auto& a : keep) mask[axis_index(a)] = true;
  std::vector<std::size_t> out_dims;
  std::vector<double> out = marginal_table(mask, out_dims);
  std::vector<std::string> out_axes;
  for (std::size_t i = 0; i < axes_.size(); ++i)
    if (mask[i]) out_axes.push_back(axes_[i]);
  return JointDist(std::move(out_axes), std::move(out_dims), std::move(out));
}

double JointDist::entropy_of(const std::vector<std::string>& axes) const {
  std::vector<bool> mask(dims_.size(), false);
  for (const auto& a : axes) mask[axis_index(a)] = true;
  std::vector<std::size_t> out_dims;
  return neg_sum_plogp(marginal_table(mask, out_dims));
}

double entropy(const FiniteDist& d) { return neg_sum_plogp(d.probs()); }

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw invalid_input("binary_entropy: p outside [0,1]");
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

namespace {
std::vector<std::string> axes_union(const std::vector<std::string>& a,
                                    const std::vector<std::string>& b,
                                    const std::vector<std::string>& c = {}) {
  std::vector<std::string> u = a;
  u.insert(u.end(), b.begin(), b.end());
  u.insert(u.end(), c.begin(), c.end());
  return u;
}

void check_disjoint(const std::vector<std::string>& a,
                    const std::vector<std::string>& b) {
  for (const auto& x : a)
    if (std::find(b.begin(), b.end(), x) != b.end())
      throw invalid_input("axis sets overlap on '" + x + "'");
}
}  // namespace

double mutual_information(const JointDist& j,
                          const std::vector<std::string>& axes_a,
                          const std::vector<std::string>& axes_b) {
  check_disjoint(axes_a, axes_b);
  const double v = j.entropy_of(axes_a) + j.entropy_of(axes_b) -
                   j.entropy_of(axes_union(axes_a, axes_b));
  return clamp_mi(v);
}

double conditional_mutual_information(const JointDist& j,
                                      const std::vector<std::string>& axes_a,
                                      const std::vector<std::string>& axes_b,
                                      const std::vector<std::string>& axes_c) {
  check_disjoint(axes_a, axes_b);
  check_disjoint(axes_a, axes_c);
  check_disjoint(axes_b, axes_c);
  const double v = j.entropy_of(axes_union(axes_a, axes_c)) +
                   j.entropy_of(axes_union(axes_b, axes_c)) -
                   j.entropy_of(axes_union(axes_a, axes_b, axes_c)) -
                   j.entropy_of(axes_c);
  return clamp_mi(v);
}

JointDist compose_chain(const FiniteDist& p_x, const CondDist& xt_given_x,
                        const CondDist& u_given_xt, const CondDist& v_given_u,
                        const CondDist& yz_given_x, std::size_t n_y,
                        std::size_t n_z) {
  const std::size_t nx = p_x.size();
  if (xt_given_x.n_inputs() != nx)
    throw invalid_input("compose_chain: enrollment channel input != |X|");
  const std::size_t nxt = xt_given_x.n_outputs();
  if (u_given_xt.n_inputs() != nxt)
    throw invalid_input("compose_chain: P(U|Xt) input != |Xt|");
  const std::size_t nu = u_given_xt.n_outputs();
  if (v_given_u.n_inputs() != nu)
    throw invalid_input("compose_chain: P(V|U) input != |U|");
  const std::size_t nv = v_given_u.n_outputs();
  if (yz_given_x.n_inputs() != nx)
    throw invalid_input("compose_chain: P(YZ|X) input != |X|");
  if (yz_given_x.n_outputs() != n_y * n_z)
    throw invalid_input("compose_chain: P(YZ|X) output != n_y*n_z");

  std::uint64_t cells = 1;
  for (std::uint64_t d : {nv, nu, nxt, nx, n_y, n_z}) {
    if (cells > kMaxJointCells / d)
      throw resource_limit("compose_chain: joint too large", cells * d,
                           kMaxJointCells);
    cells *= d;
  }

  std::vector<double> t(cells, 0.0);
  std::size_t flat = 0;
  for (std::size_t v = 0; v < nv; ++v)
    for (std::size_t u = 0; u < nu; ++u)
      for (std::size_t xt = 0; xt < nxt; ++xt)
        for (std::size_t x = 0; x < nx; ++x) {
          const double base = v_given_u.at(u, v) * u_given_xt.at(xt, u) *
                              xt_given_x.at(x, xt) * p_x[x];
          for (std::size_t yz = 0; yz < n_y * n_z; ++yz)
            t[flat++] = base * yz_given_x.at(x, yz);
        }
  return JointDist({"V", "U", "Xt", "X", "Y", "Z"},
                   {nv, nu, nxt, nx, n_y, n_z}, std::move(t));
}

double gaussian_scalar_mi(double sigma_x2, double nu) {
  if (!(sigma_x2 >= 0.0)) throw invalid_input("gaussian_scalar_mi: sigma_x2 < 0");
  if (!(nu >= 0.0)) throw invalid_input("gaussian_scalar_mi: nu < 0");
  return 0.5 * std::log2(sigma_x2 * nu + 1.0);
}

}  // namespace pufkey
