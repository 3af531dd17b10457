#include "pufkey/discrete.hpp"

#include <algorithm>
#include <cmath>

namespace pufkey {

namespace {

const std::vector<std::string> kAxV{"V"}, kAxU{"U"}, kAxXt{"Xt"}, kAxX{"X"},
    kAxW{"W"}, kAxVW{"V", "W"};

JointDist base_joint(const DiscreteCompoundModel& m, const TestChannelPair& t) {
  const std::size_t nx = m.p_x().size();
  const std::size_t nxt = m.enrollment().n_outputs();
  if (t.u_given_xt.n_inputs() != nxt)
    throw invalid_input("inner/outer point: P(U|Xt) input != |Xt|");
  const std::size_t nu = t.u_given_xt.n_outputs();
  if (t.v_given_u.n_inputs() != nu)
    throw invalid_input("inner/outer point: P(V|U) input != |U|");
  const std::size_t nv = t.v_given_u.n_outputs();

  std::vector<double> tab(nv * nu * nxt * nx, 0.0);
  std::size_t flat = 0;
  for (std::size_t v = 0; v < nv; ++v)
    for (std::size_t u = 0; u < nu; ++u)
      for (std::size_t xt = 0; xt < nxt; ++xt)
        for (std::size_t x = 0; x < nx; ++x)
          tab[flat++] = t.v_given_u.at(u, v) * t.u_given_xt.at(xt, u) *
                        m.enrollment().at(x, xt) * m.p_x()[x];
  return JointDist({"V", "U", "Xt", "X"}, {nv, nu, nxt, nx}, std::move(tab));
}

// append one channel output axis W fed from X
JointDist extend_with_state(const JointDist& j4, const CondDist& w_given_x) {
  const auto& d = j4.dims();
  const std::size_t nw = w_given_x.n_outputs();
  const std::size_t x_stride = d[3];
  std::vector<double> tab(j4.table().size() * nw);
  std::size_t flat = 0;
  for (std::size_t cell = 0; cell < j4.table().size(); ++cell) {
    const std::size_t x = cell % x_stride;
    const double base = j4.table()[cell];
    for (std::size_t w = 0; w < nw; ++w)
      tab[flat++] = base * w_given_x.at(x, w);
  }
  return JointDist({"V", "U", "Xt", "X", "W"}, {d[0], d[1], d[2], d[3], nw},
                   std::move(tab));
}

double clamp0(double v) { return v < 1e-12 ? 0.0 : v; }

}  // namespace

DiscreteCompoundModel::DiscreteCompoundModel(FiniteDist p_x, CondDist enrollment,
                                             std::vector<CondDist> decoder_states,
                                             std::vector<CondDist> eve_states)
    : p_x_(std::move(p_x)),
      enrollment_(std::move(enrollment)),
      decoder_states_(std::move(decoder_states)),
      eve_states_(std::move(eve_states)) {
  if (enrollment_.n_inputs() != p_x_.size())
    throw invalid_input("DiscreteCompoundModel: enrollment input != |X|");
  if (decoder_states_.empty() || eve_states_.empty())
    throw invalid_input("DiscreteCompoundModel: need at least one state each");
  for (const auto& c : decoder_states_)
    if (c.n_inputs() != p_x_.size())
      throw invalid_input("DiscreteCompoundModel: decoder state input != |X|");
  for (const auto& c : eve_states_)
    if (c.n_inputs() != p_x_.size())
      throw invalid_input("DiscreteCompoundModel: eve state input != |X|");
}

BoundPoint inner_point(const DiscreteCompoundModel& m,
                       const TestChannelPair& t, RegionKind kind) {
  const JointDist j4 = base_joint(m, t);

  double min_iyu_v = 0, max_ixtu_vy = 0, max_ixtv_y = 0, min_iyv = 0;
  for (std::size_t k = 0; k < m.n_decoder_states(); ++k) {
    const JointDist j5 = extend_with_state(j4, m.decoder_states()[k]);
    const double iyu_v = conditional_mutual_information(j5, kAxW, kAxU, kAxV);
    const double ixtu_vy =
        conditional_mutual_information(j5, kAxXt, kAxU, kAxVW);
    const double ixtv_y = conditional_mutual_information(j5, kAxXt, kAxV, kAxW);
    const double iyv = mutual_information(j5, kAxW, kAxV);
    if (k == 0 || iyu_v < min_iyu_v) min_iyu_v = iyu_v;
    if (k == 0 || ixtu_vy > max_ixtu_vy) max_ixtu_vy = ixtu_vy;
    if (k == 0 || ixtv_y > max_ixtv_y) max_ixtv_y = ixtv_y;
    if (k == 0 || iyv < min_iyv) min_iyv = iyv;
  }
  double max_izu_v = 0, min_izv = 0;
  for (std::size_t l = 0; l < m.n_eve_states(); ++l) {
    const JointDist j5 = extend_with_state(j4, m.eve_states()[l]);
    const double izu_v = conditional_mutual_information(j5, kAxW, kAxU, kAxV);
    const double izv = mutual_information(j5, kAxW, kAxV);
    if (l == 0 || izu_v > max_izu_v) max_izu_v = izu_v;
    if (l == 0 || izv < min_izv) min_izv = izv;
  }
  const double ixtu_x = conditional_mutual_information(j4, kAxXt, kAxU, kAxX);

  BoundPoint p;
  p.terms = {{"miYU_V_min", min_iyu_v},   {"miZU_V_max", max_izu_v},
             {"miXtU_VY_max", max_ixtu_vy}, {"miXtV_Y_max", max_ixtv_y},
             {"miXtU_X", ixtu_x},         {"miYV_min", min_iyv},
             {"miZV_min", min_izv}};
  p.triple = reconstruct_triple(p, kind, /*outer=*/false);
  return p;
}

BoundPoint outer_point(const DiscreteCompoundModel& m, std::size_t k,
                       std::size_t l, const TestChannelPair& t,
                       RegionKind kind) {
  if (k >= m.n_decoder_states())
    throw invalid_input("outer_point: decoder state index out of range");
  if (l >= m.n_eve_states())
    throw invalid_input("outer_point: eve state index out of range");
  const JointDist j4 = base_joint(m, t);
  const JointDist jy = extend_with_state(j4, m.decoder_states()[k]);
  const JointDist jz = extend_with_state(j4, m.eve_states()[l]);

  BoundPoint p;
  p.terms = {
      {"miYU_V", conditional_mutual_information(jy, kAxW, kAxU, kAxV)},
      {"miZU_V", conditional_mutual_information(jz, kAxW, kAxU, kAxV)},
      {"miXtU_Y", conditional_mutual_information(jy, kAxXt, kAxU, kAxW)},
      {"miXU_Y", conditional_mutual_information(jy, kAxX, kAxU, kAxW)},
      {"miYV", mutual_information(jy, kAxW, kAxV)},
      {"miZV", mutual_information(jz, kAxW, kAxV)}};
  p.triple = reconstruct_triple(p, kind, /*outer=*/true);
  return p;
}

RateTriple reconstruct_triple(const BoundPoint& p, RegionKind kind,
                              bool outer) {
  const auto& t = p.terms;
  RateTriple r;
  if (!outer) {
    const double rs =
        clamp0(t.at("miYU_V_min") - t.at("miZU_V_max"));
    const double rj = t.at("miXtU_VY_max") + t.at("miXtV_Y_max");
    r.r_s = rs;
    r.r_j = kind == RegionKind::cs ? rj + rs : rj;
    r.r_l = clamp0(rj - t.at("miXtU_X") + t.at("miYV_min") - t.at("miZV_min"));
  } else {
    const double rs = clamp0(t.at("miYU_V") - t.at("miZU_V"));
    r.r_s = rs;
    r.r_j = kind == RegionKind::cs ? t.at("miXtU_Y") + rs : t.at("miXtU_Y");
    r.r_l = clamp0(t.at("miXU_Y") + t.at("miYV") - t.at("miZV"));
  }
  return r;
}

}  // namespace pufkey
