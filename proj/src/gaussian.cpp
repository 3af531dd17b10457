#include "pufkey/gaussian.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>

namespace pufkey {

namespace {

// rate expressions share these: a = sigma_x2 * nu_y*, b = sigma_x2 * nu_z*
struct SaddleGains {
  double a;  // sigma_x2 * worst decoder power gain
  double b;  // sigma_x2 * best eve power gain
};

SaddleGains saddle_gains(const CompoundGaussianModel& m) {
  auto [k, l] = saddle_indices(m);
  return {m.sigma_x2() * power_gain(m.decoder_gains()[k]),
          m.sigma_x2() * power_gain(m.eve_gains()[l])};
}

void require_degraded(const CompoundGaussianModel& m) {
  if (!degradedness_check(m))
    throw invalid_input(
        "model is not degraded (worst decoder gain < best eve gain); "
        "only r_s = 0 is achievable");
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw invalid_input("alpha outside (0,1]");
}

double key_rate_at(double a, double b, double alpha) {
  return 0.5 * std::log2(((a + 1.0) * (alpha * b + 1.0)) /
                         ((alpha * a + 1.0) * (b + 1.0)));
}

// shared by the GS storage constraint and the privacy constraint of both
// models; the CS storage constraint is the same expression in b
double storage_rate_at(double g, double alpha) {
  return 0.5 * std::log2((alpha * g + 1.0) / (alpha * (g + 1.0)));
}

}  // namespace

CompoundGaussianModel::CompoundGaussianModel(
    double sigma_x2, std::vector<std::vector<double>> decoder_gains,
    std::vector<std::vector<double>> eve_gains)
    : sigma_x2_(sigma_x2),
      decoder_gains_(std::move(decoder_gains)),
      eve_gains_(std::move(eve_gains)) {
  if (!(sigma_x2_ > 0.0))
    throw invalid_input("CompoundGaussianModel: sigma_x2 must be positive");
  if (decoder_gains_.empty() || eve_gains_.empty())
    throw invalid_input("CompoundGaussianModel: need at least one state each");
  // states may differ in antenna count; the rate formulas depend on the
  // power gains only
  for (const auto* set : {&decoder_gains_, &eve_gains_})
    for (const auto& h : *set)
      if (h.empty())
        throw invalid_input("CompoundGaussianModel: empty gain vector");
}

double power_gain(const std::vector<double>& h) {
  if (h.empty()) throw invalid_input("power_gain: empty vector");
  double s = 0.0;
  for (double v : h) s += v * v;
  return s;
}

std::pair<std::size_t, std::size_t> saddle_indices(
    const CompoundGaussianModel& m) {
  std::size_t k_star = 0, l_star = 0;
  double best_k = power_gain(m.decoder_gains()[0]);
  for (std::size_t k = 1; k < m.n_decoder_states(); ++k) {
    const double g = power_gain(m.decoder_gains()[k]);
    if (g < best_k) {
      best_k = g;
      k_star = k;
    }
  }
  double best_l = power_gain(m.eve_gains()[0]);
  for (std::size_t l = 1; l < m.n_eve_states(); ++l) {
    const double g = power_gain(m.eve_gains()[l]);
    if (g > best_l) {
      best_l = g;
      l_star = l;
    }
  }
  return {k_star, l_star};
}

bool degradedness_check(const CompoundGaussianModel& m) {
  auto [k, l] = saddle_indices(m);
  return power_gain(m.decoder_gains()[k]) >= power_gain(m.eve_gains()[l]);
}

RateTriple gs_rate_point(const CompoundGaussianModel& m, double alpha) {
  require_alpha(alpha);
  require_degraded(m);
  if (alpha == 1.0) return {0.0, 0.0, 0.0};
  const auto [a, b] = saddle_gains(m);
  const double rj = storage_rate_at(a, alpha);
  return {std::max(0.0, key_rate_at(a, b, alpha)), rj, rj};
}

RateTriple cs_rate_point(const CompoundGaussianModel& m, double alpha) {
  require_alpha(alpha);
  require_degraded(m);
  if (alpha == 1.0) return {0.0, 0.0, 0.0};
  const auto [a, b] = saddle_gains(m);
  return {std::max(0.0, key_rate_at(a, b, alpha)), storage_rate_at(b, alpha),
          storage_rate_at(a, alpha)};
}

double alpha_from_storage(const CompoundGaussianModel& m, double r_j) {
  if (!(r_j >= 0.0)) throw invalid_input("alpha_from_storage: r_j < 0");
  require_degraded(m);
  const auto [a, b] = saddle_gains(m);
  (void)b;
  const double two_pow = std::exp2(2.0 * r_j);
  return 1.0 / (two_pow + (two_pow - 1.0) * a);
}

double key_rate_vs_storage(const CompoundGaussianModel& m, double r_j) {
  if (!(r_j >= 0.0)) throw invalid_input("key_rate_vs_storage: r_j < 0");
  require_degraded(m);
  const auto [a, b] = saddle_gains(m);
  const double att = std::exp2(-2.0 * r_j);
  return 0.5 * std::log2((a * (1.0 - att) + b * att + 1.0) / (b + 1.0));
}

double asymptotic_key_rate(const CompoundGaussianModel& m) {
  require_degraded(m);
  const auto [a, b] = saddle_gains(m);
  return 0.5 * std::log2((a + 1.0) / (b + 1.0));
}

bool membership(const CompoundGaussianModel& m, const RateTriple& t,
                RegionKind kind) {
  if (t.r_s < 0.0 || t.r_j < 0.0 || t.r_l < 0.0) return false;
  constexpr double tol = 1e-9;
  if (!degradedness_check(m)) return t.r_s <= tol;

  // All three rates are nonincreasing in alpha; the storage and leakage
  // constraints hold for alpha above a threshold, and the key rate is
  // maximal at that threshold. Bisect for the smallest feasible alpha.
  auto feasible = [&](double alpha) {
    const RateTriple p = kind == RegionKind::gs ? gs_rate_point(m, alpha)
                                                : cs_rate_point(m, alpha);
    return p.r_j <= t.r_j + tol && p.r_l <= t.r_l + tol;
  };
  if (!feasible(1.0)) return false;  // cannot happen for valid triples
  double lo = 1e-300, hi = 1.0;
  if (feasible(lo)) {
    hi = lo;
  } else {
    // bisect in log(alpha) until the bracket is tight
    for (int it = 0; it < 400 && hi - lo > tol * hi; ++it) {
      const double mid = std::sqrt(lo * hi);
      if (feasible(mid))
        hi = mid;
      else
        lo = mid;
    }
  }
  const RateTriple p = kind == RegionKind::gs ? gs_rate_point(m, hi)
                                              : cs_rate_point(m, hi);
  return t.r_s <= p.r_s + tol;
}

AlphaCurve trace_curve(const CompoundGaussianModel& m, RegionKind kind,
                       std::size_t n_points) {
  if (n_points < 2) throw invalid_input("trace_curve: n_points < 2");
  require_degraded(m);
  AlphaCurve curve;
  curve.kind = kind;
  curve.samples.reserve(n_points);
  const double lg_min = -6.0;
  for (std::size_t i = 0; i < n_points; ++i) {
    double alpha =
        i + 1 == n_points
            ? 1.0
            : std::pow(10.0, lg_min * (1.0 - static_cast<double>(i) /
                                                 (n_points - 1)));
    const RateTriple p = kind == RegionKind::gs ? gs_rate_point(m, alpha)
                                                : cs_rate_point(m, alpha);
    curve.samples.emplace_back(alpha, p);
  }
  return curve;
}

CompoundGaussianModel normalize_covariance(const FullCovariance& c,
                                           const CovBlocks& blocks) {
  const std::size_t dim =
      1 + blocks.n_decoder * blocks.omega_y + blocks.n_eve * blocks.omega_z;
  if (c.dim != dim || c.data.size() != dim * dim)
    throw invalid_input("normalize_covariance: covariance size inconsistent "
                        "with block structure");
  Eigen::MatrixXd sigma(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t s = 0; s < dim; ++s) sigma(r, s) = c.at(r, s);
  if (!sigma.isApprox(sigma.transpose(), 1e-10))
    throw invalid_input("normalize_covariance: covariance not symmetric");
  if (Eigen::LLT<Eigen::MatrixXd>(sigma).info() != Eigen::Success)
    throw invalid_input("normalize_covariance: covariance not positive "
                        "definite");
  const double sigma_x2 = sigma(0, 0);

  auto whiten_block = [&](std::size_t offset, std::size_t omega) {
    const Eigen::VectorXd cross = sigma.block(offset, 0, omega, 1);
    const Eigen::MatrixXd block = sigma.block(offset, offset, omega, omega);
    const Eigen::MatrixXd noise =
        block - cross * cross.transpose() / sigma_x2;
    Eigen::LLT<Eigen::MatrixXd> llt(noise);
    if (llt.info() != Eigen::Success)
      throw invalid_input("normalize_covariance: state noise covariance not "
                          "positive definite");
    // gain = C^{-1} * cross / sigma_x2 with C the Cholesky factor
    const Eigen::VectorXd gain =
        llt.matrixL().solve(cross / sigma_x2);
    return std::vector<double>(gain.data(), gain.data() + gain.size());
  };

  std::vector<std::vector<double>> dec, eve;
  std::size_t offset = 1;
  for (std::size_t k = 0; k < blocks.n_decoder; ++k, offset += blocks.omega_y)
    dec.push_back(whiten_block(offset, blocks.omega_y));
  for (std::size_t l = 0; l < blocks.n_eve; ++l, offset += blocks.omega_z)
    eve.push_back(whiten_block(offset, blocks.omega_z));
  return CompoundGaussianModel(sigma_x2, std::move(dec), std::move(eve));
}

ScalarGains scalarize(const CompoundGaussianModel& m) {
  ScalarGains g;
  for (const auto& h : m.decoder_gains()) g.nu_y.push_back(power_gain(h));
  for (const auto& h : m.eve_gains()) g.nu_z.push_back(power_gain(h));
  return g;
}

std::pair<double, double> wa_identity_check(double a,
                                            const std::vector<double>& h) {
  if (!(a >= 0.0)) throw invalid_input("wa_identity_check: a < 0");
  const Eigen::Map<const Eigen::VectorXd> hv(h.data(),
                                             static_cast<Eigen::Index>(h.size()));
  const Eigen::MatrixXd mat =
      hv * a * hv.transpose() +
      Eigen::MatrixXd::Identity(hv.size(), hv.size());
  return {mat.determinant(), a * hv.squaredNorm() + 1.0};
}

std::pair<RateTriple, RateTriple> single_antenna_region(double sigma_x2,
                                                        double h,
                                                        double h_tilde,
                                                        double alpha) {
  require_alpha(alpha);
  if (!(sigma_x2 > 0.0))
    throw invalid_input("single_antenna_region: sigma_x2 must be positive");
  if (alpha == 1.0) return {RateTriple{}, RateTriple{}};
  const double rho_y = sigma_x2 * h * h / (sigma_x2 * h * h + 1.0);
  const double rho_z =
      sigma_x2 * h_tilde * h_tilde / (sigma_x2 * h_tilde * h_tilde + 1.0);
  const double r_s = std::max(
      0.0, 0.5 * std::log2((alpha * rho_z + 1.0 - rho_z) /
                           (alpha * rho_y + 1.0 - rho_y)));
  const double rj_gs = 0.5 * std::log2((alpha * rho_y + 1.0 - rho_y) / alpha);
  const double rj_cs = 0.5 * std::log2((alpha * rho_z + 1.0 - rho_z) / alpha);
  return {RateTriple{r_s, rj_gs, rj_gs}, RateTriple{r_s, rj_cs, rj_gs}};
}

}  // namespace pufkey
