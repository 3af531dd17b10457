#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "pufkey/common.hpp"

namespace pufkey {

enum class RegionKind { gs, cs };

struct RateTriple {
  double r_s = 0.0;  // secret-key rate, bits/symbol
  double r_j = 0.0;  // storage rate
  double r_l = 0.0;  // privacy-leakage rate
};

// Scalar Gaussian source observed through per-state AWGN gain vectors:
// K decoder states and L eavesdropper states, unit noise per antenna.
class CompoundGaussianModel {
 public:
  CompoundGaussianModel(double sigma_x2,
                        std::vector<std::vector<double>> decoder_gains,
                        std::vector<std::vector<double>> eve_gains);

  double sigma_x2() const { return sigma_x2_; }
  const std::vector<std::vector<double>>& decoder_gains() const {
    return decoder_gains_;
  }
  const std::vector<std::vector<double>>& eve_gains() const {
    return eve_gains_;
  }
  std::size_t n_decoder_states() const { return decoder_gains_.size(); }
  std::size_t n_eve_states() const { return eve_gains_.size(); }

 private:
  double sigma_x2_;
  std::vector<std::vector<double>> decoder_gains_;
  std::vector<std::vector<double>> eve_gains_;
};

// squared norm h'h of a gain vector
double power_gain(const std::vector<double>& h);

// (k*, l*): worst decoder state (min power gain), best eve state (max power
// gain); ties broken toward the lowest index
std::pair<std::size_t, std::size_t> saddle_indices(
    const CompoundGaussianModel& m);

// worst decoder power gain >= best eve power gain; when false the only
// achievable key rate is r_s = 0
bool degradedness_check(const CompoundGaussianModel& m);

// Boundary rate triples of the capacity regions at tuning parameter
// alpha in (0,1]. Degraded models only.
RateTriple gs_rate_point(const CompoundGaussianModel& m, double alpha);
RateTriple cs_rate_point(const CompoundGaussianModel& m, double alpha);

// invert the GS storage-rate constraint for alpha
double alpha_from_storage(const CompoundGaussianModel& m, double r_j);

// optimal secret-key rate at a given storage budget (GS model)
double key_rate_vs_storage(const CompoundGaussianModel& m, double r_j);

// supremum of the key rate as storage grows unbounded
double asymptotic_key_rate(const CompoundGaussianModel& m);

// whether the triple lies in the region (monotone bisection on alpha,
// tolerance 1e-9)
bool membership(const CompoundGaussianModel& m, const RateTriple& t,
                RegionKind kind);

struct AlphaCurve {
  RegionKind kind;
  std::vector<std::pair<double, RateTriple>> samples;  // alpha ascending to 1
};

// boundary sampled on a log-spaced alpha grid over [1e-6, 1]
AlphaCurve trace_curve(const CompoundGaussianModel& m, RegionKind kind,
                       std::size_t n_points);

// Symmetric covariance of (X, Y-blocks..., Z-blocks...) in that order:
// first the K decoder blocks of size omega_y each, then the L eve blocks
// of size omega_z.
struct FullCovariance {
  std::size_t dim = 0;
  std::vector<double> data;  // row-major dim*dim

  double at(std::size_t r, std::size_t c) const { return data[r * dim + c]; }
};

struct CovBlocks {
  std::size_t omega_y = 0;
  std::size_t n_decoder = 0;
  std::size_t omega_z = 0;
  std::size_t n_eve = 0;
};

// Whiten each state's noise by its Cholesky factor, producing the
// unit-noise gain-vector model. Requires a positive definite covariance.
CompoundGaussianModel normalize_covariance(const FullCovariance& c,
                                           const CovBlocks& blocks);

struct ScalarGains {
  std::vector<double> nu_y;
  std::vector<double> nu_z;
};

// per-state power gains of the sufficient-statistic scalar channels
ScalarGains scalarize(const CompoundGaussianModel& m);

// (lhs, rhs) of det(h a h' + I) == a h'h + 1; lhs by explicit determinant,
// rhs by the scalar formula
std::pair<double, double> wa_identity_check(double a,
                                            const std::vector<double>& h);

// GS and CS boundary triples of the one-antenna, single-state model in the
// correlation-coefficient form
std::pair<RateTriple, RateTriple> single_antenna_region(double sigma_x2,
                                                        double h,
                                                        double h_tilde,
                                                        double alpha);

}  // namespace pufkey
