#pragma once

#include <cstddef>
#include <vector>

#include "pufkey/common.hpp"

namespace pufkey {

inline constexpr double kProbSumTol = 1e-12;

// Probability vector over a finite alphabet. Entries must be non-negative
// and sum to 1 within kProbSumTol.
class FiniteDist {
 public:
  explicit FiniteDist(std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }

  static FiniteDist uniform(std::size_t n);
  static FiniteDist point_mass(std::size_t n, std::size_t at);

 private:
  std::vector<double> probs_;
};

// Row-stochastic matrix: rows_[in][out] = P(out | in).
class CondDist {
 public:
  explicit CondDist(std::vector<std::vector<double>> rows);

  std::size_t n_inputs() const { return rows_.size(); }
  std::size_t n_outputs() const { return rows_.empty() ? 0 : rows_[0].size(); }
  double at(std::size_t in, std::size_t out) const { return rows_[in][out]; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  FiniteDist row(std::size_t in) const { return FiniteDist(rows_[in]); }

  // output marginal under an input distribution
  FiniteDist push(const FiniteDist& input) const;

  static CondDist identity(std::size_t n);
  // every input maps to output 0 of an alphabet of size n_out
  static CondDist constant(std::size_t n_in, std::size_t n_out);
  static CondDist bsc(double crossover);
  // P(y,z | x) = P(y|x) P(z|x) on a flattened y*z alphabet, z fastest
  static CondDist product(const CondDist& y_given_x, const CondDist& z_given_x);

 private:
  std::vector<std::vector<double>> rows_;
};

}  // namespace pufkey
