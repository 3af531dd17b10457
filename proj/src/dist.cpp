#include "pufkey/dist.hpp"

#include <cmath>

namespace pufkey {

namespace {
void check_prob_vector(const std::vector<double>& p, const char* what) {
  if (p.empty()) throw invalid_input(std::string(what) + ": empty alphabet");
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0))
      throw invalid_input(std::string(what) + ": negative or NaN mass");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kProbSumTol)
    throw invalid_input(std::string(what) + ": masses sum to " +
                        std::to_string(sum) + ", expected 1");
}
}  // namespace

FiniteDist::FiniteDist(std::vector<double> probs) : probs_(std::move(probs)) {
  check_prob_vector(probs_, "FiniteDist");
}

FiniteDist FiniteDist::uniform(std::size_t n) {
  return FiniteDist(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

FiniteDist FiniteDist::point_mass(std::size_t n, std::size_t at) {
  std::vector<double> p(n, 0.0);
  p.at(at) = 1.0;
  return FiniteDist(std::move(p));
}

CondDist::CondDist(std::vector<std::vector<double>> rows)
    : rows_(std::move(rows)) {
  if (rows_.empty()) throw invalid_input("CondDist: no rows");
  const std::size_t width = rows_[0].size();
  for (const auto& r : rows_) {
    if (r.size() != width) throw invalid_input("CondDist: ragged rows");
    check_prob_vector(r, "CondDist row");
  }
}

FiniteDist CondDist::push(const FiniteDist& input) const {
  if (input.size() != n_inputs())
    throw invalid_input("CondDist::push: input alphabet mismatch");
  std::vector<double> out(n_outputs(), 0.0);
  for (std::size_t i = 0; i < n_inputs(); ++i)
    for (std::size_t o = 0; o < n_outputs(); ++o)
      out[o] += input[i] * rows_[i][o];
  return FiniteDist(std::move(out));
}

CondDist CondDist::identity(std::size_t n) {
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) rows[i][i] = 1.0;
  return CondDist(std::move(rows));
}

CondDist CondDist::constant(std::size_t n_in, std::size_t n_out) {
  std::vector<std::vector<double>> rows(n_in, std::vector<double>(n_out, 0.0));
  for (auto& r : rows) r[0] = 1.0;
  return CondDist(std::move(rows));
}

CondDist CondDist::bsc(double crossover) {
  if (!(crossover >= 0.0 && crossover <= 1.0))
    throw invalid_input("bsc: crossover outside [0,1]");
  return CondDist({{1.0 - crossover, crossover}, {crossover, 1.0 - crossover}});
}

CondDist CondDist::product(const CondDist& y_given_x, const CondDist& z_given_x) {
  if (y_given_x.n_inputs() != z_given_x.n_inputs())
    throw invalid_input("CondDist::product: input alphabets differ");
  const std::size_t ny = y_given_x.n_outputs(), nz = z_given_x.n_outputs();
  std::vector<std::vector<double>> rows(y_given_x.n_inputs(),
                                        std::vector<double>(ny * nz, 0.0));
  for (std::size_t x = 0; x < y_given_x.n_inputs(); ++x)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t z = 0; z < nz; ++z)
        rows[x][y * nz + z] = y_given_x.at(x, y) * z_given_x.at(x, z);
  return CondDist(std::move(rows));
}

}  // namespace pufkey
