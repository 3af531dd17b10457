#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pufkey/dist.hpp"

namespace pufkey {

// Dense joints only; anything bigger than this must fail loudly.
inline constexpr std::uint64_t kMaxJointCells = 100'000'000ULL;

// MI values in [-kMiClampTol, 0) are float noise and clamp to 0.
inline constexpr double kMiClampTol = 1e-10;

// Dense probability table over named variable axes. Row-major storage,
// last axis fastest.
class JointDist {
 public:
  JointDist(std::vector<std::string> axes, std::vector<std::size_t> dims,
            std::vector<double> table);

  const std::vector<std::string>& axes() const { return axes_; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  const std::vector<double>& table() const { return table_; }
  std::size_t axis_index(const std::string& name) const;

  // marginal over the named axes (kept in this joint's axis order)
  JointDist marginal(const std::vector<std::string>& keep) const;

  // entropy in bits of the marginal over the named axes
  double entropy_of(const std::vector<std::string>& axes) const;

  double total() const;

 private:
  std::vector<double> marginal_table(const std::vector<bool>& keep,
                                     std::vector<std::size_t>& out_dims) const;

  std::vector<std::string> axes_;
  std::vector<std::size_t> dims_;
  std::vector<double> table_;
};

double entropy(const FiniteDist& d);
double binary_entropy(double p);

// I(A;B) = H(A) + H(B) - H(A,B), clamped at 0 within kMiClampTol
double mutual_information(const JointDist& j,
                          const std::vector<std::string>& axes_a,
                          const std::vector<std::string>& axes_b);

// I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C)
double conditional_mutual_information(const JointDist& j,
                                      const std::vector<std::string>& axes_a,
                                      const std::vector<std::string>& axes_b,
                                      const std::vector<std::string>& axes_c);

// Joint over (V,U,Xt,X,Y,Z) for the chain V-U-Xt-X-(Y,Z). yz_given_x has a
// flattened product output alphabet of size n_y*n_z, z fastest.
JointDist compose_chain(const FiniteDist& p_x, const CondDist& xt_given_x,
                        const CondDist& u_given_xt, const CondDist& v_given_u,
                        const CondDist& yz_given_x, std::size_t n_y,
                        std::size_t n_z);

// 0.5*log2(sigma_x2*nu + 1): mutual information of a scalar Gaussian
// channel with power gain nu and unit-variance noise
double gaussian_scalar_mi(double sigma_x2, double nu);

}  // namespace pufkey
