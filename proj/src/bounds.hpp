#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "isoperimetry.hpp"

namespace halo {

// ln Lambda(x) extended to real x >= 0: log-gamma for the factorial
// families, the exact polynomial exponent for the upcloner, linear
// interpolation of ln |GL(n,q)| between integers for the cloner.
double ln_lamp_growth(Family family, const GrowthParams& params, double x);
// ln phi(x) with phi(x) = x * Lambda(x).
double ln_phi(Family family, const GrowthParams& params, double x);
// Inverse of phi on [1, inf) by bisection, relative tolerance 1e-9 or
// better. Throws ContractViolation when x < phi(1).
double phi_inverse(Family family, const GrowthParams& params, double x);
double phi_inverse(const HaloGroup& g, double x);

// Expression in one variable x over numbers, + - * /, ^ with constant
// exponent, ln(e), ln^k(e) (k-fold iterate) and phi_inv[descriptor](e).
// Evaluation refuses arguments outside the domain instead of returning NaN:
// ln^k needs its argument above e^^(k-1) (the k-1 fold tower of e). An
// optional suffix "; x >= t" declares the domain threshold explicitly.
class BoundExpr {
 public:
  struct Node;

  static BoundExpr parse(std::string_view text);
  double eval(double x) const;
  // Smallest integer n >= 1 at which eval succeeds, searched up to limit.
  std::optional<long> domain_start(long limit = 1000000) const;
  const std::string& text() const { return text_; }
  double threshold() const { return threshold_; }

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
  double threshold_ = 0;
};

// e^^k: tower of k copies of e (e^^0 = 1).
double tetration_e(int k);

struct BoundSpec {
  std::string name;
  BoundExpr expr;
  // depends on the profile of the base being stable under dilation
  bool conditional = false;
};

struct BoundFit {
  std::string name;
  std::string expr;
  bool conditional = false;
  int dilation = 1;  // fitted against c * bound(K n)
  double c = 0;
  double rms = 0;  // root mean square residual
  double max_rel = 0;  // max |value - c b| / value
  std::vector<double> ns, values, residuals;
  std::size_t skipped = 0;  // points outside the bound's domain
};

struct BoundReport {
  std::vector<BoundFit> fits;
  static constexpr const char* caveat = "finite-range indication, not a proof";
};

// Least-squares c minimising sum (value_i - c bound(K n_i))^2 per bound and K.
BoundReport bound_report(const std::vector<ProfilePoint>& points, const std::vector<BoundSpec>& bounds,
                         const std::vector<int>& dilations = {1});
std::string bound_report_csv(const BoundReport& r);
nlohmann::json bound_report_json(const BoundReport& r);

// Profile bounds for a halo product over Z^d: phi_inverse lower bound and
// the conditional log-type lower and upper bounds. Empty for other groups.
std::vector<BoundSpec> standard_bounds(const Group& g);

}  // namespace halo
