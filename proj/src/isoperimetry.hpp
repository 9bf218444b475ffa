#pragma once

#include <cstdint>
#include <optional>

#include <gmpxx.h>

#include "halo.hpp"

namespace halo {

// Non-negative rational with den == 0 standing for +infinity (num == 1).
struct Ratio {
  mpz_class num = 0, den = 1;
  static Ratio of(const mpz_class& n, const mpz_class& d);
  static Ratio of(std::int64_t n, std::int64_t d) { return of(mpz_class(static_cast<long>(n)), mpz_class(static_cast<long>(d))); }
  bool infinite() const { return den == 0; }
  double to_double() const;
  std::string str() const;
  friend bool operator==(const Ratio& a, const Ratio& b) { return a.num == b.num && a.den == b.den; }
  friend bool operator<(const Ratio& a, const Ratio& b);
};

// Finitely supported function on a group, sorted by encoding. Values are
// exact rationals (with double shadows) or doubles only.
class FiniteFunction {
 public:
  FiniteFunction() = default;
  static FiniteFunction exact(std::vector<std::pair<Element, mpq_class>> entries);
  static FiniteFunction real(std::vector<std::pair<Element, double>> entries);
  static FiniteFunction indicator(std::vector<Element> points);

  bool is_exact() const { return exact_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<Element>& points() const { return points_; }
  double value(std::size_t i) const { return values_[i]; }
  const mpq_class& exact_value(std::size_t i) const;
  std::optional<std::size_t> find(const Element& e) const;
  double at(const Element& e) const;
  nlohmann::json to_json(const Group& g) const;

 private:
  std::vector<Element> points_;
  std::vector<mpq_class> exact_values_;
  std::vector<double> values_;
  bool exact_ = true;
};

struct SubsetWitness {
  std::vector<Element> set;       // sorted
  std::vector<Element> boundary;  // sorted, AS \ A
  Ratio ratio;                    // |A| / |boundary|
};

SubsetWitness boundary(const Group& g, std::vector<Element> A);

// ||grad f||_p / ||f||_p over ordered (x, s), s in the generator list.
struct GradRatio {
  std::optional<mpq_class> exact;  // when p == 1 and f is exact
  double value = 0;
};
GradRatio gradient_ratio(const Group& g, const FiniteFunction& f, double p);

// Number of ordered pairs (a, s) with a in A and as outside A.
std::uint64_t directed_cut(const Group& g, const std::vector<Element>& A);

enum class Method { Exact, Greedy, Anneal, Spectral };
std::string method_name(Method m);
std::optional<Method> method_from_name(std::string_view s);

struct ProfilePoint {
  int n = 0;
  std::optional<Ratio> ratio;  // set-based methods
  double value = 0;            // ratio as double; ||f||_2 / ||grad f||_2 for spectral
  Method method = Method::Exact;
  bool exact = false;
  std::vector<Element> witness;  // set, or support of witness_fn
  std::optional<FiniteFunction> witness_fn;
  std::size_t witness_size() const { return witness.size(); }
};

struct ProfileRun {
  std::vector<ProfilePoint> points;
  std::vector<std::string> warnings;
};

struct ExactOptions {
  int workers = 1;
  std::uint64_t node_budget = 50000000;
};

// Exhaustive search over connected subsets of Ball(radius) containing the
// identity, for every size bound n <= n_max.
ProfileRun profile_exact(const Group& g, int n_max, int radius, const ExactOptions& opt = {});

struct HeuristicOptions {
  std::uint64_t seed = 1;
  int anneal_iterations = 2000;
  double t0 = 2.0;
  double cooling = 0.995;
};

ProfileRun profile_heuristic(const Group& g, int n_max, Method method, const HeuristicOptions& opt = {});
// Principal Dirichlet eigenvector on each greedy set (p = 2).
ProfileRun profile_spectral(const Group& g, int n_max, const HeuristicOptions& opt = {});

struct SpectralResult {
  double lambda = 0;  // smallest eigenvalue of deg*I - Adj on A
  FiniteFunction f;
  int iterations = 0;
  bool converged = false;
};
SpectralResult dirichlet_eigenvector(const Group& g, const std::vector<Element>& A, double tol = 1e-10, int max_iter = 10000);

// Least witness size whose value reaches n; nullopt when none does.
std::optional<std::size_t> folner_function(const std::vector<ProfilePoint>& points, const mpq_class& n);

// Rows n,value_num,value_den_or_float,method,exact,witness_size.
std::string profile_csv(const std::vector<ProfilePoint>& points, bool header = true);
nlohmann::json profile_witness_json(const Group& g, const std::vector<ProfilePoint>& points);

// g(sigma, h) = f(h) 1[sigma in L(V)] with V = U u US, checked by streaming
// over L(V) x U with the halo multiplication.
struct LiftCheck {
  std::vector<Element> U, V;
  std::uint64_t lamp_count = 0;    // enumerated |L(V)|
  std::uint64_t support_size = 0;  // |U| * lamp_count
  mpz_class expected_support;      // |U| * Lambda(|V|)
  std::vector<double> ps;
  std::vector<GradRatio> lifted, base;
};
LiftCheck lift_check(const HaloGroup& g, const FiniteFunction& f, const std::vector<double>& ps,
                     std::uint64_t budget = 20000000);
std::vector<Element> lift_region(const Group& base, const std::vector<Element>& U);
FiniteFunction almost_invariant_lift(const HaloGroup& g, const FiniteFunction& f, std::uint64_t budget = kDefaultBlockBudget);

// h = |f|^(p/q), p > q >= 1.
FiniteFunction power_transform(const FiniteFunction& f, double p, double q);
struct PowerCheck {
  double lhs = 0, rhs = 0;
  bool holds = false;
};
PowerCheck power_inequality(const Group& g, const FiniteFunction& f, double p, double q);

struct ProductBoundary {
  SubsetWitness product;                // computed in the product group
  std::vector<Element> formula;         // (dA x B) u (A x dB), sorted
  bool identity_holds = false;
  mpq_class inv_ratio, inv_ratio_a, inv_ratio_b;  // |boundary| / |set|
  bool harmonic_holds = false;
};
ProductBoundary product_boundary(const std::shared_ptr<const ProductGroup>& gp, const std::vector<Element>& A,
                                 const std::vector<Element>& B);

}  // namespace halo
