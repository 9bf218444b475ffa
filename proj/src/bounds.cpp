#include "bounds.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "descriptor.hpp"

namespace halo {

// ---------------------------------------------------------------- phi

double ln_lamp_growth(Family family, const GrowthParams& p, double x) {
  if (!(x >= 0)) throw ContractViolation("lamp growth needs x >= 0");
  const double lnF = std::log(static_cast<double>(p.lamp_order));
  const double lnq = std::log(static_cast<double>(p.q));
  switch (family) {
    case Family::Wreath: return x * lnF;
    case Family::Shuffler: return std::lgamma(x + 1);
    case Family::Juggler: return std::lgamma(p.tracks * x + 1);
    case Family::Designer: return x * lnF + std::lgamma(x + 1);
    case Family::Upcloner: return x * (x - 1) / 2 * lnq;
    case Family::Cloner: {
      // ln |GL(n,q)| = n^2 ln q + sum_{k<=n} ln(1 - q^-k)
      auto at = [&](double n) {
        double s = n * n * lnq;
        for (int k = 1; k <= static_cast<int>(n); ++k) s += std::log1p(-std::pow(p.q, -k));
        return s;
      };
      double n = std::floor(x);
      double t = x - n;
      return t == 0 ? at(n) : (1 - t) * at(n) + t * at(n + 1);
    }
  }
  return 0;
}

double ln_phi(Family family, const GrowthParams& p, double x) { return std::log(x) + ln_lamp_growth(family, p, x); }

double phi_inverse(Family family, const GrowthParams& p, double x) {
  const double target = std::log(x);
  const double floor = ln_phi(family, p, 1);
  if (!(x > 0) || target < floor - 1e-12) {
    std::ostringstream os;
    os << "phi_inverse needs x >= phi(1) = " << std::exp(floor) << ", got " << x;
    throw ContractViolation(os.str());
  }
  if (target <= floor) return 1;
  double lo = 1, hi = 2;
  while (ln_phi(family, p, hi) < target) {
    lo = hi;
    hi *= 2;
    if (hi > 1e300) throw ContractViolation("phi_inverse: argument too large");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * lo; ++it) {
    double mid = (lo + hi) / 2;
    (ln_phi(family, p, mid) < target ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

double phi_inverse(const HaloGroup& g, double x) { return phi_inverse(g.family(), growth_params(g), x); }

double tetration_e(int k) {
  double t = 1;
  for (int i = 0; i < k; ++i) t = std::exp(t);
  return t;
}

// ---------------------------------------------------------------- expressions

struct BoundExpr::Node {
  enum class Op { Num, Var, Add, Sub, Mul, Div, Pow, Neg, Ln, PhiInv };
  Op op = Op::Num;
  double value = 0;
  int k = 1;
  std::shared_ptr<const Node> a, b;
  Family family = Family::Wreath;
  GrowthParams growth;
  std::string desc;

  bool has_var() const { return op == Op::Var || (a && a->has_var()) || (b && b->has_var()); }

  double eval(double x) const {
    auto check = [](double v) {
      if (!std::isfinite(v)) throw ContractViolation("bound evaluates to a non-finite value");
      return v;
    };
    switch (op) {
      case Op::Num: return value;
      case Op::Var: return x;
      case Op::Add: return check(a->eval(x) + b->eval(x));
      case Op::Sub: return check(a->eval(x) - b->eval(x));
      case Op::Mul: return check(a->eval(x) * b->eval(x));
      case Op::Div: {
        double d = b->eval(x);
        if (d == 0) throw ContractViolation("division by zero in bound");
        return check(a->eval(x) / d);
      }
      case Op::Neg: return -a->eval(x);
      case Op::Pow: {
        double u = a->eval(x), e = b->eval(x);
        if (u < 0 && e != std::floor(e)) throw ContractViolation("fractional power of a negative value");
        if (u == 0 && e < 0) throw ContractViolation("negative power of zero");
        return check(std::pow(u, e));
      }
      case Op::Ln: {
        double u = a->eval(x);
        double t = tetration_e(k - 1);
        if (!(u > t)) {
          std::ostringstream os;
          os << "ln^" << k << " needs an argument above " << t << ", got " << u;
          throw ContractViolation(os.str());
        }
        for (int i = 0; i < k; ++i) u = std::log(u);
        return u;
      }
      case Op::PhiInv: return phi_inverse(family, growth, a->eval(x));
    }
    return 0;
  }
};

namespace {

using NodeP = std::shared_ptr<const BoundExpr::Node>;
using Op = BoundExpr::Node::Op;

NodeP make(Op op, NodeP a = nullptr, NodeP b = nullptr) {
  auto n = std::make_shared<BoundExpr::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class ExprParser {
 public:
  explicit ExprParser(std::string_view s) : s_(s) {}

  NodeP run(double& threshold) {
    NodeP n = sum();
    if (eat(';')) {
      if (!keyword("x")) fail("expected 'x >= t'");
      ws();
      if (s_.substr(i_, 2) != ">=") fail("expected '>='");
      i_ += 2;
      NodeP t = primary();
      if (t->op != Op::Num) fail("threshold must be a number");
      threshold = t->value;
    }
    ws();
    if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& m) const { throw ParseError(m, i_); }
  void ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    ws();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  bool keyword(std::string_view w) {
    ws();
    if (s_.substr(i_, w.size()) != w) return false;
    std::size_t j = i_ + w.size();
    if (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) return false;
    i_ = j;
    return true;
  }

  NodeP sum() {
    NodeP n = product();
    for (;;) {
      if (eat('+')) n = make(Op::Add, n, product());
      else if (eat('-')) n = make(Op::Sub, n, product());
      else return n;
    }
  }
  NodeP product() {
    NodeP n = unary();
    for (;;) {
      if (eat('*')) n = make(Op::Mul, n, unary());
      else if (eat('/')) n = make(Op::Div, n, unary());
      else return n;
    }
  }
  NodeP unary() {
    if (eat('-')) return make(Op::Neg, unary());
    NodeP base = primary();
    if (eat('^')) {
      std::size_t at = i_;
      NodeP e = unary();
      if (e->has_var()) throw ParseError("exponent must be constant", at);
      return make(Op::Pow, base, e);
    }
    return base;
  }
  NodeP primary() {
    ws();
    if (i_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[i_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0;
      auto r = std::from_chars(s_.data() + i_, s_.data() + s_.size(), v);
      if (r.ec != std::errc()) fail("bad number");
      i_ = static_cast<std::size_t>(r.ptr - s_.data());
      auto n = std::make_shared<BoundExpr::Node>();
      n->value = v;
      return n;
    }
    if (eat('(')) {
      NodeP n = sum();
      expect(')');
      return n;
    }
    if (keyword("x")) return make(Op::Var);
    if (keyword("ln")) {
      int k = 1;
      if (eat('^')) {
        ws();
        std::size_t start = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (start == i_) fail("expected iterate count");
        std::from_chars(s_.data() + start, s_.data() + i_, k);
        if (k < 1 || k > 5) throw ParseError("iterate count must be in 1..5", start);
      }
      expect('(');
      auto n = std::make_shared<BoundExpr::Node>();
      n->op = Op::Ln;
      n->k = k;
      n->a = sum();
      expect(')');
      return n;
    }
    if (keyword("phi_inv")) {
      expect('[');
      std::size_t start = i_;
      std::size_t end = s_.find(']', start);
      if (end == std::string_view::npos) fail("expected ']'");
      auto n = std::make_shared<BoundExpr::Node>();
      n->op = Op::PhiInv;
      try {
        auto g = make_group(s_.substr(start, end - start));
        auto* h = dynamic_cast<const HaloGroup*>(g.get());
        if (!h) throw ContractViolation("phi_inv needs a halo product");
        n->family = h->family();
        n->growth = growth_params(*h);
        n->desc = h->descriptor();
      } catch (const ParseError& e) {
        throw ParseError("in phi_inv descriptor: " + e.message(), start + e.offset());
      } catch (const ContractViolation& e) {
        throw ParseError(e.what(), start);
      }
      i_ = end + 1;
      expect('(');
      n->a = sum();
      expect(')');
      return n;
    }
    fail("expected a number, x, ln, phi_inv or '('");
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string r = "\"";
  for (char c : s) {
    if (c == '"') r += '"';
    r += c;
  }
  return r + "\"";
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

BoundExpr BoundExpr::parse(std::string_view text) {
  BoundExpr e;
  e.root_ = ExprParser(text).run(e.threshold_);
  e.text_ = std::string(text);
  return e;
}

double BoundExpr::eval(double x) const {
  if (x < threshold_) {
    std::ostringstream os;
    os << "bound '" << text_ << "' is defined for x >= " << threshold_ << ", got " << x;
    throw ContractViolation(os.str());
  }
  return root_->eval(x);
}

std::optional<long> BoundExpr::domain_start(long limit) const {
  for (long n = 1; n <= limit; n = n < 64 ? n + 1 : n * 2) {
    try {
      eval(static_cast<double>(n));
      if (n <= 64) return n;
      // first success after doubling: bisect back
      long lo = n / 2, hi = n;
      while (hi - lo > 1) {
        long mid = (lo + hi) / 2;
        try {
          eval(static_cast<double>(mid));
          hi = mid;
        } catch (const ContractViolation&) {
          lo = mid;
        }
      }
      return hi;
    } catch (const ContractViolation&) {
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- report

BoundReport bound_report(const std::vector<ProfilePoint>& points, const std::vector<BoundSpec>& bounds,
                         const std::vector<int>& dilations) {
  if (points.empty()) throw ContractViolation("bound_report needs profile points");
  BoundReport r;
  for (const auto& b : bounds) {
    for (int K : dilations) {
      BoundFit f;
      f.name = b.name;
      f.expr = b.expr.text();
      f.conditional = b.conditional;
      f.dilation = K;
      std::vector<double> bv;
      for (const auto& pt : points) {
        if (!std::isfinite(pt.value)) {
          ++f.skipped;
          continue;
        }
        try {
          double v = b.expr.eval(static_cast<double>(K) * pt.n);
          f.ns.push_back(pt.n);
          f.values.push_back(pt.value);
          bv.push_back(v);
        } catch (const ContractViolation&) {
          ++f.skipped;
        }
      }
      double sxy = 0, syy = 0;
      for (std::size_t i = 0; i < bv.size(); ++i) {
        sxy += f.values[i] * bv[i];
        syy += bv[i] * bv[i];
      }
      f.c = syy > 0 ? sxy / syy : 0;
      double ss = 0;
      for (std::size_t i = 0; i < bv.size(); ++i) {
        double res = f.values[i] - f.c * bv[i];
        f.residuals.push_back(res);
        ss += res * res;
        if (f.values[i] != 0) f.max_rel = std::max(f.max_rel, std::abs(res) / std::abs(f.values[i]));
      }
      f.rms = bv.empty() ? 0 : std::sqrt(ss / static_cast<double>(bv.size()));
      r.fits.push_back(std::move(f));
    }
  }
  return r;
}

std::string bound_report_csv(const BoundReport& r) {
  std::string s = "bound,expr,conditional,dilation,c,rms_residual,max_rel_residual,points,skipped,note\n";
  for (const auto& f : r.fits) {
    s += csv_field(f.name) + "," + csv_field(f.expr) + "," + (f.conditional ? "true" : "false") + "," +
         std::to_string(f.dilation) + "," + num(f.c) + "," + num(f.rms) + "," + num(f.max_rel) + "," +
         std::to_string(f.ns.size()) + "," + std::to_string(f.skipped) + "," + csv_field(BoundReport::caveat) + "\n";
  }
  return s;
}

nlohmann::json bound_report_json(const BoundReport& r) {
  nlohmann::json j;
  j["note"] = BoundReport::caveat;
  j["fits"] = nlohmann::json::array();
  for (const auto& f : r.fits) {
    j["fits"].push_back({{"bound", f.name},
                         {"expr", f.expr},
                         {"conditional", f.conditional},
                         {"dilation", f.dilation},
                         {"c", f.c},
                         {"rms_residual", f.rms},
                         {"max_rel_residual", f.max_rel},
                         {"n", f.ns},
                         {"residuals", f.residuals},
                         {"skipped", f.skipped}});
  }
  return j;
}

std::vector<BoundSpec> standard_bounds(const Group& g) {
  auto* h = dynamic_cast<const HaloGroup*>(&g);
  if (!h) return {};
  auto* zd = dynamic_cast<const ZdGroup*>(h->base().get());
  if (!zd) return {};
  std::string root = zd->dim() == 1 ? "" : "^(1/" + std::to_string(zd->dim()) + ")";
  auto wrap = [&](const std::string& e) { return root.empty() ? e : "(" + e + ")" + root; };
  std::vector<BoundSpec> out;
  out.push_back({"phi_inverse_lower", BoundExpr::parse(wrap("phi_inv[" + h->descriptor() + "](x)")), false});
  switch (h->family()) {
    case Family::Shuffler:
    case Family::Juggler:
      out.push_back({"loglog_lower", BoundExpr::parse(wrap("ln(x)/ln^2(x)") + "; x >= 16"), true});
      out.push_back({"log_upper", BoundExpr::parse(wrap("ln(x)")), true});
      break;
    case Family::Wreath:
      out.push_back({"log_upper", BoundExpr::parse(wrap("ln(x)")), true});
      break;
    default: break;
  }
  return out;
}

}  // namespace halo
