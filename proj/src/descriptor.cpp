#include "descriptor.hpp"

#include <cctype>
#include <charconv>

namespace halo {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  GroupDescriptor run() {
    GroupDescriptor d = group();
    ws();
    if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return d;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, i_); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const { throw ParseError(msg, at); }

  void ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool peek(char c) {
    ws();
    return i_ < s_.size() && s_[i_] == c;
  }
  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++i_;
  }

  std::int64_t integer() {
    std::size_t start = i_;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (start == i_) fail("expected integer");
    std::int64_t v = 0;
    auto r = std::from_chars(s_.data() + start, s_.data() + i_, v);
    if (r.ec != std::errc()) fail_at("integer out of range", start);
    return v;
  }

  std::string word() {
    std::size_t start = i_;
    while (i_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[i_]))) ++i_;
    return std::string(s_.substr(start, i_ - start));
  }

  GroupDescriptor group() {
    GroupDescriptor left = primary();
    while (peek('x')) {
      std::size_t at = i_++;
      GroupDescriptor p;
      p.kind = GroupDescriptor::Kind::Product;
      p.offset = at;
      p.args.push_back(std::move(left));
      p.args.push_back(primary());
      left = std::move(p);
    }
    return left;
  }

  GroupDescriptor primary() {
    ws();
    GroupDescriptor d;
    d.offset = i_;
    if (i_ >= s_.size()) fail("unexpected end of descriptor");
    if (s_[i_] == '(') {
      ++i_;
      d = group();
      expect(')');
      return d;
    }
    char c = s_[i_];
    if (c == 'Z') {
      ++i_;
      d.kind = GroupDescriptor::Kind::Zd;
      if (i_ < s_.size() && s_[i_] == '^') {
        ++i_;
        std::size_t at = i_;
        std::int64_t n = integer();
        if (n < 1 || n > 16) fail_at("Z^d needs 1 <= d <= 16", at);
        d.dim = static_cast<int>(n);
        if (s_.substr(i_, 4) == ":lex") {
          d.lex = true;
          i_ += 4;
        }
      }
      return d;
    }
    if (c == 'C') {
      ++i_;
      std::size_t at = i_;
      d.kind = GroupDescriptor::Kind::Cyclic;
      d.order = integer();
      if (d.order < 2) fail_at("C_m needs m >= 2", at);
      return d;
    }
    if (c == 'H') {
      ++i_;
      if (i_ >= s_.size() || s_[i_] != '3') fail("expected H3");
      ++i_;
      d.kind = GroupDescriptor::Kind::Heisenberg;
      return d;
    }
    std::string name = word();
    if (name.empty()) fail("expected a group");
    auto fam = family_from_name(name);
    if (!fam) fail_at("unknown family '" + name + "'", d.offset);
    d.kind = GroupDescriptor::Kind::Halo;
    d.family = *fam;
    expect('(');
    std::vector<std::size_t> arg_offsets;
    auto arg_sep = [&](bool more) {
      if (more) {
        if (!peek(',')) fail(name + " expects " + std::to_string(arity(*fam)) + " arguments");
        ++i_;
      } else if (peek(',')) {
        fail(name + " expects " + std::to_string(arity(*fam)) + " argument" + (arity(*fam) > 1 ? "s" : ""));
      }
    };
    switch (*fam) {
      case Family::Wreath:
      case Family::Designer:
        d.args.push_back(group());
        arg_sep(true);
        d.args.push_back(group());
        arg_sep(false);
        if (!d.args[0].finite()) fail_at(name + " needs a finite lamp group", d.args[0].offset);
        break;
      case Family::Shuffler:
        d.args.push_back(group());
        arg_sep(false);
        break;
      case Family::Juggler: {
        ws();
        std::size_t at = i_;
        std::int64_t s = integer();
        if (s < 1 || s > 64) fail_at("juggler needs 1 <= s <= 64 tracks", at);
        d.param = static_cast<int>(s);
        arg_sep(true);
        d.args.push_back(group());
        arg_sep(false);
        break;
      }
      case Family::Cloner:
      case Family::Upcloner: {
        ws();
        std::size_t at = i_;
        if (s_.substr(i_, 2) != "GF") fail("expected GF<q>");
        i_ += 2;
        std::int64_t q = integer();
        if (q != 2 && q != 3 && q != 4 && q != 5) fail_at("GF(q) supported for q in {2,3,4,5}", at);
        d.param = static_cast<int>(q);
        arg_sep(true);
        d.args.push_back(group());
        arg_sep(false);
        if (*fam == Family::Upcloner && !d.args[0].ordered()) {
          const auto& b = d.args[0];
          if (b.kind == GroupDescriptor::Kind::Zd) {
            fail_at("order required: use Z^" + std::to_string(b.dim) + ":lex", b.offset);
          }
          fail_at("order required: " + b.print() + " has no translation-invariant total order", b.offset);
        }
        break;
      }
    }
    expect(')');
    return d;
  }

  static int arity(Family f) { return f == Family::Shuffler ? 1 : 2; }

  std::string_view s_;
  std::size_t i_ = 0;
};

}  // namespace

bool GroupDescriptor::ordered() const { return kind == Kind::Zd && (dim == 1 || lex); }

bool GroupDescriptor::finite() const {
  switch (kind) {
    case Kind::Cyclic: return true;
    case Kind::Product: return args[0].finite() && args[1].finite();
    default: return false;
  }
}

std::string GroupDescriptor::print() const {
  switch (kind) {
    case Kind::Zd: {
      if (dim == 1 && !lex) return "Z";
      return "Z^" + std::to_string(dim) + (lex ? ":lex" : "");
    }
    case Kind::Cyclic: return "C" + std::to_string(order);
    case Kind::Heisenberg: return "H3";
    case Kind::Product: {
      std::string r = args[1].print();
      if (args[1].kind == Kind::Product) r = "(" + r + ")";
      return args[0].print() + " x " + r;
    }
    case Kind::Halo: {
      std::string b = args.back().print();
      std::string n = family_name(family);
      switch (family) {
        case Family::Wreath:
        case Family::Designer: return n + "(" + args[0].print() + ", " + b + ")";
        case Family::Shuffler: return n + "(" + b + ")";
        case Family::Juggler: return n + "(" + std::to_string(param) + ", " + b + ")";
        case Family::Cloner:
        case Family::Upcloner: return n + "(GF" + std::to_string(param) + ", " + b + ")";
      }
    }
  }
  return "?";
}

GroupDescriptor parse_descriptor(std::string_view text) { return Parser(text).run(); }

GroupPtr make_group(const GroupDescriptor& d) {
  switch (d.kind) {
    case GroupDescriptor::Kind::Zd: return std::make_shared<ZdGroup>(d.dim, d.lex);
    case GroupDescriptor::Kind::Cyclic: return std::make_shared<CyclicGroup>(d.order);
    case GroupDescriptor::Kind::Heisenberg: return std::make_shared<HeisenbergGroup>();
    case GroupDescriptor::Kind::Product:
      return std::make_shared<ProductGroup>(make_group(d.args[0]), make_group(d.args[1]));
    case GroupDescriptor::Kind::Halo: {
      HaloParams p;
      if (d.family == Family::Wreath || d.family == Family::Designer) p.lamp_group = make_group(d.args[0]);
      if (d.family == Family::Juggler) p.tracks = d.param;
      if (d.family == Family::Cloner || d.family == Family::Upcloner) p.q = d.param;
      return make_halo(d.family, make_group(d.args.back()), p);
    }
  }
  throw ContractViolation("bad descriptor");
}

GroupPtr make_group(std::string_view text) { return make_group(parse_descriptor(text)); }

}  // namespace halo
