#include "halo/halo.h"

#include <cstdlib>
#include <cstring>
#include <random>

#include "decompose.hpp"
#include "descriptor.hpp"
#include "embeddings.hpp"
#include "experiment.hpp"
#include "lampgraph.hpp"

struct halo_group {
  halo::GroupPtr g;
};

namespace {

using halo::Element;
using nlohmann::json;

thread_local std::string g_error;
thread_local long g_error_offset = -1;

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <class F>
halo_status guard(F&& f) {
  g_error.clear();
  g_error_offset = -1;
  try {
    f();
    return HALO_OK;
  } catch (const halo::ParseError& e) {
    g_error = e.what();
    g_error_offset = static_cast<long>(e.offset());
    return HALO_ERR_PARSE;
  } catch (const halo::ContractViolation& e) {
    g_error = e.what();
    return HALO_ERR_CONTRACT;
  } catch (const halo::ResourceError& e) {
    g_error = e.what();
    return HALO_ERR_RESOURCE;
  } catch (const halo::UnsupportedFamily& e) {
    g_error = e.what();
    return HALO_ERR_UNSUPPORTED;
  } catch (const halo::DecompositionError& e) {
    g_error = e.what();
    return HALO_ERR_DECOMPOSITION;
  } catch (const json::exception& e) {
    g_error = std::string("options: ") + e.what();
    return HALO_ERR_CONTRACT;
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
    return HALO_ERR_RESOURCE;
  } catch (const std::exception& e) {
    g_error = e.what();
    return HALO_ERR_INTERNAL;
  }
}

json options(const char* text) {
  if (!text || !*text) return json::object();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw halo::ParseError("options are not valid JSON", e.byte == 0 ? 0 : e.byte - 1);
  }
  if (!j.is_object()) throw halo::ContractViolation("options must be a JSON object");
  return j;
}

const halo::Group& need(const halo_group* g) {
  if (!g || !g->g) throw halo::ContractViolation("null group handle");
  return *g->g;
}

std::shared_ptr<const halo::HaloGroup> need_halo(const halo_group* g) {
  need(g);
  auto h = std::dynamic_pointer_cast<const halo::HaloGroup>(g->g);
  if (!h) throw halo::ContractViolation(g->g->descriptor() + " is not a halo product");
  return h;
}

void out(char** dst, const std::string& s) {
  if (!dst) throw halo::ContractViolation("null output pointer");
  *dst = dup(s);
}

halo::ProfileRequest profile_request(const json& o) {
  halo::ProfileRequest r;
  auto m = halo::method_from_name(o.value("method", std::string("exact")));
  if (!m) throw halo::ContractViolation("method must be exact, greedy, anneal or spectral");
  r.method = *m;
  r.p = *m == halo::Method::Spectral ? 2 : 1;
  if (o.contains("p")) {
    double p = o["p"].get<double>();
    if (p != std::floor(p)) throw halo::ContractViolation("profile p must be 1 (set methods) or 2 (spectral)");
    r.p = static_cast<int>(p);
  }
  r.n_max = o.value("n_max", 8);
  r.radius = o.value("radius", -1);
  if (o.contains("seed")) r.seed = o["seed"].get<std::uint64_t>();
  r.workers = o.value("workers", 1);
  r.node_budget = o.value("budget", std::uint64_t{50000000});
  return r;
}

mpq_class rational(const json& v) {
  if (v.is_number_integer()) return mpq_class(v.get<long>());
  if (v.is_string()) {
    mpq_class q;
    if (q.set_str(v.get<std::string>(), 10) != 0) throw halo::ContractViolation("not a rational: " + v.get<std::string>());
    q.canonicalize();
    return q;
  }
  throw halo::ContractViolation("rational values are integers or \"a/b\" strings");
}

json format_all(const halo::Group& g, const std::vector<Element>& v) {
  json a = json::array();
  for (const auto& e : v) a.push_back(g.format(e));
  return a;
}

json grad_json(const halo::GradRatio& r) {
  json j{{"value", r.value}};
  if (r.exact) j["exact"] = r.exact->get_str();
  return j;
}

json morphism_json(const halo::GroupMorphism& phi, const halo::MorphismCheck& c) {
  json j{{"name", phi.name},
         {"identity", c.identity},
         {"homomorphism", c.homomorphism},
         {"injective", c.injective},
         {"elements", c.elements},
         {"pairs", c.pairs},
         {"counterexample", c.counterexample}};
  j["outside_image"] = c.outside_image ? json(phi.codomain->format(*c.outside_image)) : json(nullptr);
  return j;
}

}  // namespace

extern "C" {

const char* halo_version(void) { return halo::kVersion; }

const char* halo_status_name(halo_status s) {
  switch (s) {
    case HALO_OK: return "ok";
    case HALO_ERR_PARSE: return "parse error";
    case HALO_ERR_CONTRACT: return "contract violation";
    case HALO_ERR_RESOURCE: return "resource limit";
    case HALO_ERR_UNSUPPORTED: return "unsupported family";
    case HALO_ERR_DECOMPOSITION: return "decomposition error";
    case HALO_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

const char* halo_last_error(void) { return g_error.c_str(); }
long halo_last_error_offset(void) { return g_error_offset; }
void halo_string_free(char* s) { std::free(s); }

halo_status halo_group_create(const char* descriptor, halo_group** result) {
  return guard([&] {
    if (!descriptor || !result) throw halo::ContractViolation("null argument");
    *result = new halo_group{halo::make_group(descriptor)};
  });
}

void halo_group_free(halo_group* g) { delete g; }

halo_status halo_group_descriptor(const halo_group* g, char** result) {
  return guard([&] { out(result, need(g).descriptor()); });
}

halo_status halo_ball(const halo_group* g, const char* opts, char** result) {
  return guard([&] {
    const auto& G = need(g);
    json o = options(opts);
    halo::BallOptions bo;
    bo.memory_budget = o.value("budget_mem", bo.memory_budget);
    bo.workers = o.value("workers", 1);
    auto b = halo::ball(G, o.value("radius", 2), bo);
    json j{{"group", G.descriptor()}, {"radius", b.radius}, {"ball", halo::ball_to_json(G, b)}};
    std::vector<std::size_t> spheres(static_cast<std::size_t>(b.radius) + 1, 0);
    for (int l : b.lengths) spheres[static_cast<std::size_t>(l)]++;
    j["sphere_sizes"] = spheres;
    out(result, j.dump());
  });
}

halo_status halo_profile(const halo_group* g, const char* opts, char** result) {
  return guard([&] {
    const auto& G = need(g);
    auto run = halo::run_profile(G, profile_request(options(opts)));
    bool exact = std::all_of(run.points.begin(), run.points.end(), [](const auto& p) { return p.exact; });
    json j{{"csv", halo::profile_csv(run.points)},
           {"witnesses", halo::profile_witness_json(G, run.points)},
           {"warnings", run.warnings},
           {"exact", exact}};
    out(result, j.dump());
  });
}

halo_status halo_folner(const halo_group* g, const char* opts, char** result) {
  return guard([&] {
    const auto& G = need(g);
    json o = options(opts);
    mpq_class target = rational(o.value("target", json(1)));
    auto run = halo::run_profile(G, profile_request(o));
    auto f = halo::folner_function(run.points, target);
    json j{{"target", target.get_str()}, {"warnings", run.warnings}};
    j["folner"] = f ? json(*f) : json(nullptr);
    if (f) {
      for (const auto& p : run.points) {
        if (p.n == static_cast<int>(*f)) {
          j["witness"] = format_all(G, p.witness);
          j["exact"] = p.exact;
          if (p.ratio) j["ratio"] = p.ratio->str();
        }
      }
    }
    out(result, j.dump());
  });
}

halo_status halo_growth(const halo_group* g, const char* opts, char** result) {
  return guard([&] {
    const auto& G = need(g);
    json o = options(opts);
    json j;
    int radius = o.value("radius", 3);
    auto b = halo::ball(G, radius);
    std::vector<std::size_t> cumulative(static_cast<std::size_t>(radius) + 1, 0);
    for (int l : b.lengths) {
      for (int r = l; r <= radius; ++r) cumulative[static_cast<std::size_t>(r)]++;
    }
    j["ball_sizes"] = cumulative;
    if (auto h = std::dynamic_pointer_cast<const halo::HaloGroup>(g->g)) {
      int n_max = o.value("n_max", 4);
      auto bb = halo::ball(*h->base(), n_max);
      json rows = json::array();
      for (int n = 0; n <= n_max && n <= static_cast<int>(bb.size()); ++n) {
        std::vector<Element> S(bb.elements.begin(), bb.elements.begin() + n);
        json row{{"n", n}, {"closed_form", halo::lamp_growth(*h, n).get_str()}, {"set", format_all(*h->base(), S)}};
        try {
          row["enumerated"] = halo::enumerate_block(*h, S, o.value("budget", halo::kDefaultBlockBudget)).size();
        } catch (const halo::ResourceError&) {
          row["enumerated"] = nullptr;
        }
        rows.push_back(row);
      }
      j["lamp_growth"] = rows;
    }
    out(result, j.dump());
  });
}

halo_status halo_lift(const halo_group* g, const char* opts, char** result) {
  return guard([&] {
    auto h = need_halo(g);
    json o = options(opts);
    const auto& B = *h->base();
    halo::FiniteFunction f;
    if (o.contains("function")) {
      std::vector<std::pair<Element, mpq_class>> entries;
      for (auto it = o["function"].begin(); it != o["function"].end(); ++it) {
        entries.push_back({B.parse_element(it.key()), rational(it.value())});
      }
      f = halo::FiniteFunction::exact(std::move(entries));
    } else if (o.contains("indicator")) {
      std::vector<Element> pts;
      for (const auto& e : o["indicator"]) pts.push_back(B.parse_element(e.get<std::string>()));
      f = halo::FiniteFunction::indicator(std::move(pts));
    } else {
      f = halo::FiniteFunction::indicator({B.identity()});
    }
    std::vector<double> ps = o.value("ps", std::vector<double>{1, 2, 3});
    auto c = halo::lift_check(*h, f, ps, o.value("budget", std::uint64_t{20000000}));
    json rows = json::array();
    for (std::size_t i = 0; i < ps.size(); ++i) {
      bool equal = c.base[i].exact && c.lifted[i].exact
                       ? *c.base[i].exact == *c.lifted[i].exact
                       : std::abs(c.base[i].value - c.lifted[i].value) <= 1e-10 * std::abs(c.base[i].value);
      rows.push_back({{"p", ps[i]}, {"base", grad_json(c.base[i])}, {"lifted", grad_json(c.lifted[i])}, {"equal", equal}});
    }
    json j{{"U", format_all(B, c.U)},
           {"V", format_all(B, c.V)},
           {"lamp_count", c.lamp_count},
           {"support_size", c.support_size},
           {"expected_support", c.expected_support.get_str()},
           {"support_matches", mpz_class(static_cast<unsigned long>(c.support_size)) == c.expected_support},
           {"ratios", rows}};
    out(result, j.dump());
  });
}

halo_status halo_decompose(const halo_group* g, const char* opts, char** result) {
  return guard([&] {
    auto h = need_halo(g);
    json o = options(opts);
    Element x;
    if (o.contains("element")) {
      x = h->from_json(o["element"]);
    } else {
      json r = o.value("random", json::object());
      std::mt19937_64 rng(r.value("seed", std::uint64_t{1}));
      int len = r.value("length", 8);
      x = h->identity();
      std::uniform_int_distribution<std::size_t> pick(0, h->generators().size() - 1);
      for (int i = 0; i < len; ++i) x = h->multiply(x, h->generators()[pick(rng)]);
    }
    halo::DecomposeOptions d;
    d.word_cap = o.value("word_cap", d.word_cap);
    d.simplify = o.value("simplify", false);
    auto dec = halo::decompose_element(*h, h->decode(x), d);
    bool verified = h->encode(halo::evaluate_word(*h, dec.word)) == x;
    json j{{"element", h->to_json(x)},
           {"word", halo::word_to_json(dec.word)},
           {"word_string", halo::word_to_string(*h, dec.word)},
           {"length", dec.word.size()},
           {"verified", verified},
           {"recursion_steps", dec.trace.size()},
           {"strictly_decreasing", dec.strictly_decreasing()}};
    out(result, j.dump());
  });
}

halo_status halo_net(const halo_group* g, const char* opts, char** result) {
  return guard([&] {
    need(g);
    json o = options(opts);
    auto h = std::dynamic_pointer_cast<const halo::HaloGroup>(g->g);
    halo::GroupPtr base = h ? h->base() : g->g;
    int radius = o.value("radius", 3);
    int D = o.value("D", 1);
    auto net = halo::greedy_net(base, radius, D);
    auto chk = halo::check_net(net, o.value("interior", radius));
    json j{{"group", base->descriptor()},
           {"D", D},
           {"separation", net.separation()},
           {"step", net.step()},
           {"points", format_all(*base, net.points)},
           {"bigstep_size", net.bigstep.size()},
           {"separated", chk.separated},
           {"maximal", chk.maximal},
           {"pairs", chk.pairs},
           {"lower_bound", chk.lower_bound},
           {"upper_bound", chk.upper_bound},
           {"detail", chk.detail},
           {"edges", halo::net_graph(net).edge_list()}};
    if (h) {
      auto c = halo::commutativity_constant(*h, o.value("commutativity_radius", 3));
      json cj{{"D", c.D}, {"witness_distance", c.witness_distance}};
      if (c.witness_sets) {
        cj["witness_sets"] = {format_all(*base, c.witness_sets->first), format_all(*base, c.witness_sets->second)};
      }
      if (c.witness_lamps) {
        cj["witness_lamps"] = {h->format_lamp(c.witness_lamps->first), h->format_lamp(c.witness_lamps->second)};
      }
      j["commutativity"] = cj;
    }
    out(result, j.dump());
  });
}

halo_status halo_ystar(const halo_group* g, const char* opts, char** result) {
  return guard([&] {
    auto h = need_halo(g);
    json o = options(opts);
    auto net = halo::greedy_net(h->base(), o.value("radius", 3), o.value("D", 1));
    auto Y = halo::build_ystar(*h, net, o.value("s0", std::size_t{0}));
    auto iso = halo::check_iso_to_lamplighter(Y.graph, Y.block_graph, halo::net_graph(net));
    json j{{"vertices", Y.graph.size()},
           {"edges", Y.graph.edge_list()},
           {"labels", Y.graph.labels_json()},
           {"block_order", Y.block_graph.size()},
           {"sites", format_all(*h->base(), Y.sites)},
           {"commuting_pairs_checked", Y.commuting_pairs_checked},
           {"isomorphic", iso.isomorphic},
           {"reason", iso.reason}};
    out(result, j.dump());
  });
}

halo_status halo_embed_check(const halo_group* g, const char* opts, char** result) {
  return guard([&] {
    auto h = need_halo(g);
    json o = options(opts);
    std::string kind = o.value("kind", std::string("lamplighter"));
    int radius = o.value("radius", 4);
    std::size_t pairs = o.value("pairs", std::size_t{1000});
    std::uint64_t seed = o.value("seed", std::uint64_t{1});
    json j;
    if (kind == "wreath_in_shuffler") {
      auto moduli = o.value("moduli", std::vector<std::int64_t>{2});
      auto phi = halo::wreath_in_shuffler(h, halo::sublattice_cosets(h->base(), moduli));
      j = morphism_json(phi, halo::check_morphism(phi, halo::domain_sample(phi, radius), pairs, seed));
    } else if (kind == "shuffler_endomorphism") {
      auto psi = halo::doubling(h->base());
      auto phi = halo::shuffler_endomorphism(h, psi, [](const Element& x) {
        Element y = x;
        for (auto& c : y) c /= 2;
        return y;
      });
      auto b = halo::ball(*h, radius);
      j = morphism_json(phi, halo::check_morphism(phi, b.elements, pairs, seed, b.elements));
    } else if (kind == "lamplighter") {
      auto phi = halo::lamplighter_in_halo(h);
      j = morphism_json(phi, halo::check_morphism(phi, halo::domain_sample(phi, radius), pairs, seed));
    } else {
      throw halo::ContractViolation("embed kind must be wreath_in_shuffler, shuffler_endomorphism or lamplighter");
    }
    j["kind"] = kind;
    out(result, j.dump());
  });
}

halo_status halo_bounds(const halo_group* g, const char* opts, char** result) {
  return guard([&] {
    const auto& G = need(g);
    json o = options(opts);
    json j;
    if (o.contains("phi_inverse")) {
      auto h = need_halo(g);
      json vals = json::array();
      for (const auto& x : o["phi_inverse"]) {
        double y = halo::phi_inverse(*h, x.get<double>());
        vals.push_back({{"x", x}, {"phi_inverse", y}, {"y_ln_y_over_ln_x", y * std::log(y) / std::log(x.get<double>())}});
      }
      j["phi_inverse"] = vals;
    }
    std::vector<halo::BoundSpec> bounds;
    json b = o.value("bounds", json("standard"));
    if (b.is_string() && b == "standard") {
      bounds = halo::standard_bounds(G);
    } else {
      for (const auto& e : b) bounds.push_back({e.get<std::string>(), halo::BoundExpr::parse(e.get<std::string>()), false});
    }
    auto run = halo::run_profile(G, profile_request(o));
    auto rep = halo::bound_report(run.points, bounds, o.value("dilations", std::vector<int>{1}));
    j["profile_csv"] = halo::profile_csv(run.points);
    j["csv"] = halo::bound_report_csv(rep);
    j["report"] = halo::bound_report_json(rep);
    j["warnings"] = run.warnings;
    out(result, j.dump());
  });
}

halo_status halo_run_experiment(const char* config_path, const char* out_dir, char** result) {
  return guard([&] {
    if (!config_path || !out_dir) throw halo::ContractViolation("null argument");
    auto r = halo::run_experiment(config_path, out_dir);
    out(result, r.manifest.dump(2));
  });
}

}  // extern "C"
