// Command-line front end over the C interface.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "halo/halo.h"

using nlohmann::json;

namespace {

struct Globals {
  std::string group;
  std::optional<double> p;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> budget_mem;
  std::string out;
};

struct Failure {
  halo_status status;
};

void check(halo_status s) {
  if (s != HALO_OK) {
    std::cerr << "error (" << halo_status_name(s) << "): " << halo_last_error() << "\n";
    throw Failure{s};
  }
}

std::string take(char* s) {
  std::string r = s ? s : "";
  halo_string_free(s);
  return r;
}

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot write " << g.out << "\n";
    throw Failure{HALO_ERR_CONTRACT};
  }
  f << text;
}

using GroupHandle = std::unique_ptr<halo_group, decltype(&halo_group_free)>;

GroupHandle open_group(const Globals& g) {
  if (g.group.empty()) {
    std::cerr << "error: --group is required\n";
    throw Failure{HALO_ERR_CONTRACT};
  }
  halo_group* h = nullptr;
  halo_status s = halo_group_create(g.group.c_str(), &h);
  if (s == HALO_ERR_PARSE && halo_last_error_offset() >= 0) {
    std::cerr << "  " << g.group << "\n  " << std::string(static_cast<std::size_t>(halo_last_error_offset()), ' ') << "^\n";
  }
  check(s);
  return GroupHandle(h, &halo_group_free);
}

using Op = halo_status (*)(const halo_group*, const char*, char**);

json call(Op op, const halo_group* h, const json& opts) {
  char* out = nullptr;
  check(op(h, opts.dump().c_str(), &out));
  return json::parse(take(out));
}

struct ProfileFlags {
  std::string method = "exact";
  int n_max = 8;
  int radius = -1;
  int workers = 1;
  std::uint64_t budget = 50000000;

  void add(CLI::App* c) {
    c->add_option("--method", method, "exact, greedy, anneal or spectral")
        ->check(CLI::IsMember({"exact", "greedy", "anneal", "spectral"}));
    c->add_option("--n-max", n_max, "largest support size")->check(CLI::PositiveNumber);
    c->add_option("--radius", radius, "search ball radius for exact search (default n-max - 1)");
    c->add_option("--workers", workers, "threads for exact search")->check(CLI::PositiveNumber);
    c->add_option("--budget", budget, "node budget for exact search");
  }
  json to_json(const Globals& g) const {
    json o{{"method", method}, {"n_max", n_max}, {"radius", radius}, {"workers", workers}, {"budget", budget}};
    if (g.p) o["p"] = *g.p;
    if (g.seed) o["seed"] = *g.seed;
    return o;
  }
};

void warn(const json& j) {
  if (j.contains("warnings")) {
    for (const auto& w : j["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
  }
}

std::string pass(bool b) { return b ? "pass" : "FAIL"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Halo products: balls, isoperimetric profiles, lifts, decompositions, nets and embeddings"};
  app.set_version_flag("--version", std::string(halo_version()));
  app.require_subcommand(1);
  app.fallthrough();
  Globals G;
  app.add_option("--group", G.group, "group descriptor, e.g. \"shuffler(Z)\"");
  app.add_option("--p", G.p, "exponent p");
  app.add_option("--seed", G.seed, "seed for randomised methods");
  app.add_option("--budget-mem", G.budget_mem, "memory budget in bytes for ball enumeration");
  app.add_option("--out", G.out, "output file (directory for run)");

  std::function<void()> action;

  auto* ball = app.add_subcommand("ball", "enumerate a ball of the Cayley graph");
  int ball_radius = 2;
  ball->add_option("--radius", ball_radius)->check(CLI::NonNegativeNumber);
  ball->callback([&] {
    action = [&] {
      auto h = open_group(G);
      json o{{"radius", ball_radius}};
      if (G.budget_mem) o["budget_mem"] = *G.budget_mem;
      emit(G, call(halo_ball, h.get(), o).dump(2));
    };
  });

  auto* profile = app.add_subcommand("profile", "isoperimetric profile as CSV");
  ProfileFlags pf;
  pf.add(profile);
  std::string witness_file;
  profile->add_option("--witnesses", witness_file, "write witness JSON to this file");
  profile->callback([&] {
    action = [&] {
      auto h = open_group(G);
      json j = call(halo_profile, h.get(), pf.to_json(G));
      warn(j);
      if (!witness_file.empty()) std::ofstream(witness_file) << j["witnesses"].dump(2) << "\n";
      emit(G, j["csv"].get<std::string>());
    };
  });

  auto* folner = app.add_subcommand("folner", "Folner function value at a target");
  ProfileFlags ff;
  ff.add(folner);
  std::string target = "1";
  folner->add_option("--target", target, "target n, integer or a/b");
  folner->callback([&] {
    action = [&] {
      auto h = open_group(G);
      json o = ff.to_json(G);
      o["target"] = target;
      json j = call(halo_folner, h.get(), o);
      warn(j);
      emit(G, j.dump(2));
    };
  });

  auto* growth = app.add_subcommand("growth", "ball growth and lamp growth");
  int growth_n = 4, growth_r = 3;
  growth->add_option("--n-max", growth_n);
  growth->add_option("--radius", growth_r);
  growth->callback([&] {
    action = [&] {
      auto h = open_group(G);
      emit(G, call(halo_growth, h.get(), {{"n_max", growth_n}, {"radius", growth_r}}).dump(2));
    };
  });

  auto* lift = app.add_subcommand("lift", "lift a base function and compare gradient ratios");
  std::string lift_fn;
  std::vector<std::string> lift_ind;
  lift->add_option("--function", lift_fn, "JSON object from base elements to rationals, e.g. {\"0\": \"1/2\"}");
  lift->add_option("--indicator", lift_ind, "base elements of an indicator function")->delimiter(',');
  lift->callback([&] {
    action = [&] {
      auto h = open_group(G);
      json o = json::object();
      if (!lift_fn.empty()) o["function"] = json::parse(lift_fn);
      if (!lift_ind.empty()) o["indicator"] = lift_ind;
      if (G.p) o["ps"] = {*G.p};
      json j = call(halo_lift, h.get(), o);
      emit(G, j.dump(2));
    };
  });

  auto* decompose = app.add_subcommand("decompose", "write an element in the natural generators");
  std::string element;
  int random_length = 8;
  bool simplify = false;
  decompose->add_option("--element", element, "element as JSON");
  decompose->add_option("--random-length", random_length, "length of a random word when no element is given");
  decompose->add_flag("--simplify", simplify, "cancel adjacent inverse letters");
  decompose->callback([&] {
    action = [&] {
      auto h = open_group(G);
      json o{{"simplify", simplify}};
      if (!element.empty()) o["element"] = json::parse(element);
      else o["random"] = {{"length", random_length}, {"seed", G.seed.value_or(1)}};
      emit(G, call(halo_decompose, h.get(), o).dump(2));
    };
  });

  auto* net = app.add_subcommand("net", "separated net and commutativity constant");
  int net_r = 3, net_D = 1;
  net->add_option("--radius", net_r);
  net->add_option("--D", net_D);
  net->callback([&] {
    action = [&] {
      auto h = open_group(G);
      emit(G, call(halo_net, h.get(), {{"radius", net_r}, {"D", net_D}}).dump(2));
    };
  });

  auto* ystar = app.add_subcommand("ystar", "embedded lamplighter graph Y*");
  int y_r = 3, y_D = 1, y_s0 = 0;
  std::string y_edges;
  ystar->add_option("--radius", y_r);
  ystar->add_option("--D", y_D);
  ystar->add_option("--s0", y_s0, "index of the base generator s0");
  ystar->add_option("--edges", y_edges, "write the edge list to this file");
  ystar->callback([&] {
    action = [&] {
      auto h = open_group(G);
      json j = call(halo_ystar, h.get(), {{"radius", y_r}, {"D", y_D}, {"s0", y_s0}});
      if (!y_edges.empty()) std::ofstream(y_edges) << j["edges"].get<std::string>();
      j.erase("edges");
      emit(G, j.dump(2));
    };
  });

  auto* embed = app.add_subcommand("embed", "embeddings between halo products");
  std::string kind = "lamplighter";
  std::vector<std::int64_t> moduli{2};
  std::size_t pairs = 1000;
  int e_radius = 4;
  bool e_check = false;
  embed->add_option("--kind", kind)->check(CLI::IsMember({"wreath_in_shuffler", "shuffler_endomorphism", "lamplighter"}));
  embed->add_option("--moduli", moduli, "sublattice moduli for wreath_in_shuffler")->delimiter(',');
  embed->add_option("--pairs", pairs);
  embed->add_option("--radius", e_radius);
  embed->add_flag("--check", e_check, "print pass/fail per property");
  int embed_exit = 0;
  embed->callback([&] {
    action = [&] {
      auto h = open_group(G);
      json o{{"kind", kind}, {"moduli", moduli}, {"pairs", pairs}, {"radius", e_radius}, {"seed", G.seed.value_or(1)}};
      json j = call(halo_embed_check, h.get(), o);
      if (!e_check) {
        emit(G, j.dump(2));
        return;
      }
      std::string s = j["name"].get<std::string>() + "\n";
      s += "identity: " + pass(j["identity"]) + "\n";
      s += "homomorphism: " + pass(j["homomorphism"]) + " (" + std::to_string(j["pairs"].get<std::size_t>()) + " pairs)";
      if (!j["homomorphism"].get<bool>()) s += " counterexample: " + j["counterexample"].get<std::string>();
      s += "\ninjective: " + pass(j["injective"]) + " (" + std::to_string(j["elements"].get<std::size_t>()) + " elements)\n";
      if (!j["outside_image"].is_null()) s += "not surjective: " + j["outside_image"].get<std::string>() + " has no preimage\n";
      emit(G, s);
      if (!j["identity"].get<bool>() || !j["homomorphism"].get<bool>() || !j["injective"].get<bool>()) embed_exit = 1;
    };
  });

  auto* bounds = app.add_subcommand("bounds", "fit profile values against bound expressions");
  ProfileFlags bf;
  bf.add(bounds);
  std::vector<std::string> bound_exprs;
  std::vector<int> dilations{1};
  std::vector<double> phi_xs;
  bounds->add_option("--bound", bound_exprs, "bound expression in x (default: standard bounds)");
  bounds->add_option("--dilations", dilations, "argument dilations K")->delimiter(',');
  bounds->add_option("--phi-inverse", phi_xs, "also evaluate phi^-1 at these x")->delimiter(',');
  bounds->callback([&] {
    action = [&] {
      auto h = open_group(G);
      json o = bf.to_json(G);
      if (!bound_exprs.empty()) o["bounds"] = bound_exprs;
      o["dilations"] = dilations;
      if (!phi_xs.empty()) o["phi_inverse"] = phi_xs;
      json j = call(halo_bounds, h.get(), o);
      warn(j);
      std::string s = j["csv"].get<std::string>();
      if (j.contains("phi_inverse")) {
        s += "\nx,phi_inverse,y_ln_y_over_ln_x\n";
        for (const auto& r : j["phi_inverse"]) {
          s += r["x"].dump() + "," + r["phi_inverse"].dump() + "," + r["y_ln_y_over_ln_x"].dump() + "\n";
        }
      }
      emit(G, s);
    };
  });

  auto* run = app.add_subcommand("run", "run an experiment config into --out");
  std::string config;
  run->add_option("config", config, "JSON or key = value config file")->required()->check(CLI::ExistingFile);
  run->callback([&] {
    action = [&] {
      if (G.out.empty()) {
        std::cerr << "error: run needs --out DIR\n";
        throw Failure{HALO_ERR_CONTRACT};
      }
      char* m = nullptr;
      check(halo_run_experiment(config.c_str(), G.out.c_str(), &m));
      json j = json::parse(take(m));
      warn(j);
      std::cout << "wrote " << G.out << " (" << j["files"].size() << " files)\n";
    };
  });

  CLI11_PARSE(app, argc, argv);
  try {
    if (action) action();
  } catch (const Failure& f) {
    return static_cast<int>(f.status) + 1;
  } catch (const json::exception& e) {
    std::cerr << "error: bad JSON argument: " << e.what() << "\n";
    return 3;
  }
  return embed_exit;
}
