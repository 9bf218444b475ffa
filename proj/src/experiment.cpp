#include "experiment.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/Core>
#include <gmp.h>

#include "descriptor.hpp"

namespace halo {

ProfileRun run_profile(const Group& g, const ProfileRequest& r) {
  if (r.n_max < 1) throw ContractViolation("n_max must be >= 1");
  const bool spectral = r.method == Method::Spectral;
  if (spectral && r.p != 2) throw ContractViolation("spectral method computes p = 2 only");
  if (!spectral && r.p != 1) throw ContractViolation(method_name(r.method) + " method computes p = 1 only");
  if (r.method == Method::Exact) {
    ExactOptions o;
    o.workers = r.workers;
    o.node_budget = r.node_budget;
    return profile_exact(g, r.n_max, r.radius < 0 ? std::max(1, r.n_max - 1) : r.radius, o);
  }
  if (r.method == Method::Anneal && !r.seed) throw ContractViolation("anneal needs a seed");
  HeuristicOptions h;
  if (r.seed) h.seed = *r.seed;
  return spectral ? profile_spectral(g, r.n_max, h) : profile_heuristic(g, r.n_max, r.method, h);
}

// ---------------------------------------------------------------- config

namespace {

nlohmann::json toml_value(std::string_view v, int line) {
  auto bad = [&](const std::string& m) -> ContractViolation {
    return ContractViolation("config line " + std::to_string(line) + ": " + m);
  };
  while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
  while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
  if (v.empty()) throw bad("missing value");
  if (v.front() == '[') {
    if (v.back() != ']') throw bad("unterminated array");
    nlohmann::json arr = nlohmann::json::array();
    std::string_view body = v.substr(1, v.size() - 2);
    std::size_t i = 0;
    while (i < body.size()) {
      // split on commas outside quotes and brackets
      std::size_t j = i;
      bool quoted = false;
      int depth = 0;
      for (; j < body.size(); ++j) {
        char c = body[j];
        if (c == '"') quoted = !quoted;
        if (quoted) continue;
        if (c == '[' || c == '(') ++depth;
        if (c == ']' || c == ')') --depth;
        if (c == ',' && depth == 0) break;
      }
      std::string_view item = body.substr(i, j - i);
      bool blank = item.find_first_not_of(" \t") == std::string_view::npos;
      if (!blank) arr.push_back(toml_value(item, line));
      i = j + 1;
    }
    return arr;
  }
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') throw bad("unterminated string");
    return std::string(v.substr(1, v.size() - 2));
  }
  if (v == "true") return true;
  if (v == "false") return false;
  try {
    return nlohmann::json::parse(v);
  } catch (const nlohmann::json::exception&) {
    throw bad("cannot read value '" + std::string(v) + "'");
  }
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::int64_t get_int(const nlohmann::json& j, const std::string& key, std::int64_t lo) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < lo) {
    throw ContractViolation("config." + key + ": expected an integer >= " + std::to_string(lo));
  }
  return v.get<std::int64_t>();
}

std::string get_string(const nlohmann::json& j, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_string()) throw ContractViolation("config." + key + ": expected a string");
  return v.get<std::string>();
}

}  // namespace

nlohmann::json parse_config(const std::string& text) {
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("config is not valid JSON", e.byte == 0 ? 0 : e.byte - 1);
    }
  }
  nlohmann::json j = nlohmann::json::object();
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = strip_comment(raw);
    if (s.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ContractViolation("config line " + std::to_string(line) + ": expected key = value");
    std::string key = s.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    if (key.empty()) throw ContractViolation("config line " + std::to_string(line) + ": empty key");
    if (j.contains(key)) throw ContractViolation("config line " + std::to_string(line) + ": duplicate key " + key);
    j[key] = toml_value(std::string_view(s).substr(eq + 1), line);
  }
  return j;
}

ExperimentConfig validate_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ContractViolation("config: expected an object");
  static const std::vector<std::string> known{"group", "method", "n_max", "p",      "seed",      "radius",
                                              "workers", "budget", "bounds", "dilations", "plot"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw ContractViolation("config." + it.key() + ": unknown field");
    }
  }
  for (const char* req : {"group", "method", "n_max"}) {
    if (!j.contains(req)) throw ContractViolation(std::string("config.") + req + ": required field missing");
  }
  ExperimentConfig c;
  c.group = get_string(j, "group");
  try {
    parse_descriptor(c.group);
  } catch (const ParseError& e) {
    throw ContractViolation("config.group: " + std::string(e.what()));
  }
  auto m = method_from_name(get_string(j, "method"));
  if (!m) throw ContractViolation("config.method: expected exact, greedy, anneal or spectral");
  auto& r = c.profile;
  r.method = *m;
  r.n_max = static_cast<int>(get_int(j, "n_max", 1));
  r.p = r.method == Method::Spectral ? 2 : 1;
  if (j.contains("p")) {
    const auto& p = j.at("p");
    if (!p.is_number()) throw ContractViolation("config.p: expected a number");
    double pv = p.get<double>();
    if (pv != r.p) {
      throw ContractViolation("config.p: method " + method_name(r.method) + " computes p = " + std::to_string(r.p));
    }
  }
  if (j.contains("seed")) r.seed = static_cast<std::uint64_t>(get_int(j, "seed", 0));
  if (r.method == Method::Anneal && !r.seed) throw ContractViolation("config.seed: required for method anneal");
  if (j.contains("radius")) r.radius = static_cast<int>(get_int(j, "radius", 0));
  if (j.contains("workers")) r.workers = static_cast<int>(get_int(j, "workers", 1));
  if (j.contains("budget")) r.node_budget = static_cast<std::uint64_t>(get_int(j, "budget", 1));
  if (j.contains("plot")) {
    if (!j["plot"].is_boolean()) throw ContractViolation("config.plot: expected true or false");
    c.plot = j["plot"].get<bool>();
  }
  if (j.contains("dilations")) {
    const auto& d = j["dilations"];
    if (!d.is_array() || d.empty()) throw ContractViolation("config.dilations: expected a non-empty array");
    c.dilations.clear();
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (!d[i].is_number_integer() || (d[i] != 1 && d[i] != 2 && d[i] != 4)) {
        throw ContractViolation("config.dilations[" + std::to_string(i) + "]: expected 1, 2 or 4");
      }
      c.dilations.push_back(d[i].get<int>());
    }
  }
  if (j.contains("bounds")) {
    const auto& b = j["bounds"];
    if (b.is_string() && b == "standard") {
      c.bounds = standard_bounds(*make_group(c.group));
    } else if (b.is_array()) {
      for (std::size_t i = 0; i < b.size(); ++i) {
        std::string path = "config.bounds[" + std::to_string(i) + "]";
        BoundSpec s;
        std::string expr;
        if (b[i].is_string()) {
          expr = b[i].get<std::string>();
          s.name = expr;
        } else if (b[i].is_object()) {
          if (!b[i].contains("expr") || !b[i]["expr"].is_string()) throw ContractViolation(path + ".expr: expected a string");
          expr = b[i]["expr"].get<std::string>();
          s.name = b[i].value("name", expr);
          if (b[i].contains("conditional")) {
            if (!b[i]["conditional"].is_boolean()) throw ContractViolation(path + ".conditional: expected true or false");
            s.conditional = b[i]["conditional"].get<bool>();
          }
        } else {
          throw ContractViolation(path + ": expected a string or an object");
        }
        try {
          s.expr = BoundExpr::parse(expr);
        } catch (const ParseError& e) {
          throw ContractViolation(path + ": " + e.what());
        }
        c.bounds.push_back(std::move(s));
      }
    } else {
      throw ContractViolation("config.bounds: expected \"standard\" or an array");
    }
  }
  return c;
}

// ---------------------------------------------------------------- output

namespace {

void write_file(const std::filesystem::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ContractViolation("cannot write " + p.string());
  out << data;
  if (!out) throw ContractViolation("write failed for " + p.string());
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ContractViolation("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string r;
  for (char c : s) {
    switch (c) {
      case '<': r += "&lt;"; break;
      case '>': r += "&gt;"; break;
      case '&': r += "&amp;"; break;
      case '"': r += "&quot;"; break;
      default: r += c;
    }
  }
  return r;
}

}  // namespace

std::string profile_svg(const std::string& title, const std::vector<ProfilePoint>& points, const BoundReport& report) {
  const double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  struct Series {
    std::string label, colour;
    bool dashed;
    std::vector<std::pair<double, double>> xy;
  };
  std::vector<Series> series;
  Series prof{"profile", "#000000", false, {}};
  for (const auto& p : points) {
    if (p.value > 0 && std::isfinite(p.value)) prof.xy.push_back({p.n, p.value});
  }
  series.push_back(prof);
  static const char* colours[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::size_t ci = 0;
  for (const auto& f : report.fits) {
    if (f.dilation != 1) continue;
    Series s{f.name + (f.conditional ? " (conditional)" : ""), colours[ci++ % 5], true, {}};
    for (std::size_t i = 0; i < f.ns.size(); ++i) {
      double v = f.values[i] - f.residuals[i];
      if (v > 0) s.xy.push_back({f.ns[i], v});
    }
    series.push_back(std::move(s));
  }
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (auto [x, y] : s.xy) {
      x0 = std::min(x0, std::log10(x));
      x1 = std::max(x1, std::log10(x));
      y0 = std::min(y0, std::log10(y));
      y1 = std::max(y1, std::log10(y));
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-9) x1 = x0 + 1;
  if (y1 - y0 < 1e-9) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double x) { return L + (std::log10(x) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (std::log10(y) - y0) / (y1 - y0) * (H - T - B); };

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W) + "\" height=\"" + fmt(H) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt(W / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + xml_escape(title) + "</text>\n";
  s += "<line x1=\"" + fmt(L) + "\" y1=\"" + fmt(H - B) + "\" x2=\"" + fmt(W - R) + "\" y2=\"" + fmt(H - B) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fmt(L) + "\" y1=\"" + fmt(T) + "\" x2=\"" + fmt(L) + "\" y2=\"" + fmt(H - B) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double lx = x0 + (x1 - x0) * i / 4, ly = y0 + (y1 - y0) * i / 4;
    double X = px(std::pow(10, lx)), Y = py(std::pow(10, ly));
    s += "<text x=\"" + fmt(X) + "\" y=\"" + fmt(H - B + 18) + "\" text-anchor=\"middle\" font-size=\"11\">" +
         fmt(std::pow(10, lx)) + "</text>\n";
    s += "<text x=\"" + fmt(L - 6) + "\" y=\"" + fmt(Y + 4) + "\" text-anchor=\"end\" font-size=\"11\">" +
         fmt(std::pow(10, ly)) + "</text>\n";
  }
  s += "<text x=\"" + fmt(W / 2) + "\" y=\"" + fmt(H - 10) + "\" text-anchor=\"middle\" font-size=\"12\">n (log scale)</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& sr = series[k];
    if (sr.xy.empty()) continue;
    s += "<polyline fill=\"none\" stroke=\"" + sr.colour + "\"" + (sr.dashed ? " stroke-dasharray=\"5,3\"" : "") +
         " points=\"";
    for (std::size_t i = 0; i < sr.xy.size(); ++i) {
      if (i) s += " ";
      s += fmt(px(sr.xy[i].first)) + "," + fmt(py(sr.xy[i].second));
    }
    s += "\"/>\n";
    s += "<text x=\"" + fmt(L + 10) + "\" y=\"" + fmt(T + 14 * (k + 1)) + "\" font-size=\"11\" fill=\"" + sr.colour +
         "\">" + xml_escape(sr.label) + "</text>\n";
  }
  return s + "</svg>\n";
}

nlohmann::json library_versions() {
  return {{"halo", kVersion},
          {"gmp", gmp_version},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                                "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"compiler", __VERSION__}};
}

ExperimentResult run_experiment_text(const std::string& text, const std::string& config_name,
                                     const std::filesystem::path& out_dir) {
  ExperimentConfig c = validate_config(parse_config(text));
  GroupPtr g = make_group(c.group);
  ProfileRun run = run_profile(*g, c.profile);

  std::filesystem::create_directories(out_dir);
  std::vector<std::string> files;
  auto emit = [&](const std::string& name, const std::string& data) {
    write_file(out_dir / name, data);
    files.push_back(name);
  };
  emit(config_name, text);
  emit("profile.csv", profile_csv(run.points));
  emit("witnesses.json", profile_witness_json(*g, run.points).dump(2) + "\n");
  BoundReport report;
  if (!c.bounds.empty()) {
    report = bound_report(run.points, c.bounds, c.dilations);
    emit("bounds.csv", bound_report_csv(report));
    emit("bounds.json", bound_report_json(report).dump(2) + "\n");
  }
  if (c.plot) emit("profile.svg", profile_svg(g->descriptor() + " (" + method_name(c.profile.method) + ")", run.points, report));

  bool complete = std::all_of(run.points.begin(), run.points.end(), [](const ProfilePoint& p) { return p.exact; });
  nlohmann::json m;
  m["group"] = g->descriptor();
  m["method"] = method_name(c.profile.method);
  m["p"] = c.profile.p;
  m["n_max"] = c.profile.n_max;
  m["seed"] = c.profile.seed ? nlohmann::json(*c.profile.seed) : nlohmann::json(nullptr);
  m["exact"] = complete;
  m["warnings"] = run.warnings;
  m["files"] = files;
  m["versions"] = library_versions();
  write_file(out_dir / "manifest.json", m.dump(2) + "\n");
  return {out_dir, m};
}

ExperimentResult run_experiment(const std::filesystem::path& config_file, const std::filesystem::path& out_dir) {
  std::string name = "config" + (config_file.has_extension() ? config_file.extension().string() : std::string(".toml"));
  return run_experiment_text(read_file(config_file), name, out_dir);
}

}  // namespace halo
