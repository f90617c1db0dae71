#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "constrained.hpp"
#include "lattice.hpp"
#include "models.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "surgery.hpp"
#include "topology.hpp"

namespace cperc {

inline constexpr const char* kVersion = "1.0.0";
using json = nlohmann::ordered_json;

// ---------------------------------------------------------------- experiment specs

enum class Model { Constrained, XorIsing, Dimer };
enum class Updater { HeatBath, Cluster };

inline std::string to_string(Model m) {
  switch (m) {
    case Model::Constrained: return "constrained";
    case Model::XorIsing: return "xor";
    case Model::Dimer: return "dimer";
  }
  return "?";
}

struct ExperimentSpec {
  Model model = Model::XorIsing;
  DomainKind kind = DomainKind::Torus;
  int width = 16;  // spin-lattice sides for xor, site-lattice sides otherwise
  int height = 16;
  Couplings couplings{kCriticalCoupling, kCriticalCoupling, 0};
  std::uint64_t seed = 1;
  std::size_t samples = 100;
  std::size_t burn_in = 0;  // 0 selects 10 L^2 sweeps
  std::size_t thin = 10;
  std::size_t mix_sweeps = 4;  // white-face sweeps per constrained sample
  bool cold_start = false;
  Updater updater = Updater::HeatBath;  // cluster sweeps need zero field
  int rmax = 8;
  double pc = kDefaultPc;
  std::set<std::string> analyses = {"clusters", "contours", "chi", "two_point", "crossing"};
  std::string snapshot_dir;

  bool wants(const std::string& a) const { return analyses.count(a) != 0; }

  std::size_t effective_burn_in() const {
    if (burn_in) return burn_in;
    std::size_t l = std::size_t(std::max(width, height));
    return 10 * l * l;
  }

  // Site-lattice domain the model lives on.
  Domain domain() const {
    if (model == Model::XorIsing) return Domain::torus(2 * width, 2 * height);
    return kind == DomainKind::Torus ? Domain::torus(width, height) : Domain::planar_box(width, height);
  }

  void validate() const {
    if (model != Model::Constrained && kind != DomainKind::Torus) throw InvalidInput("samplers run on tori only");
    if (model == Model::XorIsing && (width % 2 || height % 2 || width < 2 || height < 2))
      throw InvalidInput("xor spin lattice sides must be even and at least 2");
    domain();
    couplings.validate();
    if (model == Model::Dimer) DimerWeights::from_couplings(couplings).validate(1e-9);
    h0_from_pc(pc);
    if (thin == 0) throw InvalidInput("thin must be positive");
    if (updater == Updater::Cluster && (model != Model::XorIsing || couplings.h != 0 || couplings.jh < 0 || couplings.jv < 0))
      throw InvalidInput("cluster updates need the xor model with zero field and nonnegative couplings");
    if (rmax < 1) throw InvalidInput("rmax must be positive");
    static const std::set<std::string> known = {"clusters", "contours", "chi", "two_point", "crossing", "lemmas"};
    for (const auto& a : analyses)
      if (!known.count(a)) throw InvalidInput("unknown analysis " + a);
  }

  json to_json() const {
    json j;
    j["model"] = to_string(model);
    j["domain"] = to_string(kind);
    j["width"] = width;
    j["height"] = height;
    j["jh"] = couplings.jh;
    j["jv"] = couplings.jv;
    j["h"] = couplings.h;
    j["phase"] = to_string(classify(couplings));
    j["seed"] = seed;
    j["samples"] = samples;
    j["burn_in"] = effective_burn_in();
    j["thin"] = thin;
    j["mix_sweeps"] = mix_sweeps;
    j["start"] = cold_start ? "cold" : "hot";
    j["updater"] = updater == Updater::Cluster ? "cluster" : "heatbath";
    j["rmax"] = rmax;
    j["pc"] = pc;
    j["h0"] = h0_from_pc(pc);
    j["analyses"] = std::vector<std::string>(analyses.begin(), analyses.end());
    return j;
  }

  // key = value lines; '#' starts a comment. jh and jv accept "critical", and jv accepts "partner".
  static ExperimentSpec parse(std::istream& is) {
    ExperimentSpec s;
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      auto trim = [](std::string t) {
        auto a = t.find_first_not_of(" \t\r"), b = t.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : t.substr(a, b - a + 1);
      };
      line = trim(line);
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
      std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
      if (k.empty() || v.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty key or value");
      if (!kv.emplace(k, v).second) throw ParseError("duplicate key " + k);
    }
    auto num = [&](const std::string& k, auto& out) {
      auto it = kv.find(k);
      if (it == kv.end()) return;
      std::istringstream vs(it->second);
      std::remove_reference_t<decltype(out)> v{};
      std::string rest;
      if (!(vs >> v) || (vs >> rest)) throw ParseError("bad value for " + k + ": " + it->second);
      out = v;
      kv.erase(it);
    };
    auto take = [&](const std::string& k) -> std::optional<std::string> {
      auto it = kv.find(k);
      if (it == kv.end()) return std::nullopt;
      std::string v = it->second;
      kv.erase(it);
      return v;
    };
    if (auto m = take("model")) {
      if (*m == "xor")
        s.model = Model::XorIsing;
      else if (*m == "dimer")
        s.model = Model::Dimer;
      else if (*m == "constrained")
        s.model = Model::Constrained;
      else
        throw ParseError("unknown model " + *m);
    }
    if (auto d = take("domain")) {
      if (*d == "torus")
        s.kind = DomainKind::Torus;
      else if (*d == "box")
        s.kind = DomainKind::PlanarBox;
      else
        throw ParseError("unknown domain " + *d);
    }
    if (auto st = take("start")) {
      if (*st != "hot" && *st != "cold") throw ParseError("start must be hot or cold");
      s.cold_start = *st == "cold";
    }
    if (auto u = take("updater")) {
      if (*u != "heatbath" && *u != "cluster") throw ParseError("updater must be heatbath or cluster");
      s.updater = *u == "cluster" ? Updater::Cluster : Updater::HeatBath;
    }
    if (auto a = take("analyses")) {
      s.analyses.clear();
      std::istringstream as(*a);
      std::string item;
      while (std::getline(as, item, ','))
        if (auto t = item.find_first_not_of(' '); t != std::string::npos) s.analyses.insert(item.substr(t, item.find_last_not_of(' ') - t + 1));
    }
    if (auto d = take("snapshot_dir")) s.snapshot_dir = *d;
    auto jh = take("jh"), jv = take("jv");
    num("width", s.width);
    num("height", s.height);
    if (auto l = take("size")) {
      std::istringstream ls(*l);
      if (!(ls >> s.width)) throw ParseError("bad size");
      s.height = s.width;
    }
    num("h", s.couplings.h);
    num("seed", s.seed);
    num("samples", s.samples);
    num("burn_in", s.burn_in);
    num("thin", s.thin);
    num("mix_sweeps", s.mix_sweeps);
    num("rmax", s.rmax);
    num("pc", s.pc);
    if (!kv.empty()) throw ParseError("unknown key " + kv.begin()->first);
    auto coupling = [](const std::string& v, double fallback) {
      if (v == "critical") return kCriticalCoupling;
      std::istringstream vs(v);
      double x;
      std::string rest;
      if (!(vs >> x) || (vs >> rest)) throw ParseError("bad coupling " + v);
      (void)fallback;
      return x;
    };
    if (jh) s.couplings.jh = coupling(*jh, s.couplings.jh);
    if (jv) {
      if (*jv == "partner")
        s.couplings.jv = critical_partner(s.couplings.jh);
      else
        s.couplings.jv = coupling(*jv, s.couplings.jv);
    } else if (jh) {
      s.couplings.jv = s.couplings.jh;
    }
    s.validate();
    return s;
  }

  static ExperimentSpec from_text(const std::string& t) {
    std::istringstream is(t);
    return parse(is);
  }
};

// ---------------------------------------------------------------- result records

struct ResultRecord {
  std::string suite;
  json spec = json::object();
  json aggregate = json::object();
  json samples = json::array();
  std::vector<std::string> failures;
  double elapsed = 0;
  std::string version = kVersion;
  std::string rng = Rng::algorithm;

  bool passed() const { return failures.empty(); }

  json to_json(bool timing = true) const {
    json j;
    j["suite"] = suite;
    j["version"] = version;
    j["rng"] = rng;
    j["spec"] = spec;
    j["aggregate"] = aggregate;
    j["samples"] = samples;
    j["failures"] = failures;
    j["passed"] = passed();
    if (timing) j["elapsed"] = elapsed;
    return j;
  }

  static ResultRecord from_json(const json& j) {
    ResultRecord r;
    try {
      r.suite = j.at("suite").get<std::string>();
      r.version = j.at("version").get<std::string>();
      r.rng = j.at("rng").get<std::string>();
      r.spec = j.at("spec");
      r.aggregate = j.at("aggregate");
      r.samples = j.at("samples");
      r.failures = j.at("failures").get<std::vector<std::string>>();
      r.elapsed = j.value("elapsed", 0.0);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad result record: ") + e.what());
    }
    return r;
  }

  static ResultRecord parse(const std::string& text) {
    try {
      return from_json(json::parse(text));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(e.what());
    }
  }

  // Equal apart from timing.
  bool same_results(const ResultRecord& o) const { return to_json(false) == o.to_json(false); }
  bool operator==(const ResultRecord& o) const { return same_results(o) && elapsed == o.elapsed; }
};

inline constexpr const char* kCsvHeader = "suite,scope,metric,value";

namespace detail {

inline void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool index_key = !it.key().empty() && std::isdigit(static_cast<unsigned char>(it.key()[0]));
      std::string name = prefix.empty() ? it.key() : index_key ? prefix + "[" + it.key() + "]" : prefix + "." + it.key();
      flatten(*it, name, out);
    }
  } else if (j.is_array()) {
    for (std::size_t k = 0; k < j.size(); ++k) flatten(j[k], prefix + "[" + std::to_string(k) + "]", out);
  } else {
    out.push_back({prefix, j.is_string() ? j.get<std::string>() : j.dump()});
  }
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace detail

// Long format: one row per scalar, nested names joined by '.' and '[k]'.
inline std::string to_csv(const ResultRecord& r, bool timing = true) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  auto rows = [&](const std::string& scope, const json& j) {
    std::vector<std::pair<std::string, std::string>> flat;
    detail::flatten(j, "", flat);
    for (auto& [k, v] : flat)
      os << detail::csv_field(r.suite) << ',' << scope << ',' << detail::csv_field(k) << ',' << detail::csv_field(v) << '\n';
  };
  rows("spec", r.spec);
  rows("aggregate", r.aggregate);
  for (std::size_t k = 0; k < r.samples.size(); ++k) rows("sample:" + std::to_string(k), r.samples[k]);
  for (std::size_t k = 0; k < r.failures.size(); ++k)
    os << detail::csv_field(r.suite) << ",failure," << k << ',' << detail::csv_field(r.failures[k]) << '\n';
  os << detail::csv_field(r.suite) << ",meta,version," << r.version << '\n';
  os << detail::csv_field(r.suite) << ",meta,rng," << r.rng << '\n';
  os << detail::csv_field(r.suite) << ",meta,passed," << (r.passed() ? "true" : "false") << '\n';
  if (timing) os << detail::csv_field(r.suite) << ",meta,elapsed," << json(r.elapsed).dump() << '\n';
  return os.str();
}

enum class Format { Json, Csv };

inline Format parse_format(const std::string& f) {
  if (f == "json") return Format::Json;
  if (f == "csv") return Format::Csv;
  throw InvalidInput("format must be json or csv");
}

inline std::string render(const ResultRecord& r, Format f) {
  return f == Format::Json ? r.to_json().dump(2) + "\n" : to_csv(r);
}

// Writes to path, or to stdout for "" and "-"; an existing file is kept unless force is set.
inline void emit(const ResultRecord& r, Format f, const std::string& path, bool force = false) {
  std::string text = render(r, f);
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  if (std::filesystem::exists(path) && !force) throw OutputExists("refusing to overwrite " + path);
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw InvalidInput("cannot open " + path);
  os << text;
}

// ---------------------------------------------------------------- lemma checks

struct LemmaTally {
  std::size_t configs = 0;
  std::size_t contours = 0;
  std::size_t cin = 0;        // interface meets a contour
  std::size_t rl = 0;         // fringe not one monochromatic cluster, or V(E_I) != F_I, or wrong shape
  std::size_t structure = 0;  // interface degree above 2, or a path on a torus
  std::size_t io = 0;         // crossed edge parity disagrees with endpoint states
  std::size_t l24 = 0;        // contours fail to separate the clusters they bound
  std::size_t total() const { return cin + rl + structure + io + l24; }
  void add(const LemmaTally& o) {
    configs += o.configs;
    contours += o.contours;
    cin += o.cin;
    rl += o.rl;
    structure += o.structure;
    io += o.io;
    l24 += o.l24;
  }
  json to_json() const {
    return json{{"configs", configs}, {"contours", contours}, {"cin", cin}, {"rl", rl},
                {"structure", structure}, {"io", io}, {"l24", l24}, {"violations", total()}};
  }
};

// Every contour is checked for cin, rl and structure; l24 is checked on the full contour set and on up to
// `single_contours` individual contours (all when negative).
inline LemmaTally check_lemmas(const SiteConfig& w, int single_contours = -1) {
  LemmaTally t;
  t.configs = 1;
  const Domain& d = w.domain();
  auto cc = phi(w);
  auto cs = extract_contours(cc);
  auto lab = label_clusters(w);
  auto itfs = extract_interfaces(cs);
  t.contours = cs.contours.size();
  for (std::size_t k = 0; k < cs.contours.size(); ++k) {
    const auto& itf = itfs[k];
    if (itf.degree_violations) ++t.structure;
    if (interface_contour_intersections(cc, itf)) ++t.cin;
    for (const auto& comp : itf.components) {
      if (comp.kind == InterfaceKind::Path && d.is_torus()) ++t.structure;
      if (!check_fringe(d, comp, interface_fringe(d, comp), lab).ok()) ++t.rl;
    }
    if (single_contours < 0 || int(k) < single_contours)
      if (separation_mismatches(cc, cs.contours[k].edges)) ++t.l24;
  }
  if (separation_mismatches(cc, cc.present_edges())) ++t.l24;
  // A covered G-edge is crossed exactly when its endpoints differ; path parities follow by summing.
  for (std::size_t i = 0; i < d.site_count(); ++i)
    for (bool hor : {true, false}) {
      GEdge g{d.site(i), hor};
      if (!d.contains_edge(g) || !gedge_covered(d, g)) continue;
      if (gedge_crossed(cc, g) != (w.get(g.site) != w.get(g.other()))) ++t.io;
    }
  return t;
}

// Random fully covered paths on a box must cross contours with the parity of their endpoint states.
inline std::size_t check_path_parities(const SiteConfig& w, Rng& rng, int paths, int length) {
  const Domain& d = w.domain();
  if (d.is_torus()) return 0;
  std::size_t bad = 0;
  const SiteCoord steps[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (int p = 0; p < paths; ++p) {
    std::vector<SiteCoord> path{d.site(std::size_t(rng.below(d.site_count())))};
    for (int k = 0; k < length; ++k) {
      SiteCoord n = path.back() + steps[rng.below(4)];
      if (d.contains(n)) path.push_back(n);
    }
    auto r = crossing_parity(w, path);
    if (r.fully_covered && r.parity != (w.get(path.front()) != w.get(path.back()))) ++bad;
  }
  return bad;
}

// ---------------------------------------------------------------- per-sample statistics

namespace detail {

inline json histogram_json(const std::map<std::size_t, std::size_t>& h) {
  json j = json::object();
  for (auto [k, v] : h) j[std::to_string(k)] = v;
  return j;
}

inline void add_histogram(json& into, const json& h) {
  std::map<std::size_t, std::size_t> acc;
  for (auto it = into.begin(); it != into.end(); ++it) acc[std::stoul(it.key())] += it->get<std::size_t>();
  for (auto it = h.begin(); it != h.end(); ++it) acc[std::stoul(it.key())] += it->get<std::size_t>();
  into = histogram_json(acc);
}

}  // namespace detail

inline json cluster_stats(const ClusterLabeling& lab) {
  double n = double(lab.domain.site_count());
  double s2 = 0;
  for (const auto& c : lab.clusters) s2 += double(c.size) * double(c.size);
  std::size_t wrapping = 0;
  for (const auto& c : lab.clusters) wrapping += c.wraps;
  return json{{"largest_cluster_density", double(lab.largest_size()) / n},
              {"cluster_count", lab.count()},
              {"chi", s2 / n},
              {"origin_cluster_size", lab.clusters[std::size_t(lab.label(lab.domain.site(0)))].size},
              {"wrapping_clusters", wrapping}};
}

inline json contour_stats(const ContourConfig& cc) {
  auto cs = extract_contours(cc);
  std::map<std::size_t, std::size_t> hist;
  std::size_t longest = 0, wrapping = 0;
  for (const auto& c : cs.contours) {
    ++hist[c.length];
    longest = std::max(longest, c.length);
    wrapping += c.wraps;
  }
  return json{{"contour_count", cs.contours.size()},
              {"max_contour_length", longest},
              {"wrapping_contours", wrapping},
              {"contour_length_histogram", detail::histogram_json(hist)}};
}

inline json crossing_stats(const ContourConfig& cc) {
  if (!cc.domain().is_torus()) return json::object();
  auto ws = winding_sector(cc);
  return json{{"l1_row_odd", ws.l1_row}, {"l1_col_odd", ws.l1_col}, {"l2_row_odd", ws.l2_row}, {"l2_col_odd", ws.l2_col}};
}

struct SampleInput {
  ClusterLabeling clusters;
  ContourConfig contours;
};

inline json sample_stats(const SampleInput& in, const ExperimentSpec& spec) {
  json j = json::object();
  if (spec.wants("clusters") || spec.wants("chi")) {
    auto c = cluster_stats(in.clusters);
    if (spec.wants("clusters")) {
      j["largest_cluster_density"] = c["largest_cluster_density"];
      j["cluster_count"] = c["cluster_count"];
      j["wrapping_clusters"] = c["wrapping_clusters"];
    }
    if (spec.wants("chi")) {
      j["chi"] = c["chi"];
      j["origin_cluster_size"] = c["origin_cluster_size"];
    }
  }
  if (spec.wants("contours"))
    j.update(contour_stats(in.contours));
  if (spec.wants("crossing"))
    j.update(crossing_stats(in.contours));
  if (spec.wants("two_point")) j["two_point"] = two_point_connectivity(in.clusters, spec.rmax);
  return j;
}

inline SampleInput sample_input(const SpinField& xor_field) {
  return {label_clusters(as_site_config(xor_field)), contours_from_spins(xor_field)};
}
inline SampleInput sample_input(const SiteConfig& w) { return {label_clusters(w), phi(w)}; }

// Means and standard errors of scalar per-sample fields, summed histograms, averaged two-point curves.
inline json aggregate_samples(const json& samples) {
  json agg = json::object();
  if (samples.empty()) return agg;
  std::map<std::string, std::vector<double>> scal;
  std::vector<std::string> order;
  json hist = json::object();
  std::vector<double> tp;
  for (const auto& s : samples)
    for (auto it = s.begin(); it != s.end(); ++it) {
      if (it->is_number() || it->is_boolean()) {
        if (!scal.count(it.key())) order.push_back(it.key());
        scal[it.key()].push_back(it->is_boolean() ? double(it->get<bool>()) : it->get<double>());
      } else if (it.key() == "contour_length_histogram") {
        detail::add_histogram(hist, *it);
      } else if (it.key() == "two_point") {
        auto v = it->get<std::vector<double>>();
        if (tp.empty()) tp.assign(v.size(), 0.0);
        for (std::size_t r = 0; r < v.size(); ++r) tp[r] += v[r];
      }
    }
  for (const auto& k : order) {
    const auto& v = scal[k];
    double m = 0, q = 0;
    for (double x : v) m += x;
    m /= double(v.size());
    for (double x : v) q += (x - m) * (x - m);
    double se = v.size() > 1 ? std::sqrt(q / double(v.size() - 1) / double(v.size())) : 0.0;
    agg[k] = json{{"mean", m}, {"stderr", se}};
  }
  if (!hist.empty()) agg["contour_length_histogram"] = hist;
  if (!tp.empty()) {
    for (auto& x : tp) x /= double(samples.size());
    agg["two_point"] = tp;
  }
  return agg;
}

// Exponential fit of the averaged two-point curve over r >= 1 where it is positive.
inline json two_point_fit(const std::vector<double>& tp) {
  std::vector<double> xs, ys;
  for (std::size_t r = 1; r < tp.size(); ++r)
    if (tp[r] > 0) {
      xs.push_back(double(r));
      ys.push_back(std::log(tp[r]));
    }
  if (xs.size() < 2) return json{{"points", xs.size()}};
  auto f = fit_line(xs, ys);
  return json{{"points", xs.size()}, {"rate", -f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
}

namespace detail {

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

inline std::string snapshot_path(const ExperimentSpec& s, std::size_t k) {
  std::ostringstream os;
  os << s.snapshot_dir << "/sample_" << std::setw(5) << std::setfill('0') << k << ".txt";
  return os.str();
}

inline void prepare_snapshot_dir(const ExperimentSpec& s) {
  if (!s.snapshot_dir.empty()) std::filesystem::create_directories(s.snapshot_dir);
}

template <class Writer>
void write_snapshot(const ExperimentSpec& s, std::size_t k, Writer&& w) {
  if (s.snapshot_dir.empty()) return;
  std::ofstream os(snapshot_path(s, k), std::ios::trunc);
  if (!os) throw InvalidInput("cannot write snapshot in " + s.snapshot_dir);
  w(os);
}

}  // namespace detail

// ---------------------------------------------------------------- experiments

inline ResultRecord run_xor_experiment(const ExperimentSpec& spec) {
  if (spec.model != Model::XorIsing) throw InvalidInput("spec is not an xor experiment");
  spec.validate();
  detail::Stopwatch sw;
  detail::prepare_snapshot_dir(spec);
  ResultRecord r;
  r.suite = "xor";
  r.spec = spec.to_json();
  Rng rng(spec.seed);
  Domain d = spec.domain();
  IsingState s1(d, spec.couplings), s2(d, spec.couplings);
  if (!spec.cold_start) {
    randomize(s1.spins, rng);
    randomize(s2.spins, rng);
  }
  auto advance = [&](IsingState& st, std::size_t n) {
    if (spec.updater == Updater::Cluster)
      cluster_sweep(st, rng, n);
    else
      ising_sweep(st, rng, n);
  };
  advance(s1, spec.effective_burn_in());
  advance(s2, spec.effective_burn_in());
  for (std::size_t k = 0; k < spec.samples; ++k) {
    advance(s1, spec.thin);
    advance(s2, spec.thin);
    SpinField x = xor_compose(s1.spins, s2.spins);
    detail::write_snapshot(spec, k, [&](std::ostream& os) { write_spin_field(os, x); });
    json sj = sample_stats(sample_input(x), spec);
    sj["magnetization_1"] = s1.spins.magnetization();
    sj["magnetization_2"] = s2.spins.magnetization();
    r.samples.push_back(sj);
  }
  r.aggregate = aggregate_samples(r.samples);
  if (r.aggregate.contains("two_point")) r.aggregate["two_point_fit"] = two_point_fit(r.aggregate["two_point"].get<std::vector<double>>());
  r.elapsed = sw.seconds();
  return r;
}

inline ResultRecord run_dimer_experiment(const ExperimentSpec& spec) {
  if (spec.model != Model::Dimer) throw InvalidInput("spec is not a dimer experiment");
  spec.validate();
  detail::Stopwatch sw;
  detail::prepare_snapshot_dir(spec);
  ResultRecord r;
  r.suite = "dimer";
  r.spec = spec.to_json();
  DimerWeights w = DimerWeights::from_couplings(spec.couplings);
  r.spec["weights"] = json{{"even_h", w.even.h}, {"even_v", w.even.v}, {"odd_h", w.odd.h}, {"odd_v", w.odd.v}};
  Rng rng(spec.seed);
  Domain d = spec.domain();
  DimerConfig m = canonical_matching(d);
  auto sector0 = winding_sector(phi(m.type2));
  DimerMoveStats total = dimer_sweep(m, w, rng, spec.effective_burn_in());
  std::size_t drift = 0;
  for (std::size_t k = 0; k < spec.samples; ++k) {
    auto st = dimer_sweep(m, w, rng, spec.thin);
    total.proposed += st.proposed;
    total.accepted += st.accepted;
    if (!is_perfect_matching(m)) r.failures.push_back("perfect matching lost at sample " + std::to_string(k));
    detail::write_snapshot(spec, k, [&](std::ostream& os) { write_dimer(os, m); });
    json sj = sample_stats(sample_input(m.type2), spec);
    auto sector = winding_sector(phi(m.type2));
    sj["sector"] = sector.code();
    drift += !(sector == sector0);
    r.samples.push_back(sj);
  }
  r.aggregate = aggregate_samples(r.samples);
  r.aggregate["acceptance_rate"] = total.proposed ? double(total.accepted) / double(total.proposed) : 0.0;
  r.aggregate["initial_sector"] = sector0.code();
  r.aggregate["sector_drift"] = drift;
  if (r.aggregate.contains("two_point")) r.aggregate["two_point_fit"] = two_point_fit(r.aggregate["two_point"].get<std::vector<double>>());
  r.elapsed = sw.seconds();
  return r;
}

// Independent random valid configurations with optional lemma checks.
inline ResultRecord run_constrained_experiment(const ExperimentSpec& spec) {
  if (spec.model != Model::Constrained) throw InvalidInput("spec is not a constrained experiment");
  spec.validate();
  detail::Stopwatch sw;
  detail::prepare_snapshot_dir(spec);
  ResultRecord r;
  r.suite = "constrained";
  r.spec = spec.to_json();
  Rng rng(spec.seed);
  Domain d = spec.domain();
  LemmaTally lt;
  for (std::size_t k = 0; k < spec.samples; ++k) {
    SiteConfig w = random_valid_config(d, rng, spec.mix_sweeps);
    detail::write_snapshot(spec, k, [&](std::ostream& os) { write_site_config(os, w); });
    json sj = sample_stats(sample_input(w), spec);
    if (spec.wants("lemmas")) {
      auto t = check_lemmas(w, 4);
      lt.add(t);
      sj["lemma_violations"] = t.total();
    }
    r.samples.push_back(sj);
  }
  r.aggregate = aggregate_samples(r.samples);
  if (spec.wants("lemmas")) {
    r.aggregate["lemmas"] = lt.to_json();
    if (lt.total()) r.failures.push_back("lemma violations: " + std::to_string(lt.total()));
  }
  r.elapsed = sw.seconds();
  return r;
}

inline ResultRecord run_experiment(const ExperimentSpec& spec) {
  switch (spec.model) {
    case Model::XorIsing: return run_xor_experiment(spec);
    case Model::Dimer: return run_dimer_experiment(spec);
    case Model::Constrained: return run_constrained_experiment(spec);
  }
  throw InvalidInput("unknown model");
}

// ---------------------------------------------------------------- oracles and suites

inline ResultRecord run_enumeration_oracle(const Domain& d, std::size_t cap = 25) {
  detail::Stopwatch sw;
  ResultRecord r;
  r.suite = "enumerate";
  r.spec = json{{"domain", to_string(d.kind())}, {"width", d.width()}, {"height", d.height()}, {"cap", cap}};
  auto omega = enumerate_omega(d, cap);
  std::set<SiteConfig> set(omega.begin(), omega.end());
  std::map<ContourConfig, std::size_t> fibres;
  for (const auto& w : omega) ++fibres[phi(w)];
  std::size_t comps = constraint_components(d);
  std::size_t fibre = std::size_t(1) << comps;
  bool law = omega.size() == fibre * fibres.size();
  bool fibres_equal = true;
  for (auto& [cc, n] : fibres) fibres_equal = fibres_equal && n == fibre;
  bool closure = true, flips = true;
  std::size_t flip_count = 0;
  LemmaTally lt;
  for (const auto& w : omega) {
    closure = closure && set.count(theta(w));
    for (std::size_t k = 0; k < d.face_count(); ++k) {
      SiteCoord f = d.face_at(k);
      if (face_color(f) != FaceColor::White || !d.contains_face(f) || !white_face_monochromatic(w, f)) continue;
      ++flip_count;
      flips = flips && set.count(white_face_flip(w, FaceId(f)));
    }
    lt.add(check_lemmas(w));
  }
  r.aggregate["omega"] = omega.size();
  r.aggregate["phi_image"] = fibres.size();
  r.aggregate["constraint_components"] = comps;
  r.aggregate["two_to_one"] = omega.size() == 2 * fibres.size();
  r.aggregate["image_law"] = law && fibres_equal;
  r.aggregate["theta_closed"] = closure;
  r.aggregate["flips_checked"] = flip_count;
  r.aggregate["flips_valid"] = flips;
  r.aggregate["lemmas"] = lt.to_json();
  if (d.width() * d.height() <= 4) {
    json pats = json::array();
    for (const auto& w : omega) pats.push_back(to_text(w));
    r.aggregate["configs"] = pats;
  }
  if (!law || !fibres_equal) r.failures.push_back("fibre sizes differ from 2^components");
  if (!closure) r.failures.push_back("state exchange leaves the valid set");
  if (!flips) r.failures.push_back("a monochromatic white-face flip produced an invalid config");
  if (lt.total()) r.failures.push_back("lemma violations: " + std::to_string(lt.total()));
  r.elapsed = sw.seconds();
  return r;
}

struct SurgerySuiteOptions {
  bool skip_opposite_rule = false;  // deliberate fault for negative testing
  std::size_t merge_trials = 1000;
  std::uint64_t seed = 1;
  bool face_flips = true;
  std::size_t max_reported = 20;
};

inline const Domain& surgery_mc_box() {
  static const Domain d = Domain::planar_box(20, 20, {-10, -9});
  return d;
}

inline ResultRecord run_surgery_suite(const SurgerySuiteOptions& opt = {}) {
  detail::Stopwatch sw;
  ResultRecord r;
  r.suite = "surgery";
  r.spec = json{{"merge_trials", opt.merge_trials}, {"seed", opt.seed}, {"fault", opt.skip_opposite_rule},
                {"face_flips", opt.face_flips}};
  std::size_t total_fail = 0;
  auto report = [&](const std::string& m) {
    ++total_fail;
    if (r.failures.size() < opt.max_reported) r.failures.push_back(m);
  };
  ExtendOptions eo{!opt.skip_opposite_rule};
  std::size_t ext_fail = 0;
  std::map<int, std::size_t> by_k;
  for (unsigned bits = 0; bits < 4096; ++bits) {
    Ring12 rho{};
    for (std::size_t k = 0; k < 12; ++k) rho[k] = std::uint8_t((bits >> k) & 1);
    ++by_k[analyze_corners(rho).k];
    auto f = check_b33(rho, extend_b33(rho, eo));
    if (!f.empty()) {
      ++ext_fail;
      report("extend case " + std::to_string(bits) + ": " + f.front());
    }
  }
  json kd = json::object();
  for (auto [k, n] : by_k) kd[std::to_string(k)] = n;
  r.aggregate["extend_cases"] = 4096;
  r.aggregate["extend_failures"] = ext_fail;
  r.aggregate["double_corner_counts"] = kd;

  SurgeryBox box(9, 9);
  Rng rng(opt.seed);
  std::size_t merge_fail = 0, crossings = 0;
  for (std::size_t t = 0; t < opt.merge_trials; ++t) {
    auto pc = primal_from_contours(phi(random_valid_config(surgery_mc_box(), rng, 4)));
    crossings += boundary_crossing_parity(pc, box).count;
    try {
      auto out = merge_box(pc, box, eo);
      auto f = check_merge(pc, out, box);
      auto again = check_merge(out, merge_box(out, box, eo), box);
      f.insert(f.end(), again.begin(), again.end());
      if (!f.empty()) {
        ++merge_fail;
        report("merge trial " + std::to_string(t) + ": " + f.front());
      }
    } catch (const Error& e) {
      ++merge_fail;
      report("merge trial " + std::to_string(t) + ": " + e.what());
    }
  }
  r.aggregate["merge_trials"] = opt.merge_trials;
  r.aggregate["merge_failures"] = merge_fail;
  r.aggregate["mean_boundary_crossings"] = opt.merge_trials ? double(crossings) / double(opt.merge_trials) : 0.0;

  std::size_t pairs = 0, flip_fail = 0;
  if (opt.face_flips) {
    const auto& b33 = B33::box();
    for (unsigned bits = 0; bits < 4096; ++bits) {
      Ring12 rho{};
      for (std::size_t k = 0; k < 12; ++k) rho[k] = std::uint8_t((bits >> k) & 1);
      std::vector<PrimalContours> configs;
      for (unsigned x = 0; x < 16; ++x) {
        Inner4 in{};
        for (std::size_t k = 0; k < 4; ++k) in[k] = std::uint8_t((x >> k) & 1);
        configs.push_back(b33_contours(rho, in));
      }
      for (unsigned x = 0; x < 16; ++x)
        for (unsigned y = 0; y < 16; ++y) {
          ++pairs;
          auto seq = face_flip_reachability(configs[x], configs[y], b33);
          if (!seq || apply_face_flips(configs[x], *seq) != configs[y] || int(seq->size()) != std::popcount(x ^ y)) {
            ++flip_fail;
            report("face flip ring " + std::to_string(bits) + " pair " + std::to_string(x) + "," + std::to_string(y));
          }
        }
    }
  }
  r.aggregate["face_flip_pairs"] = pairs;
  r.aggregate["face_flip_failures"] = flip_fail;
  r.aggregate["cases"] = 4096 + opt.merge_trials + pairs;
  r.aggregate["failure_count"] = total_fail;
  r.elapsed = sw.seconds();
  return r;
}

// Lemma proxies over random configurations alternating between a torus and a box of the given side.
inline ResultRecord run_lemma_suite(int side, std::size_t count, std::uint64_t seed, std::size_t mix_sweeps = 4) {
  detail::Stopwatch sw;
  ResultRecord r;
  r.suite = "lemmas";
  r.spec = json{{"side", side}, {"count", count}, {"seed", seed}, {"mix_sweeps", mix_sweeps}};
  Rng rng(seed);
  Domain torus = Domain::torus(side, side), box = Domain::planar_box(side, side);
  LemmaTally lt;
  std::size_t path_bad = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const Domain& d = k % 2 ? box : torus;
    SiteConfig w = random_valid_config(d, rng, mix_sweeps);
    lt.add(check_lemmas(w, 2));
    path_bad += check_path_parities(w, rng, 4, side);
  }
  r.aggregate["lemmas"] = lt.to_json();
  r.aggregate["path_parity_failures"] = path_bad;
  if (lt.total() || path_bad) r.failures.push_back("lemma violations: " + std::to_string(lt.total() + path_bad));
  r.elapsed = sw.seconds();
  return r;
}

// ---------------------------------------------------------------- snapshot analysis

inline json analyze_config(const SiteConfig& w) {
  json out;
  out["kind"] = "percolation";
  out["domain"] = w.domain().describe();
  out["valid"] = bool(validate(w));
  auto lab = label_clusters(w);
  json cl = json::array();
  for (const auto& c : lab.clusters)
    cl.push_back(json{{"state", int(c.state)}, {"size", c.size}, {"touches_boundary", c.touches_boundary}, {"wraps", c.wraps}});
  out["clusters"] = cl;
  auto cc = phi(w);
  auto cs = extract_contours(cc);
  json co = json::array();
  for (const auto& c : cs.contours)
    co.push_back(json{{"grid", to_string(c.grid)}, {"length", c.length}, {"touches_boundary", c.touches_boundary}, {"wraps", c.wraps}});
  out["contours"] = co;
  json it = json::array();
  auto itfs = extract_interfaces(cs);
  for (std::size_t k = 0; k < itfs.size(); ++k) {
    json comps = json::array();
    for (const auto& comp : itfs[k].components) {
      auto f = interface_fringe(w.domain(), comp);
      auto chk = check_fringe(w.domain(), comp, f, lab);
      comps.push_back(json{{"kind", comp.kind == InterfaceKind::Cycle ? "cycle" : "path"},
                           {"length", comp.edges.size()},
                           {"fringe_sites", f.sites.size()},
                           {"fringe_ok", chk.ok()}});
    }
    it.push_back(json{{"contour", k}, {"components", comps}});
  }
  out["interfaces"] = it;
  out["summary"] = cluster_stats(lab);
  out["summary"].update(contour_stats(cc));
  return out;
}

inline json analyze_spins(const SpinField& s) {
  json out;
  out["kind"] = "ising";
  out["domain"] = s.domain().describe();
  out["magnetization"] = s.magnetization();
  auto in = sample_input(s);
  json cl = json::array();
  for (const auto& c : in.clusters.clusters)
    cl.push_back(json{{"state", c.state ? "+" : "-"}, {"size", c.size}, {"wraps", c.wraps}});
  out["clusters"] = cl;
  auto cs = extract_contours(in.contours);
  json co = json::array();
  for (const auto& c : cs.contours) co.push_back(json{{"grid", to_string(c.grid)}, {"length", c.length}, {"wraps", c.wraps}});
  out["contours"] = co;
  out["summary"] = cluster_stats(in.clusters);
  out["summary"].update(contour_stats(in.contours));
  return out;
}

inline json analyze_dimer(const DimerConfig& m) {
  json out = analyze_config(m.type2);
  out["kind"] = "dimer";
  out["perfect_matching"] = is_perfect_matching(m);
  out["sector"] = winding_sector(phi(m.type2)).code();
  return out;
}

// Dispatches on the header tag of a snapshot file.
inline json analyze_snapshot(std::istream& is) {
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  std::istringstream tag_stream(text);
  std::string tag;
  tag_stream >> tag;
  std::istringstream body(text);
  if (tag == "percolation") return analyze_config(read_site_config(body));
  if (tag == "ising") return analyze_spins(read_spin_field(body));
  if (tag == "dimer") return analyze_dimer(read_dimer(body));
  throw ParseError("unknown snapshot tag '" + tag + "'");
}

}  // namespace cperc
