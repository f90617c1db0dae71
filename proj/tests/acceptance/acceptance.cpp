// Acceptance run: one PASS/FAIL line per criterion, nonzero exit when any fails.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "cperc/harness.hpp"

using namespace cperc;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double budget, const std::function<Verdict()>& body) {
  detail::Stopwatch sw;
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  double t = sw.seconds();
  if (budget > 0 && t > budget) {
    v.pass = false;
    v.detail += " [over the " + std::to_string(int(budget)) + " s budget]";
  }
  failures += !v.pass;
  std::printf("%s %d %s: %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), v.detail.c_str(), t);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<Domain> enumerable_domains(std::size_t cap, bool tori, int min_side = 1) {
  std::vector<Domain> out;
  for (int w = min_side; w <= int(cap); ++w)
    for (int h = min_side; w * h <= int(cap); ++h) {
      out.push_back(Domain::planar_box(w, h));
      if (tori && w % 2 == 0 && h % 2 == 0) out.push_back(Domain::torus(w, h));
    }
  return out;
}

Verdict constraint_oracle() {
  auto r = run_enumeration_oracle(Domain::planar_box(2, 2));
  std::set<std::string> got;
  for (const auto& c : r.aggregate["configs"]) got.insert(c.get<std::string>());
  // The six allowed corner patterns read as rows top to bottom.
  std::set<std::string> want;
  for (auto rows : {"00\n00\n", "11\n11\n", "11\n00\n", "00\n11\n", "01\n01\n", "10\n10\n"})
    want.insert(std::string("percolation box 2 2\n") + rows);
  bool six = r.aggregate["omega"] == 6 && got == want;
  std::size_t domains = 0, general = 0, literal = 0, literal_domains = 0;
  std::vector<std::string> literal_misses;
  for (const auto& d : enumerable_domains(16, true)) {
    auto e = run_enumeration_oracle(d);
    ++domains;
    general += e.aggregate["image_law"].get<bool>() && e.passed();
    bool one_component = e.aggregate["constraint_components"] == 1;
    literal_domains += one_component;
    literal += one_component && e.aggregate["two_to_one"].get<bool>();
    if (!e.aggregate["two_to_one"].get<bool>() && literal_misses.size() < 3) literal_misses.push_back(d.describe());
  }
  bool pass = six && general == domains && literal == literal_domains;
  return {pass, fmt("2x2 box has %d configs, patterns %s; |Omega| = 2^c |phi(Omega)| on %zu/%zu domains; "
                    "literal 2-to-1 on %zu/%zu single-component domains, fails where c > 1 (e.g. %s)",
                    r.aggregate["omega"].get<int>(), got == want ? "match" : "differ", general, domains, literal,
                    literal_domains, literal_misses.empty() ? "none" : literal_misses.front().c_str())};
}

SurgerySuiteOptions surgery_opts(std::size_t trials, bool flips) {
  SurgerySuiteOptions o;
  o.merge_trials = trials;
  o.face_flips = flips;
  o.seed = 4;
  return o;
}

Verdict exhaustive_extension() {
  auto r = run_surgery_suite(surgery_opts(0, false));
  auto n = r.aggregate["extend_failures"].get<std::size_t>();
  return {n == 0, fmt("%zu/4096 boundary cases fail", n)};
}

Verdict lemma_suite() {
  LemmaTally exhaustive;
  std::size_t domains = 0;
  // One-wide strips hold no black face, so they carry no contour to check.
  for (const auto& d : enumerable_domains(25, true, 2)) {
    ++domains;
    for (const auto& w : enumerate_omega(d)) exhaustive.add(check_lemmas(w));
  }
  auto s = run_lemma_suite(64, 10000, 3);
  auto lt = s.aggregate["lemmas"];
  std::size_t sampled = lt["violations"].get<std::size_t>() + s.aggregate["path_parity_failures"].get<std::size_t>();
  return {exhaustive.total() == 0 && sampled == 0,
          fmt("exhaustive: %zu configs on %zu domains, %zu violations; sampled: %zu configs, %zu contours, %zu violations",
              exhaustive.configs, domains, exhaustive.total(), lt["configs"].get<std::size_t>(),
              lt["contours"].get<std::size_t>(), sampled)};
}

Verdict merge_trials() {
  auto r = run_surgery_suite(surgery_opts(1000, false));
  auto n = r.aggregate["merge_failures"].get<std::size_t>();
  return {n == 0 && r.aggregate["merge_trials"] == 1000,
          fmt("%zu/1000 trials hold post-condition and bit-exact locality, mean %.1f boundary crossings",
              1000 - n, r.aggregate["mean_boundary_crossings"].get<double>())};
}

Verdict face_flips() {
  auto r = run_surgery_suite(surgery_opts(0, true));
  auto pairs = r.aggregate["face_flip_pairs"].get<std::size_t>();
  auto n = r.aggregate["face_flip_failures"].get<std::size_t>();
  return {n == 0 && pairs == 4096u * 256u, fmt("%zu same-boundary pairs, %zu unreachable", pairs, n)};
}

Verdict conversions() {
  double worst_rt = 0, worst_inv = 0, worst_f = 0;
  for (int k = 1; k <= 2000; ++k) {
    double j = 0.0025 * k;
    worst_rt = std::max(worst_rt, std::abs(coupling_from_weight(weight_from_coupling(j)) - j));
    double w = k / 2001.0;
    worst_rt = std::max(worst_rt, std::abs(weight_from_coupling(coupling_from_weight(w)) - w));
    if (j <= 3) {
      worst_inv = std::max(worst_inv, std::abs(critical_partner(critical_partner(j)) - j));
      worst_f = std::max(worst_f, std::abs(F(j, critical_partner(j)) - 1));
    }
  }
  double fstar = std::abs(F(kCriticalCoupling, kCriticalCoupling) - 1);
  int agree = 0, critical = 0;
  for (int a = 1; a <= 20; ++a)
    for (int b = 1; b <= 20; ++b) {
      double ta = std::numbers::pi / 2 * a / 21, tb = std::numbers::pi / 2 * b / 21;
      DimerWeights dw;
      dw.odd = {std::sin(ta), std::cos(ta)};
      dw.even = {std::sin(tb), std::cos(tb)};
      bool crit = classify(dw.couplings()) == Phase::Critical;
      critical += crit;
      agree += crit == dw.fully_invariant();
    }
  bool pass = worst_rt <= 1e-12 && fstar <= 1e-12 && worst_inv <= 1e-10 && agree == 400;
  return {pass, fmt("round trip %.1e, |F(J*,J*)-1| %.1e, partner involution %.1e, partner criticality %.1e, "
                    "critical iff invariant on %d/400 grid points (%d critical)",
                    worst_rt, fstar, worst_inv, worst_f, agree, critical)};
}

Verdict ising_micro() {
  const double j = 0.3;
  std::vector<double> p(16);
  double z = 0;
  for (int s = 0; s < 16; ++s) {
    auto sp = [&](int i, int k) { return ((s >> (2 * k + i)) & 1) ? 1 : -1; };
    double e = 0;
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) e -= j * sp(i, k) * (sp(1 - i, k) + sp(i, 1 - k));
    p[std::size_t(s)] = std::exp(-e);
    z += p[std::size_t(s)];
  }
  for (auto& v : p) v /= z;
  Rng rng(701);
  IsingState st(Domain::torus(4, 4), {j, j});
  std::vector<std::uint64_t> counts(16, 0);
  ising_sweep(st, rng, 1000);
  for (int t = 0; t < 100000; ++t) {
    ising_sweep(st, rng, 10);
    int s = 0;
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) s |= (st.spins.get(i, k) > 0) << (2 * k + i);
    ++counts[std::size_t(s)];
  }
  auto chi = chi_square(counts, p);
  return {chi.p_value > 0.01, fmt("10^6 heat-bath sweeps, chi2 = %.2f on %d dof, p = %.3f", chi.statistic, chi.dof, chi.p_value)};
}

Verdict dimer_micro() {
  Domain d = Domain::torus(2, 2);
  DimerWeights w = DimerWeights::from_couplings({0.3, 0.6});
  auto sector = winding_sector(phi(canonical_matching(d).type2));
  std::vector<DimerConfig> states;
  std::vector<double> p;
  double z = 0;
  for (const auto& m : enumerate_matchings(d))
    if (winding_sector(phi(m.type2)) == sector) {
      states.push_back(m);
      p.push_back(std::exp(dimer_log_weight(m, w)));
      z += p.back();
    }
  for (auto& v : p) v /= z;
  Rng rng(702);
  auto m = canonical_matching(d);
  std::vector<std::uint64_t> counts(states.size(), 0);
  dimer_sweep(m, w, rng, 1000);
  std::size_t lost = 0;
  for (int t = 0; t < 100000; ++t) {
    dimer_sweep(m, w, rng, 10);
    auto it = std::find(states.begin(), states.end(), m);
    if (it == states.end()) {
      ++lost;
      continue;
    }
    ++counts[std::size_t(it - states.begin())];
  }
  auto chi = chi_square(counts, p);
  return {chi.p_value > 0.01 && lost == 0,
          fmt("10^6 sweeps on the 2x2 torus, %zu states in the sector, chi2 = %.2f on %d dof, p = %.3f",
              states.size(), chi.statistic, chi.dof, chi.p_value)};
}

ExperimentSpec xor_spec(int side, double j, std::uint64_t seed, std::size_t samples) {
  ExperimentSpec s;
  s.model = Model::XorIsing;
  s.width = s.height = side;
  s.couplings = {j, j, 0};
  s.seed = seed;
  s.samples = samples;
  s.thin = 10;
  return s;
}

double mean_of(const ResultRecord& r, const char* key) { return r.aggregate[key]["mean"].get<double>(); }
double err_of(const ResultRecord& r, const char* key) { return r.aggregate[key]["stderr"].get<double>(); }

Verdict physics_proxies() {
  std::vector<double> rho, chi;
  std::string crit;
  for (int side : {16, 32, 64}) {
    auto s = xor_spec(side, kCriticalCoupling, 800 + std::uint64_t(side), 200);
    s.updater = Updater::Cluster;
    auto r = run_xor_experiment(s);
    rho.push_back(mean_of(r, "largest_cluster_density"));
    chi.push_back(mean_of(r, "chi"));
    crit += fmt("L=%d rho %.3f+-%.3f chi %.0f; ", side, rho.back(), err_of(r, "largest_cluster_density"), chi.back());
  }
  bool dec = rho[0] > rho[1] && rho[1] > rho[2];
  bool inc = chi[0] < chi[1] && chi[1] < chi[2];

  auto low = xor_spec(32, 0.7, 807, 100);
  low.cold_start = true;
  double low_rho = mean_of(run_xor_experiment(low), "largest_cluster_density");

  auto high = xor_spec(64, 0.1, 808, 200);
  high.rmax = 8;
  auto hr = run_xor_experiment(high);
  auto fit = hr.aggregate["two_point_fit"];
  double rate = fit.value("rate", 0.0), r2 = fit.value("r2", 0.0);

  bool pass = dec && inc && low_rho > 0.9 && rate > 0 && r2 > 0.9;
  return {pass, crit + fmt("density %s, chi %s; low-T rho %.4f; high-T rate %.3f R2 %.4f",
                           dec ? "decreasing" : "NOT decreasing", inc ? "increasing" : "NOT increasing", low_rho, rate, r2)};
}

Verdict determinism() {
  std::vector<std::string> bad;
  auto twice = [&](const std::string& name, const std::function<ResultRecord()>& f) {
    if (!f().same_results(f())) bad.push_back(name);
  };
  twice("xor", [] { return run_xor_experiment(xor_spec(16, 0.4, 9, 20)); });
  twice("xor-cluster", [] {
    auto s = xor_spec(16, kCriticalCoupling, 9, 20);
    s.updater = Updater::Cluster;
    return run_xor_experiment(s);
  });
  twice("dimer", [] { return run_dimer_experiment(ExperimentSpec::from_text("model = dimer\nsize = 16\nsamples = 20\n")); });
  twice("constrained", [] {
    return run_constrained_experiment(
        ExperimentSpec::from_text("model = constrained\ndomain = box\nsize = 24\nsamples = 20\nanalyses = clusters, contours, lemmas\n"));
  });
  twice("enumerate", [] { return run_enumeration_oracle(Domain::planar_box(4, 4)); });
  twice("surgery", [] { return run_surgery_suite(surgery_opts(100, false)); });
  twice("lemmas", [] { return run_lemma_suite(32, 50, 9); });
  std::string which = bad.empty() ? "none" : bad.front();
  return {bad.empty(), fmt("7 suites run twice, %zu differ (%s)", bad.size(), which.c_str())};
}

}  // namespace

int main() {
  criterion(1, "constraint oracle", 5, constraint_oracle);
  criterion(2, "exhaustive 3x3 extension", 60, exhaustive_extension);
  criterion(3, "lemma suite", 0, lemma_suite);
  criterion(4, "surgery merge", 0, merge_trials);
  criterion(5, "face-flip reachability", 0, face_flips);
  criterion(6, "conversions", 0, conversions);
  criterion(7, "Ising micro sampler", 120, ising_micro);
  criterion(7, "dimer micro sampler", 120, dimer_micro);
  criterion(8, "finite-size proxies", 0, physics_proxies);
  criterion(9, "determinism", 0, determinism);
  std::printf("%s: %d failing\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
