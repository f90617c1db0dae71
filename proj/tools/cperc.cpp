// Command-line front end. Exit codes: 0 when every check passes, 1 when a suite reports failures,
// 2 for usage or input errors.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "cperc/harness.hpp"

using namespace cperc;

namespace {

struct Output {
  std::string path = "-";
  std::string format = "json";
  bool force = false;
};

int finish(const ResultRecord& r, const Output& o) {
  emit(r, parse_format(o.format), o.path, o.force);
  return r.passed() ? 0 : 1;
}

void emit_json(const json& j, const Output& o) {
  if (o.path.empty() || o.path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  if (std::filesystem::exists(o.path) && !o.force) throw OutputExists("refusing to overwrite " + o.path);
  std::ofstream(o.path, std::ios::trunc) << j.dump(2) << '\n';
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constrained percolation toolkit"};
  app.require_subcommand(1);
  Output out;
  auto add_output = [&](CLI::App* sc) {
    sc->add_option("--out,-o", out.path, "output file, - for stdout");
    sc->add_option("--format,-f", out.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sc->add_flag("--force", out.force, "overwrite an existing output file");
  };

  std::string dom_kind = "box";
  int width = 2, height = 2;
  std::size_t cap = 25;
  auto* en = app.add_subcommand("enumerate", "exhaustive checks on a small domain");
  en->add_option("--domain", dom_kind, "box or torus")->check(CLI::IsMember({"box", "torus"}));
  en->add_option("--width", width)->required();
  en->add_option("--height", height)->required();
  en->add_option("--cap", cap, "largest site count accepted");
  add_output(en);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::string snapshots;
  auto* sa = app.add_subcommand("sample", "run a sampling experiment from a key = value config");
  sa->add_option("--config,-c", config, "experiment config file")->required()->check(CLI::ExistingFile);
  sa->add_option("--seed", seed, "override the config seed");
  sa->add_option("--samples", samples, "override the sample count");
  sa->add_option("--snapshots", snapshots, "directory for per-sample snapshots");
  add_output(sa);

  SurgerySuiteOptions so;
  bool no_flips = false;
  auto* su = app.add_subcommand("surgery-test", "exhaustive 3x3 extension, Monte Carlo merge and face-flip checks");
  su->add_flag("--fault", so.skip_opposite_rule, "drop the opposite-state rule to exercise failure reporting");
  su->add_option("--trials", so.merge_trials, "Monte Carlo merge trials");
  su->add_option("--seed", so.seed);
  su->add_flag("--no-face-flips", no_flips, "skip the exhaustive face-flip pairs");
  add_output(su);

  int lemma_side = 64;
  std::size_t lemma_count = 100;
  std::uint64_t lemma_seed = 1;
  auto* le = app.add_subcommand("lemmas", "structural checks on random valid configurations");
  le->add_option("--side", lemma_side);
  le->add_option("--count", lemma_count);
  le->add_option("--seed", lemma_seed);
  add_output(le);

  std::string snapshot;
  auto* an = app.add_subcommand("analyze", "clusters, contours and interfaces of a snapshot file");
  an->add_option("snapshot", snapshot)->required()->check(CLI::ExistingFile);
  add_output(an);

  std::string record;
  auto* cv = app.add_subcommand("convert", "re-render a JSON result record");
  cv->add_option("record", record)->required()->check(CLI::ExistingFile);
  add_output(cv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*en) {
      Domain d = dom_kind == "torus" ? Domain::torus(width, height) : Domain::planar_box(width, height);
      return finish(run_enumeration_oracle(d, cap), out);
    }
    if (*sa) {
      auto spec = ExperimentSpec::from_text(slurp(config));
      if (seed) spec.seed = *seed;
      if (samples) spec.samples = *samples;
      if (!snapshots.empty()) spec.snapshot_dir = snapshots;
      return finish(run_experiment(spec), out);
    }
    if (*su) {
      so.face_flips = !no_flips;
      return finish(run_surgery_suite(so), out);
    }
    if (*le) return finish(run_lemma_suite(lemma_side, lemma_count, lemma_seed), out);
    if (*an) {
      std::ifstream in(snapshot);
      emit_json(analyze_snapshot(in), out);
      return 0;
    }
    if (*cv) return finish(ResultRecord::parse(slurp(record)), out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
