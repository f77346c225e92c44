// rectikernel: generate measures, compute permutation sums and multiscale
// reports, run verification suites.
//
// Exit codes: 0 ok, 2 usage or invalid spec, 3 I/O, 4 resource cap.

#include "rectikernel/generators.hpp"
#include "rectikernel/io.hpp"
#include "rectikernel/kernels.hpp"
#include "rectikernel/multiscale.hpp"
#include "rectikernel/parallel.hpp"
#include "rectikernel/statistics.hpp"
#include "rectikernel/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rectikernel;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitCap = 4;

struct ResourceCap : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Carries the exit code for failures that must not be reclassified.
struct ExitError : std::runtime_error {
  int code;
  ExitError(int c, const std::string& what) : std::runtime_error(what), code(c) {}
};

struct RunManifest {
  std::string command;
  std::string input_hash;
  json params = nullptr;
  std::uint64_t seed = 0;
  double seconds = 0.0;

  [[nodiscard]] json to_json() const {
    return {{"command", command},   {"input_hash", input_hash}, {"params", params},
            {"seed", seed},         {"seconds", seconds},       {"tool_version", RECTIKERNEL_VERSION},
            {"workers", worker_count()}};
  }
};

std::string command_echo(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out += ' ';
    out += argv[i];
  }
  return out;
}

// Loads a measure; any failure to read or parse it is an I/O error.
DiscreteMeasure load_input(const fs::path& path, std::string& hash) {
  try {
    const std::string text = read_text(path);
    hash = content_hash(text);
    return measure_from_csv(text);
  } catch (const IoError& e) {
    throw ExitError(kExitIo, e.what());
  } catch (const std::invalid_argument& e) {
    throw ExitError(kExitIo, path.string() + ": " + e.what());
  }
}

void emit(const json& doc, const std::optional<fs::path>& out) {
  const std::string text = doc.dump(2) + "\n";
  if (out) {
    write_text(*out, text);
  } else {
    std::cout << text;
  }
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

struct GenArgs {
  fs::path spec;
  fs::path out;
  std::optional<fs::path> manifest;
};

int cmd_gen(const GenArgs& a, const std::string& echo) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string spec_text;
  try {
    spec_text = read_text(a.spec);
  } catch (const IoError& e) {
    throw ExitError(kExitIo, e.what());
  }
  GeneratorSpec spec;
  try {
    spec = spec_from_json(json::parse(spec_text));
  } catch (const json::exception& e) {
    throw ExitError(kExitUsage, std::string("spec: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ExitError(kExitUsage, e.what());
  }
  const fs::path manifest_path = a.manifest.value_or(fs::path(a.out.string() + ".manifest.json"));
  if (fs::exists(manifest_path) && fs::equivalent(manifest_path, a.spec))
    throw ExitError(kExitUsage, "manifest path would overwrite the spec file");
  const DiscreteMeasure mu = generate(spec);
  save_measure(mu, a.out);

  RunManifest m{echo, content_hash(spec_text), spec_to_json(spec), spec.seed, elapsed(t0)};
  json doc = m.to_json();
  doc["output"] = a.out.string();
  doc["n_points"] = mu.size();
  emit(doc, manifest_path);
  return kExitOk;
}

struct StatsArgs {
  fs::path input;
  std::vector<std::string> kernels{"1"};
  std::optional<std::uint64_t> mc;
  std::optional<double> tau;
  std::optional<double> eps;
  std::optional<double> mv_eps;
  std::uint64_t seed = 0;
  std::size_t exact_cap = 5000;
  bool force_exact = false;
  std::optional<fs::path> out;
};

int cmd_stats(const StatsArgs& a, const std::string& echo) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string hash;
  const DiscreteMeasure mu = load_input(a.input, hash);

  std::vector<KernelId> kernels;
  for (const std::string& k : a.kernels) kernels.push_back(KernelId::parse(k));
  TripleSumOptions opts;
  opts.tau_restrict = a.tau;
  opts.eps_truncate = a.eps;
  opts.validate();

  const bool exact = !a.mc;
  if (exact && mu.size() > a.exact_cap && !a.force_exact)
    throw ResourceCap("exact sums requested for " + std::to_string(mu.size()) + " points (cap " +
                      std::to_string(a.exact_cap) + "); use --mc M or --force-exact");

  json result;
  result["n_points"] = mu.size();
  result["total_mass"] = mu.total_mass();
  result["options"] = to_json(opts);
  json p = json::object();
  for (const KernelId& k : kernels)
    p[k.name()] = to_json(exact ? triple_sum(k, mu, opts) : triple_sum_montecarlo(k, mu, opts, *a.mc, a.seed));
  result["p"] = p;
  result["c2"] = to_json(exact ? curvature_triple_sum(mu, opts)
                               : curvature_triple_sum_montecarlo(mu, opts, *a.mc, a.seed));
  if (a.mv_eps) {
    const MvResidual r = mv_identity_residual(mu, *a.mv_eps);
    result["mv"] = {{"eps", *a.mv_eps}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"residual", r.residual}};
  }

  RunManifest m{echo, hash, to_json(opts), a.seed, elapsed(t0)};
  emit({{"manifest", m.to_json()}, {"result", result}}, a.out);
  return kExitOk;
}

struct CoronaArgs {
  fs::path input;
  std::string profile = "desk";
  int jmin = 0;
  std::optional<int> jmax;
  std::uint64_t seed = 0;
  std::size_t exact_cap = 5000;
  bool no_sums = false;
  std::optional<fs::path> out;
  std::optional<fs::path> csv;
};

int cmd_corona(const CoronaArgs& a, const std::string& echo) {
  const auto t0 = std::chrono::steady_clock::now();
  const ParamsLedger params = ParamsLedger::from_name(a.profile);
  for (const std::string& v : params.violated_relations()) std::cerr << "warning: " << v << "\n";
  if (a.jmax && *a.jmax - a.jmin > kMaxGenerationSpan)
    throw ResourceCap("generation span " + std::to_string(*a.jmax - a.jmin) + " exceeds " +
                      std::to_string(kMaxGenerationSpan));

  std::string hash;
  const DiscreteMeasure mu = load_input(a.input, hash);
  ReportOptions opts;
  opts.j_min = a.jmin;
  opts.j_max = a.jmax;
  opts.offset_seed = a.seed;
  opts.seed = a.seed;
  opts.exact_cap = a.exact_cap;
  opts.triple_sums = !a.no_sums;
  const RectifiabilityReport report = rectifiability_report(mu, params, opts);

  if (a.csv) write_text(*a.csv, generations_to_csv(report.generations));
  RunManifest m{echo, hash, params.to_json(), a.seed, elapsed(t0)};
  emit({{"manifest", m.to_json()}, {"report", to_json(report)}}, a.out);
  return kExitOk;
}

int cmd_verify(const std::vector<std::string>& suites) {
  for (const std::string& s : suites)
    if (!verify::has_suite(s)) throw ExitError(kExitUsage, "unknown suite '" + s + "'");
  const std::vector<std::string>& names = suites.empty() ? verify::suite_names() : suites;
  int status = kExitOk;
  for (const std::string& s : names) {
    const verify::SuiteResult r = verify::run_suite(s);
    for (const std::string& line : verify::json_lines(r)) std::cout << line << "\n";
    std::cout.flush();
    if (const verify::Assertion* f = r.first_failure()) {
      std::cerr << "FAIL " << s << ": " << f->name << ": " << f->detail << "\n";
      status = 1;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Permutation kernels, curvature sums and multiscale rectifiability reports"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(RECTIKERNEL_VERSION));

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a point cloud from a JSON spec");
  g->add_option("spec", gen.spec, "GeneratorSpec JSON file")->required();
  g->add_option("-o,--out", gen.out, "Output CSV (x,y,w)")->required();
  g->add_option("--manifest", gen.manifest, "Manifest path (default: <out>.manifest.json)");

  StatsArgs stats;
  auto* s = app.add_subcommand("stats", "Permutation and curvature triple sums");
  s->add_option("input", stats.input, "Measure CSV")->required();
  s->add_option("-k,--kernel", stats.kernels, "Kernel: 1, 2, 3, ... or huovinen (repeatable)");
  auto* mc = s->add_option("--mc", stats.mc, "Monte Carlo with M samples")->check(CLI::PositiveNumber);
  s->add_flag("--exact", "Exact sums (default)")->excludes(mc);
  s->add_option("--tau", stats.tau, "Restrict to comparable triples");
  s->add_option("--eps", stats.eps, "Truncate sides below eps");
  s->add_option("--mv-eps", stats.mv_eps, "Also report the truncated Cauchy transform residual");
  s->add_option("--seed", stats.seed, "Monte Carlo seed");
  s->add_option("--exact-cap", stats.exact_cap, "Largest N for exact sums")->capture_default_str();
  s->add_flag("--force-exact", stats.force_exact, "Ignore the exact-sum cap");
  s->add_option("-o,--out", stats.out, "Output JSON (default: stdout)");

  CoronaArgs corona;
  auto* c = app.add_subcommand("corona", "Dyadic lattice, corona trees and rectifiability report");
  c->add_option("input", corona.input, "Measure CSV")->required();
  c->add_option("--profile", corona.profile, "Parameter profile")
      ->check(CLI::IsMember({"desk", "paper-faithful"}))
      ->capture_default_str();
  c->add_option("--jmin", corona.jmin, "Coarsest generation")->capture_default_str();
  c->add_option("--jmax", corona.jmax, "Finest generation");
  c->add_option("--seed", corona.seed, "Lattice offset and Monte Carlo seed");
  c->add_option("--exact-cap", corona.exact_cap, "Monte Carlo sums above this N")->capture_default_str();
  c->add_flag("--no-sums", corona.no_sums, "Skip the normalized triple sums");
  c->add_option("-o,--out", corona.out, "Output JSON (default: stdout)");
  c->add_option("--csv", corona.csv, "Per-generation CSV");

  std::vector<std::string> suites;
  auto* v = app.add_subcommand("verify", "Run verification suites; JSON lines on stdout");
  v->add_option("suite", suites, "Suite names (default: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  const std::string echo = command_echo(argc, argv);
  try {
    if (*g) return cmd_gen(gen, echo);
    if (*s) return cmd_stats(stats, echo);
    if (*c) return cmd_corona(corona, echo);
    if (*v) return cmd_verify(suites);
  } catch (const ExitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const ResourceCap& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCap;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return kExitCap;
  }
  return kExitUsage;
}
