// Command-line front end for the halfspace learning toolkit.
//
// Subcommands: ptas, kkms, abl, verify, density, signpoly, calibrate. Every
// subcommand reads an optional flat key-value JSON config (--config) and
// applies flag overrides on top (flag beats config beats built-in default).
// Reports are written atomically: the tool writes <out>.partial and renames
// on completion, so an interrupted run leaves only the clearly marked
// partial file. Exit codes: 0 success, 1 predicate/run failure, 2 usage
// error. HALFSPACE_PTAS_THREADS caps worker threads in the Monte Carlo and
// verification paths.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <halfspace/errors.hpp>
#include <halfspace/evaluation.hpp>
#include <halfspace/geometry.hpp>
#include <halfspace/localization.hpp>
#include <halfspace/polynomials.hpp>
#include <halfspace/ptas.hpp>
#include <halfspace/regression.hpp>

namespace {

using halfspace::UnitVector;
using nlohmann::json;

// ----- flat config handling ------------------------------------------------

// The config file is a single JSON object whose values are scalars (string,
// number, boolean). Flags land in the same map, so "merged" is the one source
// of truth each subcommand reads and each report echoes back.
class Config {
 public:
  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw halfspace::InvalidArgumentError("cannot open config file: " + path);
    json j = json::parse(in, nullptr, true, false);
    if (!j.is_object())
      throw halfspace::InvalidArgumentError("config must be a JSON object: " + path);
    for (const auto& [key, value] : j.items()) {
      if (value.is_object() || value.is_array())
        throw halfspace::InvalidArgumentError(
            "config must be flat key-value (offending key: " + key + ")");
      kv_[key] = value;
    }
  }

  void set(const std::string& key, json value) { kv_[key] = std::move(value); }
  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  double num(const std::string& key, double fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    if (!it->second.is_number())
      throw halfspace::InvalidArgumentError("config key '" + key + "' must be a number");
    return it->second.get<double>();
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    if (!it->second.is_number_integer())
      throw halfspace::InvalidArgumentError("config key '" + key + "' must be an integer");
    return it->second.get<std::int64_t>();
  }

  std::uint64_t uinteger(const std::string& key, std::uint64_t fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    if (!it->second.is_number_integer() ||
        (it->second.is_number_integer() && it->second.get<std::int64_t>() < 0 &&
         !it->second.is_number_unsigned()))
      throw halfspace::InvalidArgumentError("config key '" + key + "' must be a nonnegative integer");
    return it->second.get<std::uint64_t>();
  }

  std::string str(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    if (!it->second.is_string())
      throw halfspace::InvalidArgumentError("config key '" + key + "' must be a string");
    return it->second.get<std::string>();
  }

  bool flag(const std::string& key, bool fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    if (!it->second.is_boolean())
      throw halfspace::InvalidArgumentError("config key '" + key + "' must be a boolean");
    return it->second.get<bool>();
  }

  json to_json() const {
    json j = json::object();
    for (const auto& [key, value] : kv_) j[key] = value;
    return j;
  }

 private:
  std::map<std::string, json> kv_;
};

// Flag plumbing: every flag is declared as an optional; after parsing, the
// ones actually supplied overwrite the config map. This is the documented
// precedence (flag > config file > default) in one place.
struct FlagSet {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::int64_t> d;
  std::optional<double> eta, mu, eps, tau, gamma, theta, a;
  std::optional<std::string> noise, check;
  std::optional<double> flip_p;

  void attach_common(CLI::App& cmd) {
    cmd.add_option("--config", config_path, "flat key-value JSON config file");
    cmd.add_option("--seed", seed, "master RNG seed");
    cmd.add_option("--out", out, "output path (written as .partial, then renamed)");
  }

  Config merge() const {
    Config cfg;
    if (config_path) cfg.load_file(*config_path);
    if (seed) cfg.set("seed", *seed);
    if (out) cfg.set("out", *out);
    if (d) cfg.set("d", *d);
    if (eta) cfg.set("eta", *eta);
    if (mu) cfg.set("mu", *mu);
    if (eps) cfg.set("eps", *eps);
    if (tau) cfg.set("tau", *tau);
    if (gamma) cfg.set("gamma", *gamma);
    if (theta) cfg.set("theta", *theta);
    if (a) cfg.set("a", *a);
    if (noise) cfg.set("noise", *noise);
    if (check) cfg.set("check", *check);
    if (flip_p) cfg.set("flip_p", *flip_p);
    return cfg;
  }
};

// ----- output helpers ------------------------------------------------------

void write_atomic(const std::string& path, const std::string& content) {
  const std::string partial = path + ".partial";
  {
    std::ofstream out(partial, std::ios::binary);
    if (!out) throw halfspace::InvalidArgumentError("cannot write output file: " + partial);
    out << content;
  }
  std::filesystem::rename(partial, path);
}

void write_json_report(const std::string& path, const json& j) {
  write_atomic(path, j.dump(2) + "\n");
}

std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ----- shared synthetic-instance plumbing ----------------------------------

halfspace::NoiseModel make_noise_model(const Config& cfg, int d, std::uint64_t seed) {
  const UnitVector target =
      halfspace::sample_uniform_sphere(d, 1, cfg.uinteger("target_seed", seed + 1))[0];
  const std::string kind = cfg.str("noise", "rcn");
  if (kind == "realizable") return halfspace::NoiseModel::realizable(target);
  if (kind == "rcn")
    return halfspace::NoiseModel::rcn(target, cfg.num("flip_p", 0.05));
  if (kind == "band_flip")
    return halfspace::NoiseModel::band_flip(target, cfg.num("width", 0.3),
                                            cfg.num("rate", 0.5));
  throw halfspace::InvalidArgumentError(
      "noise must be one of realizable|rcn|band_flip, got '" + kind + "'");
}

// Best achievable halfspace error under the model (the target itself).
double model_opt(const halfspace::NoiseModel& model) {
  switch (model.kind()) {
    case halfspace::NoiseModel::Kind::realizable:
      return 0.0;
    case halfspace::NoiseModel::Kind::rcn:
      return model.flip_probability();
    case halfspace::NoiseModel::Kind::band_flip:
      return model.rate() * halfspace::strip_mass(model.dim(), model.width());
  }
  return 0.0;
}

json coords_json(const UnitVector& w) {
  json arr = json::array();
  for (int i = 0; i < w.dim(); ++i) arr.push_back(w.coords()[i]);
  return arr;
}

halfspace::PtasConfig ptas_config_from(const Config& cfg) {
  halfspace::PtasConfig pc;
  pc.constants.c_gamma = cfg.num("c_gamma", pc.constants.c_gamma);
  pc.constants.c_beta = cfg.num("c_beta", pc.constants.c_beta);
  pc.constants.c_r = cfg.num("c_r", pc.constants.c_r);
  pc.constants.alpha0 = cfg.num("alpha0", pc.constants.alpha0);
  pc.strip_samples = cfg.integer("strip_samples", pc.strip_samples);
  pc.max_features = cfg.integer("max_features", pc.max_features);
  pc.validation_size = cfg.integer("validation_size", pc.validation_size);
  pc.abl_draw_budget = cfg.integer("abl_draw_budget", pc.abl_draw_budget);
  pc.strip_draw_budget = cfg.integer("strip_draw_budget", pc.strip_draw_budget);
  pc.coin_flip_selection = cfg.flag("coin_flip_selection", pc.coin_flip_selection);
  pc.coin_seed = cfg.uinteger("coin_seed", pc.coin_seed);
  pc.auto_tune_localization = cfg.flag("auto_tune_localization", pc.auto_tune_localization);
  pc.localization.samples_per_round =
      cfg.integer("samples_per_round", pc.localization.samples_per_round);
  pc.localization.rounds = static_cast<int>(cfg.integer("rounds", pc.localization.rounds));
  pc.localization.hinge_iterations =
      static_cast<int>(cfg.integer("hinge_iterations", pc.localization.hinge_iterations));
  return pc;
}

// ----- subcommands ---------------------------------------------------------

int run_ptas(const Config& cfg) {
  const int d = static_cast<int>(cfg.integer("d", 8));
  const double eta = cfg.num("eta", 0.2);
  const double mu = cfg.num("mu", 0.5);
  const double eps = cfg.num("eps", 0.0);
  const std::uint64_t seed = cfg.uinteger("seed", 1);
  const std::int64_t test_samples = cfg.integer("test_samples", 100000);
  const halfspace::NoiseModel model = make_noise_model(cfg, d, seed);
  const double opt = model_opt(model);

  json report;
  report["config"] = cfg.to_json();
  report["opt"] = opt;
  bool pass = true;

  if (eps > 0.0) {
    // Approximation-ratio mode: enumerate noise-target candidates and pick by
    // validation error; the guarantee is (1+mu)*opt + eps up to MC noise.
    int counter = 0;
    const auto learner = [&](double eta_k) -> halfspace::ClassifierFn {
      halfspace::LabelOracle oracle(model, seed + 1000 + static_cast<std::uint64_t>(counter++));
      halfspace::PtasResult res = halfspace::ptas_learn(oracle, eta_k, mu, ptas_config_from(cfg));
      return [res = std::move(res)](const UnitVector& x) { return res.predict(x); };
    };
    const halfspace::ApproxRatioResult wrapped = halfspace::noise_tolerance_to_approx_ratio(
        learner, eps, model, test_samples, cfg.uinteger("test_seed", seed + 7));
    const halfspace::ErrorEstimate held_out = halfspace::mc_error(
        wrapped.classifier, model, test_samples, cfg.uinteger("held_out_seed", seed + 8));
    report["wrapper"] = wrapped.report;
    report["held_out"] = held_out.to_json();
    const double bound = (1.0 + mu) * opt + eps + 3.0 * held_out.std_error;
    report["bound"] = bound;
    pass = held_out.mean <= bound;
  } else {
    halfspace::LabelOracle oracle(model, seed);
    const halfspace::PtasResult res = halfspace::ptas_learn(oracle, eta, mu, ptas_config_from(cfg));
    const halfspace::ErrorEstimate held_out = halfspace::mc_error(
        [&res](const UnitVector& x) { return res.predict(x); }, model, test_samples,
        cfg.uinteger("test_seed", seed + 7));
    report["ptas"] = res.report;
    report["held_out"] = held_out.to_json();
    report["bound"] = eta + 3.0 * held_out.std_error;
    pass = held_out.mean <= eta + 3.0 * held_out.std_error;
  }
  report["pass"] = pass;
  write_json_report(cfg.str("out", "ptas_report.json"), report);
  std::printf("%s held-out %.17g bound %.17g -> %s\n", eps > 0.0 ? "wrapper" : "ptas",
              report["held_out"]["mean"].get<double>(), report["bound"].get<double>(),
              pass ? "pass" : "FAIL");
  return pass ? 0 : 1;
}

int run_kkms(const Config& cfg) {
  const std::uint64_t seed = cfg.uinteger("seed", 1);
  const int degree = static_cast<int>(cfg.integer("degree", 7));
  halfspace::L1SolverOptions solver;
  solver.feature_cap = cfg.integer("max_features", solver.feature_cap);

  json report;
  report["config"] = cfg.to_json();

  const std::string data = cfg.str("data", "");
  if (!data.empty()) {
    // Train on a user-supplied CSV; no model is known, so the report carries
    // in-sample quantities only and there is no predicate to fail.
    const halfspace::LabeledSample sample = halfspace::read_samples_csv(data);
    const halfspace::PolynomialClassifier clf = halfspace::kkms_learn(sample, degree, solver);
    report["train_error"] = halfspace::empirical_01_error(clf, sample);
    report["train_l1_loss"] = halfspace::mean_l1_loss(clf.poly, sample);
    report["threshold"] = clf.threshold;
    report["n"] = static_cast<std::int64_t>(sample.size());
    report["pass"] = true;
    write_json_report(cfg.str("out", "kkms_report.json"), report);
    std::printf("kkms train error %.17g on %zu rows\n",
                report["train_error"].get<double>(), sample.size());
    return 0;
  }

  const int d = static_cast<int>(cfg.integer("d", 4));
  const std::int64_t n = cfg.integer("n", 5000);
  const halfspace::NoiseModel model = make_noise_model(cfg, d, seed);
  halfspace::LabelOracle oracle(model, seed);
  std::vector<UnitVector> pts;
  std::vector<double> labels;
  pts.reserve(n);
  labels.reserve(n);
  for (std::int64_t i = 0; i < n; ++i) {
    auto [x, y] = oracle.draw_labeled();
    pts.push_back(x);
    labels.push_back(y);
  }
  const halfspace::LabeledSample sample(std::move(pts), std::move(labels));
  const halfspace::PolynomialClassifier clf = halfspace::kkms_learn(sample, degree, solver);
  const halfspace::ErrorEstimate held_out = halfspace::mc_error(
      [&clf](const UnitVector& x) { return clf.predict(x); }, model,
      cfg.integer("test_samples", 100000), cfg.uinteger("test_seed", seed + 7));
  report["train_error"] = halfspace::empirical_01_error(clf, sample);
  report["held_out"] = held_out.to_json();
  report["opt"] = model_opt(model);
  report["threshold"] = clf.threshold;

  // Optional predicate: a caller-declared held-out error ceiling.
  const double bound = cfg.num("error_bound", 0.0);
  const bool pass = bound <= 0.0 || held_out.mean <= bound;
  report["pass"] = pass;
  write_json_report(cfg.str("out", "kkms_report.json"), report);
  std::printf("kkms held-out %.17g (opt %.17g) -> %s\n", held_out.mean,
              report["opt"].get<double>(), pass ? "pass" : "FAIL");
  return pass ? 0 : 1;
}

int run_abl(const Config& cfg) {
  const int d = static_cast<int>(cfg.integer("d", 10));
  const double eta = cfg.num("eta", 0.1);
  const std::uint64_t seed = cfg.uinteger("seed", 1);
  const halfspace::NoiseModel model = make_noise_model(cfg, d, seed);
  halfspace::LabelOracle oracle(model, seed);

  halfspace::BandScheduleConfig loc;
  loc.rounds = static_cast<int>(cfg.integer("rounds", loc.rounds));
  loc.initial_band = cfg.num("initial_band", loc.initial_band);
  loc.shrink = cfg.num("shrink", loc.shrink);
  loc.samples_per_round = cfg.integer("samples_per_round", loc.samples_per_round);
  loc.hinge_iterations = static_cast<int>(cfg.integer("hinge_iterations", loc.hinge_iterations));
  const UnitVector w = halfspace::abl_learn(oracle, eta, loc,
                                            cfg.integer("draw_budget", halfspace::kDefaultAblDrawBudget));

  const double theta = halfspace::angle(w, model.target());
  json report;
  report["config"] = cfg.to_json();
  report["angle"] = theta;
  report["disagreement"] = theta / std::acos(-1.0);
  report["labels_used"] = oracle.labels_used();
  report["draws_used"] = oracle.draws_used();
  report["w"] = coords_json(w);

  const double bound = cfg.num("error_bound", 0.0);
  const bool pass = bound <= 0.0 || theta / std::acos(-1.0) <= bound;
  report["pass"] = pass;
  write_json_report(cfg.str("out", "abl_report.json"), report);
  std::printf("abl disagreement %.17g with %" PRId64 " labels -> %s\n",
              report["disagreement"].get<double>(), oracle.labels_used(),
              pass ? "pass" : "FAIL");
  return pass ? 0 : 1;
}

int run_verify(const Config& cfg) {
  halfspace::LemmaSuiteConfig sc;
  sc.seed = cfg.uinteger("seed", sc.seed);
  sc.mc_samples = cfg.integer("mc_samples", sc.mc_samples);
  sc.lift_samples = cfg.integer("lift_samples", sc.lift_samples);
  sc.envelope_dimension_max =
      static_cast<int>(cfg.integer("envelope_dimension_max", sc.envelope_dimension_max));
  sc.envelope_grid = static_cast<int>(cfg.integer("envelope_grid", sc.envelope_grid));
  sc.band_grid = static_cast<int>(cfg.integer("band_grid", sc.band_grid));
  const std::string groups = cfg.str("groups", "");
  if (!groups.empty()) {
    std::stringstream ss(groups);
    std::string name;
    while (std::getline(ss, name, ',')) sc.groups.push_back(name);
  }

  const halfspace::LemmaReport report = halfspace::verify_lemma_suite(sc);
  const std::string out = cfg.str("out", "lemma_report.csv");
  write_atomic(out, report.to_csv());
  json j = report.to_json();
  j["config"] = cfg.to_json();
  write_json_report(std::filesystem::path(out).replace_extension(".json").string(), j);
  std::printf("verify: %" PRId64 " pass, %" PRId64 " fail, %" PRId64 " precondition skips\n",
              report.passed(), report.failed(), report.violations());
  return report.all_pass() ? 0 : 1;
}

// RFC-4180 two-column numeric CSV: header line, CRLF or LF endings, optional
// quoting with "" escapes. Every CSV this tool emits parses through here.
std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw halfspace::InvalidArgumentError("cannot open csv: " + path);
  std::vector<double> col0, col1;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char ch = line[i];
      if (quoted) {
        if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else if (ch == '"') {
          quoted = false;
        } else {
          field += ch;
        }
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        fields.push_back(std::move(field));
        field.clear();
      } else {
        field += ch;
      }
    }
    fields.push_back(std::move(field));
    if (fields.size() != 2)
      throw halfspace::InvalidArgumentError("expected two columns in " + path);
    if (header) {
      header = false;
      continue;
    }
    try {
      col0.push_back(std::stod(fields[0]));
      col1.push_back(std::stod(fields[1]));
    } catch (const std::exception&) {
      throw halfspace::InvalidArgumentError("non-numeric csv field in " + path);
    }
  }
  if (col0.empty()) throw halfspace::InvalidArgumentError("no data rows in " + path);
  return {std::move(col0), std::move(col1)};
}

int run_density(const Config& cfg) {
  // Check mode: re-parse an emitted CSV and report its trapezoid integral;
  // with integral_tol set this becomes the normalization predicate.
  const std::string check = cfg.str("check", "");
  if (!check.empty()) {
    const auto [ts, vals] = read_two_column_csv(check);
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i)
      integral += 0.5 * (vals[i] + vals[i + 1]) * (ts[i + 1] - ts[i]);
    const bool pass =
        !cfg.has("integral_tol") || std::abs(integral - 1.0) <= cfg.num("integral_tol", 0.0);
    std::printf("density check: %zu rows, integral %.17g -> %s\n", ts.size(), integral,
                pass ? "pass" : "FAIL");
    return pass ? 0 : 1;
  }

  const int d = static_cast<int>(cfg.integer("d", 3));
  const double gamma = cfg.num("gamma", 0.0);
  const double theta = cfg.num("theta", 0.0);
  const std::int64_t grid = cfg.integer("grid_points", 1001);
  if (grid < 2) throw halfspace::InvalidArgumentError("grid_points must be >= 2");

  // gamma + theta select the band-projected density; otherwise the plain
  // sphere marginal is tabulated.
  std::function<double(double)> pdf;
  if (gamma > 0.0 && theta > 0.0) {
    const halfspace::StripDensityParams params(d, gamma, theta);
    pdf = [params](double t) { return halfspace::strip_projected_density(params, t); };
  } else {
    pdf = [d](double t) { return halfspace::marginal_density(d, 1.0, t); };
  }

  std::string csv = "t,density\r\n";
  for (std::int64_t i = 0; i < grid; ++i) {
    const double t = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(grid - 1);
    csv += csv_number(t) + "," + csv_number(pdf(t)) + "\r\n";
  }
  write_atomic(cfg.str("out", "density.csv"), csv);
  std::printf("density: %" PRId64 " rows for d=%d%s\n", grid, d,
              gamma > 0.0 && theta > 0.0 ? " (band-projected)" : "");
  return 0;
}

int run_signpoly(const Config& cfg) {
  const double tau = cfg.num("tau", 0.1);
  const double a = cfg.num("a", 0.0);
  const double gamma = cfg.num("gamma", 0.1);

  // a > 0 builds the windowed sign approximation; otherwise just the booster.
  const halfspace::CertifiedPoly built =
      a > 0.0 ? halfspace::sign_approx_truncated(a, gamma, tau) : halfspace::booster_poly(tau);
  json report;
  report["config"] = cfg.to_json();
  report["certificate"] = built.certificate.to_json();
  report["poly"] = built.poly.to_json();
  report["pass"] = true;  // construction certifies or throws
  write_json_report(cfg.str("out", "signpoly.json"), report);
  std::printf("signpoly: degree %" PRId64 " sup error outside %.17g\n", built.poly.degree(),
              built.certificate.sup_error_outside);
  return 0;
}

int run_calibrate(const Config& cfg) {
  const std::string name = cfg.str("constant", "c_gamma");
  if (name != "c_gamma" && name != "c_beta" && name != "c_r" && name != "alpha0")
    throw halfspace::InvalidArgumentError(
        "constant must be one of c_gamma|c_beta|c_r|alpha0, got '" + name + "'");
  const double from = cfg.num("from", 0.5);
  const double to = cfg.num("to", 4.0);
  const std::int64_t steps = cfg.integer("steps", 8);
  if (steps < 1) throw halfspace::InvalidArgumentError("steps must be >= 1");
  if (!(from > 0.0) || !(to >= from))
    throw halfspace::InvalidArgumentError("need 0 < from <= to for the sweep");

  const int d = static_cast<int>(cfg.integer("d", 6));
  const double eta = cfg.num("eta", 0.15);
  const double mu = cfg.num("mu", 0.5);
  const std::uint64_t seed = cfg.uinteger("seed", 1);
  const std::int64_t test_samples = cfg.integer("test_samples", 20000);
  const halfspace::NoiseModel model = make_noise_model(cfg, d, seed);

  std::string csv = "value,error\r\n";
  for (std::int64_t k = 0; k < steps; ++k) {
    const double value =
        steps == 1 ? from
                   : from + (to - from) * static_cast<double>(k) / static_cast<double>(steps - 1);
    halfspace::PtasConfig pc = ptas_config_from(cfg);
    if (name == "c_gamma") pc.constants.c_gamma = value;
    if (name == "c_beta") pc.constants.c_beta = value;
    if (name == "c_r") pc.constants.c_r = value;
    if (name == "alpha0") pc.constants.alpha0 = value;
    double err = std::numeric_limits<double>::quiet_NaN();
    try {
      halfspace::LabelOracle oracle(model, seed + 1000 * static_cast<std::uint64_t>(k));
      const halfspace::PtasResult res = halfspace::ptas_learn(oracle, eta, mu, pc);
      err = halfspace::mc_error([&res](const UnitVector& x) { return res.predict(x); }, model,
                                test_samples, seed + 500 + static_cast<std::uint64_t>(k))
                .mean;
    } catch (const halfspace::Error&) {
      // an infeasible constant (e.g. alpha0 <= 1) records a NaN row rather
      // than aborting the sweep
    }
    csv += csv_number(value) + "," + csv_number(err) + "\r\n";
  }
  write_atomic(cfg.str("out", "calibrate.csv"), csv);
  std::printf("calibrate: swept %s over [%g, %g] in %" PRId64 " steps\n", name.c_str(), from, to,
              steps);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "halfspace: agnostic halfspace learning on the uniform sphere.\n"
      "Config precedence: flag > --config file > built-in default.\n"
      "HALFSPACE_PTAS_THREADS caps worker threads."};
  app.require_subcommand(1);

  FlagSet flags;
  int (*runner)(const Config&) = nullptr;

  CLI::App* ptas = app.add_subcommand(
      "ptas", "localization + band polynomial regression end to end (add --eps for the "
              "approximation-ratio wrapper)");
  flags.attach_common(*ptas);
  ptas->add_option("--d", flags.d, "ambient dimension");
  ptas->add_option("--eta", flags.eta, "target error under noise");
  ptas->add_option("--mu", flags.mu, "approximation-ratio slack (1+mu)");
  ptas->add_option("--eps", flags.eps, "additive slack; > 0 runs the wrapper");
  ptas->add_option("--noise", flags.noise, "realizable|rcn|band_flip");
  ptas->add_option("--flip-p", flags.flip_p, "rcn flip probability");
  ptas->callback([&] { runner = run_ptas; });

  CLI::App* kkms = app.add_subcommand("kkms", "polynomial l1 regression + sign threshold alone");
  flags.attach_common(*kkms);
  kkms->add_option("--d", flags.d, "ambient dimension");
  kkms->add_option("--noise", flags.noise, "realizable|rcn|band_flip");
  kkms->add_option("--flip-p", flags.flip_p, "rcn flip probability");
  kkms->callback([&] { runner = run_kkms; });

  CLI::App* abl = app.add_subcommand("abl", "margin-based localization alone");
  flags.attach_common(*abl);
  abl->add_option("--d", flags.d, "ambient dimension");
  abl->add_option("--eta", flags.eta, "target error under noise");
  abl->add_option("--noise", flags.noise, "realizable|rcn|band_flip");
  abl->add_option("--flip-p", flags.flip_p, "rcn flip probability");
  abl->callback([&] { runner = run_abl; });

  CLI::App* verify = app.add_subcommand("verify", "re-measure every advertised guarantee");
  flags.attach_common(*verify);
  verify->callback([&] { runner = run_verify; });

  CLI::App* density = app.add_subcommand(
      "density", "tabulate the sphere marginal (or band-projected) density to CSV");
  flags.attach_common(*density);
  density->add_option("--d", flags.d, "ambient dimension");
  density->add_option("--gamma", flags.gamma, "band half-width (with --theta)");
  density->add_option("--theta", flags.theta, "angle between band center and axis");
  density->add_option("--check", flags.check, "re-parse an emitted CSV, report its integral");
  density->callback([&] { runner = run_density; });

  CLI::App* signpoly = app.add_subcommand(
      "signpoly", "build + certify a sign approximation, emit coefficients and certificate");
  flags.attach_common(*signpoly);
  signpoly->add_option("--tau", flags.tau, "approximation tolerance");
  signpoly->add_option("--a", flags.a, "window half-width (0 = booster only)");
  signpoly->add_option("--gamma", flags.gamma, "dead-zone fraction");
  signpoly->callback([&] { runner = run_signpoly; });

  CLI::App* calibrate =
      app.add_subcommand("calibrate", "sweep one schedule constant, emit value,error CSV");
  flags.attach_common(*calibrate);
  calibrate->add_option("--d", flags.d, "ambient dimension");
  calibrate->add_option("--eta", flags.eta, "target error under noise");
  calibrate->add_option("--mu", flags.mu, "approximation-ratio slack (1+mu)");
  calibrate->callback([&] { runner = run_calibrate; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return runner(flags.merge());
  } catch (const halfspace::InvalidArgumentError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
