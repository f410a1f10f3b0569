#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <halfspace/geometry.hpp>
#include <halfspace/regression.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// The built tool, injected by the build system.
const std::string kCli = HALFSPACE_CLI_PATH;

struct Scratch {
  fs::path dir;
  Scratch() {
    static int next_id = 0;
    dir = fs::temp_directory_path() / ("halfspace_cli_scratch_" + std::to_string(next_id++));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run_cli(const std::string& args) {
  const std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  REQUIRE(raw != -1);
  return WEXITSTATUS(raw);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json slurp_json(const std::string& path) { return json::parse(slurp(path)); }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

}  // namespace

TEST_CASE("cli: usage errors exit 2, help exits 0") {
  CHECK(run_cli("definitely-not-a-subcommand") == 2);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("density --no-such-flag") == 2);
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("density --help") == 0);
  CHECK(run_cli("verify --config /no/such/file.json") == 2);

  Scratch s;
  write_file(s.path("nested.json"), R"({"d": 3, "inner": {"x": 1}})");
  CHECK(run_cli("density --config " + s.path("nested.json")) == 2);
  write_file(s.path("badtype.json"), R"({"d": "three"})");
  CHECK(run_cli("density --config " + s.path("badtype.json") + " --out " + s.path("x.csv")) == 2);
}

TEST_CASE("cli: density tabulation, normalization, and self re-parse") {
  Scratch s;
  const std::string rho = s.path("rho.csv");

  // d = 3 projects to the uniform density 1/2 on [-1, 1]
  CHECK(run_cli("density --d 3 --out " + rho) == 0);
  const std::string csv = slurp(rho);
  CHECK(csv.substr(0, 11) == "t,density\r\n");
  CHECK(csv.find("\r\n") != std::string::npos);
  CHECK(!fs::exists(rho + ".partial"));

  // the tool re-parses its own emission and certifies normalization
  CHECK(run_cli("density --check " + rho) == 0);
  {
    Scratch s2;
    write_file(s2.path("tol.json"), R"({"integral_tol": 1e-9})");
    CHECK(run_cli("density --check " + rho + " --config " + s2.path("tol.json")) == 0);
  }

  // the band-projected variant from the documented example integrates to 1
  const std::string band = s.path("band.csv");
  CHECK(run_cli("density --d 3 --gamma 1 --theta 0.5 --out " + band) == 0);
  Scratch s3;
  write_file(s3.path("tol.json"), R"({"integral_tol": 1e-4})");
  CHECK(run_cli("density --check " + band + " --config " + s3.path("tol.json")) == 0);
  // and a deliberately unnormalized file fails the predicate
  write_file(s.path("off.csv"), "t,density\r\n-1,2\r\n1,2\r\n");
  CHECK(run_cli("density --check " + s.path("off.csv") + " --config " + s3.path("tol.json")) == 1);
  // quoted fields parse (RFC-4180)
  write_file(s.path("quoted.csv"), "\"t\",\"density\"\r\n\"-1\",0.5\r\n\"1\",\"0.5\"\r\n");
  CHECK(run_cli("density --check " + s.path("quoted.csv")) == 0);
}

TEST_CASE("cli: signpoly emits certificate + coefficients, impossible tau exits 1") {
  Scratch s;
  const std::string out = s.path("sp.json");
  CHECK(run_cli("signpoly --tau 0.25 --out " + out) == 0);
  const json j = slurp_json(out);
  CHECK(j.at("certificate").at("sup_error_outside").get<double>() <= 0.25);
  CHECK(j.at("poly").is_object());
  CHECK(j.at("config").at("tau").get<double>() == 0.25);

  // below the construction's certified precision floor
  CHECK(run_cli("signpoly --tau 1e-9 --out " + s.path("nope.json")) == 1);
}

TEST_CASE("cli: verify writes csv + json and reruns byte-identically") {
  Scratch s;
  const std::string a = s.path("a.csv");
  const std::string b = s.path("b.csv");
  write_file(s.path("cfg.json"),
             R"({"groups": "geometry.normalization,geometry.norm", "envelope_dimension_max": 6, "mc_samples": 20000, "seed": 7})");
  CHECK(run_cli("verify --config " + s.path("cfg.json") + " --out " + a) == 0);
  CHECK(run_cli("verify --config " + s.path("cfg.json") + " --out " + b) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).substr(0, 34) == "group,item,status,observed,bound\r\n");

  const json ja = slurp_json(s.path("a.json"));
  CHECK(ja.at("all_pass").get<bool>());
  CHECK(ja.at("config").at("seed").get<int>() == 7);
}

TEST_CASE("cli: flag overrides config and the merged config echoes losslessly") {
  Scratch s;
  write_file(s.path("cfg.json"),
             R"({"d": 5, "eta": 0.15, "mu": 0.5, "noise": "realizable", "strip_samples": 2000, "max_features": 70, "test_samples": 10000, "seed": 11})");
  const std::string out = s.path("r.json");
  CHECK(run_cli("ptas --config " + s.path("cfg.json") + " --eta 0.3 --out " + out) == 0);
  const json echoed = slurp_json(out).at("config");
  CHECK(echoed.at("eta").get<double>() == 0.3);  // flag beat the file
  CHECK(echoed.at("d").get<int>() == 5);         // file value survived
  CHECK(echoed.at("noise").get<std::string>() == "realizable");
  CHECK(echoed.at("out").get<std::string>() == out);

  // round trip: feeding the echoed config back reproduces the same run
  write_file(s.path("echo.json"), echoed.dump());
  const std::string out2 = s.path("r2.json");
  CHECK(run_cli("ptas --config " + s.path("echo.json") + " --out " + out2) == 0);
  json a = slurp_json(out);
  json b = slurp_json(out2);
  a.erase("config");
  b.erase("config");
  CHECK(a == b);
}

TEST_CASE("cli: ptas report carries the label breakdown and the predicate") {
  Scratch s;
  write_file(s.path("cfg.json"),
             R"({"d": 5, "eta": 0.15, "mu": 0.5, "noise": "rcn", "flip_p": 0.03, "strip_samples": 3000, "max_features": 150, "test_samples": 20000, "seed": 11})");
  const std::string out = s.path("r.json");
  CHECK(run_cli("ptas --config " + s.path("cfg.json") + " --out " + out) == 0);
  const json j = slurp_json(out);
  const json& rep = j.at("ptas");
  CHECK(rep.at("labels_used").get<std::int64_t>() ==
        rep.at("labels_localization").get<std::int64_t>() +
            rep.at("labels_strip").get<std::int64_t>() +
            rep.at("labels_validation").get<std::int64_t>());
  CHECK(j.at("held_out").at("mean").get<double>() <= j.at("bound").get<double>());
  CHECK(j.at("pass").get<bool>());
  CHECK(j.at("opt").get<double>() == 0.03);
}

TEST_CASE("cli: abl exposes the error-bound predicate through exit codes") {
  Scratch s;
  const std::string base =
      "abl --d 5 --eta 0.2 --noise realizable --seed 3 --out " + s.path("abl.json");
  CHECK(run_cli(base) == 0);
  const json j = slurp_json(s.path("abl.json"));
  CHECK(j.at("disagreement").get<double>() < 0.2);
  CHECK(j.at("w").size() == 5);
  CHECK(j.at("labels_used").get<std::int64_t>() > 0);

  // an unreachable bound flips the exit code but still writes the report
  Scratch s2;
  write_file(s2.path("cfg.json"), R"({"error_bound": 1e-12})");
  CHECK(run_cli("abl --d 5 --eta 0.2 --noise realizable --seed 3 --config " + s2.path("cfg.json") +
                " --out " + s2.path("abl.json")) == 1);
  CHECK(!slurp_json(s2.path("abl.json")).at("pass").get<bool>());
}

TEST_CASE("cli: kkms round-trips a sample csv written by the library") {
  Scratch s;
  using halfspace::LabeledSample;
  using halfspace::UnitVector;
  const auto pts = halfspace::sample_uniform_sphere(3, 400, 909);
  std::vector<double> labels;
  for (const auto& x : pts) labels.push_back(x.coords()[0] > 0.0 ? 1.0 : -1.0);
  const LabeledSample sample(pts, labels);
  const std::string data = s.path("train.csv");
  halfspace::write_samples_csv(data, sample);

  Scratch s2;
  write_file(s2.path("cfg.json"), R"({"data": ")" + data + R"(", "degree": 2})");
  const std::string out = s2.path("kkms.json");
  CHECK(run_cli("kkms --config " + s2.path("cfg.json") + " --out " + out) == 0);
  const json j = slurp_json(out);
  CHECK(j.at("n").get<int>() == 400);
  CHECK(j.at("train_error").get<double>() <= 0.05);
}

TEST_CASE("cli: calibrate emits a value,error sweep that the tool can re-parse") {
  Scratch s;
  write_file(s.path("cfg.json"),
             R"({"constant": "c_gamma", "from": 1.0, "to": 2.0, "steps": 2, "d": 4, "eta": 0.2, "noise": "rcn", "flip_p": 0.05, "strip_samples": 1500, "max_features": 70, "test_samples": 5000, "samples_per_round": 300, "seed": 5})");
  const std::string out = s.path("cal.csv");
  CHECK(run_cli("calibrate --config " + s.path("cfg.json") + " --out " + out) == 0);
  const std::string csv = slurp(out);
  CHECK(csv.substr(0, 13) == "value,error\r\n");
  CHECK(run_cli("density --check " + out) == 0);  // parses; no tolerance given

  // unknown constant name is a usage error
  Scratch s2;
  write_file(s2.path("bad.json"), R"({"constant": "c_bogus"})");
  CHECK(run_cli("calibrate --config " + s2.path("bad.json")) == 2);
}
