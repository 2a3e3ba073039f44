#include "doctest.h"

#include "ngon/energy.hpp"
#include "ngon/serialize.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

using namespace ngon;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("ngon_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path(const std::string& name) { return (scratch_dir() / name).string(); }

Run run(const std::string& args, const std::string& env = "") {
  const std::string out = path("stdout.txt");
  const std::string err = path("stderr.txt");
  const std::string cmd = env + (env.empty() ? "" : " ") + std::string(NGON_CLI_PATH) + " " + args +
                          " >" + out + " 2>" + err;
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_text_file(out);
  r.err = read_text_file(err);
  return r;
}

Json load(const std::string& file) { return Json::parse(read_text_file(file)); }

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

std::vector<std::string> data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::vector<std::string> rows;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) continue;
    if (!header) {
      header = true;
      continue;
    }
    rows.push_back(line);
  }
  return rows;
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run("--help").code == 0);
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  const Run bad_flag = run("optimize --n 5 --bogus 1");
  CHECK(bad_flag.code == 2);
  CHECK(count_lines(bad_flag.err) == 1);
  CHECK(run("optimize --n five").code == 2);
  const Run small = run("optimize --n 2 --alpha 1");
  CHECK(small.code == 2);
  CHECK(count_lines(small.err) == 1);
  CHECK(small.err.rfind("ngon: ", 0) == 0);
  CHECK(run("optimize --n 5 --method newton").code == 2);
  CHECK(run("optimize --n 5 --restarts 0").code == 2);
  CHECK(run("optimize").code == 2);
}

TEST_CASE("optimize") {
  const std::string out = path("pentagon.json");
  const Run r = run("optimize --n 5 --alpha 1 --restarts 4 --seed 3 --out " + out);
  CHECK(r.code == 0);
  const Json j = load(out);
  CHECK(j["best_energy"].get<double>() == doctest::Approx(regular_max_energy(5, 1)).epsilon(1e-6));
  CHECK(j["manifest"]["command"] == "optimize");
  CHECK(j["manifest"]["seed"] == 3);
  CHECK(j["manifest"]["config"]["restarts"] == 4);
  CHECK(j["manifest"]["outputs"][0] == out);

  const std::string arc = path("arc.json");
  CHECK(run("optimize --n 4 --alpha 3 --restarts 4 --out " + arc).code == 0);
  CHECK(load(arc)["best_energy"].get<double>() == doctest::Approx(12.0).epsilon(1e-6));

  // stdout when no --out is given.
  const Run s = run("optimize --n 5 --alpha 1 --method ascend --seed 2");
  CHECK(s.code == 0);
  CHECK(Json::parse(s.out)["best_chain"]["n"] == 5);
}

TEST_CASE("identical runs give identical files apart from the timestamp") {
  const std::string a = path("a.json"), b = path("b.json");
  CHECK(run("optimize --n 6 --alpha 2 --restarts 3 --max-iters 2000 --seed 11 --out " + a).code == 0);
  CHECK(run("optimize --n 6 --alpha 2 --restarts 3 --max-iters 2000 --seed 11 --out " + b).code == 0);
  Json ja = without_timestamps(load(a));
  Json jb = without_timestamps(load(b));
  ja["manifest"].erase("outputs");
  jb["manifest"].erase("outputs");
  CHECK(dump(ja) == dump(jb));
}

TEST_CASE("seed from the environment and config files") {
  const Run env = run("verify --suite inertia --samples 10", "NGON_SEED=42");
  CHECK(env.code == 0);
  CHECK(Json::parse(env.out)["manifest"]["seed"] == 42);
  const Run flag = run("verify --suite inertia --samples 10 --seed 7", "NGON_SEED=42");
  CHECK(Json::parse(flag.out)["manifest"]["seed"] == 7);

  const std::string cfg = path("run.cfg");
  write_text_file(cfg, "# comment\nn = 5\nalpha=2\nrestarts=2\nmax-iters = 1500\nseed=9\n");
  const Run c = run("optimize --config " + cfg + " --seed 10");
  CHECK(c.code == 0);
  const Json j = Json::parse(c.out);
  CHECK(j["manifest"]["seed"] == 10);
  CHECK(j["manifest"]["config"]["n"] == 5);
  CHECK(j["manifest"]["config"]["alpha"] == 2.0);
  CHECK(j["manifest"]["config"]["max_iters"] == 1500);
  CHECK(j["manifest"]["inputs"][0] == cfg);

  write_text_file(cfg, "n=5\ncolour=blue\n");
  CHECK(run("optimize --config " + cfg).code == 2);
  write_text_file(cfg, "n=5\nrestarts=lots\n");
  CHECK(run("optimize --config " + cfg).code == 2);
  CHECK(run("optimize --config " + path("missing.cfg")).code == 2);
}

TEST_CASE("verify suites") {
  const std::string n4 = path("n4.json");
  CHECK(run("verify --suite n4 --out " + n4).code == 0);
  CHECK(load(n4)["threshold"].get<double>() == doctest::Approx(2.0).epsilon(1e-6));

  CHECK(run("verify --suite inertia --samples 500").code == 0);
  CHECK(run("verify --suite decomposition --samples 500").code == 0);

  const std::string luko = path("luko.json");
  CHECK(run("verify --suite luko --samples 1000 --out " + luko).code == 0);
  const Json l = load(luko);
  CHECK(l["max_violation"].get<double>() <= 1e-9);
  CHECK(l["violations"] == 0);

  const Run reg = run("verify --suite regular --n 5 --alpha 1 --restarts 4");
  CHECK(reg.code == 0);
  CHECK(Json::parse(reg.out)["cases"].size() == 1);

  const Run unknown = run("verify --suite nope");
  CHECK(unknown.code == 2);
  CHECK(count_lines(unknown.err) == 1);
  CHECK(run("verify").code == 2);
  CHECK(run("verify --suite luko --alpha 3").code == 2);
  CHECK(run("verify --suite regular --n 4").code == 2);
}

TEST_CASE("sweep") {
  const Run n4 = run("sweep --n 4 --alpha-min 1 --alpha-max 3 --steps 21");
  CHECK(n4.code == 0);
  const auto rows = data_rows(n4.out);
  REQUIRE(rows.size() == 21);
  CHECK(rows[9].rfind("1.8999999999999999,Regular,", 0) == 0);
  CHECK(rows[10].rfind("2,Tie,", 0) == 0);
  CHECK(rows[11].rfind("2.1000000000000001,DoubleArc,", 0) == 0);
  CHECK(n4.out.find("# bracket 2 2.1000000000000001") != std::string::npos);

  CHECK(data_rows(run("sweep --n 4 --alpha-min 1 --alpha-max 3 --steps 2").out).size() == 2);
  CHECK(run("sweep --n 4 --alpha-min 3 --alpha-max 1").code == 2);
  CHECK(run("sweep --n 4 --steps 1").code == 2);
  CHECK(run("sweep --n 5").code == 2);

  const std::string csv = path("sweep6.csv"), js = path("sweep6.json");
  const Run n6 = run("sweep --n 6 --alpha-min 1 --alpha-max 10 --steps 4 --restarts 4 --out " + csv +
                     " --json " + js);
  CHECK(n6.code == 0);
  const std::string text = read_text_file(csv);
  CHECK(text.find("# bracket 1 4") != std::string::npos);
  CHECK(text.find("exploratory") != std::string::npos);
  CHECK(data_rows(text).size() == 4);
  const Json j = load(js);
  CHECK(j["bracket"][1] == 4.0);
  CHECK(j["rows"][0]["winner"] == "Regular");
  CHECK(j["rows"][3]["winner"] == "DoubleArc");
}

TEST_CASE("show") {
  const std::string out = path("show.json");
  CHECK(run("optimize --n 5 --alpha 1 --restarts 2 --max-iters 1000 --out " + out).code == 0);
  const Run s = run("show " + out);
  CHECK(s.code == 0);
  CHECK(s.out.find("chain, n = 5") != std::string::npos);

  const std::string poly = path("poly.json");
  write_text_file(poly, dump(to_json(regular_ngon(6))));
  const Run p = run("show " + poly);
  CHECK(p.code == 0);
  CHECK(p.out.find("polygon, n = 6") != std::string::npos);

  const std::string junk = path("junk.json");
  write_text_file(junk, "{not json");
  CHECK(run("show " + junk).code == 2);
  CHECK(run("show " + path("absent.json")).code == 1);
  CHECK(run("show").code == 2);
}
