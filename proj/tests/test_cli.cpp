#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

namespace {

namespace fs = std::filesystem;

struct CliFixture {
  fs::path dir;
  CliFixture() {
    dir = fs::temp_directory_path() /
          ("gravreg_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~CliFixture() { fs::remove_all(dir); }

  std::string path(const std::string& name) const {
    return (dir / name).string();
  }

  int run(const std::string& args) const {
    const std::string cmd = std::string(GRAVREG_CLI_PATH) + " " + args +
                            " >" + path("stdout.log") + " 2>" +
                            path("stderr.log");
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  }

  std::string slurp(const std::string& name) const {
    std::ifstream in(path(name));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
};

bool same_bytes(const std::string& a, const std::string& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return sa.str() == sb.str() && !sa.str().empty();
}

}  // namespace

TEST_CASE("cli: missing file exits 1 and names the path") {
  CliFixture f;
  CHECK(f.run("register --corr " + f.path("missing.corr") + " --sigma 0.005 --tau-auto") ==
        1);
  CHECK(f.slurp("stderr.log").find("missing.corr") != std::string::npos);
}

TEST_CASE("cli: synth then register round trip with truth report") {
  CliFixture f;
  CHECK(f.run("synth --n 500 --eta 0.8 --sigma 0.005 --seed 7 --out-prefix " +
              f.path("inst")) == 0);
  CHECK(fs::exists(f.path("inst.corr")));
  CHECK(fs::exists(f.path("inst.truth")));
  CHECK(f.run("register --corr " + f.path("inst.corr") +
              " --sigma 0.005 --tau-auto --truth " + f.path("inst.truth") + " --out " +
              f.path("inst.result")) == 0);
  CHECK(fs::exists(f.path("inst.result")));
  const std::string out = f.slurp("stdout.log");
  CHECK(out.find("re_deg") != std::string::npos);
  CHECK(out.find("te_m") != std::string::npos);
}

TEST_CASE("cli: synth output is deterministic") {
  CliFixture f;
  CHECK(f.run("synth --n 100 --eta 0.9 --sigma 0.005 --seed 11 --out-prefix " +
              f.path("a")) == 0);
  CHECK(f.run("synth --n 100 --eta 0.9 --sigma 0.005 --seed 11 --out-prefix " +
              f.path("b")) == 0);
  CHECK(same_bytes(f.path("a.corr"), f.path("b.corr")));
  CHECK(same_bytes(f.path("a.truth"), f.path("b.truth")));
}

TEST_CASE("cli: result files are identical across thread counts") {
  CliFixture f;
  REQUIRE(f.run("synth --n 400 --eta 0.85 --sigma 0.005 --seed 13 "
                "--out-prefix " +
                f.path("x")) == 0);
  CHECK(f.run("register --corr " + f.path("x.corr") +
              " --sigma 0.005 --tau-auto --threads 1 --out " + f.path("t1.result")) == 0);
  CHECK(f.run("register --corr " + f.path("x.corr") +
              " --sigma 0.005 --tau-auto --threads 8 --out " + f.path("t8.result")) == 0);
  CHECK(same_bytes(f.path("t1.result"), f.path("t8.result")));
}

TEST_CASE("cli: delta required without sigma") {
  CliFixture f;
  std::ofstream(f.path("c.corr")) << "0 0 0 0 0 0\n1 1 1 1 1 1\n";
  CHECK(f.run("register --corr " + f.path("c.corr")) == 1);
}

TEST_CASE("cli: register-spcr identity clouds") {
  CliFixture f;
  {
    std::ofstream src(f.path("cloud.xyz"));
    unsigned long long state = 12345;
    const auto next = [&]() {
      state = state * 6364136223846793005ULL + 1442695040888963407ULL;
      return static_cast<double>((state >> 16) % 2000) / 1000.0 - 1.0;
    };
    for (int i = 0; i < 60; ++i) {
      const double x = next(), y = next(), z = next();
      src << x << ' ' << y << ' ' << z << '\n';
    }
  }
  CHECK(f.run("register-spcr --source " + f.path("cloud.xyz") + " --target " +
              f.path("cloud.xyz") + " --sigma 0.001 --tau-auto --out " +
              f.path("spcr.result")) == 0);
  // identity clouds register to the identity transform
  std::ifstream in(f.path("spcr.result"));
  std::string key;
  in >> key;
  REQUIRE(key == "rotation");
  double m[9];
  for (double& v : m) in >> v;
  CHECK(std::abs(m[0] - 1.0) < 1e-6);
  CHECK(std::abs(m[4] - 1.0) < 1e-6);
  CHECK(std::abs(m[8] - 1.0) < 1e-6);
}

TEST_CASE("cli: register-spcr unrelated clouds exits 2") {
  CliFixture f;
  {
    std::ofstream a(f.path("a.xyz")), b(f.path("b.xyz"));
    for (int i = 0; i < 5; ++i) {
      a << 0.1 * i << ' ' << 0.2 * i << ' ' << 3.0 * i << '\n';
      b << 0.7 + 0.13 * i << ' ' << -0.4 - 0.21 * i << ' ' << -2.0 - 2.7 * i
        << '\n';
    }
  }
  const int code = f.run("register-spcr --source " + f.path("a.xyz") +
                         " --target " + f.path("b.xyz") +
                         " --sigma 0.001 --tau-auto --out " + f.path("no.result"));
  CHECK(code == 2);
}

TEST_CASE("cli: bench campaign produces the CSV schema") {
  CliFixture f;
  std::ofstream(f.path("spec.json"))
      << R"({"scenarios": [{"name": "mini", "n": [200], "eta": [0.5],)"
      << R"( "sigma": [0.005], "trials": 3, "seed0": 5}]})";
  CHECK(f.run("bench --spec " + f.path("spec.json") + " --out " +
              f.path("out.csv")) == 0);
  std::ifstream csv(f.path("out.csv"));
  std::string header;
  std::getline(csv, header);
  CHECK(header ==
        "scenario,seed,N,eta,sigma,rho,stage1_ms,stage2_ms,stage3_ms,"
        "total_ms,re_deg,te_m,success,inliers1,inliers2,inliers3,"
        "bnb_branches");
  int rows = 0;
  std::string line;
  while (std::getline(csv, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("cli: empty campaign spec exits 1") {
  CliFixture f;
  std::ofstream(f.path("empty.json")) << R"({"scenarios": []})";
  CHECK(f.run("bench --spec " + f.path("empty.json") + " --out " +
              f.path("o.csv")) == 1);
}
