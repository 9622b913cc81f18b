#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "flda/classify.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "flda_cli_tests";

struct CliRun {
  int code;
  std::string err;
};

CliRun run(const std::string& args) {
  fs::create_directories(kWork);
  const fs::path err = kWork / "stderr.txt";
  const std::string command =
      std::string(FLDA_CLI_PATH) + " " + args + " >/dev/null 2>'" + err.string() + "'";
  const int status = std::system(command.c_str());
  std::ifstream in(err);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1,
          {std::istreambuf_iterator<char>(in), {}}};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string at(const std::string& name) { return (kWork / name).string(); }

}  // namespace

TEST(Cli, SynthFitEvalPipeline) {
  fs::remove_all(kWork);
  ASSERT_EQ(run("synth --preset poisson --n 1500 --seed 4 --out " + at("pair")).code, 0);
  ASSERT_TRUE(fs::exists(kWork / "pair" / "source.csv"));
  ASSERT_TRUE(fs::exists(kWork / "pair" / "spec.ini"));
  for (const char* method : {"flda-q", "flda-l", "ls", "lr"}) {
    const std::string out = at(std::string("model_") + method);
    ASSERT_EQ(run(std::string("fit --method ") + method + " --source " + at("pair/source.csv") +
                  " --target " + at("pair/target.csv") + " --out " + out)
                  .code,
              0)
        << method;
    const flda::LinearModel model = flda::load_model(fs::path(out) / "model.txt");
    EXPECT_EQ(model.features(), 2u);
    ASSERT_EQ(run("eval --model " + out + "/model.txt --data " + at("pair/target.csv") +
                  " --out " + out + "/eval")
                  .code,
              0);
    EXPECT_NE(slurp(fs::path(out) / "eval" / "eval.json").find("\"error\""), std::string::npos);
  }
}

TEST(Cli, SameSeedSameBytes) {
  ASSERT_EQ(run("synth --preset bernoulli --n 300 --seed 9 --out " + at("a")).code, 0);
  ASSERT_EQ(run("synth --preset bernoulli --n 300 --seed 9 --out " + at("b")).code, 0);
  EXPECT_EQ(slurp(kWork / "a" / "target.csv"), slurp(kWork / "b" / "target.csv"));
  ASSERT_EQ(run("synth --preset bernoulli --n 300 --seed 10 --out " + at("c")).code, 0);
  EXPECT_NE(slurp(kWork / "a" / "target.csv"), slurp(kWork / "c" / "target.csv"));
}

TEST(Cli, ErrorsAreCategorized) {
  CliRun r = run("fit --method ls --source " + at("missing.csv") + " --out " + at("x"));
  EXPECT_EQ(r.code, 6);
  EXPECT_EQ(r.err.rfind("error [io]", 0), 0u) << r.err;

  {
    std::ofstream(kWork / "bad.csv") << "1,2,1\n3,oops,0\n";
  }
  r = run("fit --method ls --source " + at("bad.csv") + " --out " + at("x"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find(":2"), std::string::npos) << r.err;

  {
    std::ofstream(kWork / "bad.ini") << "[bench]\nrepetitions = -3\n";
  }
  r = run("bench curve --config " + at("bad.ini") + " --out " + at("x"));
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error [config]", 0), 0u) << r.err;

  {
    std::ofstream(kWork / "three.csv") << "1,2,3,1\n0,1,1,-1\n";
  }
  r = run("eval --model " + at("model_ls/model.txt") + " --data " + at("three.csv") + " --out " +
          at("x"));
  EXPECT_EQ(r.code, 4) << r.err;

  r = run("bench");
  EXPECT_EQ(r.code, 2);
  r = run("fit --method cubic --source " + at("bad.csv") + " --out " + at("x"));
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error [usage]", 0), 0u);
}
