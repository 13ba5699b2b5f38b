#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "freeprob/io.hpp"

using freeprob::read_file;
using freeprob::write_file;

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "freeprob");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = freeprob::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

bool has_line(const std::string& text, const std::string& line) {
  std::istringstream in(text);
  std::string l;
  while (std::getline(in, l))
    if (l == line) return true;
  return false;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("freeprob_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // generate into a file, asserting success
  std::string gen(const std::string& name, std::vector<std::string> args) {
    args.insert(args.begin(), "generate");
    args.push_back("--out");
    args.push_back(path(name));
    const CliResult r = run(args);
    EXPECT_EQ(r.code, 0) << r.err;
    return path(name);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, GenerateFreelyUniform) {
  const CliResult r = run({"generate", "freely-uniform", "--n", "2", "--degree", "4"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(has_line(r.out, "x1 x1* = 1/2"));
  EXPECT_TRUE(has_line(r.out, "tracial=true"));
}

TEST_F(CliTest, GenerateEtaZeroIsNotTracial) {
  const CliResult r = run({"generate", "eta0", "--count", "2", "--theta", "1", "--degree", "4"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(has_line(r.out, "x1 x1* = 1"));
  EXPECT_EQ(r.out.find("\nx1* x1 ="), std::string::npos);
  EXPECT_FALSE(has_line(r.out, "tracial=true"));
}

TEST_F(CliTest, DualPassesOnFreelyUniform) {
  for (const char* n : {"2", "3"}) {
    const std::string f = gen(std::string("fu") + n, {"freely-uniform", "--n", n, "--degree", "4"});
    const CliResult r = run({"check", "dual", f, "--n", n, "--degree", "4"});
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_EQ(r.out, std::string("CHECK dual\nN ") + n + "\nDEGREE 4\nMODE alpha\nVERDICT pass\n");
  }
}

TEST_F(CliTest, DualFailsOnSemicircularWithViolation) {
  const std::string f = gen("semi", {"semicircular", "--count", "2"});
  const CliResult r = run({"check", "dual", f});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(has_line(r.out, "VERDICT fail"));
  EXPECT_TRUE(has_line(r.out, "VIOLATION x1 x1 expected 1 got 0"));
}

TEST_F(CliTest, BialgFailsOnCircularWithPiWitness) {
  const std::string f = gen("circ", {"circular", "--count", "2", "--variance", "1"});
  const CliResult r = run({"check", "bialg", f, "--n", "2"});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(has_line(r.out, "VIOLATION x1* x1 expected [1 0; 0 1] got [2 0; 0 0]")) << r.out;
  EXPECT_TRUE(has_line(r.out, "WITNESS pi_2"));
}

TEST_F(CliTest, BialgPassesOnEtaZero) {
  const std::string f = gen("eta", {"eta0", "--count", "3", "--theta", "1", "--degree", "6"});
  const CliResult r = run({"check", "bialg", f, "--n", "3", "--degree", "6", "--seed", "7"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_TRUE(has_line(r.out, "REPS pi_3,unitary x10"));
}

TEST_F(CliTest, MalformedWordIsAnError) {
  const std::string f = path("bad");
  write_file(f, "alphabet x 1\nnvars=1\ndegree=2\n1 = 1\nx1 x% = 1\n");
  const CliResult r = run({"check", "dual", f});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 5:"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"check"}).code, 2);
  EXPECT_EQ(run({"check", "dual"}).code, 2);
  EXPECT_EQ(run({"check", "dual", path("missing")}).code, 2);
  EXPECT_EQ(run({"generate", "circular", "--count", "two"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"check", "bialg", "--help"}).code, 0);
}

TEST_F(CliTest, EngineErrorsExitTwo) {
  const std::string f = gen("circ", {"circular", "--count", "2"});
  EXPECT_EQ(run({"check", "dual", f, "--degree", "5"}).code, 2);
  EXPECT_EQ(run({"check", "dual", f, "--n", "3"}).code, 2);
  EXPECT_EQ(run({"check", "bialg", f, "--reps", "pi,bogus"}).code, 2);
  EXPECT_EQ(run({"check", "lemma63", "--j", "1,1"}).code, 2);
  EXPECT_EQ(run({"generate", "circular", "--degree", "0"}).code, 2);
}

TEST_F(CliTest, CumulantsOfCircularAreVariancesOnly) {
  const std::string f = gen("circ", {"circular", "--count", "2", "--variance", "1"});
  const CliResult r = run({"cumulants", f});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "alphabet x 1\nnvars=2\ndegree=4\ntracial=true\ntable=cumulants\n1 = 1\n"
            "x1 x1* = 1\nx1* x1 = 1\nx2 x2* = 1\nx2* x2 = 1\n");
}

TEST_F(CliTest, CumulantsOfHaarUnitaryAreSignedCatalan) {
  const std::string f = gen("haar", {"haar-unitary", "--count", "1", "--degree", "6"});
  const CliResult r = run({"cumulants", f});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(has_line(r.out, "x1 x1* = 1"));
  EXPECT_TRUE(has_line(r.out, "x1* x1 = 1"));
  EXPECT_TRUE(has_line(r.out, "x1 x1* x1 x1* = -1"));
  EXPECT_TRUE(has_line(r.out, "x1* x1 x1* x1 x1* x1 = 2"));
  EXPECT_FALSE(has_line(r.out, "x1 x1 x1* x1* = -1"));
}

TEST_F(CliTest, CumulantsOfEmptyBodyAreZero) {
  const std::string f = path("unit");
  write_file(f, "alphabet x 1\nnvars=2\ndegree=3\n1 = 1\n");
  const CliResult r = run({"cumulants", f});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "alphabet x 1\nnvars=2\ndegree=3\ntable=cumulants\n1 = 1\n");
}

TEST_F(CliTest, MomentsInvertCumulantsByteForByte) {
  const std::string unit = path("unit");
  write_file(unit, "alphabet x 1\nnvars=2\ndegree=3\n1 = 1\n");
  for (const std::string& f : {gen("circ", {"circular", "--count", "2", "--variance", "2/3"}),
                               gen("haar", {"haar-unitary", "--count", "2", "--degree", "4"}), unit}) {
    const std::string kappa = path("kappa");
    ASSERT_EQ(run({"cumulants", f, "--out", kappa}).code, 0);
    const CliResult back = run({"moments", kappa});
    ASSERT_EQ(back.code, 0) << back.err;
    EXPECT_EQ(back.out, read_file(f)) << f;
  }
}

TEST_F(CliTest, MomentsRejectsAMomentFile) {
  const std::string f = gen("circ", {"circular"});
  EXPECT_EQ(run({"moments", f}).code, 2);
}

TEST_F(CliTest, RecoverAlphaForTheUnitSum) {
  const std::string s = gen("s", {"constant", "--value", "1", "--alphabet", "s", "--degree", "6"});
  const CliResult r = run({"recover-alpha", s, "--n", "2", "--rmax", "2"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "alpha1 = 1/2\nalpha2 = -1/8\n");
  EXPECT_EQ(run({"recover-alpha", s, "--n", "2", "--rmax", "1"}).out, "alpha1 = 1/2\n");

  const std::string fu = gen("fu", {"freely-uniform", "--n", "2", "--degree", "6"});
  const CliResult agree = run({"recover-alpha", s, "--n", "2", "--rmax", "3", "--compare", fu});
  EXPECT_EQ(agree.code, 0);
  EXPECT_TRUE(has_line(agree.out, "MATCH alpha3"));

  const std::string circ = gen("circ", {"circular", "--count", "2", "--degree", "6"});
  const CliResult mismatch = run({"recover-alpha", s, "--n", "2", "--rmax", "3", "--compare", circ});
  EXPECT_EQ(mismatch.code, 1);
  EXPECT_TRUE(has_line(mismatch.out, "MISMATCH alpha1 recovered 1/2 direct 1"));
}

TEST_F(CliTest, RecoverAlphaErrors) {
  const std::string circ = gen("circ", {"circular", "--count", "2"});
  EXPECT_EQ(run({"recover-alpha", circ, "--n", "2"}).code, 2);  // two letters
  const std::string s = gen("s", {"constant", "--degree", "2"});
  EXPECT_EQ(run({"recover-alpha", s, "--rmax", "3"}).code, 2);  // degree too low
}

TEST_F(CliTest, PatternAndRDiagonal) {
  const std::string fu = gen("fu", {"freely-uniform", "--n", "2"});
  const CliResult p = run({"check", "pattern", fu});
  EXPECT_EQ(p.code, 0);
  EXPECT_TRUE(has_line(p.out, "ALPHA 1 1/2"));
  EXPECT_TRUE(has_line(p.out, "BETA 2 -1/8"));

  const std::string semi = gen("semi", {"semicircular", "--count", "2"});
  const CliResult q = run({"check", "pattern", semi});
  EXPECT_EQ(q.code, 1);
  EXPECT_TRUE(has_line(q.out, "VIOLATION x1 x1 cumulant 1"));
  EXPECT_TRUE(has_line(q.out, "REASON non-pattern cumulant"));

  EXPECT_EQ(run({"check", "rdiag", fu, "--letter", "x1"}).code, 0);
  const CliResult rd = run({"check", "rdiag", semi, "--letter", "x2"});
  EXPECT_EQ(rd.code, 1);
  EXPECT_TRUE(has_line(rd.out, "VIOLATION x2 x2 expected 0 got 1"));
}

TEST_F(CliTest, Freeness) {
  const std::string fu = gen("fu", {"freely-uniform", "--n", "2"});
  EXPECT_EQ(run({"check", "freeness", fu, "--left", "y"}).code, 2);  // no such alphabet
  const std::string mixed = path("mixed");
  write_file(mixed, "alphabet x 1 1\nalphabet y 1 1\ndegree=2\n1 = 1\nx1 y1 = 1\ny1* x1* = 1\n");
  const CliResult m = run({"check", "freeness", mixed, "--left", "x"});
  EXPECT_EQ(m.code, 1);
  EXPECT_TRUE(has_line(m.out, "VIOLATION x1 y1 expected 0 got 1")) << m.out;
  const std::string free_file = path("free");
  write_file(free_file, "alphabet x 1 1\nalphabet y 1 1\ndegree=2\n1 = 1\nx1 x1* = 1\n");
  EXPECT_EQ(run({"check", "freeness", free_file, "--left", "x"}).code, 0);
}

TEST_F(CliTest, FixedPoint) {
  const CliResult r = run({"check", "fixedpoint", "--n", "2", "--poly", "t1* t1 + t2* t2"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_TRUE(has_line(r.out, "REWRITE fixed"));
  const CliResult sq = run({"check", "fixedpoint", "--n", "2", "--poly", "t1* t1 t1* t1 + t1* t1 t2* t2 + t2* t2 t1* t1 + t2* t2 t2* t2"});
  EXPECT_EQ(sq.code, 0) << sq.out;
  const CliResult t1 = run({"check", "fixedpoint", "--n", "2", "--poly", "t1"});
  EXPECT_EQ(t1.code, 1);
  EXPECT_TRUE(has_line(t1.out, "REWRITE moved"));
  EXPECT_EQ(run({"check", "fixedpoint", "--poly", "t1 +"}).code, 2);
}

TEST_F(CliTest, LemmaSweepAndSingleCase) {
  const CliResult s = run({"check", "lemma63", "--n", "2", "--k", "2"});
  EXPECT_EQ(s.code, 0) << s.out;
  EXPECT_TRUE(has_line(s.out, "DISAGREEMENTS 0"));
  const CliResult one = run({"check", "lemma63", "--n", "2", "--j", "1,2", "--pattern", ".*", "--pi", "{{1,2}}"});
  EXPECT_EQ(one.code, 0) << one.err;
  EXPECT_TRUE(has_line(one.out, "PREDICTED 0"));
  EXPECT_TRUE(has_line(one.out, "SYMBOLIC 0"));
  EXPECT_EQ(run({"check", "lemma63", "--n", "2", "--j", "1,3", "--pattern", ".*", "--pi", "{{1,2}}"}).code, 2);
}

TEST_F(CliTest, ProductAndPerturb) {
  const std::string prod = gen("prod", {"product", "--n", "2", "--degree", "4"});
  EXPECT_EQ(run({"check", "dual", prod}).code, 0);
  const std::string circ = gen("circ", {"circular", "--count", "2"});
  const CliResult p = run({"perturb", circ, "--word", "x1 x1*", "--value", "2", "--out", path("pert")});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_TRUE(has_line(read_file(path("pert")), "x1 x1* = 2"));
  EXPECT_EQ(run({"check", "dual", path("pert")}).code, 1);
  EXPECT_EQ(run({"perturb", circ, "--word", "x1 x1*", "--value", "1/0"}).code, 2);
}

TEST_F(CliTest, ReportsAreDeterministic) {
  const std::string f = gen("semi", {"semicircular", "--count", "2"});
  const CliResult a = run({"check", "bialg", f, "--reps", "unitary", "--seed", "42"});
  const CliResult b = run({"check", "bialg", f, "--reps", "unitary", "--seed", "42"});
  EXPECT_EQ(a.code, 1);
  EXPECT_EQ(a.out, b.out);
  EXPECT_TRUE(has_line(a.out, "WITNESS unitary trial 1"));
  ASSERT_EQ(run({"check", "bialg", f, "--reps", "unitary", "--seed", "42", "--out", path("rep")}).code, 1);
  EXPECT_EQ(read_file(path("rep")), a.out);
}

// the binary itself: exit statuses and the degree override
TEST_F(CliTest, BinaryHonoursDegreeOverride) {
  const std::string f = gen("haar", {"haar-unitary", "--count", "1", "--degree", "6"});
  const std::string bin = FREEPROB_BINARY;
  auto status = [&](const std::string& env) {
    const std::string cmd = env + " " + bin + " cumulants " + f + " > /dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status("FREEPROB_MAX_DEGREE=8"), 0);
  EXPECT_EQ(status("FREEPROB_MAX_DEGREE=4"), 2);
}
