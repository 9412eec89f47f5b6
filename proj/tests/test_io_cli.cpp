#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "lorentz_ot/cli.hpp"
#include "lorentz_ot/errors.hpp"
#include "lorentz_ot/io.hpp"
#include "support.hpp"

namespace lorentz_ot {
namespace {

namespace fs = std::filesystem;
using testing::ev;
using testing::uniform;

class Workspace : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("lorentz_ot_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return (dir_ / name).string();
  }
  std::string read(const std::string& path) const {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }
  std::string measure_file(const std::string& name, const DiscreteMeasure& m) const {
    std::ostringstream s;
    io::write_measure(s, m);
    return write(name, s.str());
  }
  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST(Io, MeasureRoundTrip) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pts = testing::random_events(rng, 7, -1, 1, 2, 3.0);
    const DiscreteMeasure m = make_measure(pts, testing::random_counts(rng, 7, 31));
    std::stringstream s;
    io::write_measure(s, m);
    EXPECT_EQ(io::parse_measure(s), m);
  }
}

TEST(Io, ModelRoundTripAndErrors) {
  std::stringstream s("# scale factor\nkind=rw\ndim=3\n0 1\n1 2.5\n");
  const auto m = io::parse_model(s);
  EXPECT_EQ(m->kind(), ModelKind::robertson_walker);
  EXPECT_EQ(m->spatial_dim(), 2);
  EXPECT_EQ(m->scale_factor(0.5), 1.75);
  std::stringstream out;
  io::write_model(out, *m);
  const auto again = io::parse_model(out);
  EXPECT_EQ(again->scale_factor(0.25), m->scale_factor(0.25));

  std::stringstream bad1("kind=lorentz\ndim=2\n"), bad2("kind=minkowski\n"), bad3("kind=rw\ndim=2\n0 -1\n");
  EXPECT_THROW(io::parse_model(bad1), ParseError);
  EXPECT_THROW(io::parse_model(bad2), ParseError);
  EXPECT_THROW(io::parse_model(bad3), ParseError);
  std::stringstream bad_measure("dim=2\n0 0 0.5\n0 0 0.5\n");
  EXPECT_THROW(io::parse_measure(bad_measure), ParseError);
}

TEST(Io, PlanRoundTrip) {
  const auto m = make_minkowski(1);
  const DiscreteMeasure mu = uniform({ev(0, {0}), ev(0, {1}), ev(0, {2})});
  const DiscreteMeasure nu = make_measure({ev(2, {0}), ev(2, {1.5})}, {2.0 / 3.0, 1.0 / 3.0});
  const TransportPlan plan = solve(mu, nu, cost_matrix(*m, mu, nu));
  std::stringstream s;
  io::write_plan(s, io::PlanFile{m, mu, nu, plan});
  const io::PlanFile back = io::parse_plan(s);
  EXPECT_EQ(back.mu, mu);
  EXPECT_EQ(back.nu, nu);
  EXPECT_EQ(back.plan.coupling, plan.coupling);
  EXPECT_EQ(back.plan.counts, plan.counts);
  EXPECT_EQ(back.plan.denominator, plan.denominator);
  EXPECT_EQ(back.plan.psi, plan.psi);
  EXPECT_EQ(back.plan.phi, plan.phi);
  EXPECT_EQ(back.plan.primal_cost, plan.primal_cost);
  EXPECT_EQ(back.plan.dual_value, plan.dual_value);
}

TEST_F(Workspace, FeasibleExitCodes) {
  const std::string model = write("m.txt", "kind=minkowski\ndim=2\n");
  const std::string mu = measure_file("mu.txt", uniform({ev(0, {0}), ev(0, {0.1})}));
  const std::string bad = measure_file("bad.txt", uniform({ev(1, {0}), ev(1, {5})}));
  EXPECT_EQ(run({"feasible", "--model", model, "--mu", mu, "--nu", bad}), 1);
  EXPECT_NE(out_.str().find("A = {1,2}"), std::string::npos);

  const std::string good = measure_file("good.txt", uniform({ev(1, {0}), ev(1, {0.5})}));
  EXPECT_EQ(run({"feasible", "--model", model, "--mu", mu, "--nu", good, "--witness", (dir_ / "w.txt").string()}), 0);
  EXPECT_TRUE(fs::exists(dir_ / "w.txt"));
  EXPECT_EQ(run({"solve", "--model", model, "--mu", mu, "--nu", bad}), 1);

  EXPECT_EQ(run({"feasible", "--model", model, "--mu", mu}), 2);
  EXPECT_EQ(run({"feasible", "--model", write("x.txt", "kind=?\n"), "--mu", mu, "--nu", good}), 2);
  EXPECT_EQ(run({"feasible", "--model", model, "--mu", (dir_ / "missing").string(), "--nu", good}), 2);
  EXPECT_EQ(run({"bogus"}), 2);
  EXPECT_EQ(run({"--help"}), 0);
}

TEST_F(Workspace, SolveInterpolateIdentity) {
  const std::string model = write("m.txt", "kind=minkowski\ndim=2\n");
  const DiscreteMeasure source = make_measure({ev(0, {0}), ev(0, {0.3}), ev(0, {1})}, {0.2, 0.3, 0.5});
  const std::string mu = measure_file("mu.txt", source);
  const std::string nu = measure_file("nu.txt", uniform({ev(2, {0.1}), ev(2, {1.2})}));
  ASSERT_EQ(run({"solve", "--model", model, "--mu", mu, "--nu", nu, "--out", (dir_ / "plan.txt").string()}), 0);
  const std::string plan = (dir_ / "plan.txt").string();
  ASSERT_EQ(run({"interpolate", "--plan", plan, "--t", "0", "--out", (dir_ / "t0.txt").string()}), 0);
  EXPECT_EQ(read((dir_ / "t0.txt").string()), read(mu));
  ASSERT_EQ(run({"interpolate", "--plan", plan, "--t", "1", "--out", (dir_ / "t1.txt").string()}), 0);
  EXPECT_EQ(read((dir_ / "t1.txt").string()), read(nu));
  EXPECT_EQ(run({"interpolate", "--plan", plan, "--t", "1.5"}), 2);

  ASSERT_EQ(run({"--out-dir", dir_.string(), "diagnose", "--plan", plan, "--eps", "0.1", "--report", "r.txt",
                 "--trajectories", "traj.txt"}),
            0);
  EXPECT_NE(read((dir_ / "r.txt").string()).find("crossings 0"), std::string::npos);
  std::istringstream traj(read((dir_ / "traj.txt").string()));
  std::string line;
  int lines = 0;
  while (std::getline(traj, line)) ++lines;
  EXPECT_EQ(lines % kGeodesicSamples, 0);
}

TEST_F(Workspace, MongeAndProbe) {
  const std::string model = write("m.txt", "kind=minkowski\ndim=2\n");
  const std::string mu = measure_file("mu.txt", uniform({ev(0, {0}), ev(0, {1})}));
  const std::string nu = measure_file("nu.txt", uniform({ev(1, {0}), ev(1, {1})}));
  EXPECT_EQ(run({"monge", "--model", model, "--mu", mu, "--nu", nu}), 0);
  EXPECT_EQ(out_.str(), "map\n1 -> 1\n2 -> 2\n");
  EXPECT_EQ(run({"probe-uniqueness", "--model", model, "--mu", mu, "--nu", nu, "--trials", "8"}), 0);
  EXPECT_EQ(out_.str().substr(0, 7), "unique\n");
}

TEST_F(Workspace, Repro) {
  EXPECT_EQ(run({"repro", "half-holder", "--n", "64"}), 0);
  EXPECT_NE(out_.str().find("exponent_in_range yes"), std::string::npos);
  EXPECT_NE(out_.str().find("crossings 0"), std::string::npos);
  EXPECT_EQ(run({"repro", "crossing"}), 0);
  EXPECT_NE(out_.str().find("crossed_nulls_gain -4"), std::string::npos);
  EXPECT_EQ(run({"repro", "null-cone"}), 0);
  EXPECT_NE(out_.str().find("not unique"), std::string::npos);
  const std::string first = out_.str();
  run({"--seed", "0", "repro", "null-cone"});
  EXPECT_EQ(out_.str(), first);
}

}  // namespace
}  // namespace lorentz_ot
