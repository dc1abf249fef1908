#include <liftreach/core.hpp>
#include <liftreach/csv.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <random>
#include <string>

using namespace liftreach;

namespace {

// Scratch file that cleans up after itself.
struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) {
    path = (std::filesystem::temp_directory_path() / name).string();
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("state bounds membership") {
  StateBounds b;
  CHECK(in_bounds(StateVec(5.0, 5.0, 10.0), b));
  CHECK(in_bounds(StateVec(0.0, 10.0, 0.0), b));
  CHECK(in_bounds(StateVec(10.0, 0.0, 20.0), b));
  CHECK_FALSE(in_bounds(StateVec(-0.1, 5.0, 10.0), b));
  CHECK_FALSE(in_bounds(StateVec(5.0, 10.1, 10.0), b));
  CHECK_FALSE(in_bounds(StateVec(5.0, 5.0, -0.001), b));
  CHECK_FALSE(in_bounds(StateVec(5.0, 5.0, 20.5), b));

  StateBounds narrow{3.0, 1.0, 2.0};
  CHECK(in_bounds(StateVec(3.0, 0.0, 1.5), narrow));
  CHECK_FALSE(in_bounds(StateVec(0.0, 0.0, 0.5), narrow));
}

TEST_CASE("input clamping") {
  InputBounds ib;
  CHECK(clamp_input(-2.0, ib) == -1.0);
  CHECK(clamp_input(0.5, ib) == 0.5);
  CHECK(clamp_input(3.0, ib) == 1.0);
  CHECK(clamp_input(-1.0, ib) == -1.0);

  InputBounds wide{-4.0, 2.0};
  CHECK(clamp_input(-5.0, wide) == -4.0);
  CHECK(clamp_input(1.9, wide) == 1.9);
}

TEST_CASE("trajectory shape validation") {
  Trajectory t;
  t.states = {StateVec(1, 2, 3), StateVec(4, 5, 6), StateVec(7, 8, 9)};
  t.inputs = {0.5, -0.5};
  REQUIRE_NOTHROW(t.validate());
  CHECK(t.steps() == 2);
  CHECK(t.time_at(2) == Catch::Approx(0.2));

  t.inputs.push_back(0.0);
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);

  Trajectory empty;
  CHECK_THROWS_AS(empty.validate(), std::invalid_argument);

  Trajectory bad_dt;
  bad_dt.dt = 0.0;
  bad_dt.states = {StateVec::Zero()};
  CHECK_THROWS_AS(bad_dt.validate(), std::invalid_argument);
}

TEST_CASE("rollout drives the plant and keeps the input trace") {
  // x1 integrates the input, the rest stays put
  BlackBoxSystem sys;
  sys.step = [](const StateVec& x, double u, double dt) -> std::optional<StateVec> {
    return StateVec(x(0) + u * dt, x(1), x(2));
  };
  RolloutResult r = rollout(sys, StateVec(1.0, 2.0, 3.0), {1.0, 1.0, -1.0}, 0.1);
  REQUIRE(r.completed);
  REQUIRE(r.trajectory.states.size() == 4);
  CHECK(r.trajectory.states[1](0) == Catch::Approx(1.1));
  CHECK(r.trajectory.states[2](0) == Catch::Approx(1.2));
  CHECK(r.trajectory.states[3](0) == Catch::Approx(1.1));
  CHECK(r.trajectory.states[3](1) == 2.0);
  CHECK(r.trajectory.inputs == std::vector<double>{1.0, 1.0, -1.0});
  REQUIRE_NOTHROW(r.trajectory.validate());
}

TEST_CASE("rollout truncates when the plant refuses to advance") {
  BlackBoxSystem sys;
  sys.step = [](const StateVec& x, double u, double dt) -> std::optional<StateVec> {
    StateVec n(x(0) + u * dt, x(1), x(2));
    if (n(0) > 1.15) return std::nullopt;
    return n;
  };
  RolloutResult r = rollout(sys, StateVec(1.0, 0.0, 0.0), {1.0, 1.0, 1.0, 1.0}, 0.1);
  CHECK_FALSE(r.completed);
  CHECK(r.reason == "terminated by plant");
  // two successful steps (1.1, then refusal at 1.2 > 1.15)
  REQUIRE(r.trajectory.states.size() == 2);
  REQUIRE(r.trajectory.inputs.size() == 1);
  REQUIRE_NOTHROW(r.trajectory.validate());
}

TEST_CASE("rollout rejects a missing step function") {
  BlackBoxSystem sys;
  CHECK_THROWS_AS(rollout(sys, StateVec::Zero(), {0.0}, 0.1), std::invalid_argument);
}

TEST_CASE("double formatting round-trips exactly") {
  CHECK(fmt_double(0.1) == "0.1");
  CHECK(fmt_double(-3.0) == "-3");
  CHECK(fmt_double(0.0) == "0");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  for (int i = 0; i < 200; ++i) {
    double v = dist(rng);
    CHECK(parse_double(fmt_double(v), "test") == v);
  }
}

TEST_CASE("strict number parsing") {
  CHECK(parse_double("2.5", "x") == 2.5);
  CHECK(parse_double("-1e-3", "x") == -1e-3);
  CHECK_THROWS(parse_double("", "x"));
  CHECK_THROWS(parse_double("abc", "x"));
  CHECK_THROWS(parse_double("1.2.3", "x"));
  CHECK_THROWS(parse_double("3 ", "x"));
}

TEST_CASE("line splitting keeps empty trailing fields") {
  auto tok = split_line("1,2,,4,");
  REQUIRE(tok.size() == 5);
  CHECK(tok[2].empty());
  CHECK(tok[4].empty());
  CHECK(split_line("").size() == 1);
  // carriage returns from foreign line endings are dropped
  auto crlf = split_line("a,b\r");
  REQUIRE(crlf.size() == 2);
  CHECK(crlf[1] == "b");
}

TEST_CASE("trajectory CSV round trip") {
  Trajectory t;
  t.dt = 0.1;
  t.states = {StateVec(1.0, 2.0, 3.0), StateVec(1.05, 2.0, 3.1), StateVec(1.1, 2.0, 3.2)};
  t.inputs = {0.5, -0.25};

  TempFile f("liftreach_test_traj.csv");
  write_trajectory_csv(t, f.path);
  Trajectory back = read_trajectory_csv(f.path);
  REQUIRE(back.states.size() == 3);
  REQUIRE(back.inputs.size() == 2);
  CHECK(back.dt == Catch::Approx(0.1));
  for (std::size_t k = 0; k < t.states.size(); ++k)
    CHECK((back.states[k] - t.states[k]).norm() == 0.0);
  CHECK(back.inputs == t.inputs);

  // the last row carries no input field
  std::ifstream raw(f.path);
  std::string line, last;
  while (std::getline(raw, line))
    if (!line.empty()) last = line;
  CHECK(last.back() == ',');
}

TEST_CASE("trajectory CSV rejects a gap in the input column") {
  TempFile f("liftreach_test_traj_bad.csv");
  {
    std::ofstream out(f.path);
    out << "t,x1,x2,x3,u\n0,1,2,3,\n0.1,1,2,3,0.5\n";
  }
  CHECK_THROWS(read_trajectory_csv(f.path));
}

TEST_CASE("dataset CSV round trip") {
  Dataset data;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-5.0, 15.0);
  for (int i = 0; i < 50; ++i) {
    Sample s;
    s.x = StateVec(dist(rng), dist(rng), dist(rng));
    s.u = dist(rng) / 10.0;
    s.xp = StateVec(dist(rng), dist(rng), dist(rng));
    data.push_back(s);
  }
  TempFile f("liftreach_test_dataset.csv");
  write_dataset_csv(data, f.path);
  Dataset back = read_dataset_csv(f.path);
  REQUIRE(back.size() == data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK((back[i].x - data[i].x).norm() == 0.0);
    CHECK(back[i].u == data[i].u);
    CHECK((back[i].xp - data[i].xp).norm() == 0.0);
  }
}

TEST_CASE("vehicle log CSV round trip") {
  std::vector<VehicleLogRow> rows = {{0.0, 0, 0.0, 3.5}, {0.0, 1, 10.95, 3.6}, {0.1, 0, 0.35, 3.5}};
  TempFile f("liftreach_test_log.csv");
  write_vehicle_log_csv(rows, f.path);
  auto back = read_vehicle_log_csv(f.path);
  REQUIRE(back.size() == 3);
  CHECK(back[1].vehicle_id == 1);
  CHECK(back[1].pos == 10.95);
  CHECK(back[2].t == 0.1);
}

TEST_CASE("missing files raise IO errors") {
  CHECK_THROWS_AS(read_trajectory_csv("/nonexistent/nope.csv"), IOError);
  CHECK_THROWS_AS(read_dataset_csv("/nonexistent/nope.csv"), IOError);
  CHECK_THROWS_AS(fnv1a64_file("/nonexistent/nope.bin"), IOError);
}

TEST_CASE("FNV-1a 64 reference values") {
  // published reference digests for the 64-bit FNV-1a parameters
  CHECK(fnv1a64_str("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64_str("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64_str("foobar") == 0x85944171f73967e8ull);

  // streaming a file equals hashing the same bytes in memory
  TempFile f("liftreach_test_digest.bin");
  std::string payload = "digest me\nacross lines\n";
  {
    std::ofstream out(f.path, std::ios::binary);
    out << payload;
  }
  CHECK(fnv1a64_file(f.path) == fnv1a64_str(payload));
}
