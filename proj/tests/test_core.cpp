#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sparsectrl/analytic.hpp"
#include "sparsectrl/core.hpp"
#include "sparsectrl/csv.hpp"

#include <filesystem>
#include <random>

using namespace sparsectrl;

TEST_CASE("integrator chain validates its order") {
    CHECK_THROWS_AS(IntegratorChain(0), ValidationError);
    CHECK_THROWS_AS(IntegratorChain(13), ValidationError);
    CHECK_NOTHROW(IntegratorChain(1));
    CHECK_NOTHROW(IntegratorChain(12));
}

TEST_CASE("integrator chain matrices have the shift structure") {
    const IntegratorChain chain(4);
    const Eigen::MatrixXd a = chain.system_matrix();
    const Eigen::VectorXd b = chain.input_vector();
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            CHECK(a(i, j) == (j == i + 1 ? 1.0 : 0.0));
        }
        CHECK(b(i) == (i == 3 ? 1.0 : 0.0));
    }
}

TEST_CASE("movement task validation") {
    CHECK_THROWS_AS(MovementTask(0.0, 1.0, 0.0), ValidationError);
    CHECK_THROWS_AS(MovementTask(0.0, 1.0, -1.0), ValidationError);
    const MovementTask task(1.0, -2.0, 0.5);
    CHECK(task.displacement() == doctest::Approx(-3.0));
}

TEST_CASE("bang-bang signal rejects non-symmetric switch times") {
    CHECK_THROWS_AS(BangBangSignal(1.0, {0.0, 0.3, 1.0}, 1), ValidationError);
    CHECK_NOTHROW(BangBangSignal(1.0, {0.0, 0.5, 1.0}, 1));
}

TEST_CASE("bang-bang signal rejects malformed inputs") {
    CHECK_THROWS_AS(BangBangSignal(-1.0, {0.0, 1.0}, 1), ValidationError);
    CHECK_THROWS_AS(BangBangSignal(1.0, {0.0, 1.0}, 2), ValidationError);
    CHECK_THROWS_AS(BangBangSignal(1.0, {0.1, 1.0}, 1), ValidationError);   // must start at 0
    CHECK_THROWS_AS(BangBangSignal(1.0, {0.0}, 1), ValidationError);        // too few times
    CHECK_THROWS_AS(BangBangSignal(1.0, {0.0, 0.5, 0.5, 1.0}, 1), ValidationError);
}

TEST_CASE("bang-bang signal alternates through its intervals") {
    const BangBangSignal signal(2.0, {0.0, 0.25, 0.75, 1.0}, 1);
    CHECK(signal.order() == 3);
    CHECK(signal.value_at(0.1) == 2.0);
    CHECK(signal.value_at(0.25) == -2.0);  // interval boundary belongs to the right
    CHECK(signal.value_at(0.5) == -2.0);
    CHECK(signal.value_at(0.8) == 2.0);
    CHECK(signal.value_at(1.0) == 0.0);  // signal ends at T
    CHECK(signal.value_at(-0.5) == 0.0);
}

TEST_CASE("spike train validation") {
    CHECK_THROWS_AS(SpikeTrain({{0.5, 1.0}, {0.2, 1.0}}, 1.0), ValidationError);
    CHECK_THROWS_AS(SpikeTrain({{1.5, 1.0}}, 1.0), ValidationError);
    CHECK_NOTHROW(SpikeTrain({{0.0, 1.0}, {0.0, -1.0}, {1.0, 0.5}}, 1.0));
}

TEST_CASE("sampled series validation") {
    CHECK_THROWS_AS(SampledSeries({0.0, 0.0}, {1.0, 2.0}), ValidationError);
    CHECK_THROWS_AS(SampledSeries({0.0, 1.0}, {1.0}), ValidationError);
}

TEST_CASE("trial validation") {
    std::vector<double> t{0, 1, 2, 3, 4, 5, 6, 7};
    std::vector<double> x(8, 0.0);
    CHECK_NOTHROW(Trial("ok", t, x));
    CHECK_THROWS_AS(Trial("short", {0, 1, 2}, {0, 0, 0}), ValidationError);
    std::vector<double> bad = t;
    bad[4] = bad[3];
    CHECK_THROWS_AS(Trial("flat", bad, x), ValidationError);
}

TEST_CASE("trajectory enforces continuity across segments") {
    // Two segments whose positions disagree at the joint.
    std::vector<PiecewiseTrajectory::Segment> segments;
    Eigen::VectorXd c0(2);
    c0 << 0.0, 1.0;  // x = t on [0, 1]
    Eigen::VectorXd c1(2);
    c1 << 5.0, 1.0;  // jumps to 5 at t = 1
    segments.push_back({0.0, 1.0, c0});
    segments.push_back({1.0, 2.0, c1});
    CHECK_THROWS_AS(PiecewiseTrajectory(1, segments), ValidationError);
}

TEST_CASE("trajectory rejects gaps between segments") {
    std::vector<PiecewiseTrajectory::Segment> segments;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2);
    segments.push_back({0.0, 1.0, c});
    segments.push_back({1.5, 2.0, c});
    CHECK_THROWS_AS(PiecewiseTrajectory(1, segments), ValidationError);
}

TEST_CASE("trial CSV round trip is bit exact") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> jitter(1e-4, 1e-2);
    std::uniform_real_distribution<double> value(-0.3, 0.7);
    std::vector<double> t;
    std::vector<double> x;
    double now = 0.1234567890123456;
    for (int i = 0; i < 64; ++i) {
        t.push_back(now);
        x.push_back(value(rng));
        now += jitter(rng);
    }
    const Trial original("roundtrip", t, x, "s1", "reach");

    const auto path = std::filesystem::temp_directory_path() / "sparsectrl_roundtrip.csv";
    csv::write_trial(path, original);
    const Trial loaded = csv::read_trial(path, "s1", "reach");
    std::filesystem::remove(path);

    REQUIRE(loaded.size() == original.size());
    for (std::size_t i = 0; i < original.size(); ++i) {
        CHECK(loaded.times[i] == original.times[i]);
        CHECK(loaded.positions[i] == original.positions[i]);
    }
    CHECK(loaded.id == "sparsectrl_roundtrip");
}

TEST_CASE("core types compose: analytic signal fits its own trajectory") {
    const MovementTask task(0.0, 1.0, 1.0);
    const BangBangSignal signal = analytic::sparse_min_effort_signal(task, 3);
    const PiecewiseTrajectory trajectory = analytic::integrate_trajectory(signal, 3, 0.0);
    CHECK(trajectory.duration() == doctest::Approx(1.0));
    CHECK(trajectory.segments().size() == 3);
}
