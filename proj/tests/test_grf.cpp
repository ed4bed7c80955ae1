#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "gaitkb/error.hpp"
#include "gaitkb/grf.hpp"
#include "oracles.hpp"

using namespace gaitkb;

TEST_SUITE("grf") {

TEST_CASE("segment_steps: all-zero signal yields no segments") {
  for (std::size_t n : {1u, 10u, 5000u}) {
    auto trial = fixtures::zero_trial(n);
    CHECK(segment_steps(trial, Foot::Left).empty());
    CHECK(segment_steps(trial, Foot::Right).empty());
  }
}

TEST_CASE("segment_steps: rectangular 600 N pulse") {
  auto trial = fixtures::zero_trial(2000);
  fixtures::pulse(trial.left_samples, 100, 799, 600.0);
  CHECK(contact_threshold(80.0) == doctest::Approx(39.2266));

  const auto expected = oracle::threshold_runs(trial.left_samples, contact_threshold(80.0), 100);
  REQUIRE(expected.size() == 1);
  CHECK(expected[0] == std::pair<std::size_t, std::size_t>{100, 799});

  const auto segs = segment_steps(trial, Foot::Left);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].start_index == 100);
  CHECK(segs[0].end_index == 799);
  CHECK(segs[0].samples.size() == 700);
  CHECK(segs[0].foot == Foot::Left);
}

TEST_CASE("segment_steps: pulses shorter than the minimum stance are dropped") {
  auto trial = fixtures::zero_trial(2000);
  fixtures::pulse(trial.right_samples, 100, 799, 600.0);
  fixtures::pulse(trial.right_samples, 900, 949, 600.0);  // 50 samples = 0.05 s
  const auto segs = segment_steps(trial, Foot::Right);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].start_index == 100);

  // 100 samples is exactly 0.1 s and is kept.
  fixtures::pulse(trial.right_samples, 1200, 1299, 600.0);
  CHECK(segment_steps(trial, Foot::Right).size() == 2);
}

TEST_CASE("segment_steps: samples equal to the threshold are not contact") {
  auto trial = fixtures::zero_trial(1000);
  const double theta = contact_threshold(80.0);
  fixtures::pulse(trial.left_samples, 100, 400, theta);
  CHECK(segment_steps(trial, Foot::Left).empty());
}

TEST_CASE("segment_steps: empty stream is an invalid trial") {
  auto trial = fixtures::zero_trial(10);
  trial.left_samples.clear();
  try {
    segment_steps(trial, Foot::Left);
    FAIL("expected InvalidTrial");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidTrial);
  }
}

TEST_CASE("segment_steps property: segments match the mask oracle and bounds are tight") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> noise(0.0, 80.0);
  std::bernoulli_distribution flip(0.02);
  for (int round = 0; round < 50; ++round) {
    auto trial = fixtures::zero_trial(3000);
    bool high = false;
    for (auto& x : trial.left_samples) {
      if (flip(rng)) high = !high;
      x = high ? 300.0 + noise(rng) : noise(rng) * 0.4;
    }
    const double theta = contact_threshold(80.0);
    const auto segs = segment_steps(trial, Foot::Left);
    const auto runs = oracle::threshold_runs(trial.left_samples, theta, 100);
    REQUIRE(segs.size() == runs.size());
    for (std::size_t k = 0; k < segs.size(); ++k) {
      CHECK(segs[k].start_index == runs[k].first);
      CHECK(segs[k].end_index == runs[k].second);
      for (double v : segs[k].samples) CHECK(v > theta);
      if (segs[k].start_index > 0) CHECK_FALSE(trial.left_samples[segs[k].start_index - 1] > theta);
      if (segs[k].end_index + 1 < trial.left_samples.size())
        CHECK_FALSE(trial.left_samples[segs[k].end_index + 1] > theta);
    }
  }
}

TEST_CASE("amplitude_normalize") {
  CHECK(amplitude_normalize(std::vector{80.0 * kStandardGravity}, 80.0)[0] == 1.0);
  CHECK(amplitude_normalize(std::vector{0.0}, 55.0)[0] == 0.0);
  CHECK(amplitude_normalize(std::vector{600.0}, 80.0)[0] == doctest::Approx(0.7647871597334462).epsilon(1e-14));
  CHECK(amplitude_normalize(std::vector<double>{}, 80.0).empty());

  CHECK_THROWS_AS(amplitude_normalize(std::vector{1.0}, 0.0), Error);
  try {
    amplitude_normalize(std::vector{1.0}, -3.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidPatientMeta);
  }
}

TEST_CASE("amplitude_normalize is linear") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 2000.0);
  std::uniform_real_distribution<double> a(0.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> s(17);
    for (auto& x : s) x = u(rng);
    const double k = a(rng);
    std::vector<double> scaled = s;
    for (auto& x : scaled) x *= k;
    const auto lhs = amplitude_normalize(scaled, 73.0);
    const auto rhs = amplitude_normalize(s, 73.0);
    for (std::size_t j = 0; j < s.size(); ++j) CHECK(lhs[j] == doctest::Approx(k * rhs[j]).epsilon(1e-12));
  }
}

TEST_CASE("time_normalize: constant, identity and ramp") {
  const double bw = 80.0 * kStandardGravity;
  for (std::size_t n : {2u, 3u, 57u, 1000u}) {
    auto c = time_normalize(fixtures::segment(std::vector<double>(n, bw)), 80.0);
    for (double v : c.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  }

  std::vector<double> raw(101);
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = 10.0 * static_cast<double>(i * i % 37);
  const auto normalized = amplitude_normalize(raw, 80.0);
  const auto same = time_normalize(fixtures::segment(raw), 80.0);
  for (std::size_t t = 0; t < kCurveLength; ++t) CHECK(same.values[t] == normalized[t]);

  std::vector<double> ramp(201);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i) / 200.0 * bw;
  const auto r = time_normalize(fixtures::segment(ramp), 80.0);
  for (int t = 0; t <= 100; ++t) CHECK(std::fabs(r.values[static_cast<std::size_t>(t)] - t / 100.0) <= 1e-12);
}

TEST_CASE("time_normalize agrees with the interpolation oracle for arbitrary lengths") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> len(2, 3000);
  std::uniform_real_distribution<double> u(0.0, 1500.0);
  for (int round = 0; round < 100; ++round) {
    std::vector<double> raw(len(rng));
    for (auto& x : raw) x = u(rng);
    const auto curve = time_normalize(fixtures::segment(raw), 65.0);
    const auto y = amplitude_normalize(raw, 65.0);
    CHECK(curve.values.size() == 101);
    CHECK(curve.values.front() == y.front());
    CHECK(curve.values.back() == y.back());
    for (int t = 0; t <= 100; ++t)
      CHECK(curve.values[static_cast<std::size_t>(t)] == doctest::Approx(oracle::lerp_at_percent(y, t)).epsilon(1e-12));
  }
}

TEST_CASE("time_normalize: fewer than two samples is degenerate") {
  try {
    time_normalize(fixtures::segment({500.0}), 80.0);
    FAIL("expected DegenerateSegment");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateSegment);
  }
}

TEST_CASE("build_consistency_graph") {
  SUBCASE("one curve") {
    std::vector<StepSegment> segs{fixtures::segment(fixtures::half_sine(333, 1.2, 70.0))};
    const auto g = build_consistency_graph(segs, 70.0);
    REQUIRE(g.step_curves.size() == 1);
    CHECK(g.mean_curve.values == g.step_curves[0].values);
  }
  SUBCASE("mirror pair averages to a constant") {
    const double k = 0.8;
    const double bw = 70.0 * kStandardGravity;
    std::vector<double> c(250), mirror(250);
    for (std::size_t i = 0; i < c.size(); ++i) {
      c[i] = (0.3 + 0.5 * std::sin(0.1 * static_cast<double>(i))) * bw;
      mirror[i] = 2.0 * k * bw - c[i];
    }
    std::vector<StepSegment> segs{fixtures::segment(c), fixtures::segment(mirror)};
    const auto g = build_consistency_graph(segs, 70.0);
    for (double v : g.mean_curve.values) CHECK(v == doctest::Approx(k).epsilon(1e-12));
  }
  SUBCASE("ten half-sine steps 1.0..1.9 BW") {
    std::vector<StepSegment> segs;
    for (int k = 0; k < 10; ++k) segs.push_back(fixtures::segment(fixtures::half_sine(401 + 10 * k, 1.0 + 0.1 * k, 80.0)));
    const auto g = build_consistency_graph(segs, 80.0);
    REQUIRE(g.step_curves.size() == 10);
    CHECK(g.mean_curve.values[50] == doctest::Approx(1.45).epsilon(1e-12));
    for (std::size_t t = 0; t < kCurveLength; ++t) {
      long double sum = 0;
      for (const auto& c : g.step_curves) sum += c.values[t];
      CHECK(std::fabs(g.mean_curve.values[t] - static_cast<double>(sum / 10)) <= 1e-12);
    }
  }
  SUBCASE("no segments") {
    try {
      build_consistency_graph({}, 80.0);
      FAIL("expected NoSteps");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoSteps);
    }
  }
}

TEST_CASE("stp ids") {
  CHECK(stp_id(StpKind::StanceTime, Foot::Left) == 1);
  CHECK(stp_id(StpKind::StrideLength, Foot::Left) == 8);
  CHECK(stp_id(StpKind::StanceTime, Foot::Right) == 9);
  CHECK(stp_id(StpKind::StrideLength, Foot::Right) == 16);
  for (int id = 1; id <= kStpCount; ++id) {
    CHECK(stp_id(stp_kind(id), stp_foot(id)) == id);
    CHECK(stp_counterpart(stp_counterpart(id)) == id);
  }
  CHECK_THROWS_AS(stp_kind(0), Error);
  CHECK_THROWS_AS(stp_kind(17), Error);
}

namespace {

// Segments given contact times [s] and stance durations [s] at 1000 Hz.
std::vector<StepSegment> contacts(Foot foot, std::initializer_list<std::pair<double, double>> timing) {
  std::vector<StepSegment> out;
  for (auto [start, stance] : timing) {
    StepSegment s;
    s.foot = foot;
    s.start_index = static_cast<std::size_t>(std::lround(start * 1000.0));
    s.end_index = s.start_index + static_cast<std::size_t>(std::lround(stance * 1000.0)) - 1;
    s.samples.assign(s.end_index - s.start_index + 1, 500.0);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

TEST_CASE("compute_stps: temporal parameters from contact times") {
  auto trial = fixtures::zero_trial(4000);
  const auto left = contacts(Foot::Left, {{0.0, 0.66}, {1.1, 0.66}});
  const auto right = contacts(Foot::Right, {{0.55, 0.70}, {1.65, 0.70}});
  const auto stps = compute_stps(trial, left, right);

  const auto L = [](StpKind k) { return stp_id(k, Foot::Left); };
  const auto R = [](StpKind k) { return stp_id(k, Foot::Right); };
  CHECK(*stps.value(L(StpKind::StrideTime)) == doctest::Approx(1.1));
  CHECK(*stps.value(L(StpKind::StanceTime)) == doctest::Approx(0.66));
  CHECK(*stps.value(L(StpKind::SwingTime)) == doctest::Approx(40.0));
  // Only the second left contact has an earlier right contact: 1.1 - 0.55.
  CHECK(*stps.value(L(StpKind::StepTime)) == doctest::Approx(0.55));
  CHECK(*stps.value(L(StpKind::Cadence)) == doctest::Approx(60.0 / 0.55));
  CHECK(*stps.value(R(StpKind::StepTime)) == doctest::Approx(0.55));
  CHECK(*stps.value(R(StpKind::StanceTime)) == doctest::Approx(0.70));

  for (auto foot : {Foot::Left, Foot::Right}) {
    CHECK_FALSE(stps.value(stp_id(StpKind::StepLength, foot)));
    CHECK_FALSE(stps.value(stp_id(StpKind::StrideLength, foot)));
    CHECK_FALSE(stps.value(stp_id(StpKind::WalkingSpeed, foot)));
    const double swing = *stps.value(stp_id(StpKind::SwingTime, foot));
    const double ratio = *stps.value(stp_id(StpKind::StanceTime, foot)) / *stps.value(stp_id(StpKind::StrideTime, foot));
    CHECK(std::fabs(swing + ratio * 100.0 - 100.0) <= 1e-9);
  }
}

TEST_CASE("compute_stps: single segment leaves stride-based entries missing") {
  auto trial = fixtures::zero_trial(4000);
  const auto left = contacts(Foot::Left, {{0.1, 0.6}});
  const auto right = contacts(Foot::Right, {{0.6, 0.6}, {1.7, 0.6}});
  const auto stps = compute_stps(trial, left, right);
  CHECK(stps.value(stp_id(StpKind::StanceTime, Foot::Left)).has_value());
  CHECK_FALSE(stps.value(stp_id(StpKind::StrideTime, Foot::Left)));
  CHECK_FALSE(stps.value(stp_id(StpKind::SwingTime, Foot::Left)));
  CHECK_FALSE(stps.value(stp_id(StpKind::StepTime, Foot::Left)));  // no earlier right contact
  CHECK(stps.value(stp_id(StpKind::StrideTime, Foot::Right)).has_value());
}

TEST_CASE("compute_stps: spatial annotations fill lengths and speed") {
  auto trial = fixtures::zero_trial(4000);
  trial.spatial = SpatialMeta{{{0.70, 0.72}, {1.40, 1.44}}, {{0.68}, {1.40}}, 10.0};
  const auto left = contacts(Foot::Left, {{0.0, 0.66}, {1.1, 0.66}});
  const auto right = contacts(Foot::Right, {{0.55, 0.66}, {1.65, 0.66}});
  const auto stps = compute_stps(trial, left, right);
  CHECK(*stps.value(stp_id(StpKind::StepLength, Foot::Left)) == doctest::Approx(0.71));
  CHECK(*stps.value(stp_id(StpKind::StrideLength, Foot::Left)) == doctest::Approx(1.42));
  CHECK(*stps.value(stp_id(StpKind::WalkingSpeed, Foot::Left)) == doctest::Approx(1.42 / 1.1));
  CHECK(*stps.value(stp_id(StpKind::WalkingSpeed, Foot::Right)) == doctest::Approx(1.40 / 1.1));
  CHECK(stps.present_count() == 16);
}

TEST_CASE("process_trial requires steps on both feet") {
  auto trial = fixtures::zero_trial(3000);
  fixtures::pulse(trial.left_samples, 100, 799, 600.0);
  try {
    process_trial(trial);
    FAIL("expected NoSteps");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoSteps);
  }
  fixtures::pulse(trial.right_samples, 600, 1299, 600.0);
  const auto p = process_trial(trial);
  CHECK(p.left_graph.step_curves.size() == 1);
  CHECK(p.right_graph.foot == Foot::Right);
}

TEST_CASE("validate rejects bad trials") {
  auto trial = fixtures::zero_trial(10);
  trial.left_samples[3] = std::nan("");
  CHECK_THROWS_AS(validate(trial), Error);
  trial = fixtures::zero_trial(10);
  trial.sample_rate = 0.0;
  CHECK_THROWS_AS(validate(trial), Error);
  trial = fixtures::zero_trial(10);
  trial.patient.body_height = 0.0;
  try {
    validate(trial);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidPatientMeta);
  }
}

}  // TEST_SUITE
