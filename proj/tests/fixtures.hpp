#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "gaitkb/eks.hpp"
#include "gaitkb/grf.hpp"

namespace fixtures {

inline gaitkb::PatientMeta meta(double mass = 80.0, std::string id = "p1",
                                gaitkb::Gender gender = gaitkb::Gender::Female, double age = 40.0,
                                double height = 170.0) {
  return gaitkb::PatientMeta{std::move(id), age, mass, height, gender};
}

/// Trial with `n` samples per foot, all zero.
inline gaitkb::RawTrial zero_trial(std::size_t n, double mass = 80.0, double fs = 1000.0) {
  gaitkb::RawTrial t;
  t.patient = meta(mass);
  t.sample_rate = fs;
  t.left_samples.assign(n, 0.0);
  t.right_samples.assign(n, 0.0);
  return t;
}

inline void pulse(std::vector<double>& x, std::size_t first, std::size_t last, double value) {
  for (std::size_t i = first; i <= last; ++i) x[i] = value;
}

inline gaitkb::StepSegment segment(std::vector<double> samples, gaitkb::Foot foot = gaitkb::Foot::Left,
                                   std::size_t start = 0) {
  gaitkb::StepSegment s;
  s.foot = foot;
  s.start_index = start;
  s.end_index = start + samples.size() - 1;
  s.samples = std::move(samples);
  return s;
}

/// Half-sine stance of `n` samples peaking at `amplitude` body weights.
inline std::vector<double> half_sine(std::size_t n, double amplitude, double mass) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = amplitude * mass * gaitkb::kStandardGravity *
             std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
  return out;
}

inline gaitkb::StpVector stps(std::initializer_list<std::pair<int, double>> values) {
  gaitkb::StpVector v;
  for (auto [id, x] : values) v.set(id, x);
  return v;
}

inline gaitkb::StpVector full_stps(double value) {
  gaitkb::StpVector v;
  for (int id = 1; id <= gaitkb::kStpCount; ++id) v.set(id, value);
  return v;
}

inline gaitkb::PatientRecord record(std::string id, gaitkb::StpVector values,
                                    gaitkb::Gender gender = gaitkb::Gender::Female, double age = 40.0,
                                    double height = 170.0, double mass = 70.0) {
  return gaitkb::PatientRecord{meta(mass, std::move(id), gender, age, height), std::move(values), 0};
}

/// Random store with a few categories and random demographics/values.
inline gaitkb::KnowledgeStore random_store(std::mt19937_64& rng, int categories = 3, int max_members = 12) {
  using namespace gaitkb;
  KnowledgeStore store;
  std::uniform_int_distribution<int> members(0, max_members);
  std::uniform_real_distribution<double> value(0.0, 10.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> age(20, 80);
  std::uniform_int_distribution<int> height(150, 200);
  std::uniform_int_distribution<int> mass(45, 120);
  int serial = 0;
  for (int c = 0; c <= categories; ++c) {
    std::string id = c == 0 ? std::string(kNormCategoryId) : "cat" + std::to_string(c);
    if (c > 0) store = add_category(std::move(store), id, "Category " + std::to_string(c));
    const int n = members(rng);
    for (int m = 0; m < n; ++m) {
      StpVector v;
      for (int s = 1; s <= kStpCount; ++s)
        if (unit(rng) > 0.1) v.set(s, value(rng));
      const auto g = unit(rng) < 0.45 ? Gender::Female : (unit(rng) < 0.9 ? Gender::Male : Gender::Unspecified);
      store = apply_patient(std::move(store), id,
                            record("p" + std::to_string(serial++), v, g, age(rng), height(rng), mass(rng)));
    }
  }
  return store;
}

}  // namespace fixtures
