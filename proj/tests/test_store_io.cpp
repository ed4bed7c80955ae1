#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "gaitkb/cohort.hpp"
#include "gaitkb/error.hpp"
#include "gaitkb/store_io.hpp"

using namespace gaitkb;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("gaitkb_store_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ErrorCode load_error(const fs::path& p) {
  try {
    load_store(p);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::NotFound;
}

}  // namespace

TEST_SUITE("store_io") {

TEST_CASE("round trip of the case-study shaped store") {
  TempDir dir;
  auto store = synthesize_store(default_cohort_config());
  store = override_range(std::move(store), "hip", 3, 0.5, 0.6);
  CHECK(store.norm_category.patients.size() == 489);
  CHECK(store.pathology_categories.size() == 4);
  save_store(store, dir.path / "s.json");
  CHECK(load_store(dir.path / "s.json") == store);
}

TEST_CASE("round trip of empty and random stores") {
  TempDir dir;
  save_store(KnowledgeStore{}, dir.path / "empty.json");
  CHECK(load_store(dir.path / "empty.json") == KnowledgeStore{});

  std::mt19937_64 rng(77);
  for (int i = 0; i < 20; ++i) {
    auto store = fixtures::random_store(rng, 4, 15);
    if (i % 2) store = override_range(std::move(store), "cat1", 1 + i % 16, -1.0, 1.0 * i);
    CHECK(parse_store(store_to_json(store).dump()) == store);
  }
}

TEST_CASE("failures leave files and memory untouched") {
  TempDir dir;
  const auto path = dir.path / "s.json";
  std::mt19937_64 rng(1);
  const auto store = fixtures::random_store(rng);
  save_store(store, path);
  const auto bytes = slurp(path);

  SUBCASE("truncated file") {
    std::ofstream(dir.path / "t.json", std::ios::binary) << bytes.substr(0, bytes.size() / 2);
    CHECK(load_error(dir.path / "t.json") == ErrorCode::PersistenceError);
    try {
      load_store(dir.path / "t.json");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
  }
  SUBCASE("unrepresentable number") {
    std::ofstream(dir.path / "o.json") << R"({"schema_version": 1e999})";
    CHECK(load_error(dir.path / "o.json") == ErrorCode::PersistenceError);
  }
  SUBCASE("missing file") { CHECK(load_error(dir.path / "missing.json") == ErrorCode::PersistenceError); }
  SUBCASE("schema version") {
    auto doc = store_to_json(store);
    doc["schema_version"] = 99;
    std::ofstream(dir.path / "v.json") << doc.dump();
    CHECK(load_error(dir.path / "v.json") == ErrorCode::VersionError);
  }
  SUBCASE("schema violations") {
    auto doc = store_to_json(store);
    doc["norm_category"]["ranges"].erase(0);
    std::ofstream(dir.path / "r.json") << doc.dump();
    CHECK(load_error(dir.path / "r.json") == ErrorCode::PersistenceError);

    doc = store_to_json(store);
    doc["pathology_categories"][0]["id"] = "norm";
    std::ofstream(dir.path / "d.json") << doc.dump();
    CHECK(load_error(dir.path / "d.json") == ErrorCode::PersistenceError);

    doc = store_to_json(store);
    doc["norm_category"]["ranges"][0] = {{"stp_id", 1}, {"min", 2.0}, {"max", 1.0}, {"manual", true}};
    std::ofstream(dir.path / "m.json") << doc.dump();
    CHECK(load_error(dir.path / "m.json") == ErrorCode::PersistenceError);
  }
  SUBCASE("unwritable destination") {
    CHECK_THROWS_AS(save_store(store, dir.path / "no" / "such" / "dir.json"), Error);
    fs::create_directories(dir.path / "blocker");
    // Renaming a file over a directory fails; the temp file is cleaned up.
    CHECK_THROWS_AS(save_store(KnowledgeStore{}, dir.path / "blocker"), Error);
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path)) ++entries;
    CHECK(entries == 2);  // s.json and blocker
  }
  CHECK(slurp(path) == bytes);
  CHECK(load_store(path) == store);
}

}  // TEST_SUITE
