#include <cstring>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "semsteer/datastore.hpp"
#include "semsteer/error.hpp"
#include "semsteer/fixture.hpp"
#include "semsteer/simulated_analyst.hpp"
#include "support.hpp"

using namespace semsteer;

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Error load_error(const std::filesystem::path& path) {
  try {
    load_dataset(path);
  } catch (const Error& e) {
    return e;
  }
  FAIL("dataset loaded");
  return Error(ErrorCode::InvalidInput, "");
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::shared_ptr<const Dataset> small_dataset() {
  FixtureOptions options;
  options.id = "small";
  options.per_cluster = 10;
  options.noise = 6;
  return std::make_shared<const Dataset>(make_synthetic_fixture(options));
}

SessionState trained(std::shared_ptr<const Dataset> dataset, Variant variant, std::size_t steps) {
  auto state = create_session(dataset, variant, 3);
  std::mt19937_64 rng(3);
  for (std::size_t k = 0; k < steps; ++k) {
    state = apply_interaction(state, simulate_interaction(dataset->label_indices(), 2, rng));
  }
  return state;
}

}  // namespace

TEST_SUITE("datastore") {

TEST_CASE("a valid file loads") {
  support::TempDir dir("load");
  write_file(dir / "three.jsonl",
             "{\"id\": \"a\", \"label\": \"x\", \"text\": \"alpha\", \"vector\": [1, 2]}\n"
             "\n"
             "{\"id\": \"b\", \"vector\": [3, 4.5]}\n"
             "{\"id\": \"c\", \"label\": \"y\", \"vector\": [-1, 0]}\n");
  const auto dataset = load_dataset(dir / "three.jsonl");
  CHECK(dataset.id() == "three");
  CHECK(dataset.size() == 3);
  CHECK(dataset.width() == 2);
  CHECK(dataset.document(0).text == "alpha");
  CHECK_FALSE(dataset.document(1).label.has_value());
  CHECK_FALSE(dataset.has_labels());
  CHECK(dataset.features()(1, 1) == 4.5);
  CHECK(dataset.index_of("c") == 2u);
  CHECK_FALSE(dataset.index_of("zzz").has_value());
}

TEST_CASE("loader diagnostics name the offending line") {
  support::TempDir dir("errors");
  write_file(dir / "width.jsonl", "{\"id\": \"a\", \"vector\": [1, 2]}\n{\"id\": \"b\", \"vector\": [1, 2, 3]}\n");
  auto e = load_error(dir / "width.jsonl");
  CHECK(e.code() == ErrorCode::InconsistentWidth);
  CHECK(std::string(e.what()).find("width.jsonl:2:") != std::string::npos);
  CHECK(std::string(e.what()).find("'b'") != std::string::npos);

  write_file(dir / "dup.jsonl", "{\"id\": \"a\", \"vector\": [1]}\n{\"id\": \"b\", \"vector\": [2]}\n{\"id\": \"a\", \"vector\": [3]}\n");
  e = load_error(dir / "dup.jsonl");
  CHECK(e.code() == ErrorCode::DuplicateId);
  CHECK(std::string(e.what()).find("dup.jsonl:3:") != std::string::npos);

  write_file(dir / "broken.jsonl", "{\"id\": \"a\", \"vector\": [1]}\n{\"id\": \"b\", \"vector\": [2\n");
  e = load_error(dir / "broken.jsonl");
  CHECK(e.code() == ErrorCode::Parse);
  CHECK(std::string(e.what()).find("broken.jsonl:2:") != std::string::npos);

  write_file(dir / "novector.jsonl", "{\"id\": \"a\", \"vector\": [1]}\n{\"id\": \"b\"}\n");
  CHECK(load_error(dir / "novector.jsonl").code() == ErrorCode::Parse);

  write_file(dir / "inf.jsonl", "{\"id\": \"a\", \"vector\": [1]}\n{\"id\": \"b\", \"vector\": [1e999]}\n");
  e = load_error(dir / "inf.jsonl");
  CHECK(e.code() == ErrorCode::InvalidInput);
  CHECK(std::string(e.what()).find("inf.jsonl:2:") != std::string::npos);

  write_file(dir / "single.jsonl", "{\"id\": \"a\", \"vector\": [1]}\n");
  CHECK(load_error(dir / "single.jsonl").code() == ErrorCode::InvalidInput);

  CHECK(load_error(dir / "missing.jsonl").code() == ErrorCode::NotFound);
}

TEST_CASE("datasets reject non-finite vectors directly") {
  std::vector<Document> docs{{"a", {0.0}, {}, {}}, {"b", {std::nan("")}, {}, {}}};
  CHECK_THROWS_AS(Dataset("nan", docs), Error);
}

TEST_CASE("the shipped fixture loads and round-trips bit-exactly") {
  const auto shipped = load_dataset(support::data_dir() / "synthetic4.jsonl");
  CHECK(shipped.size() == 200);
  CHECK(shipped.width() == 64);
  CHECK(shipped.label_names().size() == 4);
  CHECK(shipped.has_labels());

  // the committed file is what the generator writes
  const auto generated = make_synthetic_fixture();
  REQUIRE(generated.size() == shipped.size());
  for (std::size_t i = 0; i < shipped.size(); ++i) {
    CHECK(shipped.document(i).id == generated.document(i).id);
    CHECK(shipped.document(i).label == generated.document(i).label);
    CHECK(bitwise_equal(shipped.document(i).vector, generated.document(i).vector));
  }

  support::TempDir dir("roundtrip");
  save_dataset(shipped, dir / "synthetic4.jsonl");
  const auto again = load_dataset(dir / "synthetic4.jsonl");
  REQUIRE(again.size() == shipped.size());
  for (std::size_t i = 0; i < shipped.size(); ++i) {
    CHECK(again.document(i) == shipped.document(i));
    CHECK(bitwise_equal(again.document(i).vector, shipped.document(i).vector));
  }
}

TEST_CASE("the shipped text bundle is well formed") {
  const auto bundle = load_dataset(support::data_dir() / "docstrings4.jsonl");
  CHECK(bundle.size() <= 500);
  CHECK(bundle.has_labels());
  CHECK(bundle.label_names().size() == 4);
  for (const auto& doc : bundle.documents()) CHECK(doc.text.has_value());
}

TEST_CASE("sessions round-trip") {
  const auto dataset = small_dataset();
  support::TempDir dir("session");
  for (Variant variant : {Variant::Vanilla, Variant::Finetune}) {
    const auto state = trained(dataset, variant, 3);
    save_session(state, dir / "s.json");
    const auto loaded = load_session(dir / "s.json", dataset);
    CHECK(loaded.iteration == 3);
    CHECK(loaded.variant == variant);
    CHECK(loaded.seed == state.seed);
    CHECK(loaded.weights.values() == state.weights.values());
    CHECK(loaded.encoder.weights.flatten() == state.encoder.weights.flatten());
    CHECK(loaded.encoder.version == state.encoder.version);
    CHECK(loaded.optimizer.step == state.optimizer.step);
    CHECK(loaded.optimizer.first_moment == state.optimizer.first_moment);
    CHECK(loaded.optimizer.second_moment == state.optimizer.second_moment);
    CHECK(loaded.layout.coords() == state.layout.coords());
    CHECK((predict_layout(loaded).coords() - predict_layout(state).coords()).cwiseAbs().maxCoeff() <= 1e-12);

    // replay-equivalent: the next update agrees as well
    std::mt19937_64 rng(50);
    const auto next = simulate_interaction(dataset->label_indices(), 3, rng);
    CHECK(apply_interaction(loaded, next).layout.coords() == apply_interaction(state, next).layout.coords());
  }
}

TEST_CASE("damaged or foreign session files are refused") {
  const auto dataset = small_dataset();
  support::TempDir dir("damaged");
  const auto state = trained(dataset, Variant::Finetune, 1);
  save_session(state, dir / "s.json");
  const std::string good = read_file(dir / "s.json");

  const auto code_for = [&](const std::string& text, std::shared_ptr<const Dataset> ds) {
    write_file(dir / "t.json", text);
    try {
      load_session(dir / "t.json", ds);
    } catch (const Error& e) {
      return e.code();
    }
    FAIL("session loaded");
    return ErrorCode::InvalidInput;
  };

  CHECK(code_for(good.substr(0, good.size() / 2), dataset) == ErrorCode::Integrity);

  std::string flipped = good;
  const auto at = flipped.find("\"iteration\":1");
  REQUIRE(at != std::string::npos);
  flipped.replace(at, 13, "\"iteration\":2");
  CHECK(code_for(flipped, dataset) == ErrorCode::Integrity);

  std::string future = good;
  const auto v = future.find("\"version\":1");
  REQUIRE(v != std::string::npos);
  future.replace(v, 11, "\"version\":9");
  CHECK(code_for(future, dataset) == ErrorCode::Migration);

  FixtureOptions other;
  other.id = "other";
  other.per_cluster = 10;
  other.noise = 6;
  CHECK(code_for(good, std::make_shared<const Dataset>(make_synthetic_fixture(other))) == ErrorCode::InvalidInput);
}

TEST_CASE("layout CSV round-trip") {
  const auto dataset = small_dataset();
  const auto state = create_session(dataset, Variant::Vanilla, 0);
  support::TempDir dir("csv");
  save_layout_csv(*dataset, state.layout, dir / "layout.csv");
  CHECK(read_file(dir / "layout.csv").rfind("id,x,y\n", 0) == 0);
  const auto loaded = load_layout_csv(*dataset, dir / "layout.csv");
  CHECK(loaded.coords() == state.layout.coords());

  write_file(dir / "short.csv", "id,x,y\ndoc-0,0.1,0.2\n");
  CHECK_THROWS_AS(load_layout_csv(*dataset, dir / "short.csv"), Error);
}

TEST_CASE("catalog of a data directory") {
  support::TempDir dir("catalog");
  save_dataset(*small_dataset(), dir / "small.jsonl");
  write_file(dir / "notes.txt", "ignored");
  const auto catalog = DatasetCatalog::load_directory(dir.path());
  CHECK(catalog.ids() == std::vector<std::string>{"small"});
  CHECK(catalog.get("small")->size() == 40);
  CHECK(catalog.find("nope") == nullptr);
  try {
    catalog.get("nope");
    FAIL("found an unknown dataset");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotFound);
  }
}

}  // TEST_SUITE
