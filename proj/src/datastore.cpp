#include "semsteer/datastore.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "semsteer/error.hpp"

namespace semsteer {

using nlohmann::json;

namespace {

std::string line_prefix(const std::filesystem::path& path, std::size_t line) {
  return path.filename().string() + ":" + std::to_string(line) + ": ";
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string checksum_of(const json& payload) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << fnv1a(payload.dump());
  return out.str();
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()},
              {"data", std::vector<double>(m.data(), m.data() + m.size())}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size()) {
    fail(ErrorCode::Integrity, "session file: matrix shape does not match its data");
  }
  return Eigen::Map<const Eigen::MatrixXd>(data.data(), rows, cols);
}

json vector_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const json& j) {
  const auto data = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(data.data(), static_cast<Eigen::Index>(data.size()));
}

json options_to_json(const PipelineOptions& o) {
  return json{{"mds_tol", o.mds_tol},
              {"mds_max_iter", o.mds_max_iter},
              {"warm_start", o.warm_start},
              {"hidden_width", o.hidden_width},
              {"finetune_steps", o.finetune.steps},
              {"learning_rate", o.finetune.learning_rate},
              {"wmds_max_iter", o.wmds.max_iter},
              {"wmds_tol", o.wmds.tol}};
}

PipelineOptions options_from_json(const json& j) {
  PipelineOptions o;
  o.mds_tol = j.at("mds_tol").get<double>();
  o.mds_max_iter = j.at("mds_max_iter").get<std::size_t>();
  o.warm_start = j.at("warm_start").get<bool>();
  o.hidden_width = j.at("hidden_width").get<std::size_t>();
  o.finetune.steps = j.at("finetune_steps").get<std::size_t>();
  o.finetune.learning_rate = j.at("learning_rate").get<double>();
  o.wmds.max_iter = j.at("wmds_max_iter").get<std::size_t>();
  o.wmds.tol = j.at("wmds_tol").get<double>();
  return o;
}

SessionState session_from_payload(const json& p, std::shared_ptr<const Dataset> dataset) {
  const auto dataset_id = p.at("dataset_id").get<std::string>();
  if (dataset_id != dataset->id() || p.at("dataset_size").get<std::size_t>() != dataset->size() ||
      p.at("dataset_width").get<std::size_t>() != dataset->width()) {
    fail(ErrorCode::InvalidInput, "session was saved for dataset '" + dataset_id + "', not '" + dataset->id() + "'");
  }
  SessionState state;
  state.dataset = std::move(dataset);
  state.variant = parse_variant(p.at("variant").get<std::string>());
  state.seed = p.at("seed").get<std::uint64_t>();
  state.iteration = p.at("iteration").get<std::size_t>();
  state.options = options_from_json(p.at("options"));
  state.weights = DimensionWeights::from_values(vector_from_json(p.at("weights")));

  const json& enc = p.at("encoder");
  state.encoder.weights.w1 = matrix_from_json(enc.at("w1"));
  state.encoder.weights.b1 = vector_from_json(enc.at("b1"));
  state.encoder.weights.w2 = matrix_from_json(enc.at("w2"));
  state.encoder.weights.b2 = vector_from_json(enc.at("b2"));
  state.encoder.version = enc.at("version").get<std::uint64_t>();

  const json& opt = p.at("optimizer");
  state.optimizer.step = opt.at("step").get<std::uint64_t>();
  state.optimizer.first_moment = vector_from_json(opt.at("first_moment"));
  state.optimizer.second_moment = vector_from_json(opt.at("second_moment"));

  const Eigen::MatrixXd layout = matrix_from_json(p.at("layout"));
  if (layout.cols() != 2 || static_cast<std::size_t>(layout.rows()) != state.dataset->size()) {
    fail(ErrorCode::Integrity, "session file: layout has the wrong shape");
  }
  state.layout = Layout(Coords2D(layout));
  return state;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::NotFound, "cannot open dataset " + path.string());

  std::vector<Document> documents;
  std::unordered_set<std::string> ids;
  std::size_t width = 0;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::out_of_range& e) {
      fail(ErrorCode::InvalidInput, line_prefix(path, line_no) + "non-finite number: " + e.what());
    } catch (const json::exception& e) {
      fail(ErrorCode::Parse, line_prefix(path, line_no) + e.what());
    }
    Document doc;
    try {
      doc.id = record.at("id").get<std::string>();
      doc.vector = record.at("vector").get<std::vector<double>>();
      if (record.contains("label") && !record["label"].is_null()) doc.label = record["label"].get<std::string>();
      if (record.contains("text") && !record["text"].is_null()) doc.text = record["text"].get<std::string>();
    } catch (const json::exception& e) {
      fail(ErrorCode::Parse, line_prefix(path, line_no) + e.what());
    }
    if (doc.vector.empty()) fail(ErrorCode::InconsistentWidth, line_prefix(path, line_no) + "record '" + doc.id + "' has an empty vector");
    if (documents.empty()) width = doc.vector.size();
    if (doc.vector.size() != width) {
      fail(ErrorCode::InconsistentWidth, line_prefix(path, line_no) + "record '" + doc.id + "' has width " +
                                             std::to_string(doc.vector.size()) + ", expected " + std::to_string(width));
    }
    for (double v : doc.vector) {
      if (!std::isfinite(v)) fail(ErrorCode::InvalidInput, line_prefix(path, line_no) + "record '" + doc.id + "' has a non-finite entry");
    }
    if (!ids.insert(doc.id).second) fail(ErrorCode::DuplicateId, line_prefix(path, line_no) + "duplicate id '" + doc.id + "'");
    documents.push_back(std::move(doc));
  }
  return Dataset(path.stem().string(), std::move(documents));
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::InvalidInput, "cannot write " + path.string());
  for (const Document& doc : dataset.documents()) {
    json record{{"id", doc.id}};
    if (doc.label) record["label"] = *doc.label;
    if (doc.text) record["text"] = *doc.text;
    record["vector"] = doc.vector;
    out << record.dump() << '\n';
  }
}

void save_session(const SessionState& state, const std::filesystem::path& path) {
  json payload{
      {"dataset_id", state.dataset->id()},
      {"dataset_size", state.dataset->size()},
      {"dataset_width", state.dataset->width()},
      {"variant", std::string(to_string(state.variant))},
      {"seed", state.seed},
      {"iteration", state.iteration},
      {"options", options_to_json(state.options)},
      {"weights", vector_to_json(state.weights.values())},
      {"encoder",
       {{"w1", matrix_to_json(state.encoder.weights.w1)},
        {"b1", vector_to_json(state.encoder.weights.b1)},
        {"w2", matrix_to_json(state.encoder.weights.w2)},
        {"b2", vector_to_json(state.encoder.weights.b2)},
        {"version", state.encoder.version}}},
      {"optimizer",
       {{"step", state.optimizer.step},
        {"first_moment", vector_to_json(state.optimizer.first_moment)},
        {"second_moment", vector_to_json(state.optimizer.second_moment)}}},
      {"layout", matrix_to_json(state.layout.coords())},
  };
  const json file{{"format", "semsteer-session"},
                  {"version", kSessionFormatVersion},
                  {"checksum", checksum_of(payload)},
                  {"payload", std::move(payload)}};
  std::ofstream out(path);
  if (!out) fail(ErrorCode::InvalidInput, "cannot write " + path.string());
  out << file.dump() << '\n';
}

SessionState load_session(const std::filesystem::path& path, std::shared_ptr<const Dataset> dataset) {
  if (!dataset) fail(ErrorCode::NotFound, "dataset not found");
  std::ifstream in(path);
  if (!in) fail(ErrorCode::NotFound, "cannot open session file " + path.string());
  json file;
  try {
    file = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::Integrity, "session file is not valid JSON: " + std::string(e.what()));
  }
  try {
    if (file.at("format").get<std::string>() != "semsteer-session") fail(ErrorCode::Integrity, "not a session file");
    const int version = file.at("version").get<int>();
    if (version != kSessionFormatVersion) {
      fail(ErrorCode::Migration, "session format version " + std::to_string(version) + " is not supported (expected " +
                                     std::to_string(kSessionFormatVersion) + ")");
    }
    const json& payload = file.at("payload");
    if (checksum_of(payload) != file.at("checksum").get<std::string>()) {
      fail(ErrorCode::Integrity, "session file checksum mismatch");
    }
    return session_from_payload(payload, std::move(dataset));
  } catch (const json::exception& e) {
    fail(ErrorCode::Integrity, "session file is malformed: " + std::string(e.what()));
  }
}

void save_layout_csv(const Dataset& dataset, const Layout& layout, const std::filesystem::path& path) {
  if (layout.size() != dataset.size()) fail(ErrorCode::InvalidInput, "layout size does not match dataset");
  std::ofstream out(path);
  if (!out) fail(ErrorCode::InvalidInput, "cannot write " + path.string());
  out << "id,x,y\n";
  out.precision(17);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out << dataset.document(i).id << ',' << layout.x(i) << ',' << layout.y(i) << '\n';
  }
}

Layout load_layout_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::NotFound, "cannot open layout " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("id,x,y", 0) != 0) {
    fail(ErrorCode::Parse, line_prefix(path, 1) + "expected header 'id,x,y'");
  }
  Coords2D coords(static_cast<Eigen::Index>(dataset.size()), 2);
  std::vector<bool> seen(dataset.size(), false);
  for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto second = line.rfind(',');
    const auto first = second == std::string::npos ? std::string::npos : line.rfind(',', second - 1);
    if (first == std::string::npos) fail(ErrorCode::Parse, line_prefix(path, line_no) + "expected id,x,y");
    const std::string id = line.substr(0, first);
    const auto index = dataset.index_of(id);
    if (!index) fail(ErrorCode::InvalidInput, line_prefix(path, line_no) + "unknown document '" + id + "'");
    if (seen[*index]) fail(ErrorCode::DuplicateId, line_prefix(path, line_no) + "duplicate id '" + id + "'");
    seen[*index] = true;
    try {
      coords(static_cast<Eigen::Index>(*index), 0) = std::stod(line.substr(first + 1, second - first - 1));
      coords(static_cast<Eigen::Index>(*index), 1) = std::stod(line.substr(second + 1));
    } catch (const std::exception&) {
      fail(ErrorCode::Parse, line_prefix(path, line_no) + "coordinates are not numbers");
    }
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) fail(ErrorCode::InvalidInput, "layout is missing document '" + dataset.document(i).id + "'");
  }
  return Layout(std::move(coords));
}

DatasetCatalog DatasetCatalog::load_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) fail(ErrorCode::NotFound, "data directory " + dir.string() + " does not exist");
  DatasetCatalog catalog;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      catalog.add(std::make_shared<const Dataset>(load_dataset(entry.path())));
    }
  }
  return catalog;
}

void DatasetCatalog::add(std::shared_ptr<const Dataset> dataset) {
  if (!dataset) fail(ErrorCode::InvalidInput, "null dataset");
  const std::string id = dataset->id();
  if (!datasets_.emplace(id, std::move(dataset)).second) fail(ErrorCode::DuplicateId, "dataset '" + id + "' registered twice");
}

std::shared_ptr<const Dataset> DatasetCatalog::find(const std::string& id) const {
  const auto it = datasets_.find(id);
  return it == datasets_.end() ? nullptr : it->second;
}

std::shared_ptr<const Dataset> DatasetCatalog::get(const std::string& id) const {
  auto dataset = find(id);
  if (!dataset) fail(ErrorCode::NotFound, "unknown dataset '" + id + "'");
  return dataset;
}

std::vector<std::string> DatasetCatalog::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : datasets_) out.push_back(id);
  return out;
}

}  // namespace semsteer
