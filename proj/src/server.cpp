#include "semsteer/server.hpp"

#include <unordered_set>

#include "semsteer/error.hpp"
#include "semsteer/simulated_analyst.hpp"

#include "httplib.h"  // after Eigen, see tools/semsteer.cpp

namespace semsteer {

using nlohmann::json;

namespace {

ApiResponse error_response(int status, std::string_view code, const std::string& message) {
  return {status, json{{"error", {{"code", std::string(code)}, {"message", message}}}}};
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::ConcurrentUpdate: return 409;
    case ErrorCode::Divergence: return 422;
    default: return 400;
  }
}

template <typename Fn>
ApiResponse guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return error_response(status_for(e.code()), to_string(e.code()), e.what());
  } catch (const json::exception& e) {
    return error_response(400, "parse-error", e.what());
  }
}

json parse_body(const std::string& body) {
  if (body.empty()) return json::object();
  json parsed = json::parse(body);
  if (!parsed.is_object()) fail(ErrorCode::Parse, "request body must be a JSON object");
  return parsed;
}

}  // namespace

Service::Service(DatasetCatalog catalog, ServiceOptions options)
    : catalog_(std::move(catalog)), options_(std::move(options)) {}

ApiResponse Service::list_datasets() const {
  json list = json::array();
  for (const auto& id : catalog_.ids()) {
    const auto dataset = catalog_.get(id);
    list.push_back({{"id", id},
                    {"size", dataset->size()},
                    {"width", dataset->width()},
                    {"labeled", dataset->has_labels()}});
  }
  return {200, json{{"datasets", std::move(list)}}};
}

ApiResponse Service::get_document(const std::string& dataset_id, const std::string& doc_id) const {
  return guarded([&]() -> ApiResponse {
    const auto dataset = catalog_.get(dataset_id);
    const auto index = dataset->index_of(doc_id);
    if (!index) return error_response(404, "not-found", "unknown document '" + doc_id + "'");
    const Document& doc = dataset->document(*index);
    json out{{"id", doc.id}, {"label", nullptr}, {"text", nullptr}};
    if (doc.label) out["label"] = *doc.label;
    if (doc.text) out["text"] = *doc.text;
    return {200, std::move(out)};
  });
}

ApiResponse Service::create_session(const std::string& body) {
  return guarded([&]() -> ApiResponse {
    const json request = parse_body(body);
    if (!request.contains("dataset_id") || !request["dataset_id"].is_string()) {
      return error_response(400, "invalid-input", "dataset_id (string) is required");
    }
    const auto dataset = catalog_.get(request["dataset_id"].get<std::string>());
    const Variant variant = parse_variant(request.value("variant", std::string("finetune")));
    const std::uint64_t seed = request.value("seed", std::uint64_t{0});

    auto entry = std::make_shared<Entry>();
    entry->id = "s" + std::to_string(next_session_++);
    entry->session = std::make_unique<Session>(semsteer::create_session(dataset, variant, seed, options_.pipeline));
    record_accuracy(*entry, entry->session->snapshot(), true);
    {
      std::unique_lock lock(sessions_mutex_);
      sessions_.emplace(entry->id, entry);
    }
    return {201, view(*entry)};
  });
}

ApiResponse Service::get_session(const std::string& session_id) const {
  return guarded([&]() -> ApiResponse { return {200, view(*find_entry(session_id))}; });
}

ApiResponse Service::stage_interaction(const std::string& session_id, const std::string& body) {
  return guarded([&]() -> ApiResponse {
    const auto entry = find_entry(session_id);
    const json request = parse_body(body);
    if (!request.contains("moves") || !request["moves"].is_array()) {
      return error_response(400, "invalid-input", "moves (array) is required");
    }
    const auto dataset = entry->session->snapshot().dataset;

    std::vector<Move> moves;
    std::unordered_set<std::size_t> seen;
    for (const json& move : request["moves"]) {
      if (!move.is_object() || !move.contains("doc_id") || !move["doc_id"].is_string() || !move.contains("x") ||
          !move["x"].is_number() || !move.contains("y") || !move["y"].is_number()) {
        return error_response(400, "invalid-input", "each move needs doc_id (string), x and y (numbers)");
      }
      const auto doc_id = move["doc_id"].get<std::string>();
      const auto index = dataset->index_of(doc_id);
      if (!index) return error_response(400, "unknown-document", "unknown document '" + doc_id + "'");
      if (!seen.insert(*index).second) return error_response(400, "duplicate-move", "document '" + doc_id + "' moved twice");
      const double x = move["x"].get<double>();
      const double y = move["y"].get<double>();
      if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
        return error_response(400, "invalid-position", "position of '" + doc_id + "' is outside the unit square");
      }
      moves.push_back({*index, x, y});
    }

    std::lock_guard lock(entry->staged_mutex);
    entry->staged = std::move(moves);
    ++entry->staged_generation;
    return {202, json{{"session_id", entry->id}, {"staged", entry->staged.size()}}};
  });
}

ApiResponse Service::update(const std::string& session_id) {
  return guarded([&]() -> ApiResponse {
    const auto entry = find_entry(session_id);
    std::unique_lock writer(entry->writer, std::try_to_lock);
    if (!writer.owns_lock()) return error_response(409, "concurrent-update", "an update is already running for this session");

    std::vector<Move> moves;
    std::uint64_t generation = 0;
    {
      std::lock_guard lock(entry->staged_mutex);
      moves = entry->staged;
      generation = entry->staged_generation;
    }
    if (moves.size() < 2) {
      return error_response(400, "insufficient-interaction",
                            "at least 2 staged moves are required, have " + std::to_string(moves.size()));
    }

    std::vector<std::size_t> documents;
    Coords2D positions(static_cast<Eigen::Index>(moves.size()), 2);
    for (std::size_t r = 0; r < moves.size(); ++r) {
      documents.push_back(moves[r].index);
      positions(static_cast<Eigen::Index>(r), 0) = moves[r].x;
      positions(static_cast<Eigen::Index>(r), 1) = moves[r].y;
    }
    entry->session->apply(InteractionSet::from_positions(std::move(documents), std::move(positions)));
    record_accuracy(*entry, entry->session->snapshot(), false);
    {
      std::lock_guard lock(entry->staged_mutex);
      if (entry->staged_generation == generation) entry->staged.clear();
    }
    return {200, view(*entry)};
  });
}

ApiResponse Service::reset(const std::string& session_id) {
  return guarded([&]() -> ApiResponse {
    const auto entry = find_entry(session_id);
    std::unique_lock writer(entry->writer, std::try_to_lock);
    if (!writer.owns_lock()) return error_response(409, "concurrent-update", "an update is already running for this session");
    entry->session->reset();
    record_accuracy(*entry, entry->session->snapshot(), true);
    {
      std::lock_guard lock(entry->staged_mutex);
      entry->staged.clear();
      ++entry->staged_generation;
    }
    return {200, view(*entry)};
  });
}

ApiResponse Service::curve(const std::string& session_id) const {
  return guarded([&]() -> ApiResponse {
    const auto entry = find_entry(session_id);
    if (!entry->session->snapshot().dataset->has_labels()) {
      return error_response(400, "unlabeled-dataset", "accuracy curves need a fully labeled dataset");
    }
    std::lock_guard lock(entry->curve_mutex);
    return {200, json{{"session_id", entry->id}, {"k", options_.knn_k}, {"accuracy", entry->curve}}};
  });
}

SessionState Service::snapshot(const std::string& session_id) const {
  return find_entry(session_id)->session->snapshot();
}

std::shared_ptr<Service::Entry> Service::find_entry(const std::string& session_id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) fail(ErrorCode::NotFound, "unknown session '" + session_id + "'");
  return it->second;
}

json Service::view(const Entry& entry) const {
  const SessionState state = entry.session->snapshot();
  const Dataset& dataset = *state.dataset;
  json layout = json::object();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    layout[dataset.document(i).id] = {state.layout.x(i), state.layout.y(i)};
  }
  json out{{"session_id", entry.id},
           {"dataset_id", dataset.id()},
           {"variant", std::string(to_string(state.variant))},
           {"iteration", state.iteration},
           {"layout", std::move(layout)}};
  json labels = json::object();
  for (const Document& doc : dataset.documents()) {
    if (doc.label) labels[doc.id] = *doc.label;
  }
  if (!labels.empty()) out["labels"] = std::move(labels);
  return out;
}

void Service::record_accuracy(Entry& entry, const SessionState& state, bool restart) const {
  std::lock_guard lock(entry.curve_mutex);
  if (restart) entry.curve.clear();
  const Dataset& dataset = *state.dataset;
  if (!dataset.has_labels() || dataset.size() <= options_.knn_k) return;
  if (entry.curve.size() < state.iteration + 1) entry.curve.resize(state.iteration + 1, 0.0);
  entry.curve[state.iteration] = knn_accuracy(state.layout, dataset.label_indices(), options_.knn_k);
}

void register_routes(httplib::Server& server, Service& service) {
  const auto reply = [](httplib::Response& res, const ApiResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

  server.Get("/datasets", [&, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service.list_datasets());
  });
  server.Get(R"(/datasets/([^/]+)/documents/([^/]+))", [&, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.get_document(req.matches[1], req.matches[2]));
  });
  server.Post("/sessions", [&, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.create_session(req.body));
  });
  server.Get(R"(/sessions/([^/]+))", [&, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.get_session(req.matches[1]));
  });
  server.Post(R"(/sessions/([^/]+)/interactions)", [&, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.stage_interaction(req.matches[1], req.body));
  });
  server.Post(R"(/sessions/([^/]+)/update)", [&, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.update(req.matches[1]));
  });
  server.Post(R"(/sessions/([^/]+)/reset)", [&, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.reset(req.matches[1]));
  });
  server.Get(R"(/sessions/([^/]+)/curve)", [&, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.curve(req.matches[1]));
  });
}

}  // namespace semsteer
