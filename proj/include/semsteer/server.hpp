#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "semsteer/datastore.hpp"
#include "semsteer/pipeline.hpp"

namespace httplib {
class Server;
}

namespace semsteer {

struct ServiceOptions {
  PipelineOptions pipeline;
  std::size_t knn_k = 5;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

// Transport-independent implementation of the HTTP API. Every method maps
// one endpoint; failures come back as {"error": {"code", "message"}} with
// 400/404/409 statuses rather than exceptions.
class Service {
 public:
  explicit Service(DatasetCatalog catalog, ServiceOptions options = {});

  ApiResponse list_datasets() const;
  ApiResponse get_document(const std::string& dataset_id, const std::string& doc_id) const;
  ApiResponse create_session(const std::string& body);
  ApiResponse get_session(const std::string& session_id) const;
  // Staging replaces any previously staged moves.
  ApiResponse stage_interaction(const std::string& session_id, const std::string& body);
  ApiResponse update(const std::string& session_id);
  ApiResponse reset(const std::string& session_id);
  ApiResponse curve(const std::string& session_id) const;

  // Committed state of a session; throws not-found.
  SessionState snapshot(const std::string& session_id) const;

 private:
  struct Move {
    std::size_t index;
    double x;
    double y;
  };

  struct Entry {
    std::string id;
    std::unique_ptr<Session> session;

    std::mutex writer;  // held for the whole update/reset including bookkeeping

    mutable std::mutex staged_mutex;
    std::vector<Move> staged;
    std::uint64_t staged_generation = 0;

    mutable std::mutex curve_mutex;
    std::vector<double> curve;
  };

  std::shared_ptr<Entry> find_entry(const std::string& session_id) const;
  nlohmann::json view(const Entry& entry) const;
  void record_accuracy(Entry& entry, const SessionState& state, bool restart) const;

  DatasetCatalog catalog_;
  ServiceOptions options_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::atomic<std::uint64_t> next_session_{1};
};

// Routes:
//   GET  /datasets
//   GET  /datasets/{id}/documents/{doc_id}
//   POST /sessions
//   GET  /sessions/{id}
//   POST /sessions/{id}/interactions
//   POST /sessions/{id}/update
//   POST /sessions/{id}/reset
//   GET  /sessions/{id}/curve
void register_routes(httplib::Server& server, Service& service);

}  // namespace semsteer
