#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "semsteer/dataset.hpp"
#include "semsteer/geometry.hpp"
#include "semsteer/pipeline.hpp"

namespace semsteer {

// JSON Lines, one document per line:
//   {"id": "...", "label": "...", "text": "...", "vector": [ ... ]}
// label and text are optional; blank lines are skipped. The dataset id is the
// file stem. Errors name the offending line.
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

inline constexpr int kSessionFormatVersion = 1;

// Single JSON document holding the full learner and optimizer state, the
// layout and the options, guarded by a checksum of the payload.
void save_session(const SessionState& state, const std::filesystem::path& path);
// Throws integrity-error for unreadable or tampered files, migration-error
// for other format versions and invalid-input if `dataset` does not match.
SessionState load_session(const std::filesystem::path& path, std::shared_ptr<const Dataset> dataset);

// Header "id,x,y", one row per document in dataset order.
void save_layout_csv(const Dataset& dataset, const Layout& layout, const std::filesystem::path& path);
// Rows may come in any order but must cover every document exactly once.
Layout load_layout_csv(const Dataset& dataset, const std::filesystem::path& path);

// Read-mostly registry of datasets keyed by id.
class DatasetCatalog {
 public:
  // Loads every *.jsonl file in `dir`.
  static DatasetCatalog load_directory(const std::filesystem::path& dir);

  void add(std::shared_ptr<const Dataset> dataset);
  std::shared_ptr<const Dataset> find(const std::string& id) const;
  // Throws not-found for unknown ids.
  std::shared_ptr<const Dataset> get(const std::string& id) const;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, std::shared_ptr<const Dataset>> datasets_;
};

}  // namespace semsteer
