#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "semsteer/encoder.hpp"

namespace semsteer {

struct Document {
  std::string id;
  std::vector<double> vector;
  std::optional<std::string> label;
  std::optional<std::string> text;

  bool operator==(const Document&) const = default;
};

// Immutable collection of documents sharing one feature width.
class Dataset {
 public:
  // Validates N >= 2, a common width M >= 1, unique ids and finite vectors.
  Dataset(std::string id, std::vector<Document> documents);

  const std::string& id() const noexcept { return id_; }
  std::size_t size() const noexcept { return documents_.size(); }
  std::size_t width() const noexcept { return static_cast<std::size_t>(features_.cols()); }
  const std::vector<Document>& documents() const noexcept { return documents_; }
  const Document& document(std::size_t index) const { return documents_.at(index); }
  const FeatureMatrix& features() const noexcept { return features_; }

  // Row index for a document id, or nullopt.
  std::optional<std::size_t> index_of(const std::string& doc_id) const;

  // True when every document carries a label.
  bool has_labels() const noexcept { return fully_labeled_; }
  // Distinct labels in lexicographic order; label indices refer to this list.
  const std::vector<std::string>& label_names() const noexcept { return label_names_; }
  // Per-document label index; empty unless has_labels().
  const std::vector<int>& label_indices() const noexcept { return label_indices_; }

 private:
  std::string id_;
  std::vector<Document> documents_;
  FeatureMatrix features_;
  std::unordered_map<std::string, std::size_t> index_;
  bool fully_labeled_ = false;
  std::vector<std::string> label_names_;
  std::vector<int> label_indices_;
};

}  // namespace semsteer
