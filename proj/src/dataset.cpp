#include "semsteer/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "semsteer/error.hpp"

namespace semsteer {

Dataset::Dataset(std::string id, std::vector<Document> documents)
    : id_(std::move(id)), documents_(std::move(documents)) {
  if (documents_.size() < 2) fail(ErrorCode::InvalidInput, "a dataset needs at least 2 documents");
  const std::size_t width = documents_.front().vector.size();
  if (width == 0) fail(ErrorCode::InvalidInput, "document '" + documents_.front().id + "' has an empty vector");

  features_.resize(static_cast<Eigen::Index>(documents_.size()), static_cast<Eigen::Index>(width));
  std::set<std::string> labels;
  fully_labeled_ = true;
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    const Document& doc = documents_[i];
    if (doc.vector.size() != width) {
      fail(ErrorCode::InconsistentWidth, "document '" + doc.id + "' has width " +
                                             std::to_string(doc.vector.size()) + ", expected " +
                                             std::to_string(width));
    }
    if (!index_.emplace(doc.id, i).second) fail(ErrorCode::DuplicateId, "duplicate document id '" + doc.id + "'");
    for (std::size_t m = 0; m < width; ++m) {
      if (!std::isfinite(doc.vector[m])) fail(ErrorCode::InvalidInput, "document '" + doc.id + "' has a non-finite entry");
      features_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = doc.vector[m];
    }
    if (doc.label) {
      labels.insert(*doc.label);
    } else {
      fully_labeled_ = false;
    }
  }

  label_names_.assign(labels.begin(), labels.end());
  if (fully_labeled_) {
    label_indices_.reserve(documents_.size());
    for (const auto& doc : documents_) {
      const auto it = std::lower_bound(label_names_.begin(), label_names_.end(), *doc.label);
      label_indices_.push_back(static_cast<int>(it - label_names_.begin()));
    }
  }
}

std::optional<std::size_t> Dataset::index_of(const std::string& doc_id) const {
  const auto it = index_.find(doc_id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

}  // namespace semsteer
