#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "trevl/errors.hpp"

namespace trevl {

/// Insertion-ordered mapping from document id to a value. Keys are unique.
template <typename Value>
class DocMap {
 public:
  using Entry = std::pair<std::string, Value>;
  using const_iterator = typename std::vector<Entry>::const_iterator;

  /// Returns false (and leaves the map untouched) if `doc_id` is present.
  bool insert(std::string doc_id, Value value) {
    auto [it, fresh] = index_.try_emplace(doc_id, entries_.size());
    if (!fresh) return false;
    entries_.emplace_back(std::move(doc_id), value);
    return true;
  }

  const Value* find(const std::string& doc_id) const {
    auto it = index_.find(doc_id);
    return it == index_.end() ? nullptr : &entries_[it->second].second;
  }

  bool contains(const std::string& doc_id) const {
    return index_.count(doc_id) != 0;
  }

  void reserve(std::size_t n) {
    entries_.reserve(n);
    index_.reserve(n);
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }
  const_iterator begin() const { return entries_.begin(); }
  const_iterator end() const { return entries_.end(); }

  /// Mapping equality: insertion order is not compared.
  friend bool operator==(const DocMap& a, const DocMap& b) {
    if (a.size() != b.size()) return false;
    for (const auto& [doc, value] : a.entries_) {
      const Value* other = b.find(doc);
      if (other == nullptr || !(*other == value)) return false;
    }
    return true;
  }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Per-query mapping query id -> DocMap. Queries keep first-insertion order.
template <typename Value>
class QuerySet {
 public:
  using Docs = DocMap<Value>;

  /// Throws DuplicateError if (query_id, doc_id) is already present.
  void add(const std::string& query_id, std::string doc_id, Value value) {
    if (!docs(query_id).insert(doc_id, value)) {
      throw DuplicateError("duplicate document '" + doc_id + "' for query '" +
                           query_id + "'");
    }
  }

  /// Returns the documents of `query_id`, creating an empty entry if absent.
  Docs& docs(const std::string& query_id) {
    auto [it, fresh] = index_.try_emplace(query_id, queries_.size());
    if (fresh) queries_.emplace_back(query_id, Docs{});
    return queries_[it->second].second;
  }

  const Docs* find(const std::string& query_id) const {
    auto it = index_.find(query_id);
    return it == index_.end() ? nullptr : &queries_[it->second].second;
  }

  std::size_t size() const { return queries_.size(); }
  bool empty() const { return queries_.empty(); }

  std::size_t pair_count() const {
    std::size_t n = 0;
    for (const auto& q : queries_) n += q.second.size();
    return n;
  }

  auto begin() const { return queries_.begin(); }
  auto end() const { return queries_.end(); }

  friend bool operator==(const QuerySet& a, const QuerySet& b) {
    if (a.size() != b.size()) return false;
    for (const auto& [qid, docs] : a.queries_) {
      const Docs* other = b.find(qid);
      if (other == nullptr || !(*other == docs)) return false;
    }
    return true;
  }

 private:
  std::vector<std::pair<std::string, Docs>> queries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Relevance judgments for one query; levels <= 0 are judged non-relevant.
using Judgments = DocMap<int>;
/// Retrieval scores for one query.
using ScoredDocs = DocMap<double>;

using QrelSet = QuerySet<int>;
using RunSet = QuerySet<double>;

}  // namespace trevl
