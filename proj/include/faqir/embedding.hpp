#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "faqir/matrix.hpp"

namespace faqir {

// Id-keyed sentence vectors in one contiguous buffer, insertion ordered.
// File format: JSON Lines {"id": str, "vector": [num, ...]}.
class SentenceVectorStore {
 public:
  SentenceVectorStore() = default;
  explicit SentenceVectorStore(std::size_t dimension);

  static SentenceVectorStore load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  // Throws DataError on duplicate id, wrong length or non-finite values.
  void add(std::string id, std::span<const double> vector);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool contains(std::string_view id) const;
  const std::vector<std::string>& ids() const { return ids_; }
  // Throws DataError for unknown ids.
  std::span<const double> vector(std::string_view id) const;
  std::span<const double> vector_at(std::size_t index) const;
  MatrixView as_matrix() const { return {data_.data(), ids_.size(), dimension_}; }

  bool operator==(const SentenceVectorStore& other) const;

 private:
  std::size_t dimension_ = 0;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> lookup_;
  std::vector<double> data_;
};

// Id-keyed token embedding matrices (one row per token).
// File format: JSON Lines {"id": str, "tokens": [[num, ...], ...]}.
class TokenMatrixStore {
 public:
  TokenMatrixStore() = default;
  explicit TokenMatrixStore(std::size_t dimension, std::size_t max_rows = 0);

  // max_rows = 0 disables the row-count limit.
  static TokenMatrixStore load(const std::filesystem::path& path, std::size_t max_rows = 0);
  void save(const std::filesystem::path& path) const;

  // `rows` is row-major with rows.size() a positive multiple of dimension().
  void add(std::string id, std::span<const double> rows);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return ids_.size(); }
  bool contains(std::string_view id) const;
  const std::vector<std::string>& ids() const { return ids_; }
  // Throws DataError for unknown ids.
  MatrixView matrix(std::string_view id) const;

  bool operator==(const TokenMatrixStore& other) const;

 private:
  std::size_t dimension_ = 0;
  std::size_t max_rows_ = 0;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> lookup_;
  std::vector<std::size_t> offsets_;  // row offsets, size() + 1 entries
  std::vector<double> data_;
};

// u.v / (|u||v|) clamped to [-1, 1]. DataError on zero norm or length mismatch.
double cosine(std::span<const double> u, std::span<const double> v);
// Sum of squared differences. DataError on length mismatch.
double sq_l2(std::span<const double> u, std::span<const double> v);
double norm(std::span<const double> u);

}  // namespace faqir
