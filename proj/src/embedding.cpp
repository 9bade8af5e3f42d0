#include "faqir/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "faqir/error.hpp"
#include "faqir/jsonl.hpp"
#include "faqir/kernels.hpp"

namespace faqir {

namespace {

void check_finite(std::span<const double> values, const std::string& id) {
  for (double v : values) {
    if (!std::isfinite(v)) throw DataError("non-finite value in '" + id + "'");
  }
}

std::vector<double> parse_row(const jsonl::Json& arr, std::size_t line) {
  if (!arr.is_array()) {
    throw DataError("line " + std::to_string(line) + ": expected an array of numbers");
  }
  std::vector<double> row;
  row.reserve(arr.size());
  for (const auto& v : arr) row.push_back(jsonl::require_finite(v, "vector", line));
  return row;
}

std::string line_msg(std::size_t line, const std::string& msg) {
  return "line " + std::to_string(line) + ": " + msg;
}

}  // namespace

SentenceVectorStore::SentenceVectorStore(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw UsageError("vector dimension must be >= 1");
}

void SentenceVectorStore::add(std::string id, std::span<const double> vector) {
  if (dimension_ == 0) {
    if (vector.empty()) throw DataError("empty vector for '" + id + "'");
    dimension_ = vector.size();
  }
  if (vector.size() != dimension_) {
    throw DataError("vector '" + id + "' has dimension " + std::to_string(vector.size()) +
                    ", expected " + std::to_string(dimension_));
  }
  check_finite(vector, id);
  if (lookup_.contains(id)) throw DataError("duplicate vector id '" + id + "'");
  lookup_.emplace(id, ids_.size());
  ids_.push_back(std::move(id));
  data_.insert(data_.end(), vector.begin(), vector.end());
}

bool SentenceVectorStore::contains(std::string_view id) const {
  return lookup_.contains(std::string(id));
}

std::span<const double> SentenceVectorStore::vector(std::string_view id) const {
  const auto it = lookup_.find(std::string(id));
  if (it == lookup_.end()) throw DataError("no vector for id '" + std::string(id) + "'");
  return vector_at(it->second);
}

std::span<const double> SentenceVectorStore::vector_at(std::size_t index) const {
  return {data_.data() + index * dimension_, dimension_};
}

bool SentenceVectorStore::operator==(const SentenceVectorStore& other) const {
  return dimension_ == other.dimension_ && ids_ == other.ids_ && data_ == other.data_;
}

SentenceVectorStore SentenceVectorStore::load(const std::filesystem::path& path) {
  SentenceVectorStore store;
  jsonl::for_each(path, [&](const jsonl::Json& obj, std::size_t line) {
    auto id = jsonl::require_string(obj, "id", line);
    const auto it = obj.find("vector");
    if (it == obj.end()) throw DataError(line_msg(line, "missing field 'vector'"));
    const auto row = parse_row(*it, line);
    try {
      store.add(std::move(id), row);
    } catch (const DataError& e) {
      throw DataError(line_msg(line, e.what()));
    }
  });
  return store;
}

void SentenceVectorStore::save(const std::filesystem::path& path) const {
  auto out = jsonl::open_output(path);
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    const auto v = vector_at(i);
    jsonl::write_line(out, {{"id", ids_[i]}, {"vector", std::vector<double>(v.begin(), v.end())}});
  }
  if (!out) throw DataError("failed writing " + path.string());
}

TokenMatrixStore::TokenMatrixStore(std::size_t dimension, std::size_t max_rows)
    : dimension_(dimension), max_rows_(max_rows), offsets_{0} {
  if (dimension == 0) throw UsageError("matrix dimension must be >= 1");
}

void TokenMatrixStore::add(std::string id, std::span<const double> rows) {
  if (offsets_.empty()) offsets_.push_back(0);
  if (dimension_ == 0) throw DataError("store dimension not set");
  if (rows.empty() || rows.size() % dimension_ != 0) {
    throw DataError("matrix '" + id + "' rows must be non-empty with dimension " +
                    std::to_string(dimension_));
  }
  const std::size_t n_rows = rows.size() / dimension_;
  if (max_rows_ != 0 && n_rows > max_rows_) {
    throw DataError("matrix '" + id + "' has " + std::to_string(n_rows) + " rows, limit " +
                    std::to_string(max_rows_));
  }
  check_finite(rows, id);
  if (lookup_.contains(id)) throw DataError("duplicate matrix id '" + id + "'");
  lookup_.emplace(id, ids_.size());
  ids_.push_back(std::move(id));
  data_.insert(data_.end(), rows.begin(), rows.end());
  offsets_.push_back(offsets_.back() + n_rows);
}

bool TokenMatrixStore::contains(std::string_view id) const {
  return lookup_.contains(std::string(id));
}

MatrixView TokenMatrixStore::matrix(std::string_view id) const {
  const auto it = lookup_.find(std::string(id));
  if (it == lookup_.end()) throw DataError("no token matrix for id '" + std::string(id) + "'");
  const std::size_t begin = offsets_[it->second];
  const std::size_t end = offsets_[it->second + 1];
  return {data_.data() + begin * dimension_, end - begin, dimension_};
}

bool TokenMatrixStore::operator==(const TokenMatrixStore& other) const {
  return dimension_ == other.dimension_ && ids_ == other.ids_ && offsets_ == other.offsets_ &&
         data_ == other.data_;
}

TokenMatrixStore TokenMatrixStore::load(const std::filesystem::path& path, std::size_t max_rows) {
  TokenMatrixStore store;
  store.max_rows_ = max_rows;
  jsonl::for_each(path, [&](const jsonl::Json& obj, std::size_t line) {
    auto id = jsonl::require_string(obj, "id", line);
    const auto it = obj.find("tokens");
    if (it == obj.end() || !it->is_array() || it->empty()) {
      throw DataError(line_msg(line, "'tokens' must be a non-empty array of rows"));
    }
    std::vector<double> flat;
    for (const auto& row_json : *it) {
      const auto row = parse_row(row_json, line);
      if (store.dimension_ == 0) {
        if (row.empty()) throw DataError(line_msg(line, "empty token row"));
        store.dimension_ = row.size();
      }
      if (row.size() != store.dimension_) {
        throw DataError(line_msg(line, "token row has dimension " + std::to_string(row.size()) +
                                           ", expected " + std::to_string(store.dimension_)));
      }
      flat.insert(flat.end(), row.begin(), row.end());
    }
    try {
      store.add(std::move(id), flat);
    } catch (const DataError& e) {
      throw DataError(line_msg(line, e.what()));
    }
  });
  if (store.offsets_.empty()) store.offsets_.push_back(0);
  return store;
}

void TokenMatrixStore::save(const std::filesystem::path& path) const {
  auto out = jsonl::open_output(path);
  for (const auto& id : ids_) {
    const auto m = matrix(id);
    jsonl::Json rows = jsonl::Json::array();
    for (std::size_t r = 0; r < m.rows; ++r) {
      const auto row = m.row(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    jsonl::write_line(out, {{"id", id}, {"tokens", std::move(rows)}});
  }
  if (!out) throw DataError("failed writing " + path.string());
}

double norm(std::span<const double> u) { return std::sqrt(kernels::dot(u, u)); }

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw DataError("cosine: vector length mismatch");
  const double nu = norm(u);
  const double nv = norm(v);
  if (nu == 0.0 || nv == 0.0) throw DataError("cosine: zero-norm vector");
  double c = kernels::dot(u, v) / (nu * nv);
  if (!std::isfinite(c)) {
    // Overflow in the squared sums; rescale both vectors and retry.
    const auto scaled = [](std::span<const double> x) {
      double m = 0.0;
      for (double e : x) m = std::max(m, std::abs(e));
      std::vector<double> out(x.begin(), x.end());
      for (double& e : out) e /= m;
      return out;
    };
    const auto su = scaled(u);
    const auto sv = scaled(v);
    c = kernels::dot(su, sv) / (norm(su) * norm(sv));
  }
  return std::clamp(c, -1.0, 1.0);
}

double sq_l2(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw DataError("sq_l2: vector length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    s += d * d;
  }
  return s;
}

}  // namespace faqir
