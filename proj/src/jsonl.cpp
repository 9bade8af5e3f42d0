#include "faqir/jsonl.hpp"

#include <cmath>
#include <fstream>

#include "faqir/error.hpp"
#include "faqir/text.hpp"

namespace faqir::jsonl {

namespace {

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

}  // namespace

std::size_t for_each(const std::filesystem::path& path,
                     const std::function<void(const Json&, std::size_t)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    Json obj;
    try {
      obj = Json::parse(line);
    } catch (const Json::exception& e) {
      throw DataError(where(path, line_no) + "malformed JSON: " + e.what());
    }
    if (!obj.is_object()) throw DataError(where(path, line_no) + "expected a JSON object");
    try {
      fn(obj, line_no);
    } catch (const Json::exception& e) {
      throw DataError(where(path, line_no) + e.what());
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what());
    }
    ++count;
  }
  return count;
}

std::string require_string(const Json& obj, std::string_view field, std::size_t line) {
  const auto it = obj.find(field);
  if (it == obj.end() || !it->is_string()) {
    throw DataError("line " + std::to_string(line) + ": missing string field '" +
                    std::string(field) + "'");
  }
  return it->get<std::string>();
}

double require_finite(const Json& value, std::string_view what, std::size_t line) {
  if (!value.is_number()) {
    throw DataError("line " + std::to_string(line) + ": non-numeric value in " +
                    std::string(what));
  }
  const double v = value.get<double>();
  if (!std::isfinite(v)) {
    throw DataError("line " + std::to_string(line) + ": non-finite value in " +
                    std::string(what));
  }
  return v;
}

void write_line(std::ostream& out, const Json& obj) {
  out << obj.dump(-1, ' ', false, Json::error_handler_t::strict) << '\n';
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open output file: " + path.string());
  return out;
}

}  // namespace faqir::jsonl
