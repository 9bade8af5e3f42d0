#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <fstream>
#include <string>
#include <string_view>

#include <json.hpp>

namespace faqir::jsonl {

using Json = nlohmann::json;

// Calls `fn(object, line_number)` for every non-blank line. Parse failures
// and exceptions thrown by `fn` as DataError are reported with file and line.
// Returns the number of records visited.
std::size_t for_each(const std::filesystem::path& path,
                     const std::function<void(const Json&, std::size_t)>& fn);

std::string require_string(const Json& obj, std::string_view field, std::size_t line);
double require_finite(const Json& value, std::string_view what, std::size_t line);

void write_line(std::ostream& out, const Json& obj);

// Opens `path` for writing or throws DataError naming it.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace faqir::jsonl
