#pragma once

#include <initializer_list>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "metrosim/error.hpp"

namespace metrosim {

using json = nlohmann::json;

// Strict field access for external documents. Every helper raises
// PARSE_ERROR with the offending context so callers never see a raw
// nlohmann exception.

void expect_object(const json& j, const std::string& context);

// Rejects keys outside `allowed`.
void check_fields(const json& j, const std::string& context,
                  std::initializer_list<const char*> allowed);

const json& require_field(const json& j, const std::string& context,
                          const char* key);

std::string get_string(const json& j, const std::string& context,
                       const char* key);
double get_number(const json& j, const std::string& context, const char* key);
long long get_integer(const json& j, const std::string& context,
                      const char* key);
bool get_bool(const json& j, const std::string& context, const char* key);

std::optional<std::string> opt_string(const json& j,
                                      const std::string& context,
                                      const char* key);
std::optional<double> opt_number(const json& j, const std::string& context,
                                 const char* key);
std::optional<long long> opt_integer(const json& j,
                                     const std::string& context,
                                     const char* key);
std::optional<bool> opt_bool(const json& j, const std::string& context,
                             const char* key);

// Parses text, mapping any syntax error to PARSE_ERROR.
json parse_document(const std::string& text, const std::string& context);

// Reads and parses a file, mapping I/O failure to PARSE_ERROR.
json load_json_file(const std::string& path);

}  // namespace metrosim
