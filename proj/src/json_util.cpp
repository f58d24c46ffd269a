#include "metrosim/json_util.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace metrosim {

void expect_object(const json& j, const std::string& context) {
  if (!j.is_object()) {
    fail(ErrorCode::ParseError, context + ": expected an object");
  }
}

void check_fields(const json& j, const std::string& context,
                  std::initializer_list<const char*> allowed) {
  expect_object(j, context);
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) {
      fail(ErrorCode::ParseError, context + ": unknown field '" + key + "'");
    }
  }
}

const json& require_field(const json& j, const std::string& context,
                          const char* key) {
  expect_object(j, context);
  auto it = j.find(key);
  if (it == j.end()) {
    fail(ErrorCode::ParseError, context + ": missing field '" + key + "'");
  }
  return *it;
}

std::string get_string(const json& j, const std::string& context,
                       const char* key) {
  const json& v = require_field(j, context, key);
  if (!v.is_string()) {
    fail(ErrorCode::ParseError, context + ": field '" + std::string(key) +
                                    "' must be a string");
  }
  return v.get<std::string>();
}

double get_number(const json& j, const std::string& context, const char* key) {
  const json& v = require_field(j, context, key);
  if (!v.is_number()) {
    fail(ErrorCode::ParseError, context + ": field '" + std::string(key) +
                                    "' must be a number");
  }
  return v.get<double>();
}

long long get_integer(const json& j, const std::string& context,
                      const char* key) {
  const json& v = require_field(j, context, key);
  if (!v.is_number_integer()) {
    fail(ErrorCode::ParseError, context + ": field '" + std::string(key) +
                                    "' must be an integer");
  }
  return v.get<long long>();
}

bool get_bool(const json& j, const std::string& context, const char* key) {
  const json& v = require_field(j, context, key);
  if (!v.is_boolean()) {
    fail(ErrorCode::ParseError, context + ": field '" + std::string(key) +
                                    "' must be a boolean");
  }
  return v.get<bool>();
}

std::optional<std::string> opt_string(const json& j,
                                      const std::string& context,
                                      const char* key) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) {
    return std::nullopt;
  }
  return get_string(j, context, key);
}

std::optional<double> opt_number(const json& j, const std::string& context,
                                 const char* key) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) {
    return std::nullopt;
  }
  return get_number(j, context, key);
}

std::optional<long long> opt_integer(const json& j,
                                     const std::string& context,
                                     const char* key) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) {
    return std::nullopt;
  }
  return get_integer(j, context, key);
}

std::optional<bool> opt_bool(const json& j, const std::string& context,
                             const char* key) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) {
    return std::nullopt;
  }
  return get_bool(j, context, key);
}

json parse_document(const std::string& text, const std::string& context) {
  json parsed = json::parse(text, nullptr, false);
  if (parsed.is_discarded()) {
    fail(ErrorCode::ParseError, context + ": malformed JSON");
  }
  return parsed;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::ParseError, "cannot open file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_document(buf.str(), path);
}

}  // namespace metrosim
