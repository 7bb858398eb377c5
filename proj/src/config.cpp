#include "cdand/config.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

#include <json.hpp>

#include "cdand/errors.hpp"

namespace cdand {

namespace {

std::string strip(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

nlohmann::json parse_scalar(const std::string& raw, int line_no) {
  const std::string v = strip(raw);
  if (v.empty()) throw ParseError("toml line " + std::to_string(line_no) + ": empty value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"')
      throw ParseError("toml line " + std::to_string(line_no) + ": unterminated string");
    return v.substr(1, v.size() - 2);
  }
  if (v == "true") return true;
  if (v == "false") return false;
  double d = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
  if (ec == std::errc{} && ptr == v.data() + v.size()) {
    if (v.find('.') == std::string::npos && v.find('e') == std::string::npos &&
        v.find('E') == std::string::npos && v.find("inf") == std::string::npos) {
      long long i = 0;
      auto [p2, e2] = std::from_chars(v.data(), v.data() + v.size(), i);
      if (e2 == std::errc{} && p2 == v.data() + v.size()) return i;
    }
    return d;
  }
  throw ParseError("toml line " + std::to_string(line_no) + ": cannot parse value '" + v + "'");
}

}  // namespace

std::string flat_toml_to_json(const std::string& text) {
  nlohmann::json out = nlohmann::json::object();
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // comments start with '#' outside of strings
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_string = !in_string;
      else if (line[i] == '#' && !in_string) { line = line.substr(0, i); break; }
    }
    const std::string trimmed = strip(line);
    if (trimmed.empty()) continue;
    if (trimmed.front() == '[')
      throw ParseError("toml line " + std::to_string(line_no) +
                       ": tables are not supported; use flat keys");
    const std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw ParseError("toml line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = strip(trimmed.substr(0, eq));
    const std::string value = strip(trimmed.substr(eq + 1));
    if (key.empty()) throw ParseError("toml line " + std::to_string(line_no) + ": empty key");
    if (!value.empty() && value.front() == '[') {
      if (value.back() != ']')
        throw ParseError("toml line " + std::to_string(line_no) + ": unterminated array");
      nlohmann::json arr = nlohmann::json::array();
      std::string body = value.substr(1, value.size() - 2);
      std::string cur;
      bool str = false;
      for (char c : body) {
        if (c == '"') str = !str;
        if (c == ',' && !str) {
          if (!strip(cur).empty()) arr.push_back(parse_scalar(cur, line_no));
          cur.clear();
        } else {
          cur.push_back(c);
        }
      }
      if (!strip(cur).empty()) arr.push_back(parse_scalar(cur, line_no));
      out[key] = std::move(arr);
    } else {
      out[key] = parse_scalar(value, line_no);
    }
  }
  return out.dump();
}

std::string plan_text_to_json(const std::string& text) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c == '{') return text;  // already JSON
    break;
  }
  return flat_toml_to_json(text);
}

}  // namespace cdand
