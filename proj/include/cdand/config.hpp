#pragma once

#include <string>

namespace cdand {

/// Parse a flat key = value TOML document (strings, numbers, booleans, and
/// one-level arrays of those) into a JSON object text. Tables are not
/// supported; plan files are flat by design.
std::string flat_toml_to_json(const std::string& text);

/// Load a plan document from disk, accepting TOML or JSON (sniffed from the
/// first non-space character).
std::string plan_text_to_json(const std::string& text);

}  // namespace cdand
