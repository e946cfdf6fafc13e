#ifndef GVERIFY_PARSER_HPP
#define GVERIFY_PARSER_HPP

#include <string>
#include <string_view>

#include "gverify/kb.hpp"

namespace gverify {

// Parses a complete KB document. Throws Error with a "file:line:col: message"
// what() on syntax errors, undeclared references and duplicate names.
KnowledgeBase parse_kb(std::string_view text, std::string_view filename = "<input>");

// Reads and parses a .kb file; throws Error(Errc::io) if unreadable.
KnowledgeBase load_kb_file(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace gverify

#endif
