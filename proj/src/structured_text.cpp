#include "xtsi/structured_text.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "xtsi/error.hpp"

namespace xtsi::text {
namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

double parse_double(std::string_view text, const std::string& source, std::size_t line) {
  std::string s(trim(text));
  if (s.empty()) throw ParseError(source, line, "expected a number");
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) throw ParseError(source, line, "not a number: '" + s + "'");
  return v;
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(',', start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void write_block(std::ostringstream& os, const Block& b, int depth) {
  std::string pad(static_cast<std::size_t>(2 * depth), ' ');
  for (const auto& e : b.entries) os << pad << e.key << " = " << e.value << '\n';
  for (const auto& c : b.children) {
    os << pad << c.type << " {\n";
    write_block(os, c, depth + 1);
    os << pad << "}\n";
  }
}

}  // namespace

const Entry* Block::find(std::string_view key) const {
  for (const auto& e : entries)
    if (e.key == key) return &e;
  return nullptr;
}

const std::string& Block::str(std::string_view key) const {
  const Entry* e = find(key);
  if (!e) throw ParseError(source, line, fmt::format("block '{}' is missing '{}'", type, key));
  return e->value;
}

double Block::number(std::string_view key) const {
  const Entry* e = find(key);
  if (!e) throw ParseError(source, line, fmt::format("block '{}' is missing '{}'", type, key));
  return parse_double(e->value, source, e->line);
}

long Block::integer(std::string_view key) const {
  const Entry* e = find(key);
  if (!e) throw ParseError(source, line, fmt::format("block '{}' is missing '{}'", type, key));
  double v = parse_double(e->value, source, e->line);
  long i = static_cast<long>(v);
  if (static_cast<double>(i) != v) throw ParseError(source, e->line, "expected an integer for '" + e->key + "'");
  return i;
}

std::vector<double> Block::numbers(std::string_view key) const {
  const Entry* e = find(key);
  if (!e) throw ParseError(source, line, fmt::format("block '{}' is missing '{}'", type, key));
  std::vector<double> out;
  for (auto part : split_commas(e->value)) out.push_back(parse_double(part, source, e->line));
  return out;
}

std::vector<std::string> Block::words(std::string_view key) const {
  const Entry* e = find(key);
  if (!e) throw ParseError(source, line, fmt::format("block '{}' is missing '{}'", type, key));
  std::vector<std::string> out;
  for (auto part : split_commas(e->value)) {
    if (part.empty()) throw ParseError(source, e->line, "empty list element in '" + e->key + "'");
    out.emplace_back(part);
  }
  return out;
}

std::optional<double> Block::number_or(std::string_view key) const {
  if (!has(key)) return std::nullopt;
  return number(key);
}

std::vector<const Block*> Block::blocks(std::string_view t) const {
  std::vector<const Block*> out;
  for (const auto& c : children)
    if (c.type == t) out.push_back(&c);
  return out;
}

Block parse(std::string_view content, const std::string& source) {
  Block root;
  root.source = source;
  std::vector<Block*> stack{&root};
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    auto nl = content.find('\n', pos);
    std::string_view raw = content.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = (nl == std::string_view::npos) ? content.size() + 1 : nl + 1;
    ++line_no;

    auto hash = raw.find('#');
    std::string_view line = trim(hash == std::string_view::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;

    if (line == "}") {
      if (stack.size() == 1) throw ParseError(source, line_no, "unmatched '}'");
      stack.pop_back();
      continue;
    }
    if (line.back() == '{') {
      std::string_view type = trim(line.substr(0, line.size() - 1));
      if (!is_identifier(type)) throw ParseError(source, line_no, "bad block name '" + std::string(type) + "'");
      Block child;
      child.type = std::string(type);
      child.line = line_no;
      child.source = source;
      stack.back()->children.push_back(std::move(child));
      stack.push_back(&stack.back()->children.back());
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected 'key = value', '<name> {' or '}'");
    std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    if (!is_identifier(key)) throw ParseError(source, line_no, "bad key '" + std::string(key) + "'");
    if (value.empty()) throw ParseError(source, line_no, "empty value for '" + std::string(key) + "'");
    if (stack.back()->find(key)) throw ParseError(source, line_no, "duplicate key '" + std::string(key) + "'");
    stack.back()->entries.push_back(Entry{std::string(key), std::string(value), line_no});
  }
  if (stack.size() != 1)
    throw ParseError(source, stack.back()->line, "block '" + stack.back()->type + "' is never closed");
  return root;
}

Block parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

std::string serialize(const Block& root) {
  std::ostringstream os;
  write_block(os, root, 0);
  return os.str();
}

std::string format_exact(double v) { return fmt::format("{}", v); }

}  // namespace xtsi::text
