#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xtsi::text {

// Grammar, one construct per line:
//   <type> {        opens a block
//   }               closes the innermost block
//   <key> = <value> entry in the innermost block
//   # ...           comment (also allowed after content)
// The top level is itself an unnamed block holding entries and blocks.

struct Entry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

struct Block {
  std::string type;
  std::size_t line = 0;
  std::vector<Entry> entries;
  std::vector<Block> children;

  const Entry* find(std::string_view key) const;
  bool has(std::string_view key) const { return find(key) != nullptr; }

  // Typed accessors; throw ParseError with the entry's line on bad values.
  const std::string& str(std::string_view key) const;
  double number(std::string_view key) const;
  long integer(std::string_view key) const;
  std::vector<double> numbers(std::string_view key) const;
  std::vector<std::string> words(std::string_view key) const;

  std::optional<double> number_or(std::string_view key) const;

  std::vector<const Block*> blocks(std::string_view type) const;

  std::string source;  // file name for diagnostics
};

Block parse(std::string_view content, const std::string& source);
Block parse_file(const std::string& path);

/// Inverse of parse(); values are written verbatim.
std::string serialize(const Block& root);

/// Shortest decimal text that reads back to exactly `v`.
std::string format_exact(double v);

}  // namespace xtsi::text
