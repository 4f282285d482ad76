#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spf::csv {

// A parsed record plus the 1-based line number it started on.
struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

// RFC 4180 style reader: quoted fields may contain delimiters, doubled
// quotes and newlines. A trailing '\r' before '\n' is dropped. Returns
// std::nullopt at end of input. Throws Error(kMalformedRow) on an
// unterminated quote.
class Reader {
 public:
  Reader(std::istream& in, char delimiter = ',');

  std::optional<Record> next();

 private:
  std::istream& in_;
  char delimiter_;
  std::size_t line_ = 1;
};

// Quotes a field only when it needs quoting.
std::string escape(std::string_view field, char delimiter = ',');

}  // namespace spf::csv
