#include "spf/csv.hpp"

#include <istream>

#include "spf/error.hpp"

namespace spf::csv {

Reader::Reader(std::istream& in, char delimiter) : in_(in), delimiter_(delimiter) {}

std::optional<Record> Reader::next() {
  if (in_.peek() == std::char_traits<char>::eof()) return std::nullopt;

  Record record;
  record.line = line_;
  std::string field;
  bool quoted = false;
  bool field_was_quoted = false;

  for (;;) {
    const int c = in_.get();
    if (c == std::char_traits<char>::eof()) {
      if (quoted) {
        throw Error(ErrorCode::kMalformedRow,
                    "unterminated quoted field starting on line " + std::to_string(record.line));
      }
      break;
    }
    const char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line_;
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"' && field.empty() && !field_was_quoted) {
      quoted = true;
      field_was_quoted = true;
    } else if (ch == delimiter_) {
      record.fields.push_back(std::move(field));
      field.clear();
      field_was_quoted = false;
    } else if (ch == '\n') {
      ++line_;
      break;
    } else if (ch == '\r' && in_.peek() == '\n') {
      // swallowed; the '\n' ends the record on the next iteration
    } else {
      field.push_back(ch);
    }
  }
  record.fields.push_back(std::move(field));
  return record;
}

std::string escape(std::string_view field, char delimiter) {
  const bool needs_quotes = field.find_first_of(std::string{delimiter} + "\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace spf::csv
