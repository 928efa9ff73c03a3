#pragma once

// Line-oriented tokenizer shared by the text formats. `#` starts a comment,
// blank lines are skipped.

#include <cctype>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace cep::detail {

struct Line {
  std::size_t number = 0;
  std::vector<std::string> tokens;
};

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string_view strip_comment(std::string_view s) {
  auto pos = s.find('#');
  return pos == std::string_view::npos ? s : s.substr(0, pos);
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) {
    std::size_t number = 0, start = 0;
    while (start <= text.size()) {
      auto end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      ++number;
      auto tokens = split_ws(strip_comment(text.substr(start, end - start)));
      if (!tokens.empty()) lines_.push_back({number, std::move(tokens)});
      start = end + 1;
    }
  }

  std::optional<Line> next() {
    if (pos_ >= lines_.size()) return std::nullopt;
    last_ = lines_[pos_].number;
    return lines_[pos_++];
  }

  std::optional<Line> peek() const {
    if (pos_ >= lines_.size()) return std::nullopt;
    return lines_[pos_];
  }

  std::string where() const { return "line " + std::to_string(last_) + ": "; }

 private:
  std::vector<Line> lines_;
  std::size_t pos_ = 0;
  std::size_t last_ = 0;
};

}  // namespace cep::detail
