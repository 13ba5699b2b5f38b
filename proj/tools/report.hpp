#pragma once

#include <string>
#include <string_view>

#include "freeprob/words.hpp"

namespace freeprob::cli {

// Line-oriented report: one "KEY value" fact per line, in insertion order.
class Report {
 public:
  explicit Report(std::string_view kind) { add("CHECK", kind); }

  void add(std::string_view key, std::string_view value);
  void add(std::string_view key, long long value) { add(key, std::to_string(value)); }
  void verdict(bool pass) { add("VERDICT", pass ? "pass" : "fail"); }
  void violation(const Word& w, std::string_view expected, std::string_view got);

  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

}  // namespace freeprob::cli
