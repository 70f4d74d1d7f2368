#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include "types.hpp"

namespace memmap {

// Word of branch symbols written in matrix-product order: "D1D2^3" is D1*D2*D2*D2,
// so the rightmost symbol is the first step in time.
class SymbolBlock {
 public:
  SymbolBlock() = default;
  explicit SymbolBlock(std::vector<RegionLabel> product_order) : s_(std::move(product_order)) {}

  static SymbolBlock from_time_order(std::vector<RegionLabel> time) {
    std::reverse(time.begin(), time.end());
    return SymbolBlock(std::move(time));
  }

  // accepts "D1D2^3", "1 2^3", "D1 D2 D2 D2"
  static SymbolBlock parse(std::string_view text) {
    std::vector<RegionLabel> out;
    std::size_t i = 0;
    auto fail = [&](const std::string& why) {
      throw DomainError("cannot parse block '" + std::string(text) + "': " + why);
    };
    while (i < text.size()) {
      char c = text[i];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '*') { ++i; continue; }
      if (c == 'D' || c == 'd') ++i;
      if (i >= text.size()) fail("dangling D");
      RegionLabel sym;
      if (text[i] == '1') sym = RegionLabel::A1;
      else if (text[i] == '2') sym = RegionLabel::A2;
      else fail(std::string("unexpected '") + text[i] + "'");
      ++i;
      long power = 1;
      if (i < text.size() && text[i] == '^') {
        ++i;
        std::size_t start = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (start == i) fail("missing exponent");
        power = std::stol(std::string(text.substr(start, i - start)));
        if (power < 1 || power > 10000) fail("exponent out of range");
      }
      out.insert(out.end(), static_cast<std::size_t>(power), sym);
    }
    if (out.empty()) fail("empty block");
    return SymbolBlock(std::move(out));
  }

  // D1 D2^m, the block for m steps in A2 followed by one in A1
  static SymbolBlock run(int m) {
    std::vector<RegionLabel> v{RegionLabel::A1};
    v.insert(v.end(), static_cast<std::size_t>(m), RegionLabel::A2);
    return SymbolBlock(std::move(v));
  }

  const std::vector<RegionLabel>& symbols() const { return s_; }
  std::vector<RegionLabel> time_order() const { return {s_.rbegin(), s_.rend()}; }
  std::size_t size() const { return s_.size(); }
  bool empty() const { return s_.empty(); }

  std::string str() const {
    std::string out;
    std::size_t i = 0;
    while (i < s_.size()) {
      std::size_t j = i;
      while (j < s_.size() && s_[j] == s_[i]) ++j;
      out += s_[i] == RegionLabel::A1 ? "D1" : "D2";
      if (j - i > 1) out += "^" + std::to_string(j - i);
      i = j;
    }
    return out;
  }

  // product-order concatenation: (a + b) means a applied after b
  friend SymbolBlock operator+(const SymbolBlock& a, const SymbolBlock& b) {
    std::vector<RegionLabel> v = a.s_;
    v.insert(v.end(), b.s_.begin(), b.s_.end());
    return SymbolBlock(std::move(v));
  }

  friend bool operator==(const SymbolBlock&, const SymbolBlock&) = default;
  friend auto operator<=>(const SymbolBlock& a, const SymbolBlock& b) { return a.s_ <=> b.s_; }

 private:
  std::vector<RegionLabel> s_;
};

}  // namespace memmap
