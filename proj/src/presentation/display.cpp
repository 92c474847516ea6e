#include "ixai/display.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace ixai {

int significant_figures(DisplayRole role) { return role == DisplayRole::kAdjustment ? 3 : 2; }

std::string round_significant(double v, int digits) {
  if (!std::isfinite(v)) throw std::invalid_argument("round_significant: non-finite value");
  if (digits < 1) throw std::invalid_argument("round_significant: digits < 1");
  if (v == 0.0) return "0";

  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, std::abs(v), std::chars_format::scientific);
  const std::string sci(buf, res.ptr);
  const auto e_pos = sci.find('e');
  std::string mant;
  for (char c : sci.substr(0, e_pos))
    if (c != '.') mant += c;
  int exp10 = std::stoi(sci.substr(e_pos + 1));

  if (static_cast<int>(mant.size()) > digits) {
    const bool up = mant[digits] >= '5';
    mant.resize(digits);
    if (up) {
      int i = digits - 1;
      while (i >= 0 && mant[i] == '9') mant[i--] = '0';
      if (i >= 0) {
        ++mant[i];
      } else {
        mant.insert(mant.begin(), '1');
        mant.pop_back();
        ++exp10;
      }
    }
  }
  while (mant.size() > 1 && mant.back() == '0') mant.pop_back();

  // mant holds d0 d1 d2 ... meaning d0.d1d2... * 10^exp10
  std::string out;
  const int n = static_cast<int>(mant.size());
  if (exp10 < 0) {
    out = "0." + std::string(static_cast<std::size_t>(-exp10 - 1), '0') + mant;
  } else if (exp10 + 1 >= n) {
    out = mant + std::string(static_cast<std::size_t>(exp10 + 1 - n), '0');
  } else {
    out = mant.substr(0, exp10 + 1) + "." + mant.substr(exp10 + 1);
  }
  return v < 0 ? "-" + out : out;
}

std::string round_display(double v, DisplayRole role) {
  return round_significant(v, significant_figures(role));
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace ixai
