#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace sdm {

/// Decimal text with 17 significant digits; round-trips any finite double.
/// Non-finite values are written as "inf", "-inf" or "nan".
std::string format_double(double value);

/// 64-bit FNV-1a, used for content fingerprints of on-disk artifacts.
class Fnv1a {
 public:
  void update(const void* data, std::size_t size);
  void update(std::string_view text) { update(text.data(), text.size()); }
  std::uint64_t digest() const { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace sdm
