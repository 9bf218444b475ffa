#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace halo {

// GF(q) for q in {2,3,4,5}. Elements are 0..q-1; for q=4 the element
// a + 2b stands for a + b*w with w^2 = w + 1.
class Field {
 public:
  explicit Field(int q);
  int q() const { return q_; }
  std::uint8_t add(std::uint8_t a, std::uint8_t b) const { return add_[a][b]; }
  std::uint8_t sub(std::uint8_t a, std::uint8_t b) const { return add_[a][neg_[b]]; }
  std::uint8_t mul(std::uint8_t a, std::uint8_t b) const { return mul_[a][b]; }
  std::uint8_t neg(std::uint8_t a) const { return neg_[a]; }
  std::uint8_t inv(std::uint8_t a) const;  // a != 0
  // A generator of the multiplicative group.
  std::uint8_t primitive() const { return primitive_; }
  std::string name() const { return "GF" + std::to_string(q_); }

 private:
  int q_;
  std::array<std::array<std::uint8_t, 5>, 5> add_{}, mul_{};
  std::array<std::uint8_t, 5> neg_{}, inv_{};
  std::uint8_t primitive_ = 1;
};

}  // namespace halo
