#include "field.hpp"

#include "errors.hpp"

namespace halo {

Field::Field(int q) : q_(q) {
  if (q != 2 && q != 3 && q != 4 && q != 5) throw ContractViolation("GF(q) supported for q in {2,3,4,5}, got " + std::to_string(q));
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < q; ++b) {
      if (q == 4) {
        add_[a][b] = static_cast<std::uint8_t>(a ^ b);
        // (a0 + a1 w)(b0 + b1 w) with w^2 = w + 1
        int a0 = a & 1, a1 = a >> 1, b0 = b & 1, b1 = b >> 1;
        int c0 = (a0 & b0) ^ (a1 & b1);
        int c1 = (a0 & b1) ^ (a1 & b0) ^ (a1 & b1);
        mul_[a][b] = static_cast<std::uint8_t>(c0 | (c1 << 1));
      } else {
        add_[a][b] = static_cast<std::uint8_t>((a + b) % q);
        mul_[a][b] = static_cast<std::uint8_t>((a * b) % q);
      }
    }
  }
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < q; ++b) {
      if (add_[a][b] == 0) neg_[a] = static_cast<std::uint8_t>(b);
      if (mul_[a][b] == 1) inv_[a] = static_cast<std::uint8_t>(b);
    }
  }
  for (int g = 1; g < q; ++g) {
    int x = g, order = 1;
    while (x != 1) {
      x = mul_[x][g];
      ++order;
    }
    if (order == q - 1) {
      primitive_ = static_cast<std::uint8_t>(g);
      break;
    }
  }
}

std::uint8_t Field::inv(std::uint8_t a) const {
  if (a == 0) throw ContractViolation("division by zero in " + name());
  return inv_[a];
}

}  // namespace halo
