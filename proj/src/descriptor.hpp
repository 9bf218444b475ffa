#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "halo.hpp"

namespace halo {

// Parsed group descriptor. Grammar (whitespace between tokens is ignored):
//   group   := primary ("x" primary)*            left associative
//   primary := "Z" ["^" int [":lex"]] | "C" int | "H3" | "(" group ")"
//            | family "(" args ")"
//   args    := wreath/designer: group "," group   (lamp group, base)
//              shuffler: group
//              juggler: int "," group
//              cloner/upcloner: "GF" int "," group
struct GroupDescriptor {
  enum class Kind { Zd, Cyclic, Heisenberg, Product, Halo };
  Kind kind = Kind::Zd;
  int dim = 1;
  bool lex = false;
  std::int64_t order = 0;
  Family family = Family::Wreath;
  int param = 0;  // juggler tracks or field size
  std::vector<GroupDescriptor> args;
  std::size_t offset = 0;

  std::string print() const;
  bool ordered() const;
  bool finite() const;
};

GroupDescriptor parse_descriptor(std::string_view text);
GroupPtr make_group(const GroupDescriptor& d);
GroupPtr make_group(std::string_view text);

}  // namespace halo
