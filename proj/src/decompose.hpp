#pragma once

#include "halo.hpp"

namespace halo {

struct Letter {
  std::size_t gen = 0;
  bool inv = false;
  bool operator==(const Letter&) const = default;
};
using GeneratorWord = std::vector<Letter>;

struct DecomposeOptions {
  std::size_t word_cap = 100000;
  bool simplify = false;
};

// One recursion edge: SubsetLength of the parent block and of a child block.
struct RecursionStep {
  std::int64_t parent_length = 0;
  std::int64_t child_length = 0;
  std::string rule;
};

struct Decomposition {
  GeneratorWord word;
  std::vector<RecursionStep> trace;
  // every step strictly decreased
  bool strictly_decreasing() const;
};

// tau_{r,f}(-l) tau_{f,s}(-m) tau_{r,f}(l) tau_{f,s}(m), multiplied out.
LampConfig commutator_transvection(const HaloGroup& g, const Element& r, const Element& f, const Element& s,
                                   std::uint8_t lambda, std::uint8_t mu);

enum class CommutatorForm { LambdaMu, Lambda, Both, Neither };
std::string commutator_form_name(CommutatorForm c);
// Decides by exhaustive evaluation over the units of the field which closed
// form the four-fold product takes.
CommutatorForm certify_commutator(const HaloGroup& g);

Decomposition decompose_gluing(const HaloGroup& g, const LampConfig& sigma, const DecomposeOptions& opt = {});
// Case analysis over Z^d with the lexicographic order. Throws
// DecompositionError when a recursion step fails to shorten the block.
Decomposition decompose_upcloner(const HaloGroup& g, const LampConfig& sigma, const DecomposeOptions& opt = {});
// Dispatches on the family; the cursor is appended as a geodesic move word.
Decomposition decompose_element(const HaloGroup& g, const HaloElement& x, const DecomposeOptions& opt = {});

HaloElement evaluate_word(const HaloGroup& g, const GeneratorWord& w);
GeneratorWord simplify_word(GeneratorWord w);

// Membership in the subgroup generated by the natural generators of an
// upcloner over Z^d: every off-diagonal entry (p,q) has q - p in N^d.
bool upcloner_reachable(const HaloGroup& g, const LampConfig& sigma);

nlohmann::json word_to_json(const GeneratorWord& w);
std::string word_to_string(const HaloGroup& g, const GeneratorWord& w);

}  // namespace halo
