#pragma once

#include "textcirc/circuit.hpp"
#include "textcirc/text.hpp"

namespace textcirc {

// One horizontal slice: instances that can fire in the same layer (they
// share no wires).  Twist slices of the constructive proof carry no data in
// a connectivity IR; the chain of pronominal links emitted by textualise()
// plays their role.
struct Slice {
  std::vector<int> instances;  // ids into the sliced circuit
};

// Earliest-possible layering; concatenating the slices in order
// reconstructs the circuit.  Recursion into holes happens in textualise.
std::vector<Slice> slice(const TextCircuit& c);

// Constructive right inverse of compile: a hybrid text whose compilation
// equals `c`.  One sentence per gate slice, [&] joining parallel instances,
// copular IS for adjective gates, EXISTS for untouched hole wires, [THAT]
// opening every complement scope, restated nouns plus reflexive links for
// identified positions, pronominal links mirroring wire connectivity.
HybridText textualise(const TextCircuit& c);

// equal(compile(t1), compile(t2)); both texts must validate.
bool equiv(const HybridText& t1, const HybridText& t2, ValidationReport* report = nullptr);

}  // namespace textcirc
