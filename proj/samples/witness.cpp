// Finds a single automorphism fixing exactly what two given ones fix in common.

#include <iostream>

#include "autfix/autfix.hpp"

int main() {
  using namespace autfix;
  const Automorphism phi(parse_word_list("x, y x, z", 3));
  const Automorphism psi(parse_word_list("x, y, z x", 3));

  const WitnessReport r = find_witness(phi, psi);
  std::cout << "Fix phi:   " << to_string(r.fix_phi) << "\n";
  std::cout << "Fix psi:   " << to_string(r.fix_psi) << "\n";
  std::cout << "common:    " << to_string(r.common.basis()) << "\n";
  std::cout << "verdict:   " << to_string(r.verdict) << "\n";
  if (r.chi) std::cout << "witness:   " << to_string(*r.chi) << " (k = " << r.k.value_or(0) << ")\n";

  // Membership in the common fixed subgroup, by folding.
  const Word w = parse_word("y x y^-1", 3);
  std::cout << to_string(w) << " fixed by both: " << (member(r.common, w) ? "yes" : "no") << "\n";
  return r.verdict == Verdict::Equal ? 0 : 1;
}
