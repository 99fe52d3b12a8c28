// Prints the model calibration forms as term lists and evaluates each on its
// standard calibrated plane (value exactly +1).

#include <calibron/forms.hpp>

#include <cstdio>
#include <string>

using calibron::exterior::KForm;
using calibron::exterior::RealVector;
namespace forms = calibron::forms;

namespace {

void dump(const char* name, const KForm& f) {
  std::printf("%s  (degree %d on R^%d, %zu terms)\n", name, f.degree(), f.dim(), f.terms().size());
  for (const auto& [idx, coeff] : f.terms()) {
    std::string key = "e";
    for (int i : idx.indices()) key += static_cast<char>('0' + i);
    std::printf("  %+g %s\n", coeff, key.c_str());
  }
}

forms::Frame plane(int dim, std::initializer_list<int> slots) {
  forms::Frame fr;
  for (int s : slots) fr.vectors.push_back(RealVector::unit(dim, s));
  return fr;
}

}  // namespace

int main() {
  const KForm phi = forms::g2_three_form();
  const KForm psi = forms::g2_four_form();
  const KForm big = forms::cayley_form();

  dump("phi (associative 3-form)", phi);
  dump("psi (coassociative 4-form)", psi);
  dump("Phi (Cayley 4-form)", big);

  std::printf("\nmodel-plane values (each should be exactly +1):\n");
  std::printf("  phi(e1,e2,e3)      = %+g\n", evaluate(phi, plane(7, {1, 2, 3}).vectors));
  std::printf("  psi(e4,e5,e6,e7)   = %+g\n", evaluate(psi, plane(7, {4, 5, 6, 7}).vectors));
  std::printf("  Phi(e1,e2,e3,e4)   = %+g\n", evaluate(big, plane(8, {1, 2, 3, 4}).vectors));

  // The 4-form is the Hodge dual of the 3-form: together they fill out the
  // seven coordinate splittings 123|4567, and the Cayley form restricts to
  // the G2 pair on the unit-slot hyperplanes.
  const KForm wedge_check = calibron::exterior::wedge(phi, psi);
  std::printf("  (phi ^ psi)(e1..e7) = %+g  (7 vol)\n", evaluate(wedge_check, plane(7, {1, 2, 3, 4, 5, 6, 7}).vectors));
  return 0;
}
