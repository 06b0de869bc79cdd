// Generates one noiseless MMV instance, runs TSMP, OSMP and SOMP on it and
// prints the recovered supports next to the true one.

#include "jspursuit/jspursuit.hpp"

#include <iostream>

namespace js = jspursuit;

static void print_set(const char* label, const js::IndexSet& s) {
  std::cout << label << ':';
  for (js::Index i : s) std::cout << ' ' << i;
  std::cout << '\n';
}

int main() {
  const js::ConfigPoint pt{64, 512, 3, 3, 20, js::kInfinity, js::MatrixModel::gaussian, 1.0, 2024};
  const auto inst = js::make_instance<double>(pt, 0);
  print_set("truth", inst.problem.truth->omega);

  const auto tsmp = js::tsmp1(inst.problem, pt.k);
  const auto osmp = js::osmp(inst.problem, pt.k);
  const auto somp = js::somp(inst.problem, pt.k);
  print_set("tsmp ", tsmp.omega_hat);
  print_set("osmp ", osmp.omega_hat);
  print_set("somp ", somp.omega_hat);

  const double err = js::singular_values(js::RealMat(inst.problem.truth->x0 - tsmp.x_hat))(0);
  std::cout << "tsmp spectral error: " << err << '\n';
  return 0;
}
