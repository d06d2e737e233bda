// Solves the two-dimensional fixtures with every method and prints the limits.

#include <cstdio>

#include "mteq/mteq.hpp"

int main() {
  using namespace mteq;
  const ProblemInstance ex21 = fixture(ProblemId::Ex21);
  const ProblemInstance ex22 = fixture(ProblemId::Ex22);
  const struct {
    const char* name;
    const ProblemInstance* inst;
    Vector x0;
  } cases[] = {{"ex21", &ex21, {0.8, 2.0}}, {"ex22", &ex22, {1.5, 2.0}}};

  for (const auto& c : cases) {
    for (Method m : {Method::SMEQM, Method::Jacobi, Method::GaussSeidel, Method::SOR, Method::ANewton}) {
      SolveConfig cfg;
      cfg.method = m;
      cfg.scale = false;
      const SolveOutcome out = solve(c.inst->tensor, c.inst->rhs, c.x0, cfg);
      std::printf("%-5s %-8s %-10s %5zu its  x = (%.8f, %.8f)\n", c.name, std::string(to_string(m)).c_str(),
                  std::string(to_string(out.status)).c_str(), out.iterations, out.x[0], out.x[1]);
    }
  }

  const MTensorCertificate cert = mtensor_certificate(ex21.tensor);
  std::printf("ex21 certificate: s = %g, row-sum bound = %g, %s\n", cert.s, cert.row_sum_bound,
              std::string(to_string(cert.verdict)).c_str());
  std::printf("ex21 existence test: %s\n", std::string(to_string(existence_sufficient(ex21.tensor, ex21.rhs))).c_str());
}
