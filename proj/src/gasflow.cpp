#include "mecgrid/gasflow.hpp"

#include <cmath>
#include <stdexcept>

namespace mecgrid {

LinearFlowModel gas_flow_coefficients(const GasPipe& pipe) {
  const double pn = pipe.pi0_from, pm = pipe.pi0_to;
  if (!(pn > 0.0) || !(pm > 0.0))
    throw std::domain_error("pipe " + pipe.id + ": initial pressures must be positive");
  if (pn == pm)
    throw std::domain_error("pipe " + pipe.id + ": equal initial pressures are singular");
  // When pi0_to > pi0_from the orientation is flipped internally: the flow is
  // written against the high-pressure end and negated, which lands on the same
  // coefficients with |pi_n^2 - pi_m^2| under the root.
  const double denom = std::sqrt(std::abs(pn * pn - pm * pm));
  LinearFlowModel m;
  m.pipe_id = pipe.id;
  m.a_n = pipe.c_p * pn / denom;
  m.a_m = pipe.c_p * pm / denom;
  return m;
}

std::vector<LinearFlowModel> linearize_pipes(const MicrogridCase& c) {
  std::vector<LinearFlowModel> out;
  out.reserve(c.pipes.size());
  for (const auto& p : c.pipes) out.push_back(gas_flow_coefficients(p));
  return out;
}

double weymouth_flow(double c_p, double pi_n, double pi_m) {
  const double d = pi_n * pi_n - pi_m * pi_m;
  return c_p * (d >= 0.0 ? 1.0 : -1.0) * std::sqrt(std::abs(d));
}

}  // namespace mecgrid
