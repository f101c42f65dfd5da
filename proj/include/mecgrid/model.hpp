#pragma once

// Typed description of a multi-carrier (AC + DC electricity, natural gas)
// microgrid instance, plus validation, admittance assembly and per-unit
// conversion. Instances are plain value types; once validated they are
// treated as immutable and may be shared across threads.

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mecgrid {

enum class Network { ac, dc };
enum class RenewableKind { wind, solar };
enum class TerminalRule { free_terminal, at_least_initial };

const char* to_string(Network n);
const char* to_string(RenewableKind k);
const char* to_string(TerminalRule r);

// Convex scalar function given either as a quadratic (c0 + c1*x + c2*x^2)
// or as explicit sample points interpolated linearly.
struct CurveSpec {
  enum class Kind { quadratic, points };
  Kind kind = Kind::quadratic;
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;
  std::vector<std::pair<double, double>> samples;  // for Kind::points, x ascending

  double operator()(double x) const;
  // Substitutes x -> scale*x, e.g. for moving the domain into per-unit.
  CurveSpec with_domain_scale(double scale) const;
};

struct PerUnitBase {
  double power_kva = 100.0;
  double pressure = 1.0;
};

struct AcHub {
  std::string id;
  double v_min = 0.95, v_max = 1.05;       // p.u.
  std::vector<double> demand_p;            // kW per hour
  std::vector<double> demand_q;            // kvar per hour
  bool is_reference = false;
};

struct AcLine {
  std::string from, to;
  double g = 0.0, b = 0.0;                 // series admittance, p.u.
  double sl_max = 1.0;                     // apparent-power limit, p.u.
};

struct DcHub {
  std::string id;
  double v_min = 0.95, v_max = 1.05;
  std::vector<double> demand_p;            // kW per hour
};

struct DcLine {
  std::string from, to;
  double r = 0.1;                          // p.u. resistance
  double sl_max = 1.0;
};

// Bidirectional AC/DC converter. p is the active power injected into the
// AC hub (positive means DC -> AC); q is reactive support on the AC side.
struct Inverter {
  std::string id;
  std::string ac_hub, dc_hub;
  double p_min = 0.0, p_max = 0.0;         // kW
  double q_min = 0.0, q_max = 0.0;         // kvar
};

struct Microturbine {
  std::string id;
  Network network = Network::dc;
  std::string hub;                         // AC or DC hub per `network`
  double p_min = 0.0, p_max = 0.0;         // kW
  double q_min = 0.0, q_max = 0.0;         // kvar, used only on the AC side
  CurveSpec fuel_curve;                    // kW -> Skcf/hr
  std::string gas_hub;                     // where the fuel is drawn
};

struct RenewableUnit {
  std::string id;
  RenewableKind kind = RenewableKind::solar;
  Network network = Network::ac;
  std::string hub;
  std::vector<double> forecast;            // kW per hour
};

struct BatteryUnit {
  std::string id;
  std::string dc_hub;
  double p_ch_min = 0.0, p_ch_max = 0.0;   // kW
  double p_dc_min = 0.0, p_dc_max = 0.0;   // kW
  double eta_ch = 1.0, eta_dc = 1.0;       // in (0, 1]
  double e_min = 0.0, e_max = 0.0;         // kWh
  double e_initial = 0.0;                  // kWh
  TerminalRule terminal_rule = TerminalRule::at_least_initial;
};

struct GasPipe {
  std::string id;
  std::string from, to;
  double c_p = 1.0;                        // pipeline constant
  double pi0_from = 0.0, pi0_to = 0.0;     // initial pressures (linearization point)
  double f_max = 0.0;                      // Skcf/hr
};

struct GasSupplier {
  std::string id;
  std::string gas_hub;
  double v_min = 0.0, v_max = 0.0;         // Skcf/hr
  CurveSpec cost_curve;                    // $ per supply level
};

struct GasHub {
  std::string id;
  double pi_min = 0.0, pi_max = 0.0;
  std::vector<double> heat_demand;         // Skcf/hr per hour (sheddable)
};

struct CostParams {
  double voll_e = 10.0;      // $/kWh of unserved electricity
  double voll_g = 20.0;      // $/Skcf of unserved heat
  double beta = 0.5;         // $/kWh discharged (degradation proxy)
  double xi = 0.5;           // reactive weight in the apparent-power proxy
  int pwl_segments = 4;
};

struct MicrogridCase {
  std::string name;
  std::string description;
  int horizon = 24;
  PerUnitBase base;
  CostParams costs;

  std::vector<AcHub> ac_hubs;
  std::vector<AcLine> ac_lines;
  std::vector<DcHub> dc_hubs;
  std::vector<DcLine> dc_lines;
  std::vector<Inverter> inverters;
  std::vector<Microturbine> turbines;
  std::vector<RenewableUnit> renewables;
  std::vector<BatteryUnit> batteries;
  std::vector<GasPipe> pipes;
  std::vector<GasSupplier> suppliers;
  std::vector<GasHub> gas_hubs;

  // Index of a hub id within its network, or -1.
  int ac_hub_index(const std::string& id) const;
  int dc_hub_index(const std::string& id) const;
  int gas_hub_index(const std::string& id) const;
  int reference_hub_index() const;  // -1 if missing
};

struct Violation {
  std::string where;    // entity, e.g. "battery bat1"
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// Checks every structural invariant of the instance. All problems are
// reported; nothing throws.
ValidationReport validate_case(const MicrogridCase& c);

// Real and imaginary parts of the nodal admittance matrix. Shunt-free:
// every row of G and of B sums to zero.
struct AdmittanceMatrix {
  Eigen::MatrixXd G, B;
};

struct LineEntry {
  int from, to;
  double g, b;
};

AdmittanceMatrix assemble_admittance(std::span<const LineEntry> lines, int n_hubs);
AdmittanceMatrix assemble_admittance(const MicrogridCase& c);

// Divides every kW/kvar/kWh quantity by the base power. Voltages are
// already p.u.; gas-side quantities stay in physical units. Inverse of
// from_per_unit. Throws std::invalid_argument on a non-positive base.
MicrogridCase to_per_unit(const MicrogridCase& c);
MicrogridCase from_per_unit(const MicrogridCase& c);

}  // namespace mecgrid
