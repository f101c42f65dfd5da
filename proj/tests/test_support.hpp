#pragma once

// Small but fully populated instance shared by several suites: two AC hubs,
// two DC hubs, two gas hubs, one of every device type, four-hour horizon.
// Chosen so the optimum serves everything (no shedding).

#include "mecgrid/model.hpp"

#include <string>

namespace mectest {

inline mecgrid::MicrogridCase make_tiny_case() {
  using namespace mecgrid;
  MicrogridCase c;
  c.name = "tiny";
  c.description = "two-hub fixture for unit tests";
  c.horizon = 4;
  c.base.power_kva = 100.0;

  c.ac_hubs = {
      {"ac1", 0.95, 1.05, {20, 22, 25, 18}, {8, 8.8, 10, 7.2}, true},
      {"ac2", 0.95, 1.05, {30, 28, 35, 25}, {12, 11.2, 14, 10}, false},
  };
  c.ac_lines = {{"ac1", "ac2", 2.0, -8.0, 3.0}};
  c.dc_hubs = {
      {"dc1", 0.95, 1.05, {15, 18, 20, 12}},
      {"dc2", 0.95, 1.05, {25, 24, 30, 20}},
  };
  c.dc_lines = {{"dc1", "dc2", 0.05, 3.0}};
  c.inverters = {{"inv1", "ac2", "dc1", -80, 80, -40, 40}};

  Microturbine mt;
  mt.id = "mt1";
  mt.network = Network::dc;
  mt.hub = "dc2";
  mt.p_min = 0;
  mt.p_max = 100;
  mt.fuel_curve = {CurveSpec::Kind::quadratic, 0.0, 0.1, 0.001, {}};
  mt.gas_hub = "g2";
  c.turbines = {mt};

  c.renewables = {
      {"w1", RenewableKind::wind, Network::ac, "ac1", {10, 12, 8, 9}},
      {"s1", RenewableKind::solar, Network::dc, "dc1", {0, 20, 30, 5}},
  };
  c.batteries = {
      {"bat1", "dc1", 0, 30, 0, 30, 0.9, 0.9, 10, 80, 30, TerminalRule::at_least_initial},
  };
  c.pipes = {{"p1", "g1", "g2", 1.0, 90.0, 85.0, 50.0}};

  GasSupplier gs;
  gs.id = "gs1";
  gs.gas_hub = "g1";
  gs.v_min = 0;
  gs.v_max = 80;
  gs.cost_curve = {CurveSpec::Kind::quadratic, 0.0, 1.5, 0.01, {}};
  c.suppliers = {gs};

  c.gas_hubs = {
      {"g1", 50, 120, {5, 6, 7, 5}},
      {"g2", 50, 120, {8, 9, 10, 8}},
  };
  return c;
}

inline std::string data_path(const std::string& file) {
  return std::string(MECGRID_DATA_DIR) + "/" + file;
}

}  // namespace mectest
