#pragma once

// Sparse mixed-integer linear program container plus the bijection between
// semantic keys (entity, quantity, hour) and column numbers. Shared by the
// problem builder and the solve engines.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace mecgrid {

enum class VarKind : uint8_t { continuous, binary };
enum class RowSense : uint8_t { le, eq, ge };

struct Variable {
  std::string name;
  VarKind kind = VarKind::continuous;
  double lb = 0.0;
  double ub = 0.0;
};

struct Row {
  std::string name;
  RowSense sense = RowSense::eq;
  double rhs = 0.0;
  std::vector<std::pair<int, double>> coeffs;  // (column, value), columns unique
};

struct MilpProblem {
  std::vector<Variable> variables;
  std::vector<Row> rows;
  std::vector<double> objective;  // aligned with variables, minimization
  double objective_offset = 0.0;

  int num_vars() const { return static_cast<int>(variables.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int add_variable(std::string name, VarKind kind, double lb, double ub);
  Row& add_row(std::string name, RowSense sense, double rhs);
  void set_objective(int col, double coeff) { objective[col] = coeff; }
  void add_objective(int col, double coeff) { objective[col] += coeff; }

  // Activity of row r under a full solution vector.
  double row_activity(const Row& r, const std::vector<double>& x) const;
  double objective_value(const std::vector<double>& x) const;
};

// Decision quantities, one tag per solver column family.
enum class Quantity : uint8_t {
  V,         // voltage magnitude (AC or DC hub)
  Theta,     // AC voltage angle; the reference hub carries no column
  Pd,        // served active demand
  Qd,        // served reactive demand
  Pg,        // microturbine active output
  Qg,        // microturbine reactive output (AC side only)
  Pw,        // wind dispatch
  Qw,        // wind reactive
  Ps,        // solar dispatch
  Qs,        // solar reactive
  Pc,        // inverter active power injected into its AC hub (DC -> AC positive)
  Qc,        // inverter reactive power on the AC side
  PL,        // line active flow (AC or DC)
  QL,        // AC line reactive flow
  SL,        // AC line apparent-power proxy
  Pch,       // battery charge power
  Pdc,       // battery discharge power
  Ich,       // charge indicator (binary)
  Idc,       // discharge indicator (binary)
  E,         // battery energy
  Vgs,       // supplier output
  Pi,        // gas hub pressure
  Fp,        // pipe flow
  Gd,        // served heat demand
  FuelSeg,   // PWL segment of a turbine fuel curve
  CostSeg,   // PWL segment of a supplier cost curve
};

const char* to_string(Quantity q);

// Entity kinds namespace the owner ordinal; ids are unique only per network.
enum class EntityKind : uint8_t {
  ac_hub,
  dc_hub,
  gas_hub,
  ac_line,
  dc_line,
  inverter,
  turbine,
  renewable,
  battery,
  supplier,
  pipe,
};

struct VarKey {
  EntityKind entity = EntityKind::ac_hub;
  int16_t ordinal = 0;   // position within the entity's collection
  Quantity quantity = Quantity::V;
  int16_t segment = -1;  // PWL segment index, -1 otherwise
  int32_t hour = 0;

  bool operator==(const VarKey&) const = default;
};

struct VarKeyHash {
  size_t operator()(const VarKey& k) const {
    uint64_t h = (uint64_t(uint8_t(k.entity)) << 56) ^ (uint64_t(uint16_t(k.ordinal)) << 40) ^
                 (uint64_t(uint8_t(k.quantity)) << 32) ^ (uint64_t(uint16_t(k.segment)) << 16) ^
                 uint64_t(uint32_t(k.hour));
    return std::hash<uint64_t>()(h);
  }
};

class VariableIndex {
 public:
  int add(const VarKey& key) {
    int col = static_cast<int>(keys_.size());
    keys_.push_back(key);
    map_.emplace(key, col);
    return col;
  }

  int column(const VarKey& key) const {
    auto it = map_.find(key);
    return it == map_.end() ? -1 : it->second;
  }
  bool contains(const VarKey& key) const { return map_.count(key) > 0; }
  const VarKey& key(int col) const { return keys_[col]; }
  int size() const { return static_cast<int>(keys_.size()); }
  const std::vector<VarKey>& keys() const { return keys_; }

 private:
  std::vector<VarKey> keys_;
  std::unordered_map<VarKey, int, VarKeyHash> map_;
};

}  // namespace mecgrid
