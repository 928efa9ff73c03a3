#pragma once

// Boolean circuits and their translations into circuits over Z_d and over
// the max-plus semiring (N, max, +).

#include <boost/multiprecision/cpp_int.hpp>

#include "cep/circuit.hpp"

namespace cep {

using BigInt = boost::multiprecision::cpp_int;

struct BoolGate {
  enum class Kind { Const, And, Or, Not };
  std::string id;
  Kind kind = Kind::Const;
  bool value = false;
  std::size_t left = 0;
  std::size_t right = 0;
  std::optional<std::size_t> layer;  // declared layer, if any
};

struct BoolCircuit {
  std::vector<BoolGate> gates;
  std::optional<std::size_t> output;

  std::optional<std::size_t> find(std::string_view id) const;
  std::vector<std::size_t> topological_order() const;
};

/// Format:
///   boolean circuit
///   gate <id> = const 0|1 | and <a> <b> | or <a> <b> | not <a>  [layer <k>]
///   output <id>
BoolCircuit parse_bool_circuit(std::string_view text);
std::string serialize_bool_circuit(const BoolCircuit& bc);

std::vector<bool> eval_bool(const BoolCircuit& bc);

/// Gate-for-gate translation: and -> ·, not x -> 1 + (d-1)·x, or via
/// De Morgan, constants 0/1 kept. Original gate ids are preserved.
Circuit reduce_boolean_cvp(const BoolCircuit& bc, std::uint32_t d);

/// Layers computed from the wiring; every wire goes from layer k to k+1,
/// inputs sit on layer 1 and the output on the top layer. Copy-through gates
/// `and x x` are inserted where wires skip layers. Rejects `not` gates.
BoolCircuit layered(const BoolCircuit& bc);
/// Declared or computed layer of every gate; throws unless layered.
std::vector<std::size_t> check_layered(const BoolCircuit& bc);

struct MaxPlusGate {
  enum class Kind { Const, Max, Plus };
  std::string id;
  Kind kind = Kind::Const;
  BigInt value;
  std::size_t left = 0;
  std::size_t right = 0;
};

struct MaxPlusCircuit {
  std::vector<MaxPlusGate> gates;  // inputs precede readers
  std::size_t output = 0;
};

std::vector<BigInt> eval_maxplus(const MaxPlusCircuit& c);

struct MaxPlusReduction {
  BoolCircuit layered_source;
  MaxPlusCircuit circuit;
  std::size_t layers = 0;
  /// index of each layered source gate in `circuit`
  std::vector<std::size_t> gate_of;
  BigInt output_value;
  bool boolean_output = false;
  /// Every layer-k gate evaluates to 2^k (true) or 2^k - 1 (false).
  bool invariant_holds = false;
};

/// Layer-k gates are mapped so that false -> 2^k - 1 and true -> 2^k.
MaxPlusReduction reduce_cvp_maxplus(const BoolCircuit& bc);

std::string serialize_maxplus(const MaxPlusCircuit& c);

}  // namespace cep
