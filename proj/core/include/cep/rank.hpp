#pragma once

// Rank functions and the phased evaluation of type-admitting circuits.

#include <random>

#include "cep/reduction.hpp"

namespace cep {

using RankMap = std::vector<std::size_t>;  // element -> positive rank

struct RankStructure {
  /// below[a][b] = 1 iff a ⪯ b, the reflexive-transitive closure of
  /// a -> a+c, a -> l·a and a -> a·r.
  std::vector<std::vector<char>> below;
  std::vector<std::size_t> scc;  // class index per element
  RankMap rank;
  std::size_t max_rank = 0;
};

RankStructure build_rank(const FiniteSemiring& sr);

struct RankViolation {
  int clause = 0;
  Elem a = 0, b = 0;
  std::optional<std::pair<Elem, Elem>> idempotents;  // (e,f) for clause 3
  std::string message;
};

/// First violated clause with a witness, checked exhaustively.
std::optional<RankViolation> check_rank_axioms(const FiniteSemiring& sr, const RankMap& rank);

/// |A| for semirings whose element names are sets such as `{0,2}`.
RankMap cardinality_rank(const FiniteSemiring& sr);

/// Lines `<element> <rank>`.
RankMap parse_rank(const FiniteSemiring& sr, std::string_view text);

/// Evaluation backends for circuits without products and without sums.
class CircuitOracle {
 public:
  virtual ~CircuitOracle() = default;
  virtual EvalResult eval_additive(const Circuit& c) const = 0;
  virtual EvalResult eval_multiplicative(const Circuit& c) const = 0;
};

/// Topological evaluation after checking the restriction.
class NaiveOracle : public CircuitOracle {
 public:
  EvalResult eval_additive(const Circuit& c) const override;
  EvalResult eval_multiplicative(const Circuit& c) const override;
};

struct PhaseOptions {
  std::size_t start_phase = 1;
  /// Tie-break for inner(A) when both inputs are inner gates: lower gate index
  /// unless a seed is given.
  std::optional<std::uint64_t> random_seed;
  /// Assert after every phase that all gates of rank <= k are constants.
  bool check_invariant = false;
  /// Validate the type assignment before starting.
  bool check_types = false;
  const CircuitOracle* oracle = nullptr;  // NaiveOracle when null
};

struct PhaseRecord {
  std::size_t k = 0;
  std::vector<GateId> additive;                     // evaluated in step 1
  std::vector<std::pair<GateId, GateId>> inner;     // A -> inner(A)
  std::vector<Elem> reduced_values;                 // [A] in C'
  std::vector<GateId> locally_correct;
  std::vector<GateId> w;
  std::vector<std::pair<GateId, Elem>> frozen;      // non-constant gates of W
};

struct PhasedResult {
  EvalResult result;
  std::vector<PhaseRecord> phases;
};

PhasedResult eval_phased(const Circuit& c, const TypeAssignment& types, const RankMap& rank,
                         const PhaseOptions& opt = {});

/// Line-oriented log of all phases.
std::string phase_trace(const Circuit& c, const PhasedResult& r);

/// (1,1) for every gate; valid whenever the semiring has a multiplicative identity.
std::optional<TypeAssignment> identity_types(const Circuit& c);

struct FullOptions {
  PipelineOptions pipeline{false, 64};
  std::optional<RankMap> rank;  // build_rank when absent
  PhaseOptions phases;
};

struct FullResult {
  Elem value = 0;
  bool fallback = false;  // semiring not {0,1}-free, evaluated naively
  std::string note;
  std::optional<PipelineResult> pipeline;
  std::optional<PhasedResult> phased;
};

/// Reduction to a type-admitting circuit, phased evaluation and affine
/// recombination.
FullResult eval_full(const Circuit& c, const FullOptions& opt = {});

}  // namespace cep
