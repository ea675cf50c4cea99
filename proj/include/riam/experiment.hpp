#pragma once

#include <optional>
#include <span>
#include <vector>

#include "riam/proof_structure.hpp"
#include "riam/term.hpp"

namespace riam::rel {

/// A labelling of every port of a structure by a point, indexed by port.
struct Experiment {
  std::vector<Term> values;
};

/// True iff `e` labels every port with a variable-free point of its web and
/// satisfies the local conditions: axiom ports equal, cut ports equal,
/// unit ports `()`, tensor/par principal = pair of its auxiliaries.
bool verify_experiment(const mll::IndexedStructure& ps, const Experiment& e);

/// Values at the conclusions, in conclusion order.
std::vector<Term> result(const mll::IndexedStructure& ps, const Experiment& e);

/// Checks the point preconditions shared by the oracle and the machine:
/// arity equals the number of conclusions and each component is a
/// variable-free point of its conclusion's web. Throws PreconditionError.
void require_conclusion_point(const mll::IndexedStructure& ps, std::span<const Term> x);

/// Exhaustive search for an experiment whose result is `x`.
///
/// An experiment is fixed by the value of each axiom, so the search assigns
/// an atom to every atomic leaf of every axiom formula, drawing from the
/// atoms of `x` plus one fresh atom per leaf; fresh atoms are interchangeable
/// and are introduced in canonical order only.
std::optional<Experiment> find_experiment(const mll::IndexedStructure& ps, std::span<const Term> x);

inline bool oracle_check(const mll::IndexedStructure& ps, std::span<const Term> x) {
  return find_experiment(ps, x).has_value();
}

} // namespace riam::rel
