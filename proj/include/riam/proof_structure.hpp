#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "riam/formula.hpp"

namespace riam::mll {

enum class CellKind { Ax, Cut, Tensor, Par, One, Bot };

std::string_view to_string(CellKind kind);

struct PortDecl {
  std::string id;
  Formula type;
};

/// A cell as written in a structure file: ports are referenced by id.
///
/// Arities: Ax has two principal ports, Cut two auxiliary ports, Tensor/Par
/// two auxiliary ports and one principal port, One/Bot one principal port.
struct Cell {
  std::string id;
  CellKind kind;
  std::vector<std::string> principal;
  std::vector<std::string> auxiliary;
};

/// An MLL proof-structure as plain data. Nothing here is checked; see
/// `validate` and `IndexedStructure`.
struct ProofStructure {
  std::vector<PortDecl> ports;
  std::vector<Cell> cells;
  std::vector<std::string> conclusions;
};

struct Violation {
  std::string subject; // offending cell or port id
  std::string message;
};

std::string to_string(const Violation& v);

/// Reports every broken invariant: arities, port usage, typing, conclusions.
/// An empty result means the structure is well formed.
std::vector<Violation> validate(const ProofStructure& ps);

class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
  std::vector<Violation> violations_;
};

/// Parses the line-based `.mllps` format and validates the result.
/// Throws ParseError or ValidationError.
ProofStructure parse_proof_structure(std::string_view text);

/// Renders `.mllps` text that parses back to an equal structure.
std::string to_string(const ProofStructure& ps);

using PortIndex = std::size_t;
using CellIndex = std::size_t;

struct IndexedCell {
  std::string id;
  CellKind kind;
  std::vector<PortIndex> principal;
  std::vector<PortIndex> auxiliary;
};

/// A validated proof-structure with dense port/cell indices and adjacency.
/// Port indices follow declaration order, which is also the scheduling
/// priority used by the machine.
class IndexedStructure {
public:
  /// Throws ValidationError if `ps` is not well formed.
  explicit IndexedStructure(ProofStructure ps);

  std::size_t port_count() const { return source_.ports.size(); }
  std::size_t cell_count() const { return cells_.size(); }

  const std::string& port_id(PortIndex p) const { return source_.ports[p].id; }
  const Formula& port_type(PortIndex p) const { return source_.ports[p].type; }
  std::optional<PortIndex> find_port(std::string_view id) const;
  std::optional<CellIndex> find_cell(std::string_view id) const;

  const IndexedCell& cell(CellIndex c) const { return cells_[c]; }
  std::span<const IndexedCell> cells() const { return cells_; }

  CellIndex principal_owner(PortIndex p) const { return principal_owner_[p]; }
  std::optional<CellIndex> auxiliary_owner(PortIndex p) const { return auxiliary_owner_[p]; }

  std::span<const PortIndex> conclusions() const { return conclusions_; }
  const ProofStructure& source() const { return source_; }

private:
  ProofStructure source_;
  std::vector<IndexedCell> cells_;
  std::vector<CellIndex> principal_owner_;
  std::vector<std::optional<CellIndex>> auxiliary_owner_;
  std::vector<PortIndex> conclusions_;
  std::unordered_map<std::string, PortIndex> port_by_id_;
  std::unordered_map<std::string, CellIndex> cell_by_id_;
};

} // namespace riam::mll
