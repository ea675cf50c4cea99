#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "riam/proof_structure.hpp"
#include "riam/term.hpp"

namespace riam::machine {

using mll::CellIndex;
using mll::IndexedStructure;
using mll::PortIndex;
using rel::Substitution;
using rel::Term;

/// A finite formal sum of terms with coefficients in {-1, +1}. Entries are
/// kept sorted by term and zero coefficients are never stored.
class Series {
public:
  struct Entry {
    Term term;
    int coefficient;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  Series() = default;
  static Series single(Term t, int coefficient);

  bool is_zero() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  int coefficient(const Term& t) const;
  const std::vector<Entry>& entries() const { return entries_; }

  /// First `+` and first `-` entry, when both exist.
  std::optional<std::pair<Term, Term>> opposite_pair() const;

  friend bool operator==(const Series&, const Series&) = default;

private:
  friend std::optional<Series> series_add(const Series& a, const Series& b);
  friend std::optional<Series> apply_subst(const Substitution& s, const Series& x);
  std::vector<Entry> entries_;
};

/// Pointwise sum; nullopt when some coefficient would leave {-1, 0, +1}.
std::optional<Series> series_add(const Series& a, const Series& b);

/// Applies `s` to every term and re-normalises; nullopt on overflow.
std::optional<Series> apply_subst(const Substitution& s, const Series& x);

std::string to_string(const Series& s);

/// One series per port (indexed like the structure's ports).
struct Configuration {
  std::vector<Series> ports;

  bool is_zero() const;
  friend bool operator==(const Configuration&, const Configuration&) = default;
};

std::string to_string(const IndexedStructure& ps, const Configuration& x);

/// An instance of the displacement relation for one cell.
///
/// `witness` is the term the instance is built from: the token's term for
/// ax/cut, `()` for units, and the pair of fresh variables placed on the
/// principal port for tensor/par.
struct Displacement {
  CellIndex cell;
  Term witness;
  std::vector<std::pair<PortIndex, Series>> per_port;
};

/// Rebuilds the instance of `cell` determined by `witness`:
///   ax  <p,q>        : p -> -a, q -> -a
///   cut <p,q>        : p -> +a, q -> +a
///   one/bot p        : p -> -()
///   tensor/par <p1,p2;q> with witness (v1,v2): p1 -> +v1, p2 -> +v2, q -> -(v1,v2)
Displacement displacement_for(const IndexedStructure& ps, CellIndex cell, const Term& witness);

/// Token-driven instances of `cell` in `x`: for ax/cut one per term carried
/// with the consuming sign on one of its ports, for units one if its port
/// holds a `+` token, for tensor/par one (with fresh variables) if a `+`
/// token sits on its principal port or a `-` token on an auxiliary port.
std::vector<Displacement> delta_instances(const IndexedStructure& ps, CellIndex cell, const Configuration& x,
                                          rel::FreshNames& fresh);

/// x' = x + d, or nullopt if some port sum is undefined.
std::optional<Configuration> step_displacement(const Configuration& x, const Displacement& d);

struct Unified {
  Configuration next;
  Substitution subst;
};

struct Stuck {
  std::string reason;
};

/// Unifies the first `+` and first `-` terms at `p` and applies the unifier
/// to every port.
std::variant<Unified, Stuck> step_unification(const Configuration& x, PortIndex p);

/// Conclusions carry `+x_i`, every other port is zero.
/// Throws PreconditionError on arity, web or groundness violations.
Configuration initial_config(const IndexedStructure& ps, std::span<const Term> x);

struct DispEvent {
  CellIndex cell;
  Term witness;
};

struct UnifEvent {
  PortIndex port;
  Substitution subst;
};

using TraceEvent = std::variant<DispEvent, UnifEvent>;

struct RunOptions {
  /// Displacement budget; 0 means twice the number of cells.
  std::size_t max_displacements = 0;
  std::string fresh_prefix = "?_g";
};

struct RunResult {
  bool accepted = false;
  std::vector<TraceEvent> trace;
  Configuration final_config; // all-zero when accepted, the stuck state otherwise
  std::string reason;         // empty when accepted
  std::size_t displacements = 0;
  std::size_t unifications = 0;
};

/// Runs the deterministic normal-execution scheduler.
///
/// The active port with the lowest index whose token can drive its cell
/// fires that cell; every opposite-sign pair left behind is unified before
/// the next displacement (the fired cell's principal ports first, then its
/// auxiliary ports, then any port rewritten by a substitution). Accepts when
/// the configuration becomes zero; rejects on a unification clash, a
/// coefficient overflow, when no token can move, or when the displacement
/// budget is spent.
RunResult normal_run(const IndexedStructure& ps, std::span<const Term> x, const RunOptions& options = {});

inline bool check(const IndexedStructure& ps, std::span<const Term> x) { return normal_run(ps, x).accepted; }

/// Trace lines: `DISP <cell> witness=<term>`, `UNIF <port> {?v=t, ...}`,
/// then `ACCEPT` or `REJECT <reason>`. Every line ends with '\n'.
std::string format_trace(const IndexedStructure& ps, const RunResult& run);
std::string format_event(const IndexedStructure& ps, const TraceEvent& event);

/// Re-applies a trace with the pure transition functions, without any
/// scheduling. Returns the configuration after each event. Throws
/// std::runtime_error if an event does not apply or a recorded unifier
/// differs from the recomputed one.
std::vector<Configuration> replay(const IndexedStructure& ps, const Configuration& initial,
                                  std::span<const TraceEvent> trace);

} // namespace riam::machine
