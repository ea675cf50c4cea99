#include "riam/machine.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "riam/error.hpp"
#include "riam/experiment.hpp"

namespace riam::machine {

using mll::CellKind;

Series Series::single(Term t, int coefficient) {
  Series s;
  if (coefficient != 0) s.entries_.push_back({std::move(t), coefficient});
  return s;
}

int Series::coefficient(const Term& t) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), t,
                             [](const Entry& e, const Term& key) { return e.term < key; });
  return it != entries_.end() && it->term == t ? it->coefficient : 0;
}

std::optional<std::pair<Term, Term>> Series::opposite_pair() const {
  const Entry* plus = nullptr;
  const Entry* minus = nullptr;
  for (const auto& e : entries_) {
    if (e.coefficient > 0 && !plus) plus = &e;
    if (e.coefficient < 0 && !minus) minus = &e;
  }
  if (!plus || !minus) return std::nullopt;
  return std::pair{plus->term, minus->term};
}

std::optional<Series> series_add(const Series& a, const Series& b) {
  Series out;
  auto i = a.entries_.begin();
  auto j = b.entries_.begin();
  while (i != a.entries_.end() || j != b.entries_.end()) {
    if (j == b.entries_.end() || (i != a.entries_.end() && i->term < j->term)) {
      out.entries_.push_back(*i++);
    } else if (i == a.entries_.end() || j->term < i->term) {
      out.entries_.push_back(*j++);
    } else {
      int c = i->coefficient + j->coefficient;
      if (c < -1 || c > 1) return std::nullopt;
      if (c != 0) out.entries_.push_back({i->term, c});
      ++i;
      ++j;
    }
  }
  return out;
}

std::optional<Series> apply_subst(const Substitution& s, const Series& x) {
  std::vector<Series::Entry> mapped;
  mapped.reserve(x.entries_.size());
  for (const auto& e : x.entries_) mapped.push_back({rel::apply_subst(s, e.term), e.coefficient});
  std::sort(mapped.begin(), mapped.end(), [](const auto& a, const auto& b) { return a.term < b.term; });
  Series out;
  for (std::size_t i = 0; i < mapped.size();) {
    std::size_t j = i;
    int c = 0;
    while (j < mapped.size() && mapped[j].term == mapped[i].term) c += mapped[j++].coefficient;
    if (c < -1 || c > 1) return std::nullopt;
    if (c != 0) out.entries_.push_back({mapped[i].term, c});
    i = j;
  }
  return out;
}

std::string to_string(const Series& s) {
  if (s.is_zero()) return "0";
  std::string out;
  for (const auto& e : s.entries()) {
    if (!out.empty()) out += ' ';
    out += (e.coefficient > 0 ? '+' : '-') + rel::to_string(e.term);
  }
  return out;
}

bool Configuration::is_zero() const {
  return std::all_of(ports.begin(), ports.end(), [](const Series& s) { return s.is_zero(); });
}

std::string to_string(const IndexedStructure& ps, const Configuration& x) {
  std::string out = "{";
  for (PortIndex p = 0; p < x.ports.size(); ++p) {
    if (x.ports[p].is_zero()) continue;
    if (out.size() > 1) out += ", ";
    out += ps.port_id(p) + ": " + to_string(x.ports[p]);
  }
  return out + "}";
}

Displacement displacement_for(const IndexedStructure& ps, CellIndex cell, const Term& witness) {
  const auto& c = ps.cell(cell);
  Displacement d{cell, witness, {}};
  switch (c.kind) {
    case CellKind::Ax:
      for (PortIndex p : c.principal) d.per_port.emplace_back(p, Series::single(witness, -1));
      break;
    case CellKind::Cut:
      for (PortIndex p : c.auxiliary) d.per_port.emplace_back(p, Series::single(witness, +1));
      break;
    case CellKind::One:
    case CellKind::Bot:
      d.witness = Term::unit();
      d.per_port.emplace_back(c.principal[0], Series::single(Term::unit(), -1));
      break;
    case CellKind::Tensor:
    case CellKind::Par:
      if (witness.kind() != rel::TermKind::Pair || !witness.fst().is_var() || !witness.snd().is_var()) {
        throw std::invalid_argument("tensor/par witness must be a pair of variables, got " + rel::to_string(witness));
      }
      d.per_port.emplace_back(c.auxiliary[0], Series::single(witness.fst(), +1));
      d.per_port.emplace_back(c.auxiliary[1], Series::single(witness.snd(), +1));
      d.per_port.emplace_back(c.principal[0], Series::single(witness, -1));
      break;
  }
  return d;
}

namespace {

Term fresh_pair(rel::FreshNames& fresh) {
  Term a = fresh.next();
  Term b = fresh.next();
  return Term::pair(std::move(a), std::move(b));
}

} // namespace

std::vector<Displacement> delta_instances(const IndexedStructure& ps, CellIndex cell, const Configuration& x,
                                          rel::FreshNames& fresh) {
  const auto& c = ps.cell(cell);
  std::vector<Displacement> out;
  auto carried = [&](std::span<const PortIndex> ports, int sign) {
    std::vector<Term> terms;
    for (PortIndex p : ports) {
      for (const auto& e : x.ports[p].entries()) {
        if (e.coefficient == sign && std::find(terms.begin(), terms.end(), e.term) == terms.end()) terms.push_back(e.term);
      }
    }
    return terms;
  };
  switch (c.kind) {
    case CellKind::Ax:
      for (const Term& t : carried(c.principal, +1)) out.push_back(displacement_for(ps, cell, t));
      break;
    case CellKind::Cut:
      for (const Term& t : carried(c.auxiliary, -1)) out.push_back(displacement_for(ps, cell, t));
      break;
    case CellKind::One:
    case CellKind::Bot:
      if (!carried(c.principal, +1).empty()) out.push_back(displacement_for(ps, cell, Term::unit()));
      break;
    case CellKind::Tensor:
    case CellKind::Par:
      if (!carried(c.principal, +1).empty() || !carried(c.auxiliary, -1).empty()) {
        out.push_back(displacement_for(ps, cell, fresh_pair(fresh)));
      }
      break;
  }
  return out;
}

std::optional<Configuration> step_displacement(const Configuration& x, const Displacement& d) {
  Configuration next = x;
  for (const auto& [p, s] : d.per_port) {
    auto sum = series_add(next.ports[p], s);
    if (!sum) return std::nullopt;
    next.ports[p] = std::move(*sum);
  }
  return next;
}

std::variant<Unified, Stuck> step_unification(const Configuration& x, PortIndex p) {
  auto pair = x.ports.at(p).opposite_pair();
  if (!pair) return Stuck{"no opposite-sign pair"};
  auto unifier = rel::unify(pair->first, pair->second);
  if (auto* clash = std::get_if<rel::Clash>(&unifier)) {
    return Stuck{"+" + rel::to_string(pair->first) + " vs -" + rel::to_string(pair->second) + " (" +
                 rel::to_string(*clash) + ")"};
  }
  auto& subst = std::get<Substitution>(unifier);
  Configuration next;
  next.ports.reserve(x.ports.size());
  for (const auto& s : x.ports) {
    auto mapped = apply_subst(subst, s);
    if (!mapped) return Stuck{"coefficient overflow"};
    next.ports.push_back(std::move(*mapped));
  }
  return Unified{std::move(next), std::move(subst)};
}

Configuration initial_config(const IndexedStructure& ps, std::span<const Term> x) {
  rel::require_conclusion_point(ps, x);
  Configuration config;
  config.ports.resize(ps.port_count());
  auto conclusions = ps.conclusions();
  for (std::size_t i = 0; i < x.size(); ++i) config.ports[conclusions[i]] = Series::single(x[i], +1);
  return config;
}

namespace {

// A set of port indices with insert, erase and minimum in O(log64 n).
class PortQueue {
public:
  explicit PortQueue(std::size_t n) {
    std::size_t size = std::max<std::size_t>(n, 1);
    do {
      size = (size + 63) / 64;
      levels_.emplace_back(size, 0);
    } while (size > 1);
  }

  bool empty() const { return levels_.back()[0] == 0; }

  void insert(std::size_t i) {
    for (auto& level : levels_) {
      bool had_bits = level[i / 64] != 0;
      level[i / 64] |= std::uint64_t{1} << (i % 64);
      if (had_bits) return;
      i /= 64;
    }
  }

  void erase(std::size_t i) {
    for (auto& level : levels_) {
      level[i / 64] &= ~(std::uint64_t{1} << (i % 64));
      if (level[i / 64] != 0) return;
      i /= 64;
    }
  }

  std::size_t min() const {
    std::size_t i = 0;
    for (auto level = levels_.rbegin(); level != levels_.rend(); ++level)
      i = i * 64 + static_cast<std::size_t>(std::countr_zero((*level)[i]));
    return i;
  }

private:
  std::vector<std::vector<std::uint64_t>> levels_;
};

// Scheduler state. Keeps an index from variables to the ports mentioning
// them so a unifier only rewrites the ports it can change.
class Runner {
public:
  Runner(const IndexedStructure& ps, const RunOptions& options)
    : ps_(ps), fresh_(options.fresh_prefix),
      budget_(options.max_displacements ? options.max_displacements : 2 * ps.cell_count()),
      active_(ps.port_count()) {
    x_.ports.resize(ps.port_count());
    blocked_.assign(ps.port_count(), false);
    occurrences_.reserve(2 * ps.cell_count());
    result_.trace.reserve(2 * ps.cell_count());
  }

  RunResult run(std::span<const Term> point) {
    Configuration start = initial_config(ps_, point);
    for (PortIndex p = 0; p < start.ports.size(); ++p) {
      if (!start.ports[p].is_zero()) set_port(p, std::move(start.ports[p]));
    }
    while (nonzero_ > 0) {
      if (active_.empty()) return reject("stuck: no token can move");
      PortIndex p = active_.min();
      std::optional<CellIndex> fired;
      std::vector<Series::Entry> tokens = x_.ports[p].entries();
      for (const auto& token : tokens) {
        std::optional<CellIndex> target =
          token.coefficient > 0 ? std::optional<CellIndex>(ps_.principal_owner(p)) : ps_.auxiliary_owner(p);
        if (!target) continue;
        Displacement d = instance(*target, token.term);
        auto update = prepare(d);
        if (!update) continue;
        if (result_.displacements >= budget_) return reject("bound exceeded");
        for (auto& [q, s] : *update) set_port(q, std::move(s));
        result_.trace.push_back(DispEvent{d.cell, d.witness});
        ++result_.displacements;
        fired = target;
        break;
      }
      if (!fired) {
        active_.erase(p);
        blocked_[p] = true;
        continue;
      }
      if (auto failure = settle(*fired)) return reject(*failure);
    }
    result_.accepted = true;
    result_.final_config = std::move(x_);
    return std::move(result_);
  }

private:
  Displacement instance(CellIndex cell, const Term& token) {
    switch (ps_.cell(cell).kind) {
      case CellKind::Tensor:
      case CellKind::Par: return displacement_for(ps_, cell, fresh_pair(fresh_));
      default: return displacement_for(ps_, cell, token);
    }
  }

  std::optional<std::vector<std::pair<PortIndex, Series>>> prepare(const Displacement& d) const {
    std::vector<std::pair<PortIndex, Series>> update;
    for (const auto& [p, s] : d.per_port) {
      auto sum = series_add(x_.ports[p], s);
      if (!sum) return std::nullopt;
      update.emplace_back(p, std::move(*sum));
    }
    return update;
  }

  // Unifies every opposite-sign pair created by firing `cell`.
  std::optional<std::string> settle(CellIndex cell) {
    const auto& c = ps_.cell(cell);
    std::vector<PortIndex> pending(c.principal.begin(), c.principal.end());
    pending.insert(pending.end(), c.auxiliary.begin(), c.auxiliary.end());
    for (std::size_t i = 0; i < pending.size();) {
      PortIndex p = pending[i];
      auto pair = x_.ports[p].opposite_pair();
      if (!pair) {
        ++i;
        continue;
      }
      auto unifier = rel::unify(pair->first, pair->second);
      if (auto* clash = std::get_if<rel::Clash>(&unifier)) {
        return "clash at port " + ps_.port_id(p) + ": +" + rel::to_string(pair->first) + " vs -" +
               rel::to_string(pair->second) + " (" + rel::to_string(*clash) + ")";
      }
      auto& subst = std::get<Substitution>(unifier);
      std::set<PortIndex> touched;
      for (const auto& [v, image] : subst) {
        if (auto it = occurrences_.find(v); it != occurrences_.end()) touched.insert(it->second.begin(), it->second.end());
      }
      for (PortIndex q : touched) {
        auto mapped = apply_subst(subst, x_.ports[q]);
        if (!mapped) return "coefficient overflow at port " + ps_.port_id(q);
        set_port(q, std::move(*mapped));
      }
      result_.trace.push_back(UnifEvent{p, std::move(subst)});
      ++result_.unifications;
      pending.insert(pending.end(), touched.begin(), touched.end());
    }
    return std::nullopt;
  }

  void set_port(PortIndex p, Series s) {
    Series& slot = x_.ports[p];
    for (const auto& v : vars_of(slot)) {
      auto it = occurrences_.find(v);
      auto& ports = it->second;
      std::erase(ports, p);
      if (ports.empty()) occurrences_.erase(it);
    }
    if (slot.is_zero() && !s.is_zero()) ++nonzero_;
    if (!slot.is_zero() && s.is_zero()) --nonzero_;
    slot = std::move(s);
    for (const auto& v : vars_of(slot)) occurrences_[v].push_back(p);

    blocked_[p] = false;
    if (slot.is_zero()) {
      active_.erase(p);
    } else {
      active_.insert(p);
    }
    wake(ps_.principal_owner(p));
    if (auto aux = ps_.auxiliary_owner(p)) wake(*aux);
  }

  // A port change may make a waiting token on a neighbouring port firable.
  void wake(CellIndex cell) {
    const auto& c = ps_.cell(cell);
    for (const auto* list : {&c.principal, &c.auxiliary}) {
      for (PortIndex q : *list) {
        if (blocked_[q]) {
          blocked_[q] = false;
          active_.insert(q);
        }
      }
    }
  }

  // Distinct variables of `s`.
  static std::vector<std::string> vars_of(const Series& s) {
    std::vector<std::string> vars;
    for (const auto& e : s.entries())
      if (!e.term.is_ground()) rel::collect_vars(e.term, vars);
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    return vars;
  }

  RunResult reject(std::string reason) {
    result_.accepted = false;
    result_.reason = std::move(reason);
    result_.final_config = std::move(x_);
    return std::move(result_);
  }

  const IndexedStructure& ps_;
  rel::FreshNames fresh_;
  std::size_t budget_;
  Configuration x_;
  std::size_t nonzero_ = 0;
  PortQueue active_;
  std::vector<bool> blocked_;
  std::unordered_map<std::string, std::vector<PortIndex>> occurrences_;
  RunResult result_;
};

} // namespace

RunResult normal_run(const IndexedStructure& ps, std::span<const Term> x, const RunOptions& options) {
  return Runner(ps, options).run(x);
}

std::string format_event(const IndexedStructure& ps, const TraceEvent& event) {
  if (const auto* d = std::get_if<DispEvent>(&event)) {
    return "DISP " + ps.cell(d->cell).id + " witness=" + rel::to_string(d->witness);
  }
  const auto& u = std::get<UnifEvent>(event);
  return "UNIF " + ps.port_id(u.port) + " " + rel::to_string(u.subst);
}

std::string format_trace(const IndexedStructure& ps, const RunResult& run) {
  std::string out;
  for (const auto& event : run.trace) out += format_event(ps, event) + '\n';
  out += run.accepted ? "ACCEPT\n" : "REJECT " + run.reason + '\n';
  return out;
}

std::vector<Configuration> replay(const IndexedStructure& ps, const Configuration& initial,
                                  std::span<const TraceEvent> trace) {
  std::vector<Configuration> states;
  Configuration x = initial;
  for (const auto& event : trace) {
    if (const auto* d = std::get_if<DispEvent>(&event)) {
      auto next = step_displacement(x, displacement_for(ps, d->cell, d->witness));
      if (!next) throw std::runtime_error("replay: displacement not applicable: " + format_event(ps, event));
      x = std::move(*next);
    } else {
      const auto& u = std::get<UnifEvent>(event);
      auto outcome = step_unification(x, u.port);
      if (auto* stuck = std::get_if<Stuck>(&outcome)) {
        throw std::runtime_error("replay: unification stuck at " + ps.port_id(u.port) + ": " + stuck->reason);
      }
      auto& unified = std::get<Unified>(outcome);
      if (unified.subst != u.subst) throw std::runtime_error("replay: unifier differs at " + format_event(ps, event));
      x = std::move(unified.next);
    }
    states.push_back(x);
  }
  return states;
}

} // namespace riam::machine
