#include "riam/experiment.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <set>
#include <stdexcept>

#include "riam/error.hpp"

namespace riam::rel {

using mll::CellKind;
using mll::IndexedStructure;
using mll::PortIndex;

bool verify_experiment(const IndexedStructure& ps, const Experiment& e) {
  if (e.values.size() != ps.port_count()) return false;
  for (PortIndex p = 0; p < ps.port_count(); ++p) {
    if (!e.values[p].is_ground() || !web_member(e.values[p], ps.port_type(p), false)) return false;
  }
  for (const auto& cell : ps.cells()) {
    const auto& v = e.values;
    switch (cell.kind) {
      case CellKind::Ax:
        if (!(v[cell.principal[0]] == v[cell.principal[1]])) return false;
        break;
      case CellKind::Cut:
        if (!(v[cell.auxiliary[0]] == v[cell.auxiliary[1]])) return false;
        break;
      case CellKind::One:
      case CellKind::Bot:
        if (v[cell.principal[0]].kind() != TermKind::Unit) return false;
        break;
      case CellKind::Tensor:
      case CellKind::Par: {
        const Term& q = v[cell.principal[0]];
        if (q.kind() != TermKind::Pair || !(q.fst() == v[cell.auxiliary[0]]) || !(q.snd() == v[cell.auxiliary[1]]))
          return false;
        break;
      }
    }
  }
  return true;
}

std::vector<Term> result(const IndexedStructure& ps, const Experiment& e) {
  std::vector<Term> out;
  for (PortIndex p : ps.conclusions()) out.push_back(e.values.at(p));
  return out;
}

void require_conclusion_point(const IndexedStructure& ps, std::span<const Term> x) {
  auto conclusions = ps.conclusions();
  if (x.size() != conclusions.size()) {
    throw PreconditionError("point has " + std::to_string(x.size()) + " components but the structure has " +
                            std::to_string(conclusions.size()) + " conclusions");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::string& id = ps.port_id(conclusions[i]);
    if (!x[i].is_ground()) throw PreconditionError("point component for '" + id + "' contains a variable");
    if (!web_member(x[i], ps.port_type(conclusions[i]), false)) {
      throw PreconditionError("point component " + to_string(x[i]) + " is not in the web of '" + id +
                              "' : " + mll::to_string(ps.port_type(conclusions[i])));
    }
  }
}

namespace {

// Value of a port with a hole ("slot") at each atomic leaf of an axiom.
struct Shape {
  enum class Kind { Slot, Unit, Pair } kind;
  std::size_t slot = 0;
  std::shared_ptr<const Shape> left, right;
};
using ShapePtr = std::shared_ptr<const Shape>;

class Search {
public:
  Search(const IndexedStructure& ps, std::span<const Term> x) : ps_(ps), x_(x) {}

  std::optional<Experiment> run() {
    shapes_.assign(ps_.port_count(), nullptr);
    for (PortIndex p = 0; p < ps_.port_count(); ++p) shape_of(p);

    fixed_.assign(slot_count_, std::nullopt);
    equal_.assign(slot_count_, {});
    for (const auto& cell : ps_.cells()) {
      if (cell.kind == CellKind::Cut) link(*shapes_[cell.auxiliary[0]], *shapes_[cell.auxiliary[1]]);
    }
    auto conclusions = ps_.conclusions();
    for (std::size_t i = 0; i < x_.size(); ++i) {
      if (!pin(*shapes_[conclusions[i]], x_[i])) return std::nullopt;
    }

    std::set<std::string> atoms;
    for (const Term& t : x_) {
      std::vector<std::string> found;
      collect_atoms(t, found);
      atoms.insert(found.begin(), found.end());
    }
    known_atoms_.assign(atoms.begin(), atoms.end());
    for (std::size_t i = 0, k = 0; i < slot_count_; ++k) {
      std::string name = "h" + std::to_string(k);
      if (atoms.count(name)) continue;
      fresh_atoms_.push_back(std::move(name));
      ++i;
    }

    // Pinned slots first so that conflicting conclusions fail immediately.
    for (std::size_t s = 0; s < slot_count_; ++s) if (fixed_[s]) order_.push_back(s);
    for (std::size_t s = 0; s < slot_count_; ++s) if (!fixed_[s]) order_.push_back(s);
    value_.assign(slot_count_, std::nullopt);

    if (!assign(0, 0)) return std::nullopt;

    Experiment e;
    for (PortIndex p = 0; p < ps_.port_count(); ++p) e.values.push_back(instantiate(*shapes_[p]));
    if (!verify_experiment(ps_, e) || result(ps_, e) != std::vector<Term>(x_.begin(), x_.end())) {
      throw std::logic_error("oracle produced an inconsistent experiment");
    }
    return e;
  }

private:
  ShapePtr leaves_of(const mll::Formula& a) {
    if (a.is_literal()) return std::make_shared<const Shape>(Shape{Shape::Kind::Slot, slot_count_++, nullptr, nullptr});
    if (!a.is_binary()) return std::make_shared<const Shape>(Shape{Shape::Kind::Unit, 0, nullptr, nullptr});
    ShapePtr l = leaves_of(a.left());
    ShapePtr r = leaves_of(a.right());
    return std::make_shared<const Shape>(Shape{Shape::Kind::Pair, 0, std::move(l), std::move(r)});
  }

  // Values flow downward from axioms and units; typing rules out cycles here.
  const ShapePtr& shape_of(PortIndex p) {
    if (shapes_[p]) return shapes_[p];
    const auto& cell = ps_.cell(ps_.principal_owner(p));
    switch (cell.kind) {
      case CellKind::Ax: {
        ShapePtr s = leaves_of(ps_.port_type(cell.principal[0]));
        shapes_[cell.principal[0]] = s;
        shapes_[cell.principal[1]] = s;
        break;
      }
      case CellKind::One:
      case CellKind::Bot:
        shapes_[p] = std::make_shared<const Shape>(Shape{Shape::Kind::Unit, 0, nullptr, nullptr});
        break;
      case CellKind::Tensor:
      case CellKind::Par: {
        ShapePtr l = shape_of(cell.auxiliary[0]);
        ShapePtr r = shape_of(cell.auxiliary[1]);
        shapes_[p] = std::make_shared<const Shape>(Shape{Shape::Kind::Pair, 0, std::move(l), std::move(r)});
        break;
      }
      case CellKind::Cut: break; // has no principal port
    }
    return shapes_[p];
  }

  void link(const Shape& a, const Shape& b) {
    if (a.kind == Shape::Kind::Slot && b.kind == Shape::Kind::Slot) {
      equal_[a.slot].push_back(b.slot);
      equal_[b.slot].push_back(a.slot);
    } else if (a.kind == Shape::Kind::Pair && b.kind == Shape::Kind::Pair) {
      link(*a.left, *b.left);
      link(*a.right, *b.right);
    }
  }

  bool pin(const Shape& s, const Term& t) {
    switch (s.kind) {
      case Shape::Kind::Slot:
        if (fixed_[s.slot] && *fixed_[s.slot] != t.name()) return false;
        fixed_[s.slot] = t.name();
        return true;
      case Shape::Kind::Unit: return t.kind() == TermKind::Unit;
      case Shape::Kind::Pair: return pin(*s.left, t.fst()) && pin(*s.right, t.snd());
    }
    return false;
  }

  bool consistent(std::size_t slot, const std::string& atom) const {
    for (std::size_t other : equal_[slot]) {
      if (value_[other] && *value_[other] != atom) return false;
    }
    return true;
  }

  bool assign(std::size_t depth, std::size_t fresh_used) {
    if (depth == order_.size()) return true;
    std::size_t slot = order_[depth];
    auto attempt = [&](const std::string& atom, std::size_t used) {
      if (!consistent(slot, atom)) return false;
      value_[slot] = atom;
      if (assign(depth + 1, used)) return true;
      value_[slot].reset();
      return false;
    };
    if (fixed_[slot]) return attempt(*fixed_[slot], fresh_used);
    for (const auto& atom : known_atoms_) {
      if (attempt(atom, fresh_used)) return true;
    }
    for (std::size_t k = 0; k < fresh_used; ++k) {
      if (attempt(fresh_atoms_[k], fresh_used)) return true;
    }
    return fresh_used < fresh_atoms_.size() && attempt(fresh_atoms_[fresh_used], fresh_used + 1);
  }

  Term instantiate(const Shape& s) const {
    switch (s.kind) {
      case Shape::Kind::Slot: return Term::atom(*value_[s.slot]);
      case Shape::Kind::Unit: return Term::unit();
      case Shape::Kind::Pair: return Term::pair(instantiate(*s.left), instantiate(*s.right));
    }
    return Term::unit();
  }

  const IndexedStructure& ps_;
  std::span<const Term> x_;
  std::vector<ShapePtr> shapes_;
  std::size_t slot_count_ = 0;
  std::vector<std::optional<std::string>> fixed_;
  std::vector<std::vector<std::size_t>> equal_;
  std::vector<std::string> known_atoms_, fresh_atoms_;
  std::vector<std::size_t> order_;
  std::vector<std::optional<std::string>> value_;
};

} // namespace

std::optional<Experiment> find_experiment(const IndexedStructure& ps, std::span<const Term> x) {
  require_conclusion_point(ps, x);
  return Search(ps, x).run();
}

} // namespace riam::rel
