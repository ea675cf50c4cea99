#include "riam/proof_structure.hpp"

#include <set>
#include <sstream>

#include "cursor.hpp"

namespace riam::mll {

std::string_view to_string(CellKind kind) {
  switch (kind) {
    case CellKind::Ax: return "ax";
    case CellKind::Cut: return "cut";
    case CellKind::Tensor: return "tensor";
    case CellKind::Par: return "par";
    case CellKind::One: return "one";
    case CellKind::Bot: return "bot";
  }
  return "?";
}

std::string to_string(const Violation& v) { return v.subject + ": " + v.message; }

namespace {

std::string join_messages(const std::vector<Violation>& violations) {
  std::string text = "invalid proof-structure";
  for (const auto& v : violations) text += "\n  " + to_string(v);
  return text;
}

struct Arity {
  std::size_t principal, auxiliary;
};

Arity arity_of(CellKind kind) {
  switch (kind) {
    case CellKind::Ax: return {2, 0};
    case CellKind::Cut: return {0, 2};
    case CellKind::Tensor:
    case CellKind::Par: return {1, 2};
    case CellKind::One:
    case CellKind::Bot: return {1, 0};
  }
  return {0, 0};
}

} // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
  : std::runtime_error(join_messages(violations)), violations_(std::move(violations)) {}

std::vector<Violation> validate(const ProofStructure& ps) {
  std::vector<Violation> out;
  std::unordered_map<std::string, const Formula*> types;
  for (const auto& port : ps.ports) {
    if (!types.emplace(port.id, &port.type).second) out.push_back({port.id, "duplicate port declaration"});
  }

  std::unordered_map<std::string, int> principal_uses, auxiliary_uses;
  std::set<std::string> cell_ids;
  for (const auto& cell : ps.cells) {
    if (!cell_ids.insert(cell.id).second) out.push_back({cell.id, "duplicate cell id"});

    Arity arity = arity_of(cell.kind);
    bool shape_ok = cell.principal.size() == arity.principal && cell.auxiliary.size() == arity.auxiliary;
    if (!shape_ok) {
      out.push_back({cell.id, std::string(to_string(cell.kind)) + " cell needs " + std::to_string(arity.principal) +
                                " principal and " + std::to_string(arity.auxiliary) + " auxiliary ports"});
    }
    bool ports_known = true;
    for (const auto* list : {&cell.principal, &cell.auxiliary}) {
      for (const auto& p : *list) {
        if (!types.count(p)) {
          out.push_back({cell.id, "unknown port '" + p + "'"});
          ports_known = false;
        }
      }
    }
    for (const auto& p : cell.principal) ++principal_uses[p];
    for (const auto& p : cell.auxiliary) ++auxiliary_uses[p];
    if (!shape_ok || !ports_known) continue;

    auto tp = [&](const std::string& p) -> const Formula& { return *types.at(p); };
    auto mismatch = [&](const std::string& what, const Formula& expected, const Formula& found) {
      out.push_back({cell.id, what + ": expected " + to_string(expected) + ", found " + to_string(found)});
    };
    switch (cell.kind) {
      case CellKind::Ax: {
        Formula expected = dual(tp(cell.principal[0]));
        if (!(tp(cell.principal[1]) == expected)) mismatch("axiom ports are not dual", expected, tp(cell.principal[1]));
        break;
      }
      case CellKind::Cut: {
        Formula expected = dual(tp(cell.auxiliary[0]));
        if (!(tp(cell.auxiliary[1]) == expected)) mismatch("cut ports are not dual", expected, tp(cell.auxiliary[1]));
        break;
      }
      case CellKind::Tensor:
      case CellKind::Par: {
        const Formula& a = tp(cell.auxiliary[0]);
        const Formula& b = tp(cell.auxiliary[1]);
        const Formula& q = tp(cell.principal[0]);
        bool ok = q.kind() == (cell.kind == CellKind::Tensor ? FormulaKind::Tensor : FormulaKind::Par) &&
                  q.left() == a && q.right() == b;
        if (!ok) {
          mismatch("principal type mismatch", cell.kind == CellKind::Tensor ? Formula::tensor(a, b) : Formula::par(a, b), q);
        }
        break;
      }
      case CellKind::One:
      case CellKind::Bot: {
        const Formula& q = tp(cell.principal[0]);
        Formula expected = cell.kind == CellKind::One ? Formula::one() : Formula::bot();
        if (!(q == expected)) mismatch("principal type mismatch", expected, q);
        break;
      }
    }
  }

  std::set<std::string> computed;
  for (const auto& port : ps.ports) {
    int uses = principal_uses.count(port.id) ? principal_uses.at(port.id) : 0;
    if (uses != 1) {
      out.push_back({port.id, "port is principal of " + std::to_string(uses) + " cells (exactly one required)"});
    }
    int aux = auxiliary_uses.count(port.id) ? auxiliary_uses.at(port.id) : 0;
    if (aux > 1) out.push_back({port.id, "port is auxiliary of " + std::to_string(aux) + " cells (at most one allowed)"});
    if (aux == 0) computed.insert(port.id);
  }

  std::set<std::string> declared;
  for (const auto& c : ps.conclusions) {
    if (!types.count(c)) {
      out.push_back({c, "declared conclusion is not a port"});
    } else if (!declared.insert(c).second) {
      out.push_back({c, "conclusion listed twice"});
    } else if (!computed.count(c)) {
      out.push_back({c, "declared conclusion is auxiliary of some cell"});
    }
  }
  for (const auto& c : computed) {
    if (!declared.count(c)) out.push_back({c, "port is auxiliary of no cell but is not a declared conclusion"});
  }
  return out;
}

namespace {

CellKind parse_kind(detail::Cursor& in) {
  std::string word = in.ident();
  if (word == "ax") return CellKind::Ax;
  if (word == "cut") return CellKind::Cut;
  if (word == "tensor") return CellKind::Tensor;
  if (word == "par") return CellKind::Par;
  if (word == "one") return CellKind::One;
  if (word == "bot") return CellKind::Bot;
  in.fail("unknown cell kind '" + word + "'");
}

std::vector<std::string> parse_name_list(detail::Cursor& in) {
  std::vector<std::string> names;
  if (in.at_end() || in.peek() == ';' || in.peek() == ')') return names;
  names.push_back(in.name());
  while (in.eat(',')) names.push_back(in.name());
  return names;
}

Cell parse_cell(detail::Cursor& in) {
  Cell cell;
  cell.id = in.name();
  in.expect(':');
  cell.kind = parse_kind(in);
  in.expect('(');
  std::vector<std::string> first = parse_name_list(in);
  switch (cell.kind) {
    case CellKind::Ax:
    case CellKind::One:
    case CellKind::Bot: cell.principal = std::move(first); break;
    case CellKind::Cut: cell.auxiliary = std::move(first); break;
    case CellKind::Tensor:
    case CellKind::Par:
      cell.auxiliary = std::move(first);
      in.expect(';');
      cell.principal = parse_name_list(in);
      break;
  }
  in.expect(')');
  in.expect_end();
  return cell;
}

} // namespace

ProofStructure parse_proof_structure(std::string_view text) {
  ProofStructure ps;
  bool have_conclusions = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    detail::Cursor in(line, line_no);
    if (in.at_end()) continue;
    std::string keyword = in.ident();
    if (keyword == "port") {
      std::string id = in.name();
      in.expect(':');
      std::size_t start = in.pos();
      try {
        ps.ports.push_back({std::move(id), parse_formula(line.substr(start))});
      } catch (const ParseError& e) {
        throw ParseError(e.message(), start + e.offset(), line_no);
      }
    } else if (keyword == "cell") {
      ps.cells.push_back(parse_cell(in));
    } else if (keyword == "conclusions") {
      if (have_conclusions) in.fail("conclusions declared twice");
      have_conclusions = true;
      in.expect(':');
      ps.conclusions = parse_name_list(in);
      in.expect_end();
    } else {
      throw ParseError("expected 'port', 'cell' or 'conclusions', found '" + keyword + "'", 0, line_no);
    }
  }
  if (!have_conclusions) throw ParseError("missing 'conclusions:' line", 0, line_no + 1);

  if (auto violations = validate(ps); !violations.empty()) throw ValidationError(std::move(violations));
  return ps;
}

std::string to_string(const ProofStructure& ps) {
  std::ostringstream out;
  auto list = [&](const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) out << (i ? ", " : "") << names[i];
  };
  for (const auto& port : ps.ports) out << "port " << port.id << " : " << port.type << '\n';
  for (const auto& cell : ps.cells) {
    out << "cell " << cell.id << " : " << to_string(cell.kind) << '(';
    switch (cell.kind) {
      case CellKind::Ax:
      case CellKind::One:
      case CellKind::Bot: list(cell.principal); break;
      case CellKind::Cut: list(cell.auxiliary); break;
      case CellKind::Tensor:
      case CellKind::Par:
        list(cell.auxiliary);
        out << " ; ";
        list(cell.principal);
        break;
    }
    out << ")\n";
  }
  out << "conclusions: ";
  list(ps.conclusions);
  out << '\n';
  return out.str();
}

IndexedStructure::IndexedStructure(ProofStructure ps) : source_(std::move(ps)) {
  if (auto violations = validate(source_); !violations.empty()) throw ValidationError(std::move(violations));

  for (PortIndex p = 0; p < source_.ports.size(); ++p) port_by_id_.emplace(source_.ports[p].id, p);
  principal_owner_.assign(source_.ports.size(), 0);
  auxiliary_owner_.assign(source_.ports.size(), std::nullopt);

  cells_.reserve(source_.cells.size());
  for (CellIndex c = 0; c < source_.cells.size(); ++c) {
    const Cell& cell = source_.cells[c];
    IndexedCell indexed{cell.id, cell.kind, {}, {}};
    for (const auto& p : cell.principal) {
      PortIndex ix = port_by_id_.at(p);
      indexed.principal.push_back(ix);
      principal_owner_[ix] = c;
    }
    for (const auto& p : cell.auxiliary) {
      PortIndex ix = port_by_id_.at(p);
      indexed.auxiliary.push_back(ix);
      auxiliary_owner_[ix] = c;
    }
    cell_by_id_.emplace(cell.id, c);
    cells_.push_back(std::move(indexed));
  }
  for (const auto& c : source_.conclusions) conclusions_.push_back(port_by_id_.at(c));
}

std::optional<PortIndex> IndexedStructure::find_port(std::string_view id) const {
  if (auto it = port_by_id_.find(std::string(id)); it != port_by_id_.end()) return it->second;
  return std::nullopt;
}

std::optional<CellIndex> IndexedStructure::find_cell(std::string_view id) const {
  if (auto it = cell_by_id_.find(std::string(id)); it != cell_by_id_.end()) return it->second;
  return std::nullopt;
}

} // namespace riam::mll
