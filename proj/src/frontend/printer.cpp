#include <array>
#include <charconv>
#include <sstream>

#include "tagdl/frontend/ast.hpp"

namespace tagdl::ast {

namespace {

std::string int_text(__int128 v) {
  const bool neg = v < 0;
  unsigned __int128 m = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  std::string digits;
  do {
    digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(m % 10)));
    m /= 10;
  } while (m != 0);
  return neg ? "-" + digits : digits;
}

std::string float_text(double d) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), d);
  std::string s(buf.data(), res.ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string literal_text(const Literal& l) {
  switch (l.kind) {
    case Literal::Kind::Int: return int_text(l.int_value);
    case Literal::Kind::Float: return float_text(l.float_value);
    case Literal::Kind::String: return to_string(Value::string(l.string_value));
    case Literal::Kind::Char: return to_string(Value::character(l.char_value));
    case Literal::Kind::Bool: return l.bool_value ? "true" : "false";
  }
  return {};
}

std::string join(const std::vector<std::string>& parts, std::string_view sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string args_text(const std::vector<ExprPtr>& args) {
  std::vector<std::string> parts;
  for (const auto& a : args) parts.push_back(to_source(*a));
  return join(parts);
}

std::string atom_text(const Atom& a) { return a.predicate + "(" + args_text(a.args) + ")"; }

std::string tag_text(const std::optional<double>& p) { return p ? float_text(*p) + "::" : ""; }

std::string aggregator_text(const Reduce& r) {
  if (r.op == Reduce::Op::Sample) return to_string(r.sampler);
  std::string s(ram::name(r.aggregator));
  if (r.aggregator == ram::AggregatorKind::Argmin || r.aggregator == ram::AggregatorKind::Argmax) {
    s += "<" + join(r.arg_vars) + ">";
  }
  return s;
}

}  // namespace

std::string to_source(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Var: return e.name;
    case Expr::Kind::Wildcard: return "_";
    case Expr::Kind::Const: return literal_text(e.literal);
    case Expr::Kind::Binary:
      return "(" + to_source(*e.args[0]) + " " + std::string(symbol(e.binary)) + " " + to_source(*e.args[1]) + ")";
    case Expr::Kind::Unary: return "(" + std::string(symbol(e.unary)) + to_source(*e.args[0]) + ")";
    case Expr::Kind::Cast: return "(" + to_source(*e.args[0]) + " as " + std::string(type_name(e.cast_to)) + ")";
    case Expr::Kind::Call: return "$" + e.name + "(" + args_text(e.args) + ")";
    case Expr::Kind::If:
      return "(if " + to_source(*e.args[0]) + " then " + to_source(*e.args[1]) + " else " + to_source(*e.args[2]) +
             ")";
  }
  return {};
}

std::string to_source(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Atom: return atom_text(f.atom);
    case Formula::Kind::Not: return "not " + to_source(*f.children[0]);
    case Formula::Kind::And: return "(" + to_source(*f.children[0]) + " and " + to_source(*f.children[1]) + ")";
    case Formula::Kind::Or: return "(" + to_source(*f.children[0]) + " or " + to_source(*f.children[1]) + ")";
    case Formula::Kind::Implies:
      return "(" + to_source(*f.children[0]) + " implies " + to_source(*f.children[1]) + ")";
    case Formula::Kind::Constraint: return to_source(*f.constraint);
    case Formula::Kind::Reduce: {
      const Reduce& r = *f.reduce;
      std::string s = "(" + join(r.results) + ") := " + aggregator_text(r) + "(";
      s += join(r.bindings) + ": " + to_source(*r.body);
      if (r.group_vars) s += " where " + join(*r.group_vars) + ": " + to_source(*r.group_body);
      return s + ")";
    }
  }
  return {};
}

std::string to_source(const Program& p) {
  std::ostringstream os;
  for (const auto& item : p.items) {
    for (const auto& a : item.attributes) os << "@" << a.name << "(" << join(a.args) << ")\n";
    std::visit(
        [&](const auto& def) {
          using T = std::decay_t<decltype(def)>;
          if constexpr (std::is_same_v<T, ImportDef>) {
            os << "import " << to_string(Value::string(def.path));
          } else if constexpr (std::is_same_v<T, TypeDef>) {
            os << "type ";
            if (const auto* alias = std::get_if<TypeAlias>(&def.body)) {
              os << alias->name << (alias->subtype ? " <: " : " = ") << alias->target;
            } else {
              std::vector<std::string> decls;
              for (const auto& d : std::get<std::vector<RelationTypeDecl>>(def.body)) {
                std::vector<std::string> cols;
                for (const auto& [name, type] : d.columns) cols.push_back(name.empty() ? type : name + ": " + type);
                decls.push_back(d.name + "(" + join(cols) + ")");
              }
              os << join(decls);
            }
          } else if constexpr (std::is_same_v<T, ConstDef>) {
            std::vector<std::string> decls;
            for (const auto& d : def.decls) {
              decls.push_back(d.name + (d.type ? ": " + *d.type : "") + " = " + to_source(*d.value));
            }
            os << "const " << join(decls);
          } else if constexpr (std::is_same_v<T, FactSet>) {
            std::vector<std::string> groups;
            for (const auto& g : def.groups) {
              std::vector<std::string> members;
              for (const auto& t : g) members.push_back(tag_text(t.prob) + "(" + args_text(t.values) + ")");
              groups.push_back(join(members, "; "));
            }
            os << "rel " << def.relation << " = {" << join(groups) << "}";
          } else if constexpr (std::is_same_v<T, FactList>) {
            std::vector<std::string> atoms;
            for (const auto& a : def.atoms) atoms.push_back(atom_text(a));
            os << "rel " << tag_text(def.prob) << join(atoms);
          } else if constexpr (std::is_same_v<T, RuleDef>) {
            os << "rel " << tag_text(def.prob) << atom_text(def.head) << (def.horn_arrow ? " :- " : " = ")
               << to_source(*def.body);
          } else if constexpr (std::is_same_v<T, QueryDef>) {
            os << "query " << join(def.relations);
          }
        },
        item.def);
    os << "\n";
  }
  return os.str();
}

}  // namespace tagdl::ast
