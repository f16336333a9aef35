#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dpncheck/guard.hpp"
#include "dpncheck/model_io.hpp"

namespace dpncheck {

namespace {

namespace pt = boost::property_tree;

std::string attr(const pt::ptree& node, const std::string& name,
                 const std::string& fallback = "") {
  return node.get<std::string>("<xmlattr>." + name, fallback);
}

// Case-normalized sort spelling; accepts the Java class names ProM-style
// files carry, XML schema names, and our canonical short names.
std::optional<Sort> sort_from_pnml_type(std::string type) {
  auto pos = type.rfind('.');
  if (pos != std::string::npos) type = type.substr(pos + 1);
  pos = type.rfind(':');
  if (pos != std::string::npos) type = type.substr(pos + 1);
  for (char& c : type) c = static_cast<char>(std::tolower(c));
  if (type == "long" || type == "int" || type == "integer" ||
      type == "short" || type == "bigint")
    return Sort::Int;
  if (type == "double" || type == "float" || type == "decimal" ||
      type == "rat" || type == "rational")
    return Sort::Rat;
  if (type == "boolean" || type == "bool") return Sort::Bool;
  if (type == "string") return Sort::String;
  return std::nullopt;
}

const char* pnml_type_name(Sort s) {
  switch (s) {
    case Sort::Bool:
      return "boolean";
    case Sort::Int:
      return "long";
    case Sort::Rat:
      return "double";
    case Sort::String:
      return "string";
  }
  return "string";
}

Value parse_typed_value(const std::string& text, Sort sort,
                        StringPool& pool) {
  switch (sort) {
    case Sort::Bool:
      if (text == "true") return Value::boolean(true);
      if (text == "false") return Value::boolean(false);
      throw std::invalid_argument("expected true or false, got '" + text +
                                  "'");
    case Sort::Int:
      return Value::integer(parse_int(text));
    case Sort::Rat: {
      auto slash = text.find('/');
      if (slash != std::string::npos)
        return Value::rational(Rat(parse_int(text.substr(0, slash)),
                                   parse_int(text.substr(slash + 1))));
      return Value::rational(decimal_to_rational(text));
    }
    case Sort::String:
      return Value::string(pool.intern(text));
  }
  throw std::invalid_argument("unhandled sort");
}

uint32_t parse_count(const std::string& text, const std::string& where,
                     std::vector<std::string>& errors) {
  try {
    size_t used = 0;
    long v = std::stol(text, &used);
    if (used != text.size() || v < 0) throw std::invalid_argument(text);
    return static_cast<uint32_t>(v);
  } catch (const std::exception&) {
    errors.push_back(where + ": '" + text + "' is not a token count");
    return 0;
  }
}

struct RawTransition {
  std::string id;
  std::string label;
  std::string guard_text;
  std::set<std::string> listed_reads, listed_writes;
};

struct RawNet {
  std::vector<std::pair<std::string, uint32_t>> places; // id, initial tokens
  std::vector<RawTransition> transitions;
  std::vector<std::tuple<std::string, std::string, uint32_t>> arcs;
};

// Places, transitions and arcs may sit directly under <net> or inside
// arbitrarily nested <page> elements.
void collect_nodes(const pt::ptree& node, RawNet& raw,
                   std::vector<std::string>& errors) {
  for (const auto& [tag, child] : node) {
    if (tag == "page") {
      collect_nodes(child, raw, errors);
    } else if (tag == "place") {
      std::string id = attr(child, "id");
      if (id.empty()) {
        errors.push_back("place without id");
        continue;
      }
      std::string tokens = child.get<std::string>("initialMarking.text", "0");
      raw.places.emplace_back(
          id, parse_count(tokens, "place '" + id + "'", errors));
    } else if (tag == "transition") {
      RawTransition t;
      t.id = attr(child, "id");
      if (t.id.empty()) {
        errors.push_back("transition without id");
        continue;
      }
      t.label = child.get<std::string>("name.text", "");
      t.guard_text = attr(child, "guard");
      for (const auto& [sub, subnode] : child) {
        if (sub == "readVariable" && !subnode.data().empty())
          t.listed_reads.insert(subnode.data());
        else if (sub == "writeVariable" && !subnode.data().empty())
          t.listed_writes.insert(subnode.data());
        else if (sub == "toolspecific" &&
                 (attr(subnode, "activity") == "$invisible$" ||
                  attr(subnode, "invisible") == "true"))
          t.label.clear();
      }
      raw.transitions.push_back(std::move(t));
    } else if (tag == "arc") {
      std::string src = attr(child, "source");
      std::string dst = attr(child, "target");
      if (src.empty() || dst.empty()) {
        errors.push_back("arc '" + attr(child, "id") +
                         "' misses source or target");
        continue;
      }
      std::string w = child.get<std::string>("inscription.text", "1");
      raw.arcs.emplace_back(
          src, dst,
          parse_count(w, "arc " + src + " -> " + dst, errors));
    }
  }
}

// A vacuous atom mentioning the annotated variable, used to honor listed
// read/write variables the guard text leaves out: the variable joins the
// read or write set without constraining any value.
Guard vacuous_mention(const std::string& name, bool write, Sort sort) {
  using namespace guard_ast;
  AnnVar v{name, write};
  if (sort == Sort::Bool)
    return Guard(make_or(make_boolvar(v), make_not(make_boolvar(v))));
  CmpOp op = sort == Sort::String ? CmpOp::Eq : CmpOp::Ge;
  return Guard(make_cmp(op, make_var(v, sort), make_var(v, sort)));
}

}  // namespace

DPN parse_pnml(std::istream& in, ParseDiagnostics* diag,
               const DPNOptions& opts) {
  ParseDiagnostics local;
  ParseDiagnostics& d = diag ? *diag : local;

  pt::ptree doc;
  try {
    pt::read_xml(in, doc,
                 pt::xml_parser::trim_whitespace | pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(std::string("malformed XML: ") + e.what());
  }

  auto net_node = doc.get_child_optional("pnml.net");
  if (!net_node) throw ParseError("document has no pnml/net element");

  DPNBuilder builder;
  StringPool& pool = builder.pool();
  std::map<std::string, Sort> sorts;

  // Variable declarations; ProM-style files put <variables> under <net>.
  if (auto vars = net_node->get_child_optional("variables")) {
    for (const auto& [tag, vnode] : *vars) {
      if (tag != "variable") continue;
      std::string name = vnode.get<std::string>("name.text", "");
      if (name.empty()) name = vnode.get<std::string>("name", "");
      if (name.empty()) name = attr(vnode, "name");
      if (name.empty()) {
        d.errors.push_back("variable without a name");
        continue;
      }
      std::string type = attr(vnode, "type");
      auto sort = sort_from_pnml_type(type);
      if (!sort) {
        d.errors.push_back("variable '" + name + "': unknown sort '" + type +
                           "'");
        continue;
      }
      std::optional<Value> initial;
      if (auto iv = vnode.get_optional<std::string>("initialValue")) {
        try {
          initial = parse_typed_value(*iv, *sort, pool);
        } catch (const std::exception& e) {
          d.errors.push_back("variable '" + name + "': bad initial value: " +
                             e.what());
        }
      }
      if (sorts.count(name)) {
        d.errors.push_back("variable '" + name + "' declared twice");
        continue;
      }
      sorts[name] = *sort;
      builder.add_variable(name, *sort, initial);
    }
  }

  RawNet raw;
  collect_nodes(*net_node, raw, d.errors);

  for (const auto& [id, tokens] : raw.places) {
    builder.add_place(id);
    if (tokens > 0) builder.mark_initial(id, tokens);
  }

  for (const RawTransition& t : raw.transitions) {
    Guard g;
    try {
      g = Guard::parse(t.guard_text, sorts, pool);
    } catch (const GuardError& e) {
      d.errors.push_back("transition '" + t.id + "': " + e.what());
      continue;
    }
    for (const std::string& v : t.listed_writes) {
      auto it = sorts.find(v);
      if (it == sorts.end()) {
        d.errors.push_back("transition '" + t.id +
                           "': undeclared write variable '" + v + "'");
      } else if (!g.write_vars().count(v)) {
        g = guard_and(g, vacuous_mention(v, true, it->second));
      }
    }
    for (const std::string& v : t.listed_reads) {
      auto it = sorts.find(v);
      if (it == sorts.end()) {
        d.errors.push_back("transition '" + t.id +
                           "': undeclared read variable '" + v + "'");
      } else if (!g.read_vars().count(v)) {
        g = guard_and(g, vacuous_mention(v, false, it->second));
      }
    }
    builder.add_transition(t.id, t.label, g);
  }

  for (const auto& [src, dst, mult] : raw.arcs) builder.add_arc(src, dst, mult);

  // The final marking is mandatory; without one there is nothing to align
  // towards.
  auto finals = net_node->get_child_optional("finalmarkings");
  size_t markings = 0;
  if (finals) {
    for (const auto& [tag, mnode] : *finals) {
      if (tag != "marking") continue;
      ++markings;
      if (markings > 1) continue;
      for (const auto& [ptag, pnode] : mnode) {
        if (ptag != "place") continue;
        std::string ref = attr(pnode, "idref");
        uint32_t tokens = parse_count(pnode.get<std::string>("text", "1"),
                                      "final marking of '" + ref + "'",
                                      d.errors);
        if (tokens > 0) builder.mark_final(ref, tokens);
      }
    }
  }
  if (markings == 0)
    d.errors.push_back("no final marking (finalmarkings section is required)");
  if (markings > 1)
    d.errors.push_back("multiple final markings are not supported");

  if (!d.errors.empty()) {
    std::string msg = d.errors.front();
    if (d.errors.size() > 1)
      msg += " (and " + std::to_string(d.errors.size() - 1) + " more)";
    throw ParseError(msg);
  }

  try {
    return builder.finish(opts);
  } catch (const std::exception& e) {
    throw ParseError(e.what());
  }
}

DPN parse_pnml_file(const std::string& path, ParseDiagnostics* diag,
                    const DPNOptions& opts) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return parse_pnml(in, diag, opts);
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      case '\'':
        out += "&apos;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string value_text(const Value& v, const StringPool& pool) {
  switch (v.sort()) {
    case Sort::Bool:
      return v.as_bool() ? "true" : "false";
    case Sort::Int:
      return v.as_int().str();
    case Sort::Rat:
      return rat_to_string(v.as_rat());
    case Sort::String:
      return pool.spell(v.as_string());
  }
  return "";
}

}  // namespace

std::string write_pnml(const DPN& net) {
  const StringPool& pool = *net.pool();
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<pnml>\n  <net id=\"net\" "
        "type=\"http://www.pnml.org/version-2009/grammar/pnmlcoremodel\">\n"
        "    <page id=\"page0\">\n";

  const Marking& m0 = net.initial_marking();
  for (size_t p = 0; p < net.places().size(); ++p) {
    os << "      <place id=\"" << xml_escape(net.places()[p]) << "\">";
    if (m0[p] > 0)
      os << "<initialMarking><text>" << m0[p] << "</text></initialMarking>";
    os << "</place>\n";
  }

  for (const Transition& t : net.transitions()) {
    os << "      <transition id=\"" << xml_escape(t.id) << "\"";
    if (!t.guard.is_true())
      os << " guard=\"" << xml_escape(t.guard.text(&pool)) << "\"";
    os << ">";
    if (t.silent())
      os << "<toolspecific tool=\"dpncheck\" invisible=\"true\"/>";
    else
      os << "<name><text>" << xml_escape(t.label) << "</text></name>";
    for (const std::string& v : t.read_set)
      os << "<readVariable>" << xml_escape(v) << "</readVariable>";
    for (const std::string& v : t.write_set)
      os << "<writeVariable>" << xml_escape(v) << "</writeVariable>";
    os << "</transition>\n";
  }

  size_t arc_id = 0;
  auto emit_arc = [&](const std::string& from, const std::string& to,
                      uint32_t mult) {
    os << "      <arc id=\"arc" << arc_id++ << "\" source=\""
       << xml_escape(from) << "\" target=\"" << xml_escape(to) << "\"";
    if (mult != 1)
      os << "><inscription><text>" << mult << "</text></inscription></arc>\n";
    else
      os << "/>\n";
  };
  for (const Transition& t : net.transitions()) {
    for (const auto& [p, mult] : t.pre) emit_arc(net.places()[p], t.id, mult);
    for (const auto& [p, mult] : t.post) emit_arc(t.id, net.places()[p], mult);
  }

  os << "    </page>\n    <variables>\n";
  for (const VariableDecl& v : net.variables()) {
    os << "      <variable type=\"" << pnml_type_name(v.sort) << "\">"
       << "<name>" << xml_escape(v.name) << "</name>"
       << "<initialValue>" << xml_escape(value_text(v.initial, pool))
       << "</initialValue></variable>\n";
  }
  os << "    </variables>\n    <finalmarkings>\n      <marking>\n";
  const Marking& mf = net.final_marking();
  for (size_t p = 0; p < net.places().size(); ++p) {
    if (mf[p] == 0) continue;
    os << "        <place idref=\"" << xml_escape(net.places()[p])
       << "\"><text>" << mf[p] << "</text></place>\n";
  }
  os << "      </marking>\n    </finalmarkings>\n  </net>\n</pnml>\n";
  return os.str();
}

bool structurally_equal(const DPN& a, const DPN& b) {
  if (a.places() != b.places()) return false;
  if (a.initial_marking() != b.initial_marking()) return false;
  if (a.final_marking() != b.final_marking()) return false;

  if (a.variables().size() != b.variables().size()) return false;
  for (size_t i = 0; i < a.variables().size(); ++i) {
    const VariableDecl& va = a.variables()[i];
    const VariableDecl& vb = b.variables()[i];
    if (va.name != vb.name || va.sort != vb.sort) return false;
    // Compare initial values by spelling so string codes from different
    // pools do not alias.
    if (value_text(va.initial, *a.pool()) != value_text(vb.initial, *b.pool()))
      return false;
  }

  if (a.transitions().size() != b.transitions().size()) return false;
  for (size_t i = 0; i < a.transitions().size(); ++i) {
    const Transition& ta = a.transitions()[i];
    const Transition& tb = b.transitions()[i];
    if (ta.id != tb.id || ta.label != tb.label) return false;
    if (ta.pre != tb.pre || ta.post != tb.post) return false;
    if (ta.guard.text(a.pool().get()) != tb.guard.text(b.pool().get()))
      return false;
  }
  return true;
}

}  // namespace dpncheck
