#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <fstream>
#include <map>

#include "dpncheck/model_io.hpp"

namespace dpncheck {

namespace {

namespace pt = boost::property_tree;

std::string attr(const pt::ptree& node, const std::string& name) {
  return node.get<std::string>("<xmlattr>." + name, "");
}

bool typed_attribute_tag(const std::string& tag) {
  return tag == "string" || tag == "int" || tag == "float" ||
         tag == "boolean" || tag == "date" || tag == "id";
}

// Converts one typed XES attribute to the declared sort. Exactness over
// convenience: floats go through exact decimal conversion, and only a
// whole-number float may land in an integer variable.
Value convert_attribute(const std::string& tag, const std::string& text,
                        Sort declared, StringPool& pool) {
  if (tag == "int") {
    Int v = parse_int(text);
    if (declared == Sort::Int) return Value::integer(std::move(v));
    if (declared == Sort::Rat) return Value::rational(Rat(v));
    throw std::invalid_argument("int value for a " +
                                std::string(sort_name(declared)) +
                                " variable");
  }
  if (tag == "float") {
    Rat r = decimal_to_rational(text);
    if (declared == Sort::Rat) return Value::rational(std::move(r));
    if (declared == Sort::Int && denominator(r) == 1)
      return Value::integer(numerator(r));
    throw std::invalid_argument("float value for a " +
                                std::string(sort_name(declared)) +
                                " variable");
  }
  if (tag == "boolean") {
    if (declared != Sort::Bool)
      throw std::invalid_argument("boolean value for a " +
                                  std::string(sort_name(declared)) +
                                  " variable");
    if (text == "true") return Value::boolean(true);
    if (text == "false") return Value::boolean(false);
    throw std::invalid_argument("expected true or false, got '" + text + "'");
  }
  if (tag == "string") {
    if (declared != Sort::String)
      throw std::invalid_argument("string value for a " +
                                  std::string(sort_name(declared)) +
                                  " variable");
    return Value::string(pool.intern(text));
  }
  throw std::invalid_argument("attribute type <" + tag +
                              "> has no place in a guard");
}

}  // namespace

EventLog parse_xes(std::istream& in, const DPN& net, ParseDiagnostics* diag) {
  ParseDiagnostics local;
  ParseDiagnostics& d = diag ? *diag : local;

  pt::ptree doc;
  try {
    pt::read_xml(in, doc,
                 pt::xml_parser::trim_whitespace | pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(std::string("malformed XML: ") + e.what());
  }

  auto log_node = doc.get_child_optional("log");
  if (!log_node) throw ParseError("document has no log element");

  StringPool& pool = *net.pool();
  std::map<std::string, size_t> ignored;
  EventLog log;
  size_t trace_no = 0;

  for (const auto& [tag, trace_node] : *log_node) {
    if (tag != "trace") continue;
    ++trace_no;

    LogTrace trace;
    for (const auto& [atag, anode] : trace_node) {
      if (atag == "string" && attr(anode, "key") == "concept:name")
        trace.id = attr(anode, "value");
    }
    if (trace.id.empty()) trace.id = "trace" + std::to_string(trace_no);

    size_t event_no = 0;
    for (const auto& [etag, event_node] : trace_node) {
      if (etag != "event") continue;
      ++event_no;
      Event event;
      std::string where =
          "trace '" + trace.id + "' event " + std::to_string(event_no);

      for (const auto& [atag, anode] : event_node) {
        if (!typed_attribute_tag(atag)) continue;
        std::string key = attr(anode, "key");
        std::string value = attr(anode, "value");
        if (key == "concept:name" && atag == "string") {
          event.activity = value;
          continue;
        }
        auto vi = net.variable_index(key);
        if (!vi) {
          // Lifecycle, timestamp and friends: they cannot influence any
          // guard, so they are dropped, with one aggregate warning per key.
          ++ignored[key];
          continue;
        }
        try {
          event.payload[key] = convert_attribute(
              atag, value, net.variables()[*vi].sort, pool);
        } catch (const std::exception& e) {
          d.errors.push_back(where + ", attribute '" + key + "': " + e.what());
        }
      }
      if (event.activity.empty())
        d.errors.push_back(where + ": no concept:name activity");
      trace.events.push_back(std::move(event));
    }
    log.traces.push_back(std::move(trace));
  }

  for (const auto& [key, count] : ignored)
    d.warnings.push_back("ignored undeclared attribute '" + key + "' (" +
                         std::to_string(count) + " occurrence" +
                         (count == 1 ? ")" : "s)"));

  if (!d.errors.empty()) {
    std::string msg = d.errors.front();
    if (d.errors.size() > 1)
      msg += " (and " + std::to_string(d.errors.size() - 1) + " more)";
    throw ParseError(msg);
  }
  return log;
}

EventLog parse_xes_file(const std::string& path, const DPN& net,
                        ParseDiagnostics* diag) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return parse_xes(in, net, diag);
}

}  // namespace dpncheck
