#include "dpncheck/log.hpp"

#include <sstream>
#include <unordered_map>

namespace dpncheck {

std::string trace_key(const LogTrace& trace) {
  std::ostringstream os;
  for (const Event& e : trace.events) {
    os << e.activity.size() << ':' << e.activity << '(';
    for (const auto& [name, value] : e.payload)
      os << name.size() << ':' << name << '=' << value.key() << ';';
    os << ')';
  }
  return os.str();
}

std::vector<UniqueTrace> dedupe(const EventLog& log) {
  std::vector<UniqueTrace> out;
  std::unordered_map<std::string, size_t> index;
  for (const LogTrace& t : log.traces) {
    std::string key = trace_key(t);
    auto [it, fresh] = index.emplace(std::move(key), out.size());
    if (fresh) {
      UniqueTrace u;
      u.trace = t;
      out.push_back(std::move(u));
    }
    UniqueTrace& u = out[it->second];
    ++u.multiplicity;
    u.trace_ids.push_back(t.id);
  }
  return out;
}

size_t reconcile_log(EventLog& log, const DPN& net) {
  auto sorts = net.variable_sorts();
  size_t events = 0;
  for (LogTrace& t : log.traces) {
    for (size_t i = 0; i < t.events.size(); ++i) {
      Event& e = t.events[i];
      ++events;
      for (auto& [name, value] : e.payload) {
        auto it = sorts.find(name);
        if (it == sorts.end())
          throw LogError("trace '" + t.id + "' event " + std::to_string(i + 1) +
                         " ('" + e.activity + "') writes unknown variable '" +
                         name + "'");
        if (value.sort() == it->second) continue;
        if (it->second == Sort::Rat && value.sort() == Sort::Int) {
          value = Value::rational(value.widen());
          continue;
        }
        throw LogError("trace '" + t.id + "' event " + std::to_string(i + 1) +
                       " ('" + e.activity + "') writes '" + name + "' with sort " +
                       sort_name(value.sort()) + ", expected " +
                       sort_name(it->second));
      }
    }
  }
  return events;
}

}  // namespace dpncheck
