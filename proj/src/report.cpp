#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "dpncheck/model_io.hpp"

namespace dpncheck {

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string seconds_text(double s) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << s;
  return os.str();
}

}  // namespace

void write_report_csv(const std::vector<ReportRow>& rows, std::ostream& os) {
  os << "trace_id,multiplicity,cluster,cost,solve_s,encode_s\n";
  for (const ReportRow& r : rows) {
    os << csv_cell(r.trace_id) << ',' << r.multiplicity << ',' << r.cluster
       << ',' << (r.cost ? std::to_string(*r.cost) : std::string("TIMEOUT"))
       << ',' << seconds_text(r.solve_s) << ',' << seconds_text(r.encode_s)
       << '\n';
  }
}

void write_report_json(const std::vector<ReportRow>& rows, std::ostream& os,
                       bool verbose) {
  nlohmann::ordered_json traces = nlohmann::ordered_json::array();
  for (const ReportRow& r : rows) {
    nlohmann::ordered_json row;
    row["id"] = r.trace_id;
    row["multiplicity"] = r.multiplicity;
    row["cluster"] = r.cluster;
    if (r.cost)
      row["cost"] = *r.cost;
    else
      row["cost"] = nullptr;
    if (!r.cost && r.upper_bound) row["upper_bound"] = *r.upper_bound;
    row["optimal"] = r.optimal;
    row["solve_s"] = r.solve_s;
    row["encode_s"] = r.encode_s;
    if (verbose) {
      nlohmann::ordered_json moves = nlohmann::ordered_json::array();
      for (const auto& m : r.alignment)
        moves.push_back({{"log", m[0]}, {"model", m[1]}, {"move", m[2]}});
      row["alignment"] = std::move(moves);
    }
    traces.push_back(std::move(row));
  }
  nlohmann::ordered_json report;
  report["traces"] = std::move(traces);
  os << report.dump(2) << '\n';
}

}  // namespace dpncheck
