#include "dpncheck/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <iomanip>
#include <sstream>
#include <thread>

namespace dpncheck {

namespace {

using Clock = std::chrono::steady_clock;

Clustering singleton_clusters(const std::vector<UniqueTrace>& uniq) {
  Clustering clustering;
  clustering.cluster_of.resize(uniq.size());
  for (size_t i = 0; i < uniq.size(); ++i) {
    Cluster c;
    c.representative = i;
    c.members = {i};
    c.multiplicity = uniq[i].multiplicity;
    clustering.clusters.push_back(std::move(c));
    clustering.cluster_of[i] = i;
  }
  return clustering;
}

}  // namespace

PipelineResult run_pipeline(const DPN& net, const EventLog& log,
                            const PipelineOptions& opts) {
  auto wall0 = Clock::now();
  PipelineResult out;
  out.summary.parse_s = opts.parse_s;

  EventLog reconciled = log;
  out.summary.events = reconcile_log(reconciled, net);
  out.summary.traces = reconciled.traces.size();

  std::vector<UniqueTrace> uniq = dedupe(reconciled);
  out.summary.unique = uniq.size();

  Clustering clustering = opts.cluster
                              ? cluster_log(uniq, extract_atoms(net))
                              : singleton_clusters(uniq);
  out.summary.clusters = clustering.clusters.size();

  out.rows.resize(uniq.size());

  auto solve_cluster = [&](size_t ci) {
    const Cluster& c = clustering.clusters[ci];
    const UniqueTrace& rep = uniq[c.representative];
    ConformanceResult r =
        conformance(net, rep.trace, opts.profile, opts.conformance);

    for (size_t member : c.members) {
      const UniqueTrace& ut = uniq[member];
      ReportRow row;
      row.trace_id = ut.trace.id;
      row.multiplicity = ut.multiplicity;
      row.cluster = ci;
      if (member == c.representative) {
        row.encode_s = r.encode_s;
        row.solve_s = r.solve_s;
      }
      if (r.optimal) {
        row.cost = r.cost;
        row.optimal = true;
        Alignment aligned =
            member == c.representative
                ? r.alignment
                : transfer_alignment(net, r.alignment, rep.trace, ut.trace,
                                     opts.profile);
        if (opts.verbose)
          row.alignment = alignment_rows(net, ut.trace, aligned);
        if (opts.verify_transfer && member != c.representative) {
          ConformanceResult again =
              conformance(net, ut.trace, opts.profile, opts.conformance);
          if (!again.optimal || again.cost != r.cost)
            throw AlignError(
                "transfer verification failed for trace '" + ut.trace.id +
                "': solved " +
                (again.cost ? cost_text(*again.cost) : std::string("none")) +
                " vs transferred " +
                (r.cost ? cost_text(*r.cost) : std::string("none")));
        }
      } else {
        // No transfer from a non-optimal alignment; the whole cluster
        // carries the timeout marker.
        row.optimal = false;
        row.upper_bound = r.cost;
      }
      out.rows[member] = std::move(row);
    }
  };

  size_t workers = opts.jobs > 0 ? opts.jobs : 1;
  workers = std::min(workers, clustering.clusters.size());
  if (workers <= 1) {
    for (size_t ci = 0; ci < clustering.clusters.size(); ++ci)
      solve_cluster(ci);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> failures(workers);
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        while (true) {
          size_t ci = next.fetch_add(1);
          if (ci >= clustering.clusters.size()) return;
          try {
            solve_cluster(ci);
          } catch (...) {
            failures[w] = std::current_exception();
            return;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& f : failures)
      if (f) std::rethrow_exception(f);
  }

  for (size_t ci = 0; ci < clustering.clusters.size(); ++ci) {
    const ReportRow& rep_row =
        out.rows[clustering.clusters[ci].representative];
    if (rep_row.optimal)
      ++out.summary.solved;
    else
      ++out.summary.timed_out;
  }
  for (const ReportRow& row : out.rows) {
    out.summary.encode_s += row.encode_s;
    out.summary.solve_s += row.solve_s;
    if (!row.cost) continue;
    out.summary.total_cost =
        cost_add(out.summary.total_cost,
                 *row.cost * static_cast<Cost>(row.multiplicity));
    if (*row.cost == 0) out.summary.fitting += row.multiplicity;
    out.summary.max_cost = std::max(out.summary.max_cost, *row.cost);
  }

  out.summary.wall_s =
      std::chrono::duration<double>(Clock::now() - wall0).count();
  return out;
}

std::string summary_text(const PipelineSummary& s) {
  std::ostringstream os;
  os << "traces: " << s.traces << " total (" << s.events << " events), "
     << s.unique << " unique, " << s.clusters << " clusters\n";
  os << "solved: " << s.solved << " of " << s.clusters << " clusters";
  if (s.timed_out > 0) os << ", " << s.timed_out << " timed out";
  os << "\n";
  if (s.solved > 0) {
    os << "cost: total " << cost_text(s.total_cost) << " over originals, "
       << s.fitting << " fitting (cost 0), max " << cost_text(s.max_cost)
       << "\n";
  }
  double phases = s.parse_s + s.encode_s + s.solve_s;
  os << "time: ";
  if (phases > 0) {
    auto pct = [&](double x) {
      std::ostringstream p;
      p << std::fixed << std::setprecision(1) << (100.0 * x / phases) << "%";
      return p.str();
    };
    os << "parse " << pct(s.parse_s) << ", encode " << pct(s.encode_s)
       << ", solve " << pct(s.solve_s) << " ";
  }
  os << "(wall " << std::fixed << std::setprecision(2) << s.wall_s << " s)\n";
  return os.str();
}

}  // namespace dpncheck
