#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dpncheck/value.hpp"

namespace dpncheck {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  // Shell command line for a process that speaks SMT-LIB 2 on stdin/stdout,
  // e.g. "z3 -in" or "node tools/solver-shim/smt2d.js".
  std::string command;
  // Budget for a single check-sat; 0 disables. Enforced twice: passed to the
  // solver as the :timeout option (milliseconds) and backed by a wall-clock
  // watchdog that kills a stuck process.
  double check_timeout_s = 0.0;
};

enum class CheckStatus : uint8_t { Sat, Unsat, Unknown, Timeout, Error };

const char* check_status_name(CheckStatus s);

// One solver child process holding one incremental constraint stack. Not
// thread-safe; give each worker its own session.
class SolverSession {
 public:
  SolverSession() = default;
  ~SolverSession();
  SolverSession(const SolverSession&) = delete;
  SolverSession& operator=(const SolverSession&) = delete;

  // Spawns the process and performs an echo handshake. Throws SolverError
  // when the process cannot be started or does not answer.
  void start(const SolverConfig& config);

  bool running() const { return pid_ > 0; }
  const std::string& last_error() const { return error_; }

  // Queues raw SMT-LIB text; flushed before any response is awaited.
  void send(const std::string& text);

  void push();
  void pop();

  CheckStatus check_sat();

  // Values of the given constants from the current model. Valid right after
  // a Sat result. Throws SolverError on malformed responses.
  std::map<std::string, Value> get_values(const std::vector<std::string>& names);

  // Terminates the child (hard kill of its process group).
  void close();

 private:
  void flush();
  std::optional<std::string> read_line(double timeout_s);
  void fail(const std::string& message);

  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string outbuf_;
  std::string inbuf_;
  std::string error_;
  double check_timeout_s_ = 0.0;
};

struct MinimizeResult {
  // Sat: minimum proven. Timeout/Unknown/Error: best contains the best model
  // found before the interruption, if any. Unsat: no model at all.
  CheckStatus status = CheckStatus::Error;
  bool proven_optimal = false;
  std::optional<Int> best;
  std::map<std::string, Value> model; // values for query_names at best
  size_t checks = 0;
  // Stack frames pushed and kept; popping this many returns the session to
  // the state it was in before the call.
  size_t frames = 0;
};

enum class MinimizeStrategy : uint8_t { BinarySearch, LinearDescent };

// Minimizes the integer constant `objective` over the constraints already
// asserted in the session, by repeated check-sat under push/pop with bound
// assertions. upper_clamp caps the initial upper bound (the objective may be
// only lower-bounded by the constraints). The session is left positioned on
// the stack frame of the best model.
MinimizeResult minimize_objective(
    SolverSession& session, const std::string& objective,
    const std::vector<std::string>& query_names,
    std::optional<Int> upper_clamp = std::nullopt,
    MinimizeStrategy strategy = MinimizeStrategy::BinarySearch);

}  // namespace dpncheck
