#include "dpncheck/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>

namespace dpncheck {

const char* check_status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Sat: return "sat";
    case CheckStatus::Unsat: return "unsat";
    case CheckStatus::Unknown: return "unknown";
    case CheckStatus::Timeout: return "timeout";
    case CheckStatus::Error: return "error";
  }
  return "?";
}

namespace {

constexpr const char* kSync = "#dpncheck-sync#";

void ignore_sigpipe_once() {
  static bool done = [] {
    signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)done;
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

SolverSession::~SolverSession() { close(); }

void SolverSession::start(const SolverConfig& config) {
  ignore_sigpipe_once();
  close();
  check_timeout_s_ = config.check_timeout_s;

  int to_pipe[2], from_pipe[2];
  if (pipe(to_pipe) != 0 || pipe(from_pipe) != 0)
    throw SolverError("pipe: " + std::string(strerror(errno)));
  pid_t pid = fork();
  if (pid < 0) throw SolverError("fork: " + std::string(strerror(errno)));
  if (pid == 0) {
    setpgid(0, 0); // own process group, so a kill reaches grandchildren
    dup2(to_pipe[0], STDIN_FILENO);
    dup2(from_pipe[1], STDOUT_FILENO);
    ::close(to_pipe[0]);
    ::close(to_pipe[1]);
    ::close(from_pipe[0]);
    ::close(from_pipe[1]);
    execl("/bin/sh", "sh", "-c", config.command.c_str(), (char*)nullptr);
    _exit(127);
  }
  ::close(to_pipe[0]);
  ::close(from_pipe[1]);
  pid_ = pid;
  to_child_ = to_pipe[1];
  from_child_ = from_pipe[0];
  inbuf_.clear();
  outbuf_.clear();
  error_.clear();

  send("(set-option :print-success false)\n");
  if (check_timeout_s_ > 0) {
    long ms = std::lround(check_timeout_s_ * 1000.0);
    send("(set-option :timeout " + std::to_string(ms) + ")\n");
  }
  send(std::string("(echo \"") + kSync + "\")\n");
  flush();
  // Generous: a WASM-based solver needs a moment to instantiate.
  double deadline = 120.0;
  while (true) {
    auto line = read_line(deadline);
    if (!line) {
      std::string why = error_;
      close();
      throw SolverError("solver '" + config.command +
                        "' did not answer the handshake" +
                        (why.empty() ? "" : ": " + why));
    }
    if (*line == kSync) break;
    // Option errors (for example an unsupported :timeout) are tolerable.
  }
}

void SolverSession::send(const std::string& text) { outbuf_ += text; }

void SolverSession::flush() {
  if (pid_ <= 0) {
    outbuf_.clear();
    return;
  }
  size_t off = 0;
  while (off < outbuf_.size()) {
    ssize_t k = write(to_child_, outbuf_.data() + off, outbuf_.size() - off);
    if (k < 0) {
      if (errno == EINTR) continue;
      fail(std::string("write to solver: ") + strerror(errno));
      return;
    }
    off += static_cast<size_t>(k);
  }
  outbuf_.clear();
}

std::optional<std::string> SolverSession::read_line(double timeout_s) {
  if (pid_ <= 0) return std::nullopt;
  double deadline = now_seconds() + timeout_s;
  while (true) {
    size_t nl = inbuf_.find('\n');
    if (nl != std::string::npos) {
      std::string line = inbuf_.substr(0, nl);
      inbuf_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    double remain = deadline - now_seconds();
    if (remain <= 0) {
      fail("solver watchdog expired");
      return std::nullopt;
    }
    pollfd pfd{from_child_, POLLIN, 0};
    int pr = poll(&pfd, 1, static_cast<int>(std::min(remain * 1000.0, 1e9)));
    if (pr < 0) {
      if (errno == EINTR) continue;
      fail(std::string("poll: ") + strerror(errno));
      return std::nullopt;
    }
    if (pr == 0) continue;
    char buf[4096];
    ssize_t k = read(from_child_, buf, sizeof buf);
    if (k < 0) {
      if (errno == EINTR) continue;
      fail(std::string("read from solver: ") + strerror(errno));
      return std::nullopt;
    }
    if (k == 0) {
      fail("solver process closed its output");
      return std::nullopt;
    }
    inbuf_.append(buf, static_cast<size_t>(k));
  }
}

void SolverSession::fail(const std::string& message) {
  if (error_.empty()) error_ = message;
  close();
}

void SolverSession::close() {
  if (pid_ > 0) {
    kill(-pid_, SIGKILL);
    kill(pid_, SIGKILL);
    int status = 0;
    waitpid(pid_, &status, 0);
  }
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  pid_ = -1;
  to_child_ = -1;
  from_child_ = -1;
}

void SolverSession::push() { send("(push 1)\n"); }
void SolverSession::pop() { send("(pop 1)\n"); }

CheckStatus SolverSession::check_sat() {
  if (pid_ <= 0) return CheckStatus::Error;
  send("(check-sat)\n");
  flush();
  double budget = check_timeout_s_ > 0 ? check_timeout_s_ * 2 + 10 : 7200;
  double started = now_seconds();
  while (true) {
    auto line = read_line(budget - (now_seconds() - started));
    if (!line) {
      if (error_ == "solver watchdog expired") return CheckStatus::Timeout;
      return CheckStatus::Error;
    }
    if (*line == "sat") return CheckStatus::Sat;
    if (*line == "unsat") return CheckStatus::Unsat;
    if (*line == "unknown") {
      // Solvers report unknown when the per-check time limit struck; that is
      // a timeout for our purposes when one was configured.
      return check_timeout_s_ > 0 ? CheckStatus::Timeout : CheckStatus::Unknown;
    }
    if (line->rfind("(error", 0) == 0) {
      fail("solver error: " + *line);
      return CheckStatus::Error;
    }
    if (line->empty() || *line == "success") continue;
    fail("unexpected solver output: " + *line);
    return CheckStatus::Error;
  }
}

namespace {

struct SExpr {
  bool is_atom = true;
  std::string atom;
  std::vector<SExpr> items;
};

// Parses the first complete s-expression of `text` starting at `i`.
SExpr parse_sexpr(const std::string& text, size_t& i) {
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
  };
  skip_ws();
  if (i >= text.size()) throw SolverError("truncated solver response");
  if (text[i] == '(') {
    ++i;
    SExpr e;
    e.is_atom = false;
    while (true) {
      skip_ws();
      if (i >= text.size()) throw SolverError("unbalanced solver response");
      if (text[i] == ')') {
        ++i;
        return e;
      }
      e.items.push_back(parse_sexpr(text, i));
    }
  }
  SExpr e;
  if (text[i] == '|') {
    size_t end = text.find('|', i + 1);
    if (end == std::string::npos) throw SolverError("unbalanced | in response");
    e.atom = text.substr(i + 1, end - i - 1);
    i = end + 1;
    return e;
  }
  if (text[i] == '"') {
    size_t end = text.find('"', i + 1);
    if (end == std::string::npos) throw SolverError("unbalanced \" in response");
    e.atom = text.substr(i, end - i + 1);
    i = end + 1;
    return e;
  }
  size_t start = i;
  while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
         text[i] != '(' && text[i] != ')')
    ++i;
  e.atom = text.substr(start, i - start);
  return e;
}

bool plain_integer(const std::string& s) {
  if (s.empty()) return false;
  size_t k = s[0] == '-' ? 1 : 0;
  if (k == s.size()) return false;
  for (; k < s.size(); ++k)
    if (!std::isdigit(static_cast<unsigned char>(s[k]))) return false;
  return true;
}

Value negate_value(const Value& v) {
  if (v.sort() == Sort::Int) return Value::integer(-v.as_int());
  return Value::rational(-v.widen());
}

// Model values arrive as integers ("5", "(- 5)"), decimals ("0.5"), division
// forms ("(/ 1.0 10.0)") or booleans.
Value parse_model_value(const SExpr& e) {
  if (e.is_atom) {
    if (e.atom == "true") return Value::boolean(true);
    if (e.atom == "false") return Value::boolean(false);
    if (plain_integer(e.atom)) return Value::integer(Int(e.atom));
    if (e.atom.find('.') != std::string::npos ||
        e.atom.find('e') != std::string::npos ||
        e.atom.find('E') != std::string::npos)
      return Value::rational(decimal_to_rational(e.atom));
    throw SolverError("cannot read model value '" + e.atom + "'");
  }
  if (e.items.empty()) throw SolverError("empty model value");
  const std::string& head = e.items[0].atom;
  if (head == "-" && e.items.size() == 2)
    return negate_value(parse_model_value(e.items[1]));
  if (head == "/" && e.items.size() == 3) {
    Rat num = parse_model_value(e.items[1]).widen();
    Rat den = parse_model_value(e.items[2]).widen();
    if (den == 0) throw SolverError("division by zero in model value");
    return Value::rational(num / den);
  }
  throw SolverError("cannot read composite model value '(" + head + " ...)'");
}

}  // namespace

std::map<std::string, Value> SolverSession::get_values(
    const std::vector<std::string>& names) {
  if (names.empty()) return {};
  if (pid_ <= 0) throw SolverError("get-value on a dead session: " + error_);
  std::string cmd = "(get-value (";
  for (size_t k = 0; k < names.size(); ++k)
    cmd += (k ? " " : "") + names[k];
  cmd += "))\n";
  send(cmd);
  flush();

  // Collect output until the parentheses balance.
  std::string acc;
  int depth = 0;
  bool seen_open = false;
  double budget = 120.0;
  double started = now_seconds();
  while (true) {
    auto line = read_line(budget - (now_seconds() - started));
    if (!line)
      throw SolverError("no response to get-value: " + error_);
    if (!seen_open && line->rfind("(error", 0) == 0) {
      fail("solver error: " + *line);
      throw SolverError(error_);
    }
    acc += *line;
    acc += '\n';
    for (char c : *line) {
      if (c == '(') {
        ++depth;
        seen_open = true;
      } else if (c == ')') {
        --depth;
      }
    }
    if (seen_open && depth <= 0) break;
  }

  size_t i = 0;
  SExpr top = parse_sexpr(acc, i);
  if (top.is_atom)
    throw SolverError("malformed get-value response: " + acc);
  if (top.items.size() == 1 && !top.items[0].is_atom &&
      top.items[0].items.size() == 2 && top.items[0].items[0].atom == "error")
    throw SolverError("solver error: " + acc);
  if (top.items.size() != names.size())
    throw SolverError("get-value returned " + std::to_string(top.items.size()) +
                      " entries for " + std::to_string(names.size()) +
                      " names");
  std::map<std::string, Value> out;
  for (size_t k = 0; k < names.size(); ++k) {
    const SExpr& pair = top.items[k];
    if (pair.is_atom || pair.items.size() != 2)
      throw SolverError("malformed get-value pair in: " + acc);
    out[names[k]] = parse_model_value(pair.items[1]);
  }
  return out;
}

MinimizeResult minimize_objective(SolverSession& session,
                                  const std::string& objective,
                                  const std::vector<std::string>& query_names,
                                  std::optional<Int> upper_clamp,
                                  MinimizeStrategy strategy) {
  MinimizeResult res;
  std::vector<std::string> query = query_names;
  if (std::find(query.begin(), query.end(), objective) == query.end())
    query.push_back(objective);

  CheckStatus st = session.check_sat();
  ++res.checks;
  if (st != CheckStatus::Sat) {
    res.status = st;
    return res;
  }
  res.model = session.get_values(query);
  res.best = res.model.at(objective).as_int();
  if (res.best < 0)
    throw SolverError("objective came back negative: " + res.best->str());

  // The first model may leave the objective far above any real alignment
  // cost (the distance constraints only bound it from below). Clamp it to
  // the caller's proven upper bound before searching, re-fetching a model
  // that actually attains the clamped range.
  if (upper_clamp && *upper_clamp < *res.best) {
    session.push();
    ++res.frames;
    session.send("(assert (<= " + objective + " " + upper_clamp->str() +
                 "))\n");
    st = session.check_sat();
    ++res.checks;
    if (st == CheckStatus::Unsat)
      throw SolverError("objective upper bound " + upper_clamp->str() +
                        " is not attainable; the bound computation is wrong");
    if (st != CheckStatus::Sat) {
      res.status = st;
      return res;
    }
    res.model = session.get_values(query);
    res.best = res.model.at(objective).as_int();
  }

  Int hi = *res.best;
  Int lo = 0;

  if (strategy == MinimizeStrategy::LinearDescent) {
    // Repeatedly demand strictly better models until unsat.
    Int bound = *res.best;
    while (bound > 0) {
      session.push();
      ++res.frames;
      session.send("(assert (<= " + objective + " " + Int(bound - 1).str() +
                   "))\n");
      st = session.check_sat();
      ++res.checks;
      if (st == CheckStatus::Unsat) {
        session.pop();
        --res.frames;
        res.status = CheckStatus::Sat;
        res.proven_optimal = true;
        return res;
      }
      if (st != CheckStatus::Sat) {
        res.status = st;
        return res;
      }
      res.model = session.get_values(query);
      res.best = res.model.at(objective).as_int();
      bound = *res.best;
    }
    res.status = CheckStatus::Sat;
    res.proven_optimal = true;
    return res;
  }

  // Binary search on the objective value. A sat bound stays asserted (it
  // only ever tightens); an unsat bound is popped before raising lo.
  while (lo < hi) {
    Int mid = lo + (hi - lo) / 2;
    session.push();
    ++res.frames;
    session.send("(assert (<= " + objective + " " + mid.str() + "))\n");
    st = session.check_sat();
    ++res.checks;
    if (st == CheckStatus::Sat) {
      res.model = session.get_values(query);
      res.best = res.model.at(objective).as_int();
      hi = *res.best;
    } else if (st == CheckStatus::Unsat) {
      session.pop();
      --res.frames;
      lo = mid + 1;
    } else {
      res.status = st;
      return res;
    }
  }
  // lo == hi: the held model attains it, matched by an unsat proof below it
  // (or lo == 0).
  res.status = CheckStatus::Sat;
  res.proven_optimal = true;
  res.best = hi;
  return res;
}

}  // namespace dpncheck
