#include "hifo/executor.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>
#include <regex>

namespace hifo {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

// Interpreter-side half of the protocol. Reads one setup record, then
// serves {call_id, fn, args} requests until stdin closes. The candidate
// program runs with a guarded __import__ and without file/process builtins.
const char* kRunnerSource = R"PYRUNNER(
import sys, json, math, inspect, builtins

def _normalize(x):
    mod = type(x).__module__
    if mod.startswith("numpy"):
        if hasattr(x, "tolist"):
            x = x.tolist()
        elif hasattr(x, "item"):
            x = x.item()
    if isinstance(x, tuple):
        x = list(x)
    if isinstance(x, list):
        return [_normalize(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _normalize(v) for k, v in x.items()}
    return x

def _nonfinite(x):
    if isinstance(x, bool):
        return False
    if isinstance(x, float):
        return not math.isfinite(x)
    if isinstance(x, list):
        return any(_nonfinite(v) for v in x)
    if isinstance(x, dict):
        return any(_nonfinite(v) for v in x.values())
    return False

def _reply(obj):
    sys.stdout.write(json.dumps(obj, allow_nan=False) + "\n")
    sys.stdout.flush()

def main():
    setup = json.loads(sys.stdin.readline())
    allowed = set(setup.get("allowed_imports", []))
    for name in sorted(allowed):
        try:
            __import__(name)
        except Exception:
            pass
    real_import = builtins.__import__

    def guarded_import(name, globals=None, locals=None, fromlist=(), level=0):
        root = name.split(".")[0]
        if root not in allowed:
            raise ImportError("import of '%s' is not permitted" % root)
        return real_import(name, globals, locals, fromlist, level)

    safe_builtins = {}
    for name in dir(builtins):
        safe_builtins[name] = getattr(builtins, name)
    for banned in ("open", "input", "eval", "exec", "compile", "breakpoint",
                   "exit", "quit", "help", "license", "copyright", "credits",
                   "memoryview", "vars", "globals"):
        safe_builtins.pop(banned, None)
    safe_builtins["__import__"] = guarded_import
    env = {"__builtins__": safe_builtins, "__name__": "candidate"}

    try:
        program = compile(setup["code"], "<candidate>", "exec")
    except SyntaxError as e:
        _reply({"ok": False, "error": "syntax", "detail": "line %s: %s" % (e.lineno, e.msg)})
        return
    try:
        exec(program, env)
    except BaseException as e:
        _reply({"ok": False, "error": "runtime", "detail": "%s: %s" % (type(e).__name__, e)})
        return

    fn = env.get(setup["fn"])
    if not callable(fn):
        _reply({"ok": False, "error": "protocol",
                "detail": "no callable named '%s'" % setup["fn"]})
        return
    arity = setup.get("arity")
    if arity is not None and arity >= 0:
        try:
            params = list(inspect.signature(fn).parameters.values())
        except (TypeError, ValueError):
            params = None
        if params is not None and not any(p.kind == p.VAR_POSITIONAL for p in params):
            positional = [p for p in params
                          if p.kind in (p.POSITIONAL_ONLY, p.POSITIONAL_OR_KEYWORD)]
            required = [p for p in positional if p.default is p.empty]
            if arity < len(required) or arity > len(positional):
                _reply({"ok": False, "error": "protocol",
                        "detail": "'%s' does not accept %d positional argument(s)"
                        % (setup["fn"], arity)})
                return
    _reply({"ok": True})

    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            req = json.loads(line)
        except ValueError:
            _reply({"ok": False, "error": "protocol", "detail": "bad request line"})
            continue
        cid = req.get("call_id", 0)
        target = env.get(req.get("fn") or setup["fn"])
        if not callable(target):
            _reply({"call_id": cid, "ok": False, "error": "protocol",
                    "detail": "unknown function"})
            continue
        try:
            value = target(*req.get("args", []))
        except BaseException as e:
            _reply({"call_id": cid, "ok": False, "error": "runtime",
                    "detail": "%s: %s" % (type(e).__name__, e)})
            continue
        value = _normalize(value)
        if _nonfinite(value):
            _reply({"call_id": cid, "ok": False, "error": "bad_shape",
                    "detail": "non-finite value in result"})
            continue
        try:
            _reply({"call_id": cid, "ok": True, "result": value})
        except (TypeError, ValueError):
            _reply({"call_id": cid, "ok": False, "error": "bad_shape",
                    "detail": "result is not JSON-serializable"})

main()
)PYRUNNER";

ExecErrorKind kind_from_string(const std::string& s) {
    if (s == "syntax") return ExecErrorKind::Syntax;
    if (s == "runtime") return ExecErrorKind::Runtime;
    if (s == "timeout") return ExecErrorKind::Timeout;
    if (s == "bad_shape") return ExecErrorKind::BadShape;
    return ExecErrorKind::Protocol;
}

void ignore_sigpipe_once() {
    static std::once_flag flag;
    std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

}  // namespace

std::optional<std::string> scan_denied_capability(const std::string& code) {
    static const std::regex import_re(
        R"((^|[^\w.])(import|from)\s+(os|sys|subprocess|socket|shutil|pathlib|urllib|requests|ctypes|multiprocessing|importlib|builtins|pickle|http|ftplib|telnetlib|signal|resource|threading|asyncio|io|tempfile|glob)\b)");
    static const std::regex call_re(
        R"((^|[^\w.])(open|eval|exec|compile|breakpoint|input)\s*\()");
    static const std::regex dunder_re(R"(__import__|__builtins__|__subclasses__|__globals__)");

    std::smatch m;
    if (std::regex_search(code, m, import_re)) return m[3].str();
    if (std::regex_search(code, m, call_re)) return m[2].str();
    if (std::regex_search(code, m, dunder_re)) return m[0].str();
    return std::nullopt;
}

ExecSession::ExecSession(SandboxPolicy policy) : policy_(std::move(policy)) {
    ignore_sigpipe_once();
}

ExecSession::~ExecSession() { terminate(); }

ExecSession::ExecSession(ExecSession&& other) noexcept
    : policy_(std::move(other.policy_)),
      pid_(other.pid_),
      to_child_(other.to_child_),
      from_child_(other.from_child_),
      buffer_(std::move(other.buffer_)),
      function_name_(std::move(other.function_name_)),
      elapsed_(other.elapsed_) {
    other.pid_ = -1;
    other.to_child_ = -1;
    other.from_child_ = -1;
}

ExecSession& ExecSession::operator=(ExecSession&& other) noexcept {
    if (this != &other) {
        terminate();
        policy_ = std::move(other.policy_);
        pid_ = other.pid_;
        to_child_ = other.to_child_;
        from_child_ = other.from_child_;
        buffer_ = std::move(other.buffer_);
        function_name_ = std::move(other.function_name_);
        elapsed_ = other.elapsed_;
        other.pid_ = -1;
        other.to_child_ = -1;
        other.from_child_ = -1;
    }
    return *this;
}

bool ExecSession::spawn() {
    int in_pipe[2];   // parent -> child
    int out_pipe[2];  // child -> parent
    if (::pipe(in_pipe) != 0) return false;
    if (::pipe(out_pipe) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        return false;
    }

    const pid_t pid = ::fork();
    if (pid < 0) {
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
        return false;
    }
    if (pid == 0) {
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        const int devnull = ::open("/dev/null", O_WRONLY);
        if (devnull >= 0) ::dup2(devnull, STDERR_FILENO);
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);

        if (policy_.memory_limit > 0) {
            rlimit lim{policy_.memory_limit, policy_.memory_limit};
            ::setrlimit(RLIMIT_AS, &lim);
        }
        const char* argv[] = {policy_.interpreter.c_str(), "-E", "-B", "-u",
                              "-c", kRunnerSource, nullptr};
        ::execvp(argv[0], const_cast<char* const*>(argv));
        ::_exit(127);
    }

    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    pid_ = pid;
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    buffer_.clear();
    return true;
}

void ExecSession::terminate() {
    if (pid_ > 0) {
        ::kill(pid_, SIGKILL);
        int status = 0;
        ::waitpid(pid_, &status, 0);
        pid_ = -1;
    }
    if (to_child_ >= 0) {
        ::close(to_child_);
        to_child_ = -1;
    }
    if (from_child_ >= 0) {
        ::close(from_child_);
        from_child_ = -1;
    }
}

bool ExecSession::write_line(const std::string& line) {
    std::string data = line;
    data.push_back('\n');
    std::size_t off = 0;
    while (off < data.size()) {
        const ssize_t n = ::write(to_child_, data.data() + off, data.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        off += static_cast<std::size_t>(n);
    }
    return true;
}

std::optional<std::string> ExecSession::read_line(std::chrono::milliseconds limit) {
    const auto deadline = Clock::now() + limit;
    for (;;) {
        const std::size_t nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        const auto remaining =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
        if (remaining.count() <= 0) return std::nullopt;

        pollfd pfd{from_child_, POLLIN, 0};
        const int pr = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
        if (pr < 0) {
            if (errno == EINTR) continue;
            return std::nullopt;
        }
        if (pr == 0) return std::nullopt;

        char chunk[4096];
        const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
        if (n <= 0) {
            if (n < 0 && errno == EINTR) continue;
            return std::nullopt;  // child closed its end
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

ExecResult ExecSession::load(const std::string& code, const std::string& function_name,
                             int arity) {
    ExecResult res;
    const auto t0 = Clock::now();
    auto finish = [&](ExecResult r) {
        r.wall_time = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0);
        elapsed_ += r.wall_time;
        return r;
    };

    if (auto denied = scan_denied_capability(code)) {
        res.error_kind = ExecErrorKind::Protocol;
        res.detail = "denied capability: " + *denied;
        return finish(res);
    }
    if (alive()) terminate();
    if (!spawn()) {
        res.error_kind = ExecErrorKind::Protocol;
        res.detail = "failed to spawn interpreter";
        return finish(res);
    }
    function_name_ = function_name;

    json setup = {
        {"code", code},
        {"fn", function_name},
        {"arity", arity},
        {"allowed_imports", policy_.allowed_imports},
    };
    if (!write_line(setup.dump())) {
        terminate();
        res.error_kind = ExecErrorKind::Protocol;
        res.detail = "failed to send program to interpreter";
        return finish(res);
    }
    const auto reply = read_line(policy_.time_limit + policy_.grace);
    if (!reply) {
        terminate();
        res.error_kind = ExecErrorKind::Timeout;
        res.detail = "no response while loading program";
        return finish(res);
    }
    const json parsed = json::parse(*reply, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("ok")) {
        terminate();
        res.error_kind = ExecErrorKind::Protocol;
        res.detail = "malformed interpreter reply";
        return finish(res);
    }
    if (!parsed["ok"].get<bool>()) {
        terminate();
        res.error_kind = kind_from_string(parsed.value("error", "protocol"));
        res.detail = parsed.value("detail", "");
        return finish(res);
    }
    res.ok = true;
    return finish(res);
}

ExecResult ExecSession::invoke(const ExecRequest& req) {
    ExecResult res;
    const auto t0 = Clock::now();
    auto finish = [&](ExecResult r) {
        r.wall_time = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0);
        elapsed_ += r.wall_time;
        return r;
    };

    if (!alive()) {
        res.error_kind = ExecErrorKind::Protocol;
        res.detail = "session is not alive";
        return finish(res);
    }

    json msg = {
        {"call_id", req.call_id},
        {"fn", req.function_name.empty() ? function_name_ : req.function_name},
        {"args", req.args},
    };
    if (!write_line(msg.dump())) {
        terminate();
        res.error_kind = ExecErrorKind::Protocol;
        res.detail = "failed to send request";
        return finish(res);
    }
    const auto reply = read_line(policy_.time_limit + policy_.grace);
    if (!reply) {
        terminate();
        res.error_kind = ExecErrorKind::Timeout;
        res.detail = "call exceeded time limit";
        return finish(res);
    }
    const json parsed = json::parse(*reply, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("ok")) {
        terminate();
        res.error_kind = ExecErrorKind::Protocol;
        res.detail = "malformed interpreter reply";
        return finish(res);
    }
    if (!parsed["ok"].get<bool>()) {
        res.error_kind = kind_from_string(parsed.value("error", "protocol"));
        res.detail = parsed.value("detail", "");
        return finish(res);
    }
    if (!parsed.contains("result")) {
        res.error_kind = ExecErrorKind::Protocol;
        res.detail = "reply missing result";
        return finish(res);
    }
    if (req.expected_length &&
        (!parsed["result"].is_array() || parsed["result"].size() != *req.expected_length)) {
        res.error_kind = ExecErrorKind::BadShape;
        res.detail = "expected a list of length " + std::to_string(*req.expected_length);
        return finish(res);
    }
    res.ok = true;
    res.result = parsed["result"];
    return finish(res);
}

}  // namespace hifo
