#include <doctest.h>

#include <filesystem>
#include <string>

#include "hifo/executor.hpp"

using namespace hifo;
using nlohmann::json;

TEST_CASE("capability scan flags forbidden modules, calls and dunders") {
    CHECK(scan_denied_capability("import os") == "os");
    CHECK(scan_denied_capability("from os import path") == "os");
    CHECK(scan_denied_capability("import os.path") == "os");
    CHECK(scan_denied_capability("import socket, math") == "socket");
    CHECK(scan_denied_capability("x = open('f')") == "open");
    CHECK(scan_denied_capability("eval('1+1')") == "eval");
    CHECK(scan_denied_capability("exec(code)") == "exec");
    CHECK(scan_denied_capability("__import__('os')") == "__import__");
    CHECK(scan_denied_capability("cls.__subclasses__()") == "__subclasses__");
    CHECK(scan_denied_capability("f.__globals__['x']") == "__globals__");
    CHECK(scan_denied_capability("import subprocess") == "subprocess");
    CHECK(scan_denied_capability("import urllib.request") == "urllib");
    CHECK(scan_denied_capability("import threading") == "threading");

    SUBCASE("innocent code passes, including lookalike names") {
        CHECK(!scan_denied_capability("import math\ndef f(x):\n    return math.sqrt(x)"));
        CHECK(!scan_denied_capability("import numpy as np"));
        CHECK(!scan_denied_capability("def f(ossify):\n    return ossify"));
        CHECK(!scan_denied_capability("opened = 1\nreopen = 2"));  // not a call
        CHECK(!scan_denied_capability("x = Popen_like"));
        CHECK(!scan_denied_capability("evaluation = eval_score"));  // eval not called
    }
}

TEST_CASE("executor loads code and answers calls") {
    ExecSession session;
    const ExecResult loaded = session.load(
        "def score(item, bins):\n"
        "    return [-(b - item) for b in bins]\n",
        "score", 2);
    REQUIRE(loaded.ok);
    CHECK(session.alive());

    ExecRequest req;
    req.function_name = "score";
    req.args = json::array({30, json::array({40, 60})});
    req.expected_length = 2;
    const ExecResult r = session.invoke(req);
    REQUIRE(r.ok);
    CHECK(r.result == json::array({-10.0, -30.0}));

    SUBCASE("expected_length mismatches are shape errors") {
        ExecRequest bad = req;
        bad.expected_length = 3;
        const ExecResult r2 = session.invoke(bad);
        CHECK_FALSE(r2.ok);
        CHECK(r2.error_kind == ExecErrorKind::BadShape);
    }

    SUBCASE("the session tracks a perpetual total budget") {
        CHECK(session.elapsed_total().count() >= 0);
        CHECK_FALSE(session.budget_exhausted());
    }
}

TEST_CASE("executor reports syntax errors at load") {
    ExecSession session;
    const ExecResult r = session.load("def broken(:\n", "broken", 1);
    CHECK_FALSE(r.ok);
    CHECK(r.error_kind == ExecErrorKind::Syntax);
    CHECK_FALSE(session.alive());
}

TEST_CASE("executor rejects a missing or mis-shaped function") {
    SUBCASE("function not defined") {
        ExecSession session;
        const ExecResult r = session.load("def other(x):\n    return x\n", "score", 2);
        CHECK_FALSE(r.ok);
        CHECK(r.error_kind == ExecErrorKind::Protocol);
        CHECK(r.detail.find("score") != std::string::npos);
    }
    SUBCASE("wrong arity") {
        ExecSession session;
        const ExecResult r = session.load("def score(item):\n    return [item]\n", "score", 2);
        CHECK_FALSE(r.ok);
        CHECK(r.error_kind == ExecErrorKind::Protocol);
    }
    SUBCASE("arity check can be skipped") {
        ExecSession session;
        const ExecResult r = session.load("def score(item):\n    return [item]\n", "score", -1);
        CHECK(r.ok);
    }
}

TEST_CASE("executor surfaces runtime errors without dying") {
    ExecSession session;
    REQUIRE(session.load("def f(x):\n    return 1 / x\n", "f", 1).ok);

    ExecRequest req;
    req.function_name = "f";
    req.args = json::array({0});
    const ExecResult r = session.invoke(req);
    CHECK_FALSE(r.ok);
    CHECK(r.error_kind == ExecErrorKind::Runtime);
    CHECK(r.detail.find("ZeroDivisionError") != std::string::npos);

    // The session survives a candidate exception.
    req.args = json::array({2});
    const ExecResult ok = session.invoke(req);
    REQUIRE(ok.ok);
    CHECK(ok.result == 0.5);
}

TEST_CASE("executor kills overrunning calls") {
    SandboxPolicy policy;
    policy.time_limit = std::chrono::milliseconds(300);
    policy.grace = std::chrono::milliseconds(200);
    ExecSession session(policy);
    REQUIRE(session.load("def f(x):\n    while True:\n        pass\n", "f", 1).ok);

    ExecRequest req;
    req.function_name = "f";
    req.args = json::array({1});
    const ExecResult r = session.invoke(req);
    CHECK_FALSE(r.ok);
    CHECK(r.error_kind == ExecErrorKind::Timeout);
    CHECK_FALSE(session.alive());
}

TEST_CASE("non-finite and malformed results are shape errors") {
    SUBCASE("NaN result") {
        ExecSession session;
        REQUIRE(session.load("def f(x):\n    return float('nan')\n", "f", 1).ok);
        ExecRequest req;
        req.function_name = "f";
        req.args = json::array({1});
        const ExecResult r = session.invoke(req);
        CHECK_FALSE(r.ok);
        CHECK(r.error_kind == ExecErrorKind::BadShape);
    }
    SUBCASE("infinity inside a list") {
        ExecSession session;
        REQUIRE(session.load("def f(x):\n    return [1.0, float('inf')]\n", "f", 1).ok);
        ExecRequest req;
        req.function_name = "f";
        req.args = json::array({1});
        req.expected_length = 2;
        const ExecResult r = session.invoke(req);
        CHECK_FALSE(r.ok);
        CHECK(r.error_kind == ExecErrorKind::BadShape);
    }
    SUBCASE("unserializable return value") {
        ExecSession session;
        REQUIRE(session.load("def f(x):\n    return object()\n", "f", 1).ok);
        ExecRequest req;
        req.function_name = "f";
        req.args = json::array({1});
        const ExecResult r = session.invoke(req);
        CHECK_FALSE(r.ok);
        CHECK(r.error_kind == ExecErrorKind::BadShape);
    }
}

TEST_CASE("numpy results normalize to plain JSON") {
    ExecSession session;
    const ExecResult loaded = session.load(
        "import numpy as np\n"
        "def f(x):\n"
        "    return np.array([x, x + 1.5])\n",
        "f", 1);
    REQUIRE(loaded.ok);
    ExecRequest req;
    req.function_name = "f";
    req.args = json::array({1.0});
    req.expected_length = 2;
    const ExecResult r = session.invoke(req);
    REQUIRE(r.ok);
    CHECK(r.result == json::array({1.0, 2.5}));
}

TEST_CASE("sandbox blocks filesystem, network, env and dynamic import") {
    namespace fs = std::filesystem;
    const fs::path sentinel = fs::temp_directory_path() / "hifo_sandbox_sentinel.txt";
    fs::remove(sentinel);

    SUBCASE("file write is stopped before execution") {
        ExecSession session;
        const std::string code = "def f(x):\n"
                                 "    with open('" + sentinel.string() + "', 'w') as fh:\n"
                                 "        fh.write('leaked')\n"
                                 "    return x\n";
        const ExecResult r = session.load(code, "f", 1);
        CHECK_FALSE(r.ok);
        CHECK(r.error_kind == ExecErrorKind::Protocol);
        CHECK(r.detail.find("open") != std::string::npos);
        CHECK_FALSE(fs::exists(sentinel));
    }

    SUBCASE("network modules are stopped by the scan") {
        ExecSession session;
        const ExecResult r = session.load(
            "import socket\n"
            "def f(x):\n"
            "    return x\n",
            "f", 1);
        CHECK_FALSE(r.ok);
        CHECK(r.detail.find("socket") != std::string::npos);
    }

    SUBCASE("modules outside the allowlist fail at import time") {
        // `json` passes the static scan but is not an allowed import.
        ExecSession session;
        const ExecResult r = session.load(
            "import json\n"
            "def f(x):\n"
            "    return x\n",
            "f", 1);
        CHECK_FALSE(r.ok);
        CHECK(r.error_kind == ExecErrorKind::Runtime);
        CHECK(r.detail.find("json") != std::string::npos);
    }

    SUBCASE("file builtins are stripped even when the scan sees nothing") {
        // A bare name reference dodges the call scan; the runtime builtin
        // table must not contain open anyway.
        ExecSession session;
        const ExecResult loaded = session.load(
            "def f(x):\n"
            "    try:\n"
            "        probe = open\n"
            "    except NameError:\n"
            "        return 0\n"
            "    return 1\n",
            "f", 1);
        REQUIRE(loaded.ok);
        ExecRequest req;
        req.function_name = "f";
        req.args = json::array({1});
        const ExecResult r = session.invoke(req);
        REQUIRE(r.ok);
        CHECK(r.result == 0);
    }

    SUBCASE("environment access dies with the os module") {
        ExecSession session;
        const ExecResult r = session.load(
            "from os import environ\n"
            "def f(x):\n"
            "    return environ.get('PATH')\n",
            "f", 1);
        CHECK_FALSE(r.ok);
    }

    fs::remove(sentinel);
}

TEST_CASE("allowed imports work inside the sandbox") {
    ExecSession session;
    const ExecResult loaded = session.load(
        "import math\n"
        "import heapq\n"
        "from collections import Counter\n"
        "def f(xs):\n"
        "    heap = list(xs)\n"
        "    heapq.heapify(heap)\n"
        "    c = Counter(xs)\n"
        "    return math.floor(heap[0]) + c[heap[0]]\n",
        "f", 1);
    REQUIRE(loaded.ok);
    ExecRequest req;
    req.function_name = "f";
    req.args = json::array({json::array({3, 1, 2, 1})});
    const ExecResult r = session.invoke(req);
    REQUIRE(r.ok);
    CHECK(r.result == 3);  // floor(1) + count(1) = 1 + 2
}

TEST_CASE("terminate is idempotent and ends the session") {
    ExecSession session;
    REQUIRE(session.load("def f(x):\n    return x\n", "f", 1).ok);
    CHECK(session.alive());
    session.terminate();
    CHECK_FALSE(session.alive());
    session.terminate();

    ExecRequest req;
    req.function_name = "f";
    req.args = json::array({1});
    const ExecResult r = session.invoke(req);
    CHECK_FALSE(r.ok);
    CHECK(r.error_kind == ExecErrorKind::Protocol);
}
