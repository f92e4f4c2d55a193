from __future__ import annotations

import threading
import time

import pytest

from faasforge.interpreter import FunctionInstance, RuntimeFault
from faasforge.runtime import DispatchError, InstancePool, LocalDispatcher, execute_program, pooled_invoke
from faasforge.syntax import SourceModule
from faasforge.transformer import transform_program

from helpers import PROGRAMS, fib_memo, run_direct, run_local, transform

COUNTING = ("calls = 0\n\ndef lambda_handler(event, context):\n    global calls\n    calls += 1\n"
            "    return {\"calls\": calls}\n")


def counting_pool(cap=8):
    return InstancePool(lambda: FunctionInstance("c", COUNTING), cap)


def test_pool_reuses_warm_instance():
    pool = counting_pool()
    assert pooled_invoke(pool, {}, 5)["calls"] == 1
    assert pooled_invoke(pool, {}, 5)["calls"] == 2
    assert pool.births == 1


def test_fresh_request_births_new_instance():
    pool = counting_pool()
    pooled_invoke(pool, {}, 5)
    assert pooled_invoke(pool, {}, 5, fresh=True)["calls"] == 1
    assert pool.births == 2


def test_idle_instances_reused_least_recently_used_first():
    pool = counting_pool()
    a = pool.acquire()
    b = pool.acquire()
    pool.release(a)
    pool.release(b)
    assert pool.acquire() is a


def test_pool_cap_makes_requests_wait_in_order():
    pool = counting_pool(cap=1)
    held = pool.acquire()
    order = []

    def worker(tag):
        inst = pool.acquire()
        order.append(tag)
        pool.release(inst)

    threads = []
    for tag in range(3):
        th = threading.Thread(target=worker, args=(tag,))
        th.start()
        threads.append(th)
        time.sleep(0.05)
    assert order == [] and pool.total == 1
    pool.release(held)
    for th in threads:
        th.join(5)
    assert order == [0, 1, 2]
    assert pool.births == 1


def test_discard_drops_idle_instances():
    pool = counting_pool()
    pooled_invoke(pool, {}, 5)
    assert pool.idle == 1
    pool.discard()
    assert pool.idle == 0


def test_local_dispatcher_counts_and_unknown_unit():
    result, dispatcher = run_local("fib")
    assert result.stdout == f"{fib_memo(10)}\n"
    assert dispatcher.counts["fib_fib"] == 2 * fib_memo(10) - 1
    with pytest.raises(DispatchError):
        dispatcher.invoke("nope", {})


@pytest.mark.parametrize("name", sorted(PROGRAMS))
def test_local_mode_matches_direct(name):
    direct = run_direct(name)
    local, _ = run_local(name)
    assert local.stdout == direct.stdout
    assert local.return_value == direct.return_value


def test_recursion_deeper_than_pool_cap():
    # nested invocations bypass the cap instead of deadlocking
    text = "def down(k):\n    if k == 0:\n        return 0\n    return 1 + down(k - 1)\n\n" \
           "if __name__ == \"__main__\":\n    print(down(40))\n"
    result = transform_program(SourceModule.from_text("deep", text))
    out = execute_program(result, LocalDispatcher(result.units, pool_size=2))
    assert out.stdout == "40\n"


def test_error_type_survives_nested_invocations():
    result = transform("greet")
    with pytest.raises(RuntimeFault) as info:
        execute_program(result, LocalDispatcher(result.units), ["2"])
    assert "EOFError" in str(info.value)


def test_unit_fault_surfaces_at_call_site():
    text = "def bad(x):\n    return 1 / x\n\nif __name__ == \"__main__\":\n    print(bad(0))\n"
    result = transform_program(SourceModule.from_text("oops", text))
    with pytest.raises(RuntimeFault) as info:
        execute_program(result, LocalDispatcher(result.units))
    assert "ZeroDivisionError" in str(info.value)


def test_stdin_shared_between_client_and_units():
    result, _ = run_local("greet")
    assert result.stdout == run_direct("greet").stdout
    assert result.stdout.startswith("count? name? hello zed 0\n")
