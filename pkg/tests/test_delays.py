import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from delayoco.delays import (
    ANONYMOUS,
    HIGH_DELAY_PATTERN,
    LOW_DELAY_PATTERN,
    STAMPED,
    DelaySchedule,
    FeedbackBuffer,
    Stamped,
    arrival_sets,
    parse_schedule,
    write_schedule_file,
)
from delayoco.errors import ProtocolError, ScheduleError

schedules = st.lists(st.integers(1, 12), min_size=1, max_size=60).map(lambda ds: DelaySchedule(tuple(ds)))


def brute_force_arrivals(delays, t):
    return [k for k in range(1, len(delays) + 1) if k + delays[k - 1] - 1 == t]


def test_unit_delays_reduce_to_standard_rounds():
    arr = arrival_sets(DelaySchedule.unit(3), 3)
    assert [arr[t] for t in (1, 2, 3)] == [(1,), (2,), (3,)]
    assert arr.s == 1


def test_small_pattern_arrivals():
    delays = (2, 3, 2, 1)
    arr = arrival_sets(DelaySchedule(delays), 4)
    # k + d_k - 1 = 2, 4, 4, 4
    assert [arr[t] for t in (1, 2, 3, 4)] == [(), (1,), (), (2, 3, 4)]
    for t in range(1, 4 + max(delays)):
        assert list(arr[t]) == brute_force_arrivals(delays, t)
    assert arr.s == 2


def test_low_delay_experiment_schedule():
    sched = DelaySchedule.periodic(LOW_DELAY_PATTERN, 1000)
    arr = arrival_sets(sched, 1000)
    assert arr.sizes().sum() == 1000
    assert arr.sizes().max() <= 4
    assert sched.max_delay == 4
    assert sched.delays[:8] == (2, 3, 2, 1, 4, 1, 3, 2)


def test_high_delay_schedule_constants():
    sched = DelaySchedule.periodic(HIGH_DELAY_PATTERN, 1000)
    assert sched.max_delay == 40
    assert sched.total_delay == sum(HIGH_DELAY_PATTERN[k % 7] for k in range(1000))


@pytest.mark.parametrize("delays", [(0,), (1, 2, 0), (3, -1)])
def test_bad_delays_rejected(delays):
    with pytest.raises(ScheduleError):
        DelaySchedule(delays)


def test_schedule_length_must_match_T():
    with pytest.raises(ScheduleError):
        arrival_sets(DelaySchedule.unit(5), 4)


@given(schedules)
def test_arrival_set_invariants(sched):
    arr = arrival_sets(sched)
    sizes = arr.sizes()
    assert sizes.sum() == sched.T
    assert sizes.max() <= sched.max_delay
    assert arr.s <= sched.max_delay
    assert len(arr[arr.s]) > 0 and all(len(arr[t]) == 0 for t in range(1, arr.s))
    for t in range(1, arr.last_round + 1):
        assert all(k + sched.delay(k) - 1 == t for k in arr[t])


def test_enqueue_deliver_examples():
    buf = FeedbackBuffer()
    buf.enqueue(1, 2, "g")
    assert buf.deliver(1) == []
    assert buf.deliver(2) == ["g"]

    buf = FeedbackBuffer()
    buf.enqueue(1, 1, "a")
    buf.deliver(1)
    buf.deliver(2)
    buf.enqueue(3, 1, "g")
    assert buf.deliver(3) == ["g"]


def test_exact_round_delivery():
    buf = FeedbackBuffer()
    buf.enqueue(2, 4, "x")
    buf.enqueue(4, 2, "y")
    assert buf.deliver(4) == []
    assert buf.deliver(5) == ["x", "y"]
    assert buf.deliver(6) == []
    assert FeedbackBuffer().deliver(7) == []


def test_low_delay_round_four_delivery():
    sched = DelaySchedule.periodic(LOW_DELAY_PATTERN, 7)
    buf = FeedbackBuffer(STAMPED)
    got = {}
    for t in range(1, 5):
        buf.enqueue(t, sched.delay(t), f"p{t}")
        got[t] = buf.deliver(t)
    # d_2 = 3, d_3 = 2 and d_4 = 1 all land on round 4
    assert [item.round for item in got[4]] == brute_force_arrivals(sched.delays, 4) == [2, 3, 4]


def test_out_of_order_delivery_is_protocol_error():
    buf = FeedbackBuffer()
    buf.deliver(3)
    with pytest.raises(ProtocolError):
        buf.deliver(3)
    with pytest.raises(ProtocolError):
        buf.deliver(2)


def test_skipping_a_round_with_pending_feedback_is_protocol_error():
    buf = FeedbackBuffer()
    buf.enqueue(1, 2, "g")
    with pytest.raises(ProtocolError):
        buf.deliver(3)


def test_enqueue_into_delivered_round_is_protocol_error():
    buf = FeedbackBuffer()
    buf.deliver(1)
    buf.deliver(2)
    with pytest.raises(ProtocolError):
        buf.enqueue(1, 2, "late")


def test_anonymous_mode_hides_stamps():
    buf = FeedbackBuffer(ANONYMOUS)
    payload = np.array([1.0, 2.0])
    buf.enqueue(5, 1, payload)
    (item,) = buf.deliver(5)
    assert not isinstance(item, Stamped)
    assert item is payload


def test_stamped_mode_records_query_round():
    buf = FeedbackBuffer(STAMPED)
    buf.enqueue(3, 3, "a")
    buf.enqueue(5, 1, "b")
    buf.enqueue(4, 2, "c")
    for t in range(1, 5):
        assert buf.deliver(t) == []
    out = buf.deliver(5)
    assert [(s.round, s.payload) for s in out] == [(3, "a"), (4, "c"), (5, "b")]


@given(schedules, st.sampled_from([ANONYMOUS, STAMPED]))
def test_buffer_conservation_and_flush(sched, mode):
    buf = FeedbackBuffer(mode)
    delivered = []
    for t in range(1, sched.T + 1):
        buf.enqueue(t, sched.delay(t), t)
        delivered.extend(buf.deliver(t))
    delivered.extend(buf.flush(sched.T + 1, sched.T + sched.max_delay - 1))
    assert len(buf) == 0
    assert len(delivered) == sched.T
    if mode == STAMPED:
        assert all(item.round == item.payload for item in delivered)
        assert sorted(item.round for item in delivered) == list(range(1, sched.T + 1))


def test_parse_inline_forms():
    assert parse_schedule("periodic:2,3,2,1,4,1,3", 10) == DelaySchedule.periodic(LOW_DELAY_PATTERN, 10)
    assert parse_schedule("constant:4", 5).delays == (4,) * 5
    assert parse_schedule("unit", 3).delays == (1, 1, 1)


def test_schedule_file_agrees_with_inline(tmp_path):
    inline = parse_schedule("periodic:20,30,20,10,40,10,30", 100)
    path = tmp_path / "delays.txt"
    write_schedule_file(inline, path)
    assert parse_schedule(str(path), 100).delays == inline.delays


@pytest.mark.parametrize("text", ["periodic:2,x", "periodic:", "constant:0", "periodic:2,0,1", "nonsense", "/no/such/file"])
def test_invalid_patterns(text):
    with pytest.raises(ScheduleError):
        parse_schedule(text, 10)


def test_schedule_file_wrong_length(tmp_path):
    path = tmp_path / "short.txt"
    path.write_text("1\n2\n", encoding="utf-8")
    with pytest.raises(ScheduleError):
        parse_schedule(str(path), 3)
