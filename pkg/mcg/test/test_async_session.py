import threading
import time

import pytest

from mcg import async_session


def test_map_sessions_keeps_item_order():
    def slow_square(x):
        time.sleep(0.01 * (5 - x))
        return x * x
    assert async_session.map_sessions(slow_square, range(5), jobs=3) == [0, 1, 4, 9, 16]


def test_map_sessions_reraises():
    def explode(x):
        if x == 2:
            raise ValueError('item %d' % x)
        return x
    with pytest.raises(ValueError, match='item 2'):
        async_session.map_sessions(explode, range(4), jobs=2)


def test_map_sessions_finishes_every_item_before_raising():
    finished = list()
    def explode_early(x):
        if x == 0:
            raise ValueError('first')
        if x == 3:
            raise RuntimeError('later')
        time.sleep(0.02)
        finished.append(x)
        return x
    before = len(async_session.AsyncSession.session_idx)
    with pytest.raises(ValueError, match='first'):
        async_session.map_sessions(explode_early, range(6), jobs=2)
    assert sorted(finished) == [1, 2, 4, 5]
    assert len(async_session.AsyncSession.session_idx) == before


def test_sessions_never_exceed_the_limit():
    lock = threading.Lock()
    state = {'running': 0, 'peak': 0}
    def work(_):
        with lock:
            state['running'] += 1
            state['peak'] = max(state['peak'], state['running'])
        time.sleep(0.01)
        with lock:
            state['running'] -= 1
        return _
    async_session.map_sessions(work, range(12), jobs=2)
    assert state['peak'] <= 2


def test_session_lifecycle():
    session_id = async_session.create_session(lambda a, b=0: a + b, 2, b=3)
    async_session.wait(session_id)
    assert async_session.completed(session_id)
    assert async_session.get_result(session_id) == 5
    with pytest.raises(KeyError):
        async_session.completed(session_id)
