import threading
import queue

from . import const
from . import utils

class AsyncSessionType:
    """ Runs callables on at most 'max_sessions' worker threads; the rest
    wait in a queue. An exception raised by a session is kept and re-raised
    by query_result. """
    def __init__(self, max_sessions=1):
        self.session_idx = dict()
        self.running_sessions = 0
        self.max_sessions = max(1, int(max_sessions))
        self.pend_session_queue = queue.Queue()
        self.lock = threading.Lock()
        self.done = threading.Condition(self.lock)
        return
    def __session_thread(self, session_id, func, args, kwargs):
        try:
            ret_res = (True, func(*args, **kwargs), None)
        except Exception as err:
            ret_res = (True, None, err)
        # Creating new session in case some are pending
        self.lock.acquire()
        self.session_idx[session_id] = ret_res
        self.running_sessions -= 1
        if not self.pend_session_queue.empty():
            self.__spawn_session(self.pend_session_queue.get())
        self.done.notify_all()
        self.lock.release()
        return
    def __spawn_session(self, tup):
        self.running_sessions += 1
        threading.Thread(target=self.__session_thread, args=tup, daemon=True).start()
        return
    def create_session(self, func, *args, **kwargs):
        self.lock.acquire()
        session_id = utils.get_new_uuid(None, self.session_idx)
        self.session_idx[session_id] = (False, None, None)
        if self.running_sessions < self.max_sessions:
            self.__spawn_session((session_id, func, args, kwargs))
        else:
            self.pend_session_queue.put((session_id, func, args, kwargs))
        self.lock.release()
        return session_id
    def query_state(self, session_id):
        self.lock.acquire()
        try:
            if session_id not in self.session_idx:
                raise KeyError('Session ID does not exist')
            ret_val = self.session_idx[session_id][0]
        finally:
            self.lock.release()
        return ret_val
    def wait(self, session_id):
        self.lock.acquire()
        try:
            if session_id not in self.session_idx:
                raise KeyError('Session ID does not exist')
            while not self.session_idx[session_id][0]:
                self.done.wait()
        finally:
            self.lock.release()
        return
    def query_result(self, session_id):
        if not self.query_state(session_id):
            raise KeyError('Session not yet completed')
        self.lock.acquire()
        _, ret_val, err = self.session_idx.pop(session_id)
        self.lock.release()
        if err is not None:
            raise err
        return ret_val
    pass

AsyncSession = AsyncSessionType(const.get_const('jobs'))

def set_max_sessions(count):
    """ Sets how many sessions run at once; sessions already running finish
    undisturbed. """
    AsyncSession.lock.acquire()
    AsyncSession.max_sessions = max(1, int(count))
    AsyncSession.lock.release()
    return

def create_session(function, *args, **kwargs):
    """ Creates a multithreaded session and returns the session ID. """
    return AsyncSession.create_session(function, *args, **kwargs)

def completed(session_id):
    """ Queries asynchronously the state of the session, returns boolean. """
    return AsyncSession.query_state(session_id)

def wait(session_id):
    """ Blocks until the session has finished. """
    return AsyncSession.wait(session_id)

def get_result(session_id):
    """ Queries asynchronously the result of the session, re-raising its
    exception if it failed. """
    return AsyncSession.query_result(session_id)

def map_sessions(function, items, jobs=None):
    """ Applies 'function' to every item on a pool of 'jobs' workers and
    returns the results in item order. Every session is waited for and
    released before the first failure, in item order, is re-raised. """
    if jobs is not None:
        set_max_sessions(jobs)
    sessions = [create_session(function, item) for item in items]
    results = list()
    first_error = None
    for session_id in sessions:
        wait(session_id)
        try:
            results.append(get_result(session_id))
        except Exception as err:
            if first_error is None:
                first_error = err
    if first_error is not None:
        raise first_error
    return results
