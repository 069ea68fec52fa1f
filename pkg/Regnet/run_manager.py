import itertools
import logging
import os
import time
import uuid
from queue import Empty, PriorityQueue
from threading import Thread
from typing import Dict

MAX_CONCURRENT_RUNS = 'MAX_CONCURRENT_RUNS'
DEFAULT_MAX_CONCURRENT_RUNS = 4


class Run(Thread):
    CREATED, RUNNING, ERROR, TERMINATED = 0, 1, 2, 3

    @staticmethod
    def status_to_string(s):
        return {i: v for i, v in enumerate(['CREATED', 'RUNNING', 'ERROR', 'TERMINATED'])}[s]

    def __init__(self, id, label, target, args, status_update_delegate, logger=logging.getLogger()):
        super().__init__()
        self.__id = id
        self.__label = label
        self.__target = target
        self.__args = args
        self.__status = Run.CREATED
        self.__status_message = 'No message'
        self.__result = None
        self.__error = None
        self.__created_at = time.time()
        self.__delegate = status_update_delegate
        self.__logger = logger

    def get_id(self):
        return self.__id

    def get_label(self):
        return self.__label

    def get_status(self):
        return self.__status

    def get_status_string(self):
        return f'{Run.status_to_string(self.__status)} ({self.__status_message})'

    def get_result(self):
        return self.__result

    def get_error(self):
        return self.__error

    def set_status(self, s, message=None):
        self.__status = s
        self.__status_message = message
        self.__delegate.run_status_changed(self)

    def run(self):
        try:
            self.__logger.info(f'Starting run {self}')
            self.set_status(Run.RUNNING)
            self.__result = self.__target(*self.__args)
            self.set_status(Run.TERMINATED)
        except Exception as e:
            self.__logger.error(f'{self} errored out: {e}')
            self.__error = e
            self.set_status(Run.ERROR, message=str(e))

    def __repr__(self) -> str:
        return f'<Run:{self.__label}_{self.__created_at}>'

    def to_dict(self):
        return {
            'id': self.get_id(),
            'label': self.get_label(),
            'status': self.get_status(),
            'status_str': self.get_status_string()
        }


class RunManager():
    """Runs independent jobs on at most max_concurrent_runs threads.

    Jobs leave the queue in priority order; wait() blocks until every job
    scheduled so far has finished.
    """

    def __init__(self, max_concurrent_runs=DEFAULT_MAX_CONCURRENT_RUNS, logger=logging.getLogger()):
        self.__max_concurrent_runs = max(1, int(max_concurrent_runs))
        self.__logger = logger
        self.__run_queue = PriorityQueue()
        self.__sequence = itertools.count()
        self.__active_runs: Dict[str, Run] = {}
        self.__old_runs: Dict[str, Run] = {}
        self.__closing = False
        self.__monitor_thread = Thread(target=self.monitor)
        self.__monitor_thread.name = 'Run monitor'
        self.__monitor_thread.daemon = True
        self.__monitor_thread.start()

    @classmethod
    def from_env(cls, logger=logging.getLogger()):
        return cls(int(os.environ.get(MAX_CONCURRENT_RUNS, DEFAULT_MAX_CONCURRENT_RUNS)), logger=logger)

    def run_status_changed(self, run):
        self.__logger.debug(f'{run} -> {run.get_status_string()}')

    def schedule_run(self, priority, label, target, *args):
        if self.__closing:
            raise RuntimeError('RunManager no longer accepts runs')
        _id = str(uuid.uuid4())
        self.__logger.info(f'Enqueueing run {label} with priority {priority}')
        self.__run_queue.put((priority, next(self.__sequence), _id, label, target, args))
        return _id

    def __start_run(self, _id, label, target, args):
        r = Run(_id, label, target, args, self, logger=self.__logger)
        r.daemon = True
        r.name = f'Run_{label}'
        self.__active_runs[_id] = r
        r.start()

    def __dequeue_runs(self):
        while len(self.__active_runs) < self.__max_concurrent_runs:
            try:
                _, _, _id, label, target, args = self.__run_queue.get_nowait()
            except Empty:
                return
            self.__start_run(_id, label, target, args)

    def monitor(self):
        while True:
            to_delete = []
            for rid, r in self.__active_runs.items():
                if r.get_status() in (Run.TERMINATED, Run.ERROR) and not r.is_alive():
                    if r.get_status() == Run.ERROR:
                        self.__logger.info(f'\tError: {r.get_error()}')
                    self.__old_runs[rid] = r
                    to_delete.append(rid)
            for d in to_delete:
                del self.__active_runs[d]
            self.__dequeue_runs()

            if self.__closing and self.__run_queue.empty() and not self.__active_runs:
                return
            time.sleep(0.01)

    def wait(self):
        self.__closing = True
        self.__monitor_thread.join()
        return self.results()

    def results(self):
        return {rid: r.get_result() for rid, r in self.__old_runs.items() if r.get_status() == Run.TERMINATED}

    def errors(self):
        return {rid: r.get_error() for rid, r in self.__old_runs.items() if r.get_status() == Run.ERROR}

    def runs_info(self):
        return {
            'active': {rid: Run.status_to_string(r.get_status()) for rid, r in self.__active_runs.items()},
            'old': {rid: Run.status_to_string(r.get_status()) for rid, r in self.__old_runs.items()}
        }
