"""
This module contains classes for running sweep rows in background threads with signals to
deliver their results. The WorkerSignals class defines signals emitted during task execution.

The RowWorker class is a runnable that executes one sweep row; run_rows submits a list of rows
to a QThreadPool and collects the results in submission order.
"""

__author__ = "Ilya Molodkin"
__date__ = "2026-10-19"
__version__ = "1.0"
__license__ = "MIT License"


import logging
import traceback
from typing import Any, Callable, List, Optional, Sequence

from PySide6.QtCore import QCoreApplication, QMutex, QMutexLocker, QObject, QRunnable, QThreadPool, Qt, Signal, Slot


logger = logging.getLogger(__name__)
_app: Optional[QCoreApplication] = None


class WorkerSignals(QObject):
    """
    WorkerSignals class defines the signals emitted by a QRunnable worker.

    Attributes:
    finished (Signal[int]): Signal emitted when the worker has finished its task. The signal
                            parameter is the row index.
    error (Signal[tuple]): Signal emitted when the task raised. The signal parameter is a tuple
                           of the row index and the exception.
    result (Signal[tuple]): Signal emitted when the worker has produced a result. The signal
                            parameter is a tuple of the row index and the result.
    """
    finished = Signal(int)
    error = Signal(tuple)
    result = Signal(tuple)


class RowWorker(QRunnable):
    """
    :class:         `RowWorker` runs one sweep row.

    :param index:   position of the row in the sweep.
    :type index:    int
    :param fn:      a callable without arguments that produces the row result.
    :type fn:       Callable
    :ivar signals:  an instance of `WorkerSignals` used to emit signals during task execution.
    :type signals:  WorkerSignals
    """
    def __init__(self, index: int, fn: Callable[[], Any]) -> None:
        super().__init__()
        self.signals = WorkerSignals()
        self.index = index
        self.fn = fn

    @Slot()
    def run(self):
        try:
            result = self.fn()
        except Exception as e:  # pylint: disable=broad-except
            logger.error(f'{type(e).__name__} occurred, args={str(e.args)}')
            logger.debug(traceback.format_exc())
            self.signals.error.emit((self.index, e))
        else:
            self.signals.result.emit((self.index, result))
        finally:
            self.signals.finished.emit(self.index)


class _Collector:
    def __init__(self, size: int) -> None:
        self.mutex = QMutex()
        self.results: List[Optional[Any]] = [None] * size
        self.errors: List[Optional[BaseException]] = [None] * size

    def on_result(self, payload: tuple) -> None:
        with QMutexLocker(self.mutex):
            index, value = payload
            self.results[index] = value

    def on_error(self, payload: tuple) -> None:
        with QMutexLocker(self.mutex):
            index, error = payload
            self.errors[index] = error


def run_rows(tasks: Sequence[Callable[[], Any]], threads: int = 1) -> List[Any]:
    """
    Runs the tasks, in parallel on a QThreadPool when ``threads > 1``.

    Each task must own its state (problem, operator handles). A task that raises is re-raised
    here after every other task has finished.

    :param tasks: callables producing the row results.
    :type tasks: Sequence[Callable[[], Any]]
    :param threads: worker thread count, defaults to 1
    :type threads: int, optional
    :return: the results in task order.
    :rtype: List[Any]
    """
    if threads <= 1 or len(tasks) <= 1:
        return [task() for task in tasks]

    global _app  # pylint: disable=global-statement
    if QCoreApplication.instance() is None:
        _app = QCoreApplication([])
    pool = QThreadPool()
    pool.setMaxThreadCount(threads)
    collector = _Collector(len(tasks))
    workers: List[RowWorker] = []
    for index, task in enumerate(tasks):
        worker = RowWorker(index, task)
        worker.setAutoDelete(False)
        worker.signals.result.connect(collector.on_result, Qt.DirectConnection)
        worker.signals.error.connect(collector.on_error, Qt.DirectConnection)
        workers.append(worker)
        pool.start(worker)
    pool.waitForDone()

    for error in collector.errors:
        if error is not None:
            raise error
    return collector.results
