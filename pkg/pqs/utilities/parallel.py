# -*- coding: utf-8 -*-
"""PQS runner for independent verification checks."""
import logging
from concurrent.futures import ThreadPoolExecutor


logger = logging.getLogger(__name__)


class CheckRunner:
    """Run independent checks sequentially or on a thread pool.

    Results are always returned in submission order, so aggregated
    reports do not depend on scheduling.
    """

    def __init__(self, parallel=False, tpe_kwargs=None):
        """

        Parameters
        ----------
        parallel : bool, optional
            Run checks on a :class:`concurrent.futures.ThreadPoolExecutor`.
            By default, ``False``.
        tpe_kwargs : dict, optional
            Keyword-value argument pairs to pass to
            :class:`concurrent.futures.ThreadPoolExecutor`.
            By default, ``None``.
        """
        self.parallel = parallel
        self._tpe_kwargs = tpe_kwargs or {}

    def map(self, func, items):
        """Apply a function to every item.

        Parameters
        ----------
        func : callable
            Function of a single item.
        items : iterable
            Inputs.

        Returns
        -------
        list
            ``[func(item) for item in items]`` in input order.
        """
        items = list(items)
        if not self.parallel or len(items) < 2:
            return [func(item) for item in items]

        logger.debug("Running %d checks on a thread pool", len(items))
        with ThreadPoolExecutor(**self._tpe_kwargs) as pool:
            return list(pool.map(func, items))
