"""Run independent checks concurrently."""
import asyncio
import logging
from typing import Callable, Iterable, List, Union

from .report import VerificationReport

logger = logging.getLogger(__name__)

__all__ = ["gather_reports"]

Check = Callable[[], Union[VerificationReport, Iterable[VerificationReport]]]


async def gather_reports(*checks: Check) -> List[VerificationReport]:
    """Await every check in a worker thread; reports come back in call order."""
    results = await asyncio.gather(*(asyncio.to_thread(check) for check in checks))
    reports = []
    for result in results:
        if isinstance(result, VerificationReport):
            reports.append(result)
        else:
            reports.extend(result)
    logger.debug("gathered %d reports from %d checks", len(reports), len(checks))
    return reports
