"""Fake-task detection pipeline for simulated mobile crowdsensing campaigns.

The heavy lifting lives in the compiled ``mcsguard._core`` extension; this
package re-exports its public surface.
"""

from mcsguard._core import *  # noqa: F401,F403
from mcsguard._core import __doc__  # noqa: F401

__version__ = "0.1.0"
