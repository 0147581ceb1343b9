# SPDX-License-Identifier: Apache-2.0
"""Near-field location division multiple access simulator."""

import csv
import io
import json

from ._core import *  # noqa: F401,F403
from ._core import CSV_HEADER, run_scenario_csv


def run_scenario(config, workers=1):
    """Run a scenario (dict or JSON text) and return its rows as dicts."""
    text = config if isinstance(config, str) else json.dumps(config)
    return list(csv.DictReader(io.StringIO(run_scenario_csv(text, workers))))
