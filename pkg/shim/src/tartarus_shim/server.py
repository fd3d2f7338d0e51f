"""Wire-protocol request loop.

One UTF-8 JSON object per line on stdin/stdout.  The first output line is
the handshake; afterwards every request gets exactly one response with the
same id.  Bad molecules or unknown properties produce per-request error
responses, never a crash.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field

from molbench.catalog import PROPERTY_UNITS
from molbench.molgraph import parse_smiles

from . import BACKEND_VERSION
from .alerts import ALERTS_VERSION
from .properties import PROPERTY_FUNCTIONS


@dataclass
class ShimConfig:
    properties: tuple[str, ...] = tuple(sorted(PROPERTY_FUNCTIONS))
    per_property_timeout_s: dict[str, float] = field(default_factory=dict)
    backend: str = BACKEND_VERSION
    alerts_version: str = ALERTS_VERSION


def handshake_line(config: ShimConfig) -> str:
    return json.dumps(
        {
            "protocol": 1,
            "props": list(config.properties),
            "backend": config.backend,
            "alerts": config.alerts_version,
        },
        sort_keys=True,
    )


def handle_request(line: str, config: ShimConfig) -> str:
    try:
        request = json.loads(line)
        request_id = request["id"]
        smiles = request["smiles"]
        names = request["props"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        return json.dumps(
            {"id": None, "status": "error", "error": f"malformed request: {exc}"}
        )
    try:
        mol = parse_smiles(smiles)
    except ValueError as exc:
        return json.dumps(
            {"id": request_id, "status": "error", "error": f"bad molecule: {exc}"},
            sort_keys=True,
        )
    values = {}
    for name in names:
        fn = PROPERTY_FUNCTIONS.get(name)
        if fn is None:
            return json.dumps(
                {
                    "id": request_id,
                    "status": "error",
                    "error": f"unsupported property: {name}",
                },
                sort_keys=True,
            )
        try:
            values[name] = {"v": float(fn(mol)), "u": PROPERTY_UNITS[name]}
        except Exception as exc:  # any descriptor failure is a soft error
            return json.dumps(
                {
                    "id": request_id,
                    "status": "error",
                    "error": f"{name} failed: {exc}",
                },
                sort_keys=True,
            )
    return json.dumps(
        {"id": request_id, "status": "ok", "values": values}, sort_keys=True
    )


def serve(stdin=None, stdout=None, config: ShimConfig | None = None) -> int:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    config = config or ShimConfig()
    print(handshake_line(config), file=stdout, flush=True)
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        print(handle_request(line, config), file=stdout, flush=True)
    return 0
