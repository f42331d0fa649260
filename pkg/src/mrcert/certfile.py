"""Canonical JSON form of certificates."""
from __future__ import annotations

import json
from pathlib import Path

from .errors import CertificateFormatError
from .rules import RULES, Certificate, RuleStep
from .tables import CaseParams, GrdSequence

FORMAT_VERSION = "mrcert-certificate/1"


def to_dict(cert: Certificate) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "case": {"g": cert.case.g, "r": cert.case.r, "d": cert.case.d, "m": cert.case.m},
        "delta": list(cert.seq.entries),
        "shift": cert.seq.shift,
        "w": list(cert.w),
        "selected": [list(row) for row in cert.selected],
        "steps": [
            {"rule": s.rule, "column": s.column, "rows": [list(r) for r in s.rows], "params": s.params()}
            for s in cert.steps
        ],
    }


def dumps(cert: Certificate) -> str:
    return json.dumps(to_dict(cert), sort_keys=True, separators=(",", ":")) + "\n"


def _int(x, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise CertificateFormatError(f"{what} must be an integer, got {x!r}")
    return x


def _int_list(xs, what: str) -> list[int]:
    if not isinstance(xs, list):
        raise CertificateFormatError(f"{what} must be a list")
    return [_int(x, what) for x in xs]


def from_dict(data: dict) -> Certificate:
    if not isinstance(data, dict):
        raise CertificateFormatError("certificate must be a JSON object")
    if data.get("format_version") != FORMAT_VERSION:
        raise CertificateFormatError(f"unsupported format version {data.get('format_version')!r}")
    try:
        c = data["case"]
        case = CaseParams(*(_int(c[k], k) for k in ("g", "r", "d", "m")))
        seq = GrdSequence(tuple(_int_list(data["delta"], "delta")), case.r, case.d, _int(data["shift"], "shift"))
        w = _int_list(data["w"], "w")
        selected = [tuple(_int_list(row, "selected row")) for row in data["selected"]]
        steps = []
        for s in data["steps"]:
            rule = s["rule"]
            if rule not in RULES:
                raise CertificateFormatError(f"unknown rule {rule!r}")
            params = s.get("params", {})
            rows = tuple(tuple(_int_list(row, "step row")) for row in s["rows"])
            opt = {k: (None if params.get(k) is None else _int(params[k], k)) for k in ("j", "n", "witness")}
            steps.append(RuleStep(rule, _int(s["column"], "column"), rows, **opt))
    except KeyError as exc:
        raise CertificateFormatError(f"missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        raise CertificateFormatError(str(exc)) from None
    if len(seq.entries) != case.g or len(w) != case.g - 1:
        raise CertificateFormatError("delta or w length does not match g")
    return Certificate(case, seq, tuple(w), tuple(selected), tuple(steps))


def loads(text: str) -> Certificate:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CertificateFormatError(f"not valid JSON: {exc}") from None
    return from_dict(data)


def save(cert: Certificate, path) -> None:
    Path(path).write_text(dumps(cert), encoding="utf-8")


def load(path) -> Certificate:
    return loads(Path(path).read_text(encoding="utf-8"))
