"""Machine-readable verification report.

Each entry compares a certified quantity (an interval or an exact
rational) against a quoted reference value under a stated relation.
Entries marked blocking determine the overall verdict; discrepancy
entries that merely contradict a printed rounding are kept non-blocking
and carry an explanatory note instead.

Numbers are serialized as decimal strings with directed rounding (lower
endpoints down, upper endpoints up), so a parsed report is still a
valid certificate and round-trips exactly.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .intervals import Interval

_SIG_DIGITS = 30


def decimal_str(x, sig: int = _SIG_DIGITS, direction: str = "floor") -> str:
    """Directed decimal rendering of an exact rational."""
    x = Fraction(x)
    if x == 0:
        return "0"
    neg = x < 0
    a = -x if neg else x
    e = len(str(a.numerator)) - len(str(a.denominator))
    while 10**e > a:
        e -= 1
    while 10 ** (e + 1) <= a:
        e += 1
    k = sig - 1 - e
    scaled = a * Fraction(10) ** k
    n = scaled.numerator // scaled.denominator
    exact = n * scaled.denominator == scaled.numerator
    round_up = (direction == "ceil") != neg
    if round_up and not exact:
        n += 1
    digits = str(n)
    if len(digits) > sig:  # rounding bumped 999... to 1000...
        digits = digits[:sig]
        e += 1
    digits = digits.rstrip("0") or "0"
    mantissa = digits[0] + ("." + digits[1:] if len(digits) > 1 else "")
    sign = "-" if neg else ""
    if -4 <= e <= 15:
        return sign + _plain_decimal(digits, e)
    return f"{sign}{mantissa}e{e}"


def _plain_decimal(digits: str, e: int) -> str:
    if e >= 0:
        if len(digits) <= e + 1:
            return digits + "0" * (e + 1 - len(digits))
        return digits[: e + 1] + "." + digits[e + 1 :]
    return "0." + "0" * (-e - 1) + digits


def certified_interval(iv: Interval) -> dict:
    return {
        "kind": "interval",
        "lo": decimal_str(iv.lo, direction="floor"),
        "hi": decimal_str(iv.hi, direction="ceil"),
    }


def certified_rational(x: Fraction) -> dict:
    x = Fraction(x)
    return {"kind": "rational", "value": f"{x.numerator}/{x.denominator}"}


def certified_number(x) -> dict:
    return {"kind": "number", "value": decimal_str(Fraction(x))}


@dataclass
class ReportEntry:
    name: str
    paper_value: str
    certified: dict
    relation: str  # "<=", ">=", "in", "=="
    passed: bool
    blocking: bool = True
    note: str = ""


@dataclass
class VerificationReport:
    entries: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    @property
    def overall(self) -> bool:
        return all(e.passed for e in self.entries if e.blocking)

    def add(self, entry: ReportEntry) -> None:
        self.entries.append(entry)

    def failures(self) -> list:
        return [e for e in self.entries if e.blocking and not e.passed]

    def to_dict(self) -> dict:
        return {
            "entries": [
                {
                    "name": e.name,
                    "paper_value": e.paper_value,
                    "certified": e.certified,
                    "relation": e.relation,
                    "pass": e.passed,
                    "blocking": e.blocking,
                    "note": e.note,
                }
                for e in self.entries
            ],
            "overall": self.overall,
            "provenance": self.provenance,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationReport":
        report = cls(provenance=data.get("provenance", {}))
        for e in data["entries"]:
            report.add(
                ReportEntry(
                    name=e["name"],
                    paper_value=e["paper_value"],
                    certified=e["certified"],
                    relation=e["relation"],
                    passed=e["pass"],
                    blocking=e.get("blocking", True),
                    note=e.get("note", ""),
                )
            )
        return report

    @classmethod
    def from_json(cls, text: str) -> "VerificationReport":
        return cls.from_dict(json.loads(text))

    def render_table(self) -> str:
        rows = [("name", "paper value", "certified", "rel", "pass", "note")]
        for e in self.entries:
            cert = e.certified
            if cert["kind"] == "interval":
                shown = f"[{_shorten(cert['lo'])}, {_shorten(cert['hi'])}]"
            elif cert["kind"] == "rational":
                shown = cert["value"]
            else:
                shown = _shorten(cert["value"])
            flag = "ok" if e.passed else ("FAIL" if e.blocking else "note")
            rows.append((e.name, e.paper_value, shown, e.relation, flag, e.note))
        widths = [max(len(r[i]) for r in rows) for i in range(5)]
        lines = []
        for r in rows:
            head = "  ".join(r[i].ljust(widths[i]) for i in range(5))
            lines.append(head + ("  " + r[5] if r[5] else ""))
        lines.append("")
        lines.append(f"overall: {'PASS' if self.overall else 'FAIL'}")
        return "\n".join(lines)


def _shorten(dec: str, keep: int = 12) -> str:
    if "." not in dec or len(dec) <= keep + 6:
        return dec
    head, _, tail = dec.partition(".")
    exp = ""
    if "e" in tail:
        tail, _, exp = tail.partition("e")
        exp = "e" + exp
    return f"{head}.{tail[:keep]}..{exp}"


def entry_upper_bound(
    name: str, certified: Interval, ceiling, blocking: bool = True, note: str = ""
) -> ReportEntry:
    """certified.hi <= ceiling, compared through exact rationals."""
    ceiling = Fraction(ceiling)
    return ReportEntry(
        name=name,
        paper_value=decimal_str(ceiling),
        certified=certified_interval(certified),
        relation="<=",
        passed=certified.hi <= ceiling,
        blocking=blocking,
        note=note,
    )


def entry_lower_bound(
    name: str, certified, floor, blocking: bool = True, note: str = ""
) -> ReportEntry:
    floor = Fraction(floor)
    if isinstance(certified, Interval):
        passed = certified.lo >= floor
        cert = certified_interval(certified)
    else:
        passed = Fraction(certified) >= floor
        cert = certified_rational(Fraction(certified))
    return ReportEntry(
        name=name,
        paper_value=decimal_str(floor),
        certified=cert,
        relation=">=",
        passed=passed,
        blocking=blocking,
        note=note,
    )


def entry_window(
    name: str, certified, lo, hi, blocking: bool = True, note: str = ""
) -> ReportEntry:
    """Certified value lies inside [lo, hi] (endpoints inclusive)."""
    lo, hi = Fraction(lo), Fraction(hi)
    if isinstance(certified, Interval):
        passed = certified.lo >= lo and certified.hi <= hi
        cert = certified_interval(certified)
    else:
        passed = lo <= Fraction(certified) <= hi
        cert = certified_rational(Fraction(certified))
    return ReportEntry(
        name=name,
        paper_value=f"[{decimal_str(lo)}, {decimal_str(hi)}]",
        certified=cert,
        relation="in",
        passed=passed,
        blocking=blocking,
        note=note,
    )


def entry_flag(name: str, passed: bool, detail: str, blocking: bool = True, note: str = "") -> ReportEntry:
    return ReportEntry(
        name=name,
        paper_value="",
        certified={"kind": "number", "value": detail},
        relation="==",
        passed=passed,
        blocking=blocking,
        note=note,
    )
