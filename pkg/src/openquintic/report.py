"""Verification report lines shared by the symbolic check suites."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ReportLine:
    name: str
    ok: bool
    lhs: str
    rhs: str

    def render(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.name}: {self.lhs} == {self.rhs}"


def all_pass(lines: list[ReportLine]) -> bool:
    return all(line.ok for line in lines)


def render_report(lines: list[ReportLine]) -> str:
    return "\n".join(line.render() for line in lines)
