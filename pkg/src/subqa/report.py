"""Cue-level aggregation of findings into per-category frequency reports."""
from __future__ import annotations

import csv
import io
import json
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from functools import lru_cache
from pathlib import Path

import jsonschema

from subqa.findings import CATEGORY_ORDER, ErrorCategory, Finding
from subqa.resources import SchemaViolation, _data_file

SCHEMA_VERSION = 1
CLEAN_LABEL = "Clean"


class IndexOutOfRange(ValueError):
    """A finding points past the end of its file's cue list."""


class ReportFormat(str, Enum):
    JSON = "json"
    CSV = "csv"
    TEXT = "text"
    PLOTDATA = "plotdata"


def percentage(count: int, total: int) -> float:
    """``count / total * 100`` rounded half-up to two decimals; 0 for an empty total."""
    if total == 0:
        return 0.0
    value = Decimal(count * 100) / Decimal(total)
    return float(value.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class CategoryStat:
    cue_count: int
    percentage: float


@dataclass(frozen=True)
class FileReport:
    file: str
    total_cues: int
    per_category: dict[ErrorCategory, CategoryStat]
    clean_cues: int

    @property
    def clean_percentage(self) -> float:
        return 100.0 if self.total_cues == 0 else percentage(self.clean_cues, self.total_cues)


@dataclass(frozen=True)
class QaReport:
    """Corpus-level counts. A cue counts once per category however many
    findings of that category it has; categories overlap, so percentages
    need not sum to 100 with the clean share."""

    total_cues: int
    per_category: dict[ErrorCategory, CategoryStat]
    clean_cues: int
    per_file: tuple[FileReport, ...] = ()
    language_pair: tuple[str, str] | None = None
    schema_version: int = field(default=SCHEMA_VERSION)

    @property
    def clean_percentage(self) -> float:
        return 100.0 if self.total_cues == 0 else percentage(self.clean_cues, self.total_cues)

    @property
    def empty_corpus(self) -> bool:
        return self.total_cues == 0

    def percentage_of(self, category: ErrorCategory) -> float:
        stat = self.per_category.get(category)
        return stat.percentage if stat else 0.0


def _category_stats(marked: dict[ErrorCategory, set], total: int) -> dict[ErrorCategory, CategoryStat]:
    return {
        category: CategoryStat(len(marked[category]), percentage(len(marked[category]), total))
        for category in sorted(marked, key=CATEGORY_ORDER.__getitem__)
    }


def aggregate(
    findings: Mapping[str, Iterable[Finding]],
    cue_totals: Mapping[str, int],
    pair: tuple[str, str] | None = None,
) -> QaReport:
    """Fold per-file findings into a report.

    Every file with findings must appear in ``cue_totals``; files there with
    no findings contribute clean cues. Files are reported in name order.
    """
    for name in findings:
        if name not in cue_totals:
            raise IndexOutOfRange(f"{name}: findings given but no cue total")
    corpus: dict[ErrorCategory, set] = {}
    dirty_total = 0
    total = 0
    per_file = []
    for name in sorted(cue_totals):
        count = cue_totals[name]
        if count < 0:
            raise ValueError(f"{name}: negative cue count")
        marked: dict[ErrorCategory, set] = {}
        for finding in findings.get(name, ()):
            if not 0 <= finding.cue_index < count:
                raise IndexOutOfRange(
                    f"{name}: finding on cue {finding.cue_index} but the file has {count} cues"
                )
            marked.setdefault(finding.category, set()).add(finding.cue_index)
            corpus.setdefault(finding.category, set()).add((name, finding.cue_index))
        dirty = len(set().union(*marked.values())) if marked else 0
        per_file.append(FileReport(name, count, _category_stats(marked, count), count - dirty))
        dirty_total += dirty
        total += count
    return QaReport(
        total_cues=total,
        per_category=_category_stats(corpus, total),
        clean_cues=total - dirty_total,
        per_file=tuple(per_file),
        language_pair=tuple(pair) if pair else None,
    )


def _stats_json(stats: dict[ErrorCategory, CategoryStat]) -> list[dict]:
    return [
        {"category": c.value, "cue_count": s.cue_count, "percentage": s.percentage} for c, s in stats.items()
    ]


def report_to_dict(report: QaReport) -> dict:
    return {
        "schema_version": report.schema_version,
        "language_pair": list(report.language_pair) if report.language_pair else None,
        "total_cues": report.total_cues,
        "clean_cues": report.clean_cues,
        "clean_percentage": report.clean_percentage,
        "empty_corpus": report.empty_corpus,
        "per_category": _stats_json(report.per_category),
        "per_file": [
            {
                "file": f.file,
                "total_cues": f.total_cues,
                "clean_cues": f.clean_cues,
                "clean_percentage": f.clean_percentage,
                "per_category": _stats_json(f.per_category),
            }
            for f in report.per_file
        ],
    }


def _stats_from_json(items: list[dict]) -> dict[ErrorCategory, CategoryStat]:
    stats = {ErrorCategory.parse(i["category"]): CategoryStat(i["cue_count"], float(i["percentage"])) for i in items}
    return dict(sorted(stats.items(), key=lambda kv: CATEGORY_ORDER[kv[0]]))


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    return json.loads(_data_file("schemas", f"{name}-{SCHEMA_VERSION}.schema.json").read_text(encoding="utf-8"))


def _validate(data, schema_name: str, where: str = "") -> None:
    try:
        jsonschema.validate(data, load_schema(schema_name))
    except jsonschema.ValidationError as exc:
        key = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaViolation(key, f"{where}{': ' if where else ''}{exc.message}") from None


def report_from_json(text: str) -> QaReport:
    data = json.loads(text)
    _validate(data, "report")
    pair = data["language_pair"]
    return QaReport(
        total_cues=data["total_cues"],
        per_category=_stats_from_json(data["per_category"]),
        clean_cues=data["clean_cues"],
        per_file=tuple(
            FileReport(f["file"], f["total_cues"], _stats_from_json(f["per_category"]), f["clean_cues"])
            for f in data["per_file"]
        ),
        language_pair=tuple(pair) if pair else None,
        schema_version=data["schema_version"],
    )


def _ranked(report: QaReport) -> list[tuple[ErrorCategory, CategoryStat]]:
    return sorted(report.per_category.items(), key=lambda kv: (-kv[1].cue_count, CATEGORY_ORDER[kv[0]]))


def _emit_text(report: QaReport) -> str:
    pair = "-".join(report.language_pair) if report.language_pair else "unknown pair"
    lines = [f"QA report ({pair}): {report.total_cues} cues in {len(report.per_file)} files"]
    if report.empty_corpus:
        lines.append("empty corpus: no cues to report on")
        return "\n".join(lines) + "\n"
    rows = [(c.value, str(s.cue_count), f"{s.percentage:.2f}") for c, s in _ranked(report)]
    rows.append((CLEAN_LABEL, str(report.clean_cues), f"{report.clean_percentage:.2f}"))
    width = max(len("category"), *(len(r[0]) for r in rows))
    lines.append(f"{'rank':>4}  {'category':<{width}}  {'cues':>6}  {'%':>7}")
    for rank, (name, count, pct) in enumerate(rows[:-1], 1):
        lines.append(f"{rank:>4}  {name:<{width}}  {count:>6}  {pct:>7}")
    name, count, pct = rows[-1]
    lines.append(f"{'':>4}  {name:<{width}}  {count:>6}  {pct:>7}")
    return "\n".join(lines) + "\n"


def emit_report(report: QaReport, fmt: ReportFormat | str = ReportFormat.JSON) -> str:
    """Render ``report`` as json, csv (one row per category), text (ranked
    table) or plotdata (category,percentage rows plus a Clean row)."""
    fmt = ReportFormat(fmt)
    if fmt is ReportFormat.JSON:
        return json.dumps(report_to_dict(report), indent=2, ensure_ascii=False) + "\n"
    if fmt is ReportFormat.TEXT:
        return _emit_text(report)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if fmt is ReportFormat.CSV:
        writer.writerow(["category", "cue_count", "percentage"])
        for category, stat in report.per_category.items():
            writer.writerow([category.value, stat.cue_count, f"{stat.percentage:.2f}"])
    else:
        writer.writerow(["category", "percentage"])
        for category, stat in report.per_category.items():
            writer.writerow([category.value, f"{stat.percentage:.2f}"])
        writer.writerow([CLEAN_LABEL, f"{report.clean_percentage:.2f}"])
    return buf.getvalue()


@dataclass(frozen=True)
class FindingsFile:
    """Parsed findings file: the findings for one subtitle file plus its cue count."""

    file: str
    findings: tuple[Finding, ...]
    total_cues: int | None = None
    language_pair: tuple[str, str] | None = None


def findings_file_to_dict(
    file: str, findings: Iterable[Finding], total_cues: int, pair: tuple[str, str] | None = None
) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "file": file,
        "total_cues": total_cues,
        "language_pair": list(pair) if pair else None,
        "findings": [f.to_dict() for f in findings],
    }


def _check_categories(data, where: str) -> None:
    # unknown labels get their own error before the generic schema message
    items = data.get("findings") if isinstance(data, dict) else None
    if isinstance(items, list):
        for item in items:
            if isinstance(item, dict) and isinstance(item.get("category"), str):
                ErrorCategory.parse(item["category"])


def parse_findings(data, where: str = "") -> FindingsFile:
    _check_categories(data, where)
    _validate(data, "findings", where)
    pair = data.get("language_pair")
    return FindingsFile(
        file=data.get("file") or where,
        findings=tuple(Finding.from_dict(item) for item in data["findings"]),
        total_cues=data.get("total_cues"),
        language_pair=tuple(pair) if pair else None,
    )


def read_findings_file(path) -> FindingsFile:
    """Read a findings JSON file. Raises UnknownCategory or SchemaViolation."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaViolation("<root>", f"{path}: not valid JSON ({exc.msg})") from None
    return parse_findings(data, str(path))


def ingest_annotations(path) -> list[Finding]:
    """Findings from an externally annotated file, reserved categories included."""
    return list(read_findings_file(path).findings)
