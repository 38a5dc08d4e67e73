"""Command-line front end: lint, compare, fix and stats.

Exit codes:
    0 - no error-severity findings (or the command succeeded)
    1 - error-severity findings
    2 - input error (unreadable or malformed file, bad arguments)

With ``--format json`` standard output carries only the JSON payload;
diagnostics go to standard error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from subqa import __version__
from subqa.findings import Finding, UnknownCategory
from subqa.fixers import Edit, PartialSpanUnfixable, collapse_repetitions, fix_markup, fix_spacing
from subqa.markup import UnbalancedTag
from subqa.pipeline import CompareOptions, has_errors, run_compare, run_lint
from subqa.report import (
    ReportFormat,
    aggregate,
    emit_report,
    findings_file_to_dict,
    read_findings_file,
)
from subqa.resources import (
    DuplicateGlossaryKey,
    GuidelineProfile,
    LexiconSet,
    MissingResource,
    SchemaViolation,
    load_lexicons,
    load_profile,
    load_profile_for,
)
from subqa.subtitles import SubtitleDocument, SubtitleParseError, read_document, serialize_document, write_document

log = logging.getLogger("subqa")

EXIT_CLEAN = 0
EXIT_FINDINGS = 1
EXIT_INPUT_ERROR = 2

RESOURCES_ENV = "SUBQA_RESOURCES"
FIXERS = ("spacing", "repetition", "markup")
_LANG_SUFFIX_RE = re.compile(r"^(?P<name>.+)\.(?P<lang>[A-Za-z]{2,3}(?:-[A-Za-z0-9]+)*)\.(?:vtt|srt)$", re.IGNORECASE)
SUBTITLE_SUFFIXES = (".vtt", ".srt")


class InputError(Exception):
    """Bad input; reported on stderr with exit status 2."""


def language_from_name(path) -> str | None:
    m = _LANG_SUFFIX_RE.match(Path(path).name)
    return m.group("lang") if m else None


def _resources_dir(args) -> Path | None:
    value = getattr(args, "resources", None) or os.environ.get(RESOURCES_ENV)
    return Path(value) if value else None


def resolve_profile(args, language: str) -> GuidelineProfile:
    choice = getattr(args, "profile", None)
    try:
        if choice and (choice.endswith(".json") or Path(choice).is_file()):
            return load_profile(choice)
        return load_profile_for(choice or language, _resources_dir(args))
    except (FileNotFoundError, SchemaViolation) as exc:
        raise InputError(f"profile: {exc}") from exc


def resolve_lexicons(args, source_lang: str, target_lang: str) -> LexiconSet:
    directory = getattr(args, "lexicons", None) or _resources_dir(args)
    if directory is None:
        log.warning("no lexicon directory given; wordlist and glossary checks are skipped")
        return LexiconSet.empty(source_lang, target_lang)
    try:
        return load_lexicons(directory, source_lang, target_lang, getattr(args, "title", None))
    except MissingResource as exc:
        log.warning("%s; wordlist and glossary checks are skipped", exc)
        return LexiconSet.empty(source_lang, target_lang)
    except (DuplicateGlossaryKey, SchemaViolation, json.JSONDecodeError) as exc:
        raise InputError(f"lexicons: {exc}") from exc


def load_subtitles(path, strict: bool = False) -> SubtitleDocument:
    try:
        doc = read_document(path, strict=strict)
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except UnicodeDecodeError as exc:
        raise InputError(f"{path}: not valid UTF-8 (byte {exc.start})") from None
    except SubtitleParseError as exc:
        where = f"{path}:{exc.line}" if exc.line else str(path)
        if exc.column:
            where += f":{exc.column}"
        raise InputError(f"{where}: {exc.message}") from None
    for warning in doc.warnings:
        log.warning("%s: %s", path, warning)
    return doc


def _format_finding(doc: SubtitleDocument, finding: Finding, label: str) -> str:
    cue = doc.cues[finding.cue_index]
    text = f"{label}:{finding.cue_index + 1} [{cue.start} --> {cue.end}] {finding.severity.value} {finding.category.value}: {finding.message}"
    if finding.suggestion is not None:
        text += f" (suggestion: {finding.suggestion!r})"
    return text


def _emit_findings(args, doc, findings, label, pair=None) -> None:
    if args.format == "json":
        payload = findings_file_to_dict(label, findings, len(doc.cues), pair)
        sys.stdout.write(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
        return
    for finding in findings:
        print(_format_finding(doc, finding, label))
    errors = sum(f.is_error for f in findings)
    print(f"{len(findings)} findings ({errors} errors) in {len(doc.cues)} cues")


def cmd_lint(args) -> int:
    doc = load_subtitles(args.target, args.strict)
    language = args.target_lang or language_from_name(args.target) or "en"
    profile = resolve_profile(args, language)
    lexicons = resolve_lexicons(args, args.source_lang, language)
    findings = run_lint(doc, profile, lexicons if lexicons.target_wordlist is not None else None)
    _emit_findings(args, doc, findings, str(args.target))
    return EXIT_FINDINGS if has_errors(findings) else EXIT_CLEAN


def _compare_options(args) -> CompareOptions:
    return CompareOptions(threshold=args.threshold, expansion=args.expansion)


def cmd_compare(args) -> int:
    source = load_subtitles(args.source, args.strict)
    target = load_subtitles(args.target, args.strict)
    source_lang = args.source_lang or language_from_name(args.source) or "en"
    target_lang = args.target_lang or language_from_name(args.target) or "en"
    profile = resolve_profile(args, target_lang)
    lexicons = resolve_lexicons(args, source_lang, target_lang)
    try:
        findings = run_compare(source, target, profile, lexicons, _compare_options(args))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit_findings(args, target, findings, str(args.target), (source_lang, target_lang))
    return EXIT_FINDINGS if has_errors(findings) else EXIT_CLEAN


def _parse_fixers(text: str) -> list[str]:
    names = [n.strip() for n in text.split(",") if n.strip()]
    unknown = [n for n in names if n not in FIXERS]
    if unknown or not names:
        raise argparse.ArgumentTypeError(f"unknown fixer(s) {', '.join(unknown) or '(none)'}; choose from {', '.join(FIXERS)}")
    return names


def cmd_fix(args) -> int:
    target_path = Path(args.target)
    if "markup" in args.apply and not args.source:
        raise InputError("the markup fixer needs --source")
    if args.out and not args.dry_run and Path(args.out).resolve() == target_path.resolve() and not args.in_place:
        raise InputError(f"refusing to overwrite {target_path}; pass --in-place")
    if args.in_place and args.out:
        raise InputError("--in-place and --out are mutually exclusive")
    doc = load_subtitles(target_path)
    language = args.target_lang or language_from_name(target_path) or "en"
    edits: list[Edit] = []
    # fixed order: markup first so later fixers see the final tags
    if "markup" in args.apply:
        source = load_subtitles(args.source)
        try:
            doc, found, unfixable = fix_markup(source, doc)
        except (UnbalancedTag, PartialSpanUnfixable) as exc:
            raise InputError(str(exc)) from exc
        edits += found
        for index in unfixable:
            log.warning("cue %d: source markup covers part of the text; left for manual review", index + 1)
    if "spacing" in args.apply:
        doc, found = fix_spacing(doc, resolve_profile(args, language))
        edits += found
    if "repetition" in args.apply:
        doc, found = collapse_repetitions(doc)
        edits += found
    log_payload = {"file": str(target_path), "edits": [e.to_dict() for e in edits]}
    if args.dry_run:
        sys.stdout.write(json.dumps(log_payload, indent=2, ensure_ascii=False) + "\n")
        return EXIT_CLEAN
    if args.log:
        Path(args.log).write_text(json.dumps(log_payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    if args.in_place:
        write_document(doc, target_path)
    elif args.out:
        write_document(doc, args.out)
    else:
        sys.stdout.write(serialize_document(doc))
    log.info("%d edits applied to %s", len(edits), target_path)
    return EXIT_CLEAN


@dataclass(frozen=True)
class _PairJob:
    name: str
    source: str | None
    target: str
    source_lang: str
    target_lang: str
    profile: str | None
    lexicons: str | None
    resources: str | None
    threshold: float
    expansion: float


def _run_job(job: _PairJob) -> tuple[str, int, list[dict]]:
    args = argparse.Namespace(
        profile=job.profile, lexicons=job.lexicons, resources=job.resources, title=None
    )
    target = load_subtitles(job.target)
    profile = resolve_profile(args, job.target_lang)
    lexicons = resolve_lexicons(args, job.source_lang, job.target_lang)
    if job.source is None:
        findings = run_lint(target, profile, lexicons if lexicons.target_wordlist is not None else None)
    else:
        source = load_subtitles(job.source)
        findings = run_compare(source, target, profile, lexicons, CompareOptions(job.threshold, job.expansion))
    return job.name, len(target.cues), [f.to_dict() for f in findings]


def _collect_inputs(paths) -> tuple[list[Path], list[Path]]:
    findings_files, subtitles = [], []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            entries = sorted(p for p in path.iterdir() if p.is_file())
        elif path.is_file():
            entries = [path]
        else:
            raise InputError(f"{path}: no such file or directory")
        for entry in entries:
            if entry.suffix.lower() == ".json":
                findings_files.append(entry)
            elif entry.suffix.lower() in SUBTITLE_SUFFIXES:
                subtitles.append(entry)
            elif path.is_file():
                raise InputError(f"{entry}: expected a findings .json or a subtitle file")
    return findings_files, subtitles


def _pair_jobs(args, subtitles: list[Path]) -> list[_PairJob]:
    groups: dict[tuple[Path, str], dict[str, Path]] = {}
    for path in subtitles:
        m = _LANG_SUFFIX_RE.match(path.name)
        if m is None:
            lang = args.target_lang or "en"
            groups.setdefault((path.parent, path.stem), {})[lang] = path
        else:
            groups.setdefault((path.parent, m.group("name")), {})[m.group("lang")] = path
    source_lang = args.source_lang or "en"
    jobs = []
    common = dict(
        profile=args.profile,
        lexicons=args.lexicons,
        resources=str(_resources_dir(args)) if _resources_dir(args) else None,
        threshold=args.threshold,
        expansion=args.expansion,
    )
    for (_, name), by_lang in sorted(groups.items()):
        if args.target_lang:
            targets = [args.target_lang] if args.target_lang in by_lang else []
        else:
            targets = sorted(lang for lang in by_lang if lang != source_lang)
            if not targets and len(by_lang) == 1:
                targets = list(by_lang)
        if not targets:
            log.warning("%s: no target-language file, skipped", name)
            continue
        for lang in targets:
            source = by_lang.get(source_lang) if lang != source_lang else None
            target = by_lang[lang]
            jobs.append(_PairJob(str(target), str(source) if source else None, str(target), source_lang, lang, **common))
    return jobs


def cmd_stats(args) -> int:
    findings_paths, subtitles = _collect_inputs(args.inputs)
    findings: dict[str, list[Finding]] = {}
    totals: dict[str, int] = {}
    pairs = set()

    def merge(name: str, count: int, items) -> None:
        if name in totals and totals[name] != count:
            raise InputError(f"{name}: cue totals disagree ({totals[name]} vs {count})")
        totals[name] = count
        findings.setdefault(name, []).extend(items)

    for path in findings_paths:
        try:
            parsed = read_findings_file(path)
        except UnknownCategory as exc:
            raise InputError(f"{path}: {exc}") from exc
        except SchemaViolation as exc:
            raise InputError(str(exc)) from exc
        if parsed.total_cues is None:
            raise InputError(f"{path}: total_cues is required for aggregation")
        merge(parsed.file, parsed.total_cues, parsed.findings)
        if parsed.language_pair:
            pairs.add(parsed.language_pair)

    jobs = _pair_jobs(args, subtitles)
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_job, jobs))
    else:
        results = [_run_job(job) for job in jobs]
    for job, (name, count, items) in zip(jobs, results):
        merge(name, count, [Finding.from_dict(item) for item in items])
        if job.source is not None:
            pairs.add((job.source_lang, job.target_lang))

    if args.source_lang and args.target_lang:
        pair = (args.source_lang, args.target_lang)
    else:
        pair = next(iter(pairs)) if len(pairs) == 1 else None
    try:
        report = aggregate(findings, totals, pair)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    sys.stdout.write(emit_report(report, args.format))
    return EXIT_CLEAN


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--profile", help="guideline profile: language code or path to a profile JSON")
    parser.add_argument("--lexicons", help="lexicon directory (defaults to the resources directory)")
    parser.add_argument("--resources", help=f"resources directory (overrides ${RESOURCES_ENV})")
    parser.add_argument("--source-lang", help="source language code (default: from file name, else en)")
    parser.add_argument("--target-lang", help="target language code (default: from file name, else en)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subqa", description="Quality checks for translated subtitles.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to standard error")
    sub = parser.add_subparsers(dest="command", required=True)

    lint = sub.add_parser("lint", help="check one subtitle file against guidelines and lexicons")
    lint.add_argument("target")
    _add_common(lint)
    lint.add_argument("--format", choices=("json", "text"), default="text")
    lint.add_argument("--strict", action="store_true", help="treat overlaps and ordering problems as errors")
    lint.set_defaults(func=cmd_lint, source_lang="en")

    compare = sub.add_parser("compare", help="check a translation against its source file")
    compare.add_argument("source")
    compare.add_argument("target")
    _add_common(compare)
    compare.add_argument("--title", help="use only knp/<title>.json as glossary")
    compare.add_argument("--format", choices=("json", "text"), default="text")
    compare.add_argument("--strict", action="store_true")
    compare.add_argument("--threshold", type=float, default=0.5, help="alignment overlap threshold (default 0.5)")
    compare.add_argument("--expansion", type=float, default=1.0, help="expected target/source length ratio")
    compare.set_defaults(func=cmd_compare)

    fix = sub.add_parser("fix", help="apply mechanical fixes")
    fix.add_argument("target")
    fix.add_argument("--apply", type=_parse_fixers, default=["spacing", "repetition"],
                     help=f"comma-separated fixers from {','.join(FIXERS)} (default spacing,repetition)")
    fix.add_argument("--source", help="source subtitle file (needed by the markup fixer)")
    fix.add_argument("--out", help="write the fixed file here (default: standard output)")
    fix.add_argument("--in-place", action="store_true", help="overwrite the target file")
    fix.add_argument("--dry-run", action="store_true", help="print the edit log and write nothing")
    fix.add_argument("--log", help="write the edit log (JSON) here")
    fix.add_argument("--profile")
    fix.add_argument("--resources")
    fix.add_argument("--target-lang")
    fix.set_defaults(func=cmd_fix)

    stats = sub.add_parser("stats", help="aggregate findings files or subtitle pairs into a report")
    stats.add_argument("inputs", nargs="+", help="findings JSON files, subtitle files or directories")
    _add_common(stats)
    stats.add_argument("--format", choices=[f.value for f in ReportFormat], default="json")
    stats.add_argument("--jobs", type=int, default=1, help="parallel workers for subtitle pairs")
    stats.add_argument("--threshold", type=float, default=0.5)
    stats.add_argument("--expansion", type=float, default=1.0)
    stats.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT_ERROR if exc.code else EXIT_CLEAN
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="subqa: %(levelname)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        return args.func(args)
    except InputError as exc:
        log.error("%s", exc)
        return EXIT_INPUT_ERROR
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
