"""Time-based pairing of source and target cues, and block-count checks."""
from __future__ import annotations

from dataclasses import dataclass

from subqa.findings import ErrorCategory, Finding, Severity
from subqa.subtitles import SubtitleDocument

DEFAULT_THRESHOLD = 0.5


@dataclass(frozen=True)
class AlignedCuePair:
    """A group of source cues and target cues covering the same stretch of time.

    ``overlap`` is the temporal Jaccard index of the union of the source
    intervals against the union of the target intervals.
    """

    source_indices: tuple[int, ...]
    target_indices: tuple[int, ...]
    overlap: float
    clean: bool = False

    @property
    def one_to_one(self) -> bool:
        return len(self.source_indices) == 1 and len(self.target_indices) == 1

    @property
    def shape(self) -> str:
        return f"{len(self.source_indices)}→{len(self.target_indices)}"

    def mirrored(self) -> AlignedCuePair:
        return AlignedCuePair(self.target_indices, self.source_indices, self.overlap, self.clean)


def _intervals(doc: SubtitleDocument) -> list[tuple[int, int]]:
    # a cue ending before it starts is clamped to a point
    return [(c.start.millis, max(c.start.millis, c.end.millis)) for c in doc.cues]


def _linked(a: tuple[int, int], b: tuple[int, int], threshold: float) -> bool:
    """Cues link when their intersection covers at least ``threshold`` of the
    shorter one. Points link by containment."""
    (a0, a1), (b0, b1) = a, b
    if a0 == a1 or b0 == b1:
        if a0 == a1 and b0 == b1:
            return a0 == b0
        point, (lo, hi) = (a0, b) if a0 == a1 else (b0, a)
        return lo <= point <= hi
    inter = min(a1, b1) - max(a0, b0)
    if inter <= 0:
        return False
    return inter >= threshold * min(a1 - a0, b1 - b0)


def _union_length(intervals: list[tuple[int, int]]) -> int:
    total = 0
    cur_lo = cur_hi = None
    for lo, hi in sorted(intervals):
        if cur_hi is None or lo > cur_hi:
            if cur_hi is not None:
                total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    if cur_hi is not None:
        total += cur_hi - cur_lo
    return total


def temporal_jaccard(left: list[tuple[int, int]], right: list[tuple[int, int]]) -> float:
    if not left or not right:
        return 0.0
    union = _union_length(left + right)
    if union == 0:
        # all points
        return 1.0 if {lo for lo, _ in left} == {lo for lo, _ in right} else 0.0
    inter = _union_length(left) + _union_length(right) - union
    return max(0.0, inter / union)


def align_by_time(
    source: SubtitleDocument, target: SubtitleDocument, threshold: float = DEFAULT_THRESHOLD
) -> list[AlignedCuePair]:
    """Partition the cues of both documents into aligned groups.

    Groups are the connected components of the "linked" relation between
    source and target cues (see :func:`_linked`), found with a single sweep
    over start times. Groups are ordered by earliest start.
    """
    if not 0 < threshold <= 1:
        raise ValueError("threshold must be in (0, 1]")
    src, tgt = _intervals(source), _intervals(target)
    n = len(src)
    parent = list(range(n + len(tgt)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    events = sorted(
        [(lo, hi, 0, i) for i, (lo, hi) in enumerate(src)] + [(lo, hi, 1, i) for i, (lo, hi) in enumerate(tgt)]
    )
    active: list[list[tuple[int, int, int]]] = [[], []]  # per side: (end, node, start)
    for lo, hi, side, i in events:
        node = i if side == 0 else n + i
        other = active[1 - side]
        other[:] = [item for item in other if item[0] >= lo]
        for end, other_node, start in other:
            if _linked((lo, hi), (start, end), threshold):
                parent[find(node)] = find(other_node)
        active[side].append((hi, node, lo))

    groups: dict[int, tuple[list[int], list[int]]] = {}
    for node in range(len(parent)):
        s_list, t_list = groups.setdefault(find(node), ([], []))
        (s_list if node < n else t_list).append(node if node < n else node - n)

    pairs = []
    for s_list, t_list in groups.values():
        s_iv = [src[i] for i in s_list]
        t_iv = [tgt[i] for i in t_list]
        overlap = temporal_jaccard(s_iv, t_iv)
        clean = len(s_list) == 1 and len(t_list) == 1 and overlap >= threshold
        members = s_iv + t_iv
        key = (min(lo for lo, _ in members), min(hi for _, hi in members), min(s_list + t_list))
        pairs.append((key, AlignedCuePair(tuple(s_list), tuple(t_list), overlap, clean)))
    pairs.sort(key=lambda item: item[0])
    return [pair for _, pair in pairs]


def _shape_message(pair: AlignedCuePair) -> str:
    s, t = len(pair.source_indices), len(pair.target_indices)
    if t == 0:
        return f"{pair.shape} unmatched source cue" + ("s" if s > 1 else "")
    if s == 0:
        return f"{pair.shape} unmatched target cue" + ("s" if t > 1 else "")
    if s > t:
        return f"{pair.shape} merge"
    if t > s:
        return f"{pair.shape} split"
    return f"{pair.shape} regrouping"


def check_block_count(alignment: list[AlignedCuePair]) -> list[Finding]:
    """One BlockCountIntegrity finding per group that is not 1-to-1.

    Groups without target cues are reported on the target cue that precedes
    them in the alignment (or cue 0), with ``source_index`` set.
    """
    findings = []
    last_target = 0
    for pair in alignment:
        if pair.target_indices:
            anchor = min(pair.target_indices)
            last_target = max(pair.target_indices)
        else:
            anchor = last_target
        if pair.one_to_one:
            continue
        findings.append(
            Finding(
                ErrorCategory.BLOCK_COUNT_INTEGRITY,
                anchor,
                Severity.WARNING,
                f"{_shape_message(pair)} (source cues {_fmt(pair.source_indices)}, target cues {_fmt(pair.target_indices)})",
                source_index=min(pair.source_indices) if pair.source_indices else None,
            )
        )
    return findings


def _fmt(indices) -> str:
    return ",".join(str(i + 1) for i in indices) or "-"
