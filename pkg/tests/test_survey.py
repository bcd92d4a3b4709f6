import json

import pytest

from fullerene_wiener.metrics import DEFAULT_PAIRS, all_pairs_distances, complexities
from fullerene_wiener.spiral import canonical_spiral, generate, iter_spirals, partition_prefixes
from fullerene_wiener.survey import (
    CONFIRMED,
    OUT_OF_RANGE,
    REFUTED,
    Checkpoint,
    IrregularityFrontier,
    PairStat,
    PartialState,
    SinkUnavailable,
    SurveyRow,
    emit_results,
    find_minimal_irregular,
    load_records,
    load_results,
    partition_key,
    scan_spirals,
    survey_row,
    verify_propositions,
)


def brute_row(n, ipr=False, pairs=DEFAULT_PAIRS):
    best = {p: (0, 0) for p in pairs}
    for g in generate(n, ipr):
        comp = complexities(all_pairs_distances(g), pairs)
        for p, c in comp.items():
            m, k = best[p]
            best[p] = (c, 1) if c > m else (m, k + (c == m))
    return best


@pytest.mark.parametrize("n", [28, 36, 44])
def test_survey_row_matches_brute_force(n):
    row = survey_row(n)
    expected = brute_row(n)
    for p in DEFAULT_PAIRS:
        assert (row.c_max(p), row.count(p)) == expected[p]


def test_representatives_are_least_spirals():
    n = 40
    row = survey_row(n, cap=3)
    spirals = list(iter_spirals(n))
    for p in DEFAULT_PAIRS:
        st = row.stats[p]
        attaining = [s for s in spirals
                     if complexities(all_pairs_distances(_wind(s)), [p])[p] == st.c_max]
        assert list(st.representatives) == sorted(attaining)[:3]
        assert st.count == len(attaining)


def _wind(s):
    from fullerene_wiener.spiral import wind_up

    return wind_up(s)


def test_merge_is_order_independent():
    n = 42
    pairs = list(DEFAULT_PAIRS)
    parts = [scan_spirals(iter_spirals(n, prefixes=[p]), pairs, 2)
             for p in partition_prefixes(n, depth=6)]
    fwd = PartialState.empty(pairs)
    for part in parts:
        fwd = fwd.merge(part, 2)
    rev = PartialState.empty(pairs)
    for part in reversed(parts):
        rev = rev.merge(part, 2)
    assert fwd == rev
    assert fwd == scan_spirals(iter_spirals(n), pairs, 2)


def test_pairstat_json_round_trip():
    row = survey_row(30)
    for st in row.stats.values():
        assert PairStat.from_json(json.loads(json.dumps(st.to_json()))) == st


def test_ipr_row_at_60(c60):
    row = survey_row(60, ipr=True)
    assert row.isomer_count == 1
    assert row.stats[(1, 1)].representatives == (canonical_spiral(c60),)


def test_emit_and_load(tmp_path):
    out = tmp_path / "results.jsonl"
    rows = [survey_row(n) for n in (24, 20)]
    assert emit_results(rows, out) == 12
    loaded = load_results(out)
    assert [r.n for r in loaded] == [20, 24]
    assert loaded == sorted(rows, key=lambda r: r.n)
    recs = load_records(out)
    assert [(r["n"], r["r"], r["s"]) for r in recs] == sorted((r["n"], r["r"], r["s"]) for r in recs)
    assert all(r["runtime_ms"] is not None and "key" in r for r in recs)


def test_emit_is_idempotent(tmp_path):
    out = tmp_path / "results.jsonl"
    row = survey_row(26)
    emit_results([row], out, timing=False)
    first = out.read_bytes()
    assert emit_results([row], out, timing=False) == 0
    assert out.read_bytes() == first
    assert all(r["runtime_ms"] is None for r in load_records(out))


def test_emit_unwritable(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(SinkUnavailable):
        emit_results([survey_row(20)], blocker / "results.jsonl")


def test_checkpoint_resume(tmp_path):
    n = 44
    path = tmp_path / "cp.json"
    pairs = list(DEFAULT_PAIRS)
    full = survey_row(n)
    prefixes = partition_prefixes(n)
    # simulate an interrupted run that finished only the first half
    cp = Checkpoint(path, pairs, 10)
    for p in prefixes[: len(prefixes) // 2]:
        cp.record(partition_key(n, False, p), scan_spirals(iter_spirals(n, prefixes=[p]), pairs))
    data = json.loads(path.read_text())
    assert data["format"] == "fullerene-wiener-checkpoint" and data["version"] == 1
    resumed = survey_row(n, checkpoint=Checkpoint(path, pairs, 10))
    assert resumed == full
    assert len(json.loads(path.read_text())["partitions"]) == len(prefixes)


def test_checkpoint_rejects_other_settings(tmp_path):
    path = tmp_path / "cp.json"
    Checkpoint(path, [(1, 1)], 10).record("all:20:5", PartialState.empty([(1, 1)]))
    with pytest.raises(ValueError):
        Checkpoint(path, [(1, 2)], 10)


def _row(n, ipr, values, pairs=((2, 2),)):
    return SurveyRow(n, ipr, 5, {p: PairStat(c, 1, ()) for p, c in zip(pairs, values)})


def test_verify_propositions_statuses():
    ns = list(range(60, 78, 2))
    c22 = {n: n - 1 for n in ns} | {64: 64, 72: 72, 74: 74, 76: 76}
    rows = [_row(n, False, [c22[n]]) for n in ns]
    (res,) = [r for r in verify_propositions(IrregularityFrontier.from_rows(rows))
              if r.clause.pairs == ((2, 2),)]
    assert res.status == CONFIRMED
    assert res.minimal[(2, 2)] == 64

    short = [r for r in rows if r.n <= 70]
    (res,) = [r for r in verify_propositions(IrregularityFrontier.from_rows(short))
              if r.clause.pairs == ((2, 2),)]
    assert res.status == OUT_OF_RANGE

    broken = [_row(n, False, [n if n == 66 else c22[n]]) for n in ns]
    (res,) = [r for r in verify_propositions(IrregularityFrontier.from_rows(broken))
              if r.clause.pairs == ((2, 2),)]
    assert res.status == REFUTED
    assert "66" in res.line()

    gap = [_row(n, False, [n - 1 if n == 74 else c22[n]]) for n in ns]
    (res,) = [r for r in verify_propositions(IrregularityFrontier.from_rows(gap))
              if r.clause.pairs == ((2, 2),)]
    assert res.status == REFUTED


def test_find_minimal_irregular_from_rows():
    rows = [_row(n, False, [n if n >= 64 else n - 3]) for n in range(60, 70, 2)]
    entry = find_minimal_irregular((2, 2), False, 68, rows=rows)
    assert entry.minimal == 64 and entry.counts[64] == 1
    assert find_minimal_irregular((2, 2), False, 62, rows=rows).minimal is None


def test_find_minimal_irregular_scan_stops():
    entry = find_minimal_irregular((1, 1), False, 30)
    assert entry.minimal is None
    assert entry.scanned == (20, 24, 26, 28, 30)
