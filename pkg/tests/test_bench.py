import math

from ocalign.bench import BenchRecord, bench, fit_slopes, records_to_csv, synthetic_suite
from ocalign.datasets import packaging_log, packaging_net


def _rec(i, e, o, t, status="ok", cost=0):
    return BenchRecord(i, e, o, cost, 0, 1, 1, status, t)


def test_fit_slopes_recovers_exponent():
    recs = [_rec(i, e, 2, math.exp(0.5 * e)) for i, e in enumerate(range(2, 10))]
    slopes = fit_slopes(recs)
    assert abs(slopes["events"] - 0.5) < 1e-9
    assert slopes["objects"] is None


def test_fit_slopes_ignores_censored():
    recs = [_rec(0, 2, 1, 1.0), _rec(1, 4, 2, math.e ** 2), _rec(2, 9, 9, 1e-9, status="censored")]
    assert abs(fit_slopes(recs)["events"] - 1.0) < 1e-9


def test_cost_slope_is_within_event_groups():
    recs = [_rec(0, 5, 2, math.exp(1), cost=0), _rec(1, 5, 2, math.exp(3), cost=2),
            _rec(2, 9, 2, math.exp(0), cost=4), _rec(3, 9, 2, math.exp(2), cost=6)]
    assert abs(fit_slopes(recs)["cost"] - 1.0) < 1e-9


def test_bench_csv(packaging):
    recs, _ = bench(packaging_log(), packaging_net())
    text = records_to_csv(recs, with_elapsed=False)
    assert text.splitlines()[0] == "execution,num_events,num_objects,visible_cost,silent_cost,expanded_states,generated_states,status"
    assert text.splitlines()[1].startswith("0,5,3,6,0,")
    assert "elapsed_s" in records_to_csv(recs)


def test_synthetic_suite_range():
    from ocalign.log import extract_process_executions

    log, _ = synthetic_suite()
    pxs = extract_process_executions(log)
    assert len(pxs) >= 20
    assert all(4 <= len(p.events) <= 12 and 2 <= len(p.objects) <= 5 for p in pxs)
    assert {len(p.objects) for p in pxs} >= {2, 3, 4, 5}
